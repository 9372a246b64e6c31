"""Shared builders for records, dataset files, and transcripts."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Sequence

from tabeval import (
    CellKind,
    ExampleRecord,
    Table,
    TableSchema,
    serialize_minimal_markdown,
    table_to_instance,
)


def numeric_record(example_id: str = "ex-0", base: int = 0) -> ExampleRecord:
    """A two-table example shaped like a game summary, integer cells."""
    team_schema = TableSchema(
        "team",
        ["Team", "Wins", "Losses", "Total Points"],
        CellKind.NULLABLE_INTEGER,
        row_header_values=["Hawks", "Magic"],
    )
    team = Table(
        ["Team", "Wins", "Losses", "Total Points"],
        [
            ["Hawks", 10 + base, 2, 104 + base],
            ["Magic", 3, 9 + base, None],
        ],
    )
    player_schema = TableSchema(
        "player",
        ["Player", "Points", "Assists", "Rebounds"],
        CellKind.NULLABLE_INTEGER,
        row_header_values=["John Smith", "Bo Chen", "Alan Ray"],
    )
    player = Table(
        ["Player", "Points", "Assists", "Rebounds"],
        [
            ["John Smith", 22 + base, 7, 3],
            ["Bo Chen", 13, None, 8 + base],
            ["Alan Ray", 5, 2, None],
        ],
    )
    return ExampleRecord(
        example_id,
        f"The Hawks beat the Magic {104 + base} to 98. John Smith scored "
        f"{22 + base} points with 7 assists.",
        [(team_schema, team), (player_schema, player)],
    )


def text_record(example_id: str = "ex-t0") -> ExampleRecord:
    """A one-table example shaped like a restaurant description, text cells."""
    headers = ["name", "eatType", "food", "priceRange", "area"]
    schema = TableSchema("restaurant", headers, CellKind.TEXT)
    table = Table(headers, [["The Vaults", "pub", "Japanese", "high", "riverside"]])
    return ExampleRecord(
        example_id,
        "The Vaults is a high priced Japanese pub by the riverside.",
        [(schema, table)],
    )


def record_json(record: ExampleRecord) -> dict:
    return {
        "example_id": record.example_id,
        "input_text": record.input_text,
        "gold_tables": [
            {
                "table_id": schema.table_id,
                "column_headers": list(schema.column_headers),
                "cell_kind": schema.cell_kind.value,
                "row_header_values": (
                    list(schema.row_header_values)
                    if schema.row_header_values is not None
                    else None
                ),
                "rows": [list(row) for row in table.rows],
            }
            for schema, table in record.gold_tables
        ],
    }


def write_dataset(path: Path, records: Sequence[ExampleRecord]) -> Path:
    lines = [json.dumps(record_json(record), ensure_ascii=False) for record in records]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def gold_markdown(record: ExampleRecord) -> str:
    """All gold tables of a record, serialized and blank-line separated."""
    return "\n\n".join(
        serialize_minimal_markdown(table) for _, table in record.gold_tables
    )


def gold_structured_text(record: ExampleRecord) -> str:
    """All gold tables of a record as one guided-decoding JSON instance."""
    payload = {
        schema.table_id: table_to_instance(table, schema)
        for schema, table in record.gold_tables
    }
    return json.dumps(payload, ensure_ascii=False)


def write_raw_transcript(
    path: Path, outputs: Sequence[tuple[str, str]], mode: str
) -> Path:
    """Write a transcript of plain successful generations."""
    lines = [
        json.dumps(
            {
                "example_id": example_id,
                "mode": mode,
                "raw_text": raw_text,
                "error": None,
                "usage": None,
                "latency_s": None,
            },
            ensure_ascii=False,
        )
        for example_id, raw_text in outputs
    ]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path
