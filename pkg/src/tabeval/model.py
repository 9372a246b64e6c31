"""Core table data model shared by the parser, aligner, metrics, and harness.

A table is a rectangular grid of cells with one header row. Cells are
strings, integers, or null. Tables are immutable value objects: two tables
with the same headers and rows compare equal regardless of where they came
from.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

CellValue = Union[str, int, None]


class TableOrigin(enum.Enum):
    """Where a table came from. Informational only, never part of equality."""

    GOLD = "gold"
    PARSED_MARKDOWN = "parsed_markdown"
    PARSED_STRUCTURED = "parsed_structured"


class CellKind(enum.Enum):
    """Value domain of the non-header cells of a table type."""

    NULLABLE_INTEGER = "nullable_integer"
    TEXT = "text"


def _check_cell(value: object, where: str) -> CellValue:
    if value is None or isinstance(value, str):
        return value
    # bool is an int subclass but never a legal cell
    if isinstance(value, int) and not isinstance(value, bool):
        return value
    raise ValueError(f"{where}: cell must be str, int, or None, got {type(value).__name__}")


@dataclass(frozen=True)
class Table:
    """An immutable table: a header row plus zero or more data rows.

    Rows are data rows only; the header is not a row. Every row has exactly
    one cell per column header. String cells and headers are stripped of
    leading and trailing whitespace at construction.
    """

    column_headers: tuple[str, ...]
    rows: tuple[tuple[CellValue, ...], ...]
    origin: TableOrigin = field(default=TableOrigin.GOLD, compare=False)

    def __init__(
        self,
        column_headers: Sequence[str],
        rows: Sequence[Sequence[CellValue]] = (),
        origin: TableOrigin = TableOrigin.GOLD,
    ) -> None:
        headers = tuple(str(h).strip() for h in column_headers)
        if not headers:
            raise ValueError("Table: column_headers must be non-empty")
        if any(not h for h in headers):
            raise ValueError("Table: column headers must be non-empty strings")
        width = len(headers)
        clean_rows = []
        for i, row in enumerate(rows):
            cells = tuple(
                c.strip() if isinstance(c, str) else _check_cell(c, f"Table row {i}")
                for c in row
            )
            if len(cells) != width:
                raise ValueError(
                    f"Table: row {i} has {len(cells)} cells, expected {width}"
                )
            clean_rows.append(cells)
        object.__setattr__(self, "column_headers", headers)
        object.__setattr__(self, "rows", tuple(clean_rows))
        if not isinstance(origin, TableOrigin):
            raise ValueError(f"Table: origin must be a TableOrigin, got {origin!r}")
        object.__setattr__(self, "origin", origin)


@dataclass(frozen=True)
class TableSchema:
    """The expected layout of one table type within a dataset.

    ``row_header_values`` fixes the first-column values (and therefore the
    row count and order) for datasets where rows are keyed by an entity
    name. When absent, the row count is free.
    """

    table_id: str
    column_headers: tuple[str, ...]
    cell_kind: CellKind
    row_header_values: Optional[tuple[str, ...]] = None

    def __init__(
        self,
        table_id: str,
        column_headers: Sequence[str],
        cell_kind: CellKind,
        row_header_values: Optional[Sequence[str]] = None,
    ) -> None:
        table_id = str(table_id).strip()
        if not table_id:
            raise ValueError("TableSchema: table_id must be non-empty")
        headers = tuple(str(h).strip() for h in column_headers)
        if not headers or any(not h for h in headers):
            raise ValueError("TableSchema: column headers must be non-empty strings")
        folded = [h.casefold() for h in headers]
        if len(set(folded)) != len(folded):
            raise ValueError(
                f"TableSchema {table_id!r}: duplicate column headers after case folding"
            )
        if not isinstance(cell_kind, CellKind):
            raise ValueError(f"TableSchema: cell_kind must be a CellKind, got {cell_kind!r}")
        rh: Optional[tuple[str, ...]] = None
        if row_header_values is not None:
            rh = tuple(str(v).strip() for v in row_header_values)
            if not rh:
                raise ValueError(f"TableSchema {table_id!r}: row_header_values must be non-empty")
            if any(not v for v in rh):
                raise ValueError(f"TableSchema {table_id!r}: row header values must be non-empty")
            if len(set(rh)) != len(rh):
                raise ValueError(f"TableSchema {table_id!r}: duplicate row header values")
        object.__setattr__(self, "table_id", table_id)
        object.__setattr__(self, "column_headers", headers)
        object.__setattr__(self, "cell_kind", cell_kind)
        object.__setattr__(self, "row_header_values", rh)


def conforms(table: Table, schema: TableSchema) -> bool:
    """Whether a table structurally matches a schema.

    Headers must agree case-insensitively after stripping. When the schema
    fixes row header values, the table must have exactly those first-column
    values in order (again compared case-insensitively).
    """
    if len(table.column_headers) != len(schema.column_headers):
        return False
    for got, want in zip(table.column_headers, schema.column_headers):
        if got.casefold() != want.casefold():
            return False
    if schema.row_header_values is not None:
        if len(table.rows) != len(schema.row_header_values):
            return False
        for row, want in zip(table.rows, schema.row_header_values):
            cell = row[0]
            if not isinstance(cell, str) or cell.casefold() != want.casefold():
                return False
    return True


def table_shape(table: Table) -> tuple[int, int]:
    """(data row count, column count). The header row is not counted."""
    return len(table.rows), len(table.column_headers)


@dataclass(frozen=True)
class ExampleRecord:
    """One dataset example: an input text and its gold tables.

    Gold tables must conform to their schemas, and text-kind gold tables
    may only contain string cells.
    """

    example_id: str
    input_text: str
    gold_tables: tuple[tuple[TableSchema, Table], ...]

    def __init__(
        self,
        example_id: str,
        input_text: str,
        gold_tables: Sequence[tuple[TableSchema, Table]],
    ) -> None:
        example_id = str(example_id).strip()
        if not example_id:
            raise ValueError("ExampleRecord: example_id must be non-empty")
        pairs = tuple((schema, table) for schema, table in gold_tables)
        seen_ids = set()
        for schema, table in pairs:
            if schema.table_id in seen_ids:
                raise ValueError(
                    f"ExampleRecord {example_id!r}: duplicate table_id {schema.table_id!r}"
                )
            seen_ids.add(schema.table_id)
            if not conforms(table, schema):
                raise ValueError(
                    f"ExampleRecord {example_id!r}: gold table does not conform to "
                    f"schema {schema.table_id!r}"
                )
            if schema.cell_kind is CellKind.TEXT:
                for i, row in enumerate(table.rows):
                    for cell in row:
                        if not isinstance(cell, str):
                            raise ValueError(
                                f"ExampleRecord {example_id!r}: text table "
                                f"{schema.table_id!r} row {i} has a non-string cell"
                            )
        object.__setattr__(self, "example_id", example_id)
        object.__setattr__(self, "input_text", str(input_text))
        object.__setattr__(self, "gold_tables", pairs)
