"""Build JSON schemas for guided decoding and read the outputs back.

For each expected table the schema requires one JSON object. Tables with
fixed row header values become an object keyed by sanitized row names whose
values are per-row objects with one property per remaining column; tables
without row headers become a single flat object with one property per
column, encoding exactly one data row. Every property is required, no
additional properties are allowed anywhere, and each sanitized key keeps
its original header text in the ``title`` annotation so tables can be
reconstructed losslessly.
"""

from __future__ import annotations

import enum
import json
import re
from dataclasses import dataclass
from typing import Sequence

from .model import CellKind, CellValue, Table, TableOrigin, TableSchema, conforms

_JSON_SCHEMA_DIALECT = "https://json-schema.org/draft/2020-12/schema"

_NON_ALNUM = re.compile(r"[^0-9a-z]+")


class SchemaBuildError(ValueError):
    """Raised when a schema document cannot be built from the table layouts."""


class StructuredFailureKind(enum.Enum):
    MISSING_TABLE = "missing_table"
    BAD_CELL = "bad_cell"


@dataclass(frozen=True)
class StructuredFailure:
    """One problem found while reading structured output back into tables."""

    table_id: str
    kind: StructuredFailureKind
    detail: str


@dataclass(frozen=True)
class SchemaDocument:
    """A built guided-decoding schema plus the metadata to invert it."""

    json_schema_text: str
    key_title_map: dict[str, str]
    table_order: tuple[str, ...]

    def as_json(self) -> dict:
        return json.loads(self.json_schema_text)


def sanitize_key(header: str) -> str:
    """Turn a header into a snake_case JSON property key.

    Lowercases, replaces every non-alphanumeric run with one underscore,
    and trims leading/trailing underscores. A header with no alphanumeric
    characters at all cannot be keyed.
    """
    key = _NON_ALNUM.sub("_", header.casefold()).strip("_")
    if not key:
        raise SchemaBuildError(f"header {header!r} has no alphanumeric characters to key on")
    return key


def _cell_type(kind: CellKind) -> list[str]:
    if kind is CellKind.NULLABLE_INTEGER:
        return ["integer", "null"]
    return ["string", "null"]


class _KeyRegistry:
    """Tracks sanitized keys per namespace and the global key/title map."""

    def __init__(self) -> None:
        self.key_title_map: dict[str, str] = {}

    def register(self, namespace: dict, key: str, title: str, where: str) -> None:
        if key in namespace:
            raise SchemaBuildError(
                f"{where}: headers {namespace[key]!r} and {title!r} both sanitize to {key!r}"
            )
        namespace[key] = title
        known = self.key_title_map.get(key)
        if known is not None and known != title:
            raise SchemaBuildError(
                f"{where}: key {key!r} already maps to {known!r}, cannot remap to {title!r}"
            )
        self.key_title_map[key] = title


def build_schema(schemas: Sequence[TableSchema]) -> SchemaDocument:
    """Build one guided-decoding schema document covering all table layouts."""
    schemas = list(schemas)
    if not schemas:
        raise SchemaBuildError("cannot build a schema document from zero table layouts")
    seen_ids = set()
    for schema in schemas:
        if schema.table_id in seen_ids:
            raise SchemaBuildError(f"duplicate table_id {schema.table_id!r}")
        seen_ids.add(schema.table_id)

    registry = _KeyRegistry()
    properties: dict[str, dict] = {}
    for schema in schemas:
        cell_type = _cell_type(schema.cell_kind)
        if schema.row_header_values is not None:
            value_columns = schema.column_headers[1:]
            column_keys: dict[str, str] = {}
            column_props = {}
            for column in value_columns:
                key = sanitize_key(column)
                registry.register(column_keys, key, column, f"table {schema.table_id!r}")
                column_props[key] = {"type": cell_type, "title": column}
            row_keys: dict[str, str] = {}
            row_props = {}
            for name in schema.row_header_values:
                key = sanitize_key(name)
                registry.register(row_keys, key, name, f"table {schema.table_id!r}")
                row_props[key] = {
                    "type": "object",
                    "title": name,
                    "properties": dict(column_props),
                    "required": list(column_props),
                    "additionalProperties": False,
                }
            table_prop = {
                "type": "object",
                "properties": row_props,
                "required": list(row_props),
                "additionalProperties": False,
            }
        else:
            column_keys = {}
            column_props = {}
            for column in schema.column_headers:
                key = sanitize_key(column)
                registry.register(column_keys, key, column, f"table {schema.table_id!r}")
                column_props[key] = {"type": cell_type, "title": column}
            table_prop = {
                "type": "object",
                "properties": column_props,
                "required": list(column_props),
                "additionalProperties": False,
            }
        properties[schema.table_id] = table_prop

    document = {
        "$schema": _JSON_SCHEMA_DIALECT,
        "type": "object",
        "properties": properties,
        "required": [schema.table_id for schema in schemas],
        "additionalProperties": False,
    }
    return SchemaDocument(
        json_schema_text=json.dumps(document, ensure_ascii=False),
        key_title_map=registry.key_title_map,
        table_order=tuple(schema.table_id for schema in schemas),
    )


def table_to_instance(table: Table, schema: TableSchema) -> dict:
    """Render a gold table as the JSON instance the built schema describes.

    The table must conform to the schema; integer-kind value cells must
    already be integers or null.
    """
    if not conforms(table, schema):
        raise ValueError(f"table does not conform to schema {schema.table_id!r}")

    def cell_value(cell: CellValue, where: str) -> CellValue:
        if schema.cell_kind is CellKind.NULLABLE_INTEGER:
            if cell is None or isinstance(cell, int):
                return cell
            raise ValueError(f"{where}: integer table has non-integer cell {cell!r}")
        return "" if cell is None else str(cell)

    if schema.row_header_values is not None:
        value_columns = schema.column_headers[1:]
        instance: dict = {}
        for name, row in zip(schema.row_header_values, table.rows):
            row_obj = {}
            for column, cell in zip(value_columns, row[1:]):
                row_obj[sanitize_key(column)] = cell_value(
                    cell, f"table {schema.table_id!r} row {name!r}"
                )
            instance[sanitize_key(name)] = row_obj
        return instance
    if len(table.rows) != 1:
        raise ValueError(
            f"table {schema.table_id!r} without row headers must have exactly one "
            f"data row to encode as an instance, got {len(table.rows)}"
        )
    return {
        sanitize_key(column): cell_value(cell, f"table {schema.table_id!r}")
        for column, cell in zip(schema.column_headers, table.rows[0])
    }


def _coerce_cell(
    value: object,
    kind: CellKind,
    table_id: str,
    where: str,
    failures: list[StructuredFailure],
) -> CellValue:
    if value is None:
        return None
    if kind is CellKind.NULLABLE_INTEGER:
        if isinstance(value, int) and not isinstance(value, bool):
            return value
    else:
        if isinstance(value, str):
            return value
    failures.append(
        StructuredFailure(
            table_id,
            StructuredFailureKind.BAD_CELL,
            f"{where}: unexpected value {value!r}",
        )
    )
    return None


def parse_structured_output(
    json_text: str,
    document: SchemaDocument,
    schemas: Sequence[TableSchema],
) -> tuple[list[Table], list[StructuredFailure]]:
    """Read guided-decoding output back into tables.

    Reconstruction is tolerant: a missing or malformed table is reported as
    a failure, a cell with the wrong type is reported and becomes null, and
    the remaining tables are still returned. Headers and row names come
    from the schema document's key/title map, so reconstructed tables carry
    the original header text.
    """
    failures: list[StructuredFailure] = []

    def title(key: str, fallback: str) -> str:
        return document.key_title_map.get(key, fallback)

    try:
        data = json.loads(json_text)
    except json.JSONDecodeError as exc:
        data = None
        detail = f"output is not valid JSON: {exc}"
    else:
        detail = "output is not a JSON object"
    if not isinstance(data, dict):
        for schema in schemas:
            failures.append(
                StructuredFailure(schema.table_id, StructuredFailureKind.MISSING_TABLE, detail)
            )
        return [], failures

    tables: list[Table] = []
    for schema in schemas:
        obj = data.get(schema.table_id)
        if not isinstance(obj, dict):
            missing = "absent" if schema.table_id not in data else f"not an object: {obj!r}"
            failures.append(
                StructuredFailure(
                    schema.table_id,
                    StructuredFailureKind.MISSING_TABLE,
                    f"table entry is {missing}",
                )
            )
            continue
        headers = [
            title(sanitize_key(column), column) for column in schema.column_headers
        ]
        rows: list[list[CellValue]] = []
        if schema.row_header_values is not None:
            value_columns = schema.column_headers[1:]
            for name in schema.row_header_values:
                row_key = sanitize_key(name)
                row_obj = obj.get(row_key)
                row: list[CellValue] = [title(row_key, name)]
                if not isinstance(row_obj, dict):
                    failures.append(
                        StructuredFailure(
                            schema.table_id,
                            StructuredFailureKind.BAD_CELL,
                            f"row {row_key!r} is missing or not an object",
                        )
                    )
                    row.extend([None] * len(value_columns))
                else:
                    for column in value_columns:
                        key = sanitize_key(column)
                        if key not in row_obj:
                            failures.append(
                                StructuredFailure(
                                    schema.table_id,
                                    StructuredFailureKind.BAD_CELL,
                                    f"row {row_key!r} is missing property {key!r}",
                                )
                            )
                            row.append(None)
                        else:
                            row.append(
                                _coerce_cell(
                                    row_obj[key],
                                    schema.cell_kind,
                                    schema.table_id,
                                    f"row {row_key!r} property {key!r}",
                                    failures,
                                )
                            )
                rows.append(row)
        else:
            row = []
            for column in schema.column_headers:
                key = sanitize_key(column)
                if key not in obj:
                    failures.append(
                        StructuredFailure(
                            schema.table_id,
                            StructuredFailureKind.BAD_CELL,
                            f"missing property {key!r}",
                        )
                    )
                    row.append(None)
                else:
                    row.append(
                        _coerce_cell(
                            obj[key],
                            schema.cell_kind,
                            schema.table_id,
                            f"property {key!r}",
                            failures,
                        )
                    )
            rows.append(row)
        tables.append(Table(headers, rows, origin=TableOrigin.PARSED_STRUCTURED))
    return tables, failures
