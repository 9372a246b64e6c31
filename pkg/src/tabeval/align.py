"""Normalize cell values and assign parsed tables to expected table types.

Model output names tables only implicitly, through their headers. The
aligner matches each expected table type to the parsed candidate whose
header set overlaps it most, greedily and injectively, so downstream
metrics always compare one prediction against one gold table.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from .model import CellKind, CellValue, Table, TableSchema

# lowercase spellings a model commonly emits for an empty or unknown value
NULL_SYNONYMS = frozenset({"", "-", "n/a", "null", "none"})

_WHITESPACE_RUN = re.compile(r"\s+")
_INTEGER = re.compile(r"[+-]?\d+")


@dataclass(frozen=True)
class NormalizationConfig:
    """Which cell normalization steps run. All are on by default."""

    collapse_whitespace: bool = True
    strip_thousands_separators: bool = True
    map_null_synonyms: bool = True


DEFAULT_NORMALIZATION = NormalizationConfig()


def normalize_cell(
    raw: str,
    kind: CellKind,
    config: NormalizationConfig = DEFAULT_NORMALIZATION,
) -> CellValue:
    """Canonicalize one raw string cell.

    Both kinds strip, optionally collapse inner whitespace, and casefold.
    Integer-kind cells additionally map null synonyms to None and digit
    strings (optionally with comma separators) to int; anything else stays
    a string so mismatches remain visible to the metrics.
    """
    text = raw.strip()
    if config.collapse_whitespace:
        text = _WHITESPACE_RUN.sub(" ", text)
    text = text.casefold()
    if kind is CellKind.NULLABLE_INTEGER:
        if config.map_null_synonyms and text in NULL_SYNONYMS:
            return None
        digits = text.replace(",", "") if config.strip_thousands_separators else text
        if _INTEGER.fullmatch(digits):
            return int(digits)
    return text


def normalize_table(
    table: Table,
    kind: CellKind,
    config: NormalizationConfig = DEFAULT_NORMALIZATION,
) -> Table:
    """Normalize every cell of a table. Headers are left as-is.

    None cells stay None for integer tables and become the empty string for
    text tables; integer cells pass through integer tables unchanged.
    """
    rows = []
    for row in table.rows:
        cells: list[CellValue] = []
        for cell in row:
            if cell is None:
                cells.append(None if kind is CellKind.NULLABLE_INTEGER else "")
            elif isinstance(cell, str):
                cells.append(normalize_cell(cell, kind, config))
            elif kind is CellKind.NULLABLE_INTEGER:
                cells.append(cell)
            else:
                cells.append(normalize_cell(str(cell), kind, config))
        rows.append(cells)
    return Table(table.column_headers, rows, origin=table.origin)


def header_overlap_score(candidate: Table, schema: TableSchema) -> int:
    """How many schema headers appear among the candidate's headers.

    Comparison is case-insensitive on stripped header text; duplicates on
    either side count once.
    """
    have = {h.casefold() for h in candidate.column_headers}
    want = {h.casefold() for h in schema.column_headers}
    return len(have & want)


@dataclass(frozen=True)
class AssignmentResult:
    """Outcome of matching candidates to expected table types.

    ``assignments`` maps schema index to candidate index. ``missing`` lists
    schema indices left without a candidate; ``unassigned`` lists candidate
    indices left over. ``presence_rate`` is assigned schemas over expected
    schemas, and 1.0 when nothing was expected.
    """

    assignments: Mapping[int, int]
    missing: tuple[int, ...]
    unassigned: tuple[int, ...]
    presence_rate: float


def assign_tables(
    candidates: Sequence[Table],
    schemas: Sequence[TableSchema],
    *,
    candidate_first: bool = False,
) -> AssignmentResult:
    """Greedily assign parsed candidates to expected table types.

    In the default order each schema, in turn, claims the unclaimed
    candidate with the highest positive header overlap (earliest candidate
    wins ties). With ``candidate_first`` the roles flip: each candidate, in
    parse order, claims the best remaining schema. Zero-overlap pairs are
    never assigned.
    """
    scores = [
        [header_overlap_score(candidate, schema) for candidate in candidates]
        for schema in schemas
    ]
    assignments: dict[int, int] = {}
    if candidate_first:
        taken: set[int] = set()
        for ci in range(len(candidates)):
            best_si: Optional[int] = None
            best = 0
            for si in range(len(schemas)):
                if si in taken:
                    continue
                if scores[si][ci] > best:
                    best = scores[si][ci]
                    best_si = si
            if best_si is not None:
                taken.add(best_si)
                assignments[best_si] = ci
    else:
        used: set[int] = set()
        for si in range(len(schemas)):
            best_ci: Optional[int] = None
            best = 0
            for ci in range(len(candidates)):
                if ci in used:
                    continue
                if scores[si][ci] > best:
                    best = scores[si][ci]
                    best_ci = ci
            if best_ci is not None:
                used.add(best_ci)
                assignments[si] = best_ci
    missing = tuple(si for si in range(len(schemas)) if si not in assignments)
    unassigned = tuple(
        ci for ci in range(len(candidates)) if ci not in set(assignments.values())
    )
    presence = len(assignments) / len(schemas) if schemas else 1.0
    return AssignmentResult(
        assignments=dict(sorted(assignments.items())),
        missing=missing,
        unassigned=unassigned,
        presence_rate=presence,
    )
