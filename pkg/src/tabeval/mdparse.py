"""Recover markdown tables from free-form model output.

Parsing runs in two stages. First, every maximal run of consecutive lines
that start with a pipe (after left-stripping) becomes a candidate block.
Second, each block is validated independently: the header must be pipe
delimited with non-empty cells, the second line must be a separator row
with at least three hyphens per column, every following line must yield
the same number of cells as the header, and the block needs at least three
lines in total (header, separator, one data row). A block that fails any
check is reported as a failure with the offending line; it never aborts
the blocks around it.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass

from .model import CellValue, Table, TableOrigin

# at least three hyphens, optionally flanked by alignment colons
_SEPARATOR_CELL = re.compile(r":?-{3,}:?")


class FailureKind(enum.Enum):
    """Which validation check a candidate block failed."""

    INVALID_HEADER = "invalid_header"
    INVALID_SEPARATOR = "invalid_separator"
    INVALID_DATA_ROW = "invalid_data_row"
    COLUMN_MISMATCH = "column_mismatch"
    TOO_FEW_ROWS = "too_few_rows"


class ErrorClass(enum.Enum):
    """Coarse error classes used when reporting failure distributions.

    Header, separator, and data-row failures all present as one malformed
    row, so they are reported under a single class.
    """

    INVALID_ROW = "invalid_row"
    TOO_FEW_ROWS = "too_few_rows"
    COLUMN_MISMATCH = "column_mismatch"


@dataclass(frozen=True)
class CandidateBlock:
    """A maximal run of pipe-prefixed lines, prior to validation."""

    lines: tuple[str, ...]
    start_line: int  # 0-based offset of the first line in the source text


@dataclass(frozen=True)
class ParseFailure:
    """One rejected candidate block."""

    kind: FailureKind
    start_line: int  # source offset of the block
    line_offset: int  # offset of the offending line within the block
    detail: str


def extract_candidates(raw_text: str) -> list[CandidateBlock]:
    """Collect maximal runs of lines whose first non-blank character is a pipe.

    Lines are kept verbatim; prose between runs separates them into distinct
    candidates.
    """
    candidates: list[CandidateBlock] = []
    run: list[str] = []
    run_start = 0
    for lineno, line in enumerate(raw_text.split("\n")):
        if line.lstrip().startswith("|"):
            if not run:
                run_start = lineno
            run.append(line)
        elif run:
            candidates.append(CandidateBlock(tuple(run), run_start))
            run = []
    if run:
        candidates.append(CandidateBlock(tuple(run), run_start))
    return candidates


def _split_cells(line: str) -> list[str] | None:
    """Split one pipe-delimited line into stripped cells.

    Returns None when the line is not pipe delimited, i.e. it does not both
    start and end with a pipe with something in between.
    """
    stripped = line.strip()
    if len(stripped) < 2 or not stripped.startswith("|") or not stripped.endswith("|"):
        return None
    return [cell.strip() for cell in stripped[1:-1].split("|")]


def validate_candidate(block: CandidateBlock) -> Table | ParseFailure:
    """Run the validation checks against one candidate block.

    Returns a parsed ``Table`` on success, otherwise the first failure in
    check order: row count, header, separator, then per-line cell counts.
    """

    def fail(kind: FailureKind, offset: int, detail: str) -> ParseFailure:
        return ParseFailure(kind, block.start_line, offset, detail)

    if len(block.lines) < 3:
        return fail(
            FailureKind.TOO_FEW_ROWS,
            0,
            f"table needs header, separator, and at least one data row; got "
            f"{len(block.lines)} line(s)",
        )

    headers = _split_cells(block.lines[0])
    if headers is None:
        return fail(FailureKind.INVALID_HEADER, 0, "header row is not pipe delimited")
    if any(not h for h in headers):
        return fail(FailureKind.INVALID_HEADER, 0, "header row has an empty cell")

    separator = _split_cells(block.lines[1])
    if separator is None:
        return fail(FailureKind.INVALID_SEPARATOR, 1, "separator row is not pipe delimited")
    bad = next((cell for cell in separator if not _SEPARATOR_CELL.fullmatch(cell)), None)
    if bad is not None:
        return fail(
            FailureKind.INVALID_SEPARATOR,
            1,
            f"separator cell {bad!r} must be at least three hyphens, "
            "optionally flanked by colons",
        )
    if len(separator) != len(headers):
        return fail(
            FailureKind.COLUMN_MISMATCH,
            1,
            f"separator has {len(separator)} columns, header has {len(headers)}",
        )

    rows: list[list[CellValue]] = []
    for offset in range(2, len(block.lines)):
        cells = _split_cells(block.lines[offset])
        if cells is None:
            return fail(FailureKind.INVALID_DATA_ROW, offset, "data row is not pipe delimited")
        if len(cells) != len(headers):
            return fail(
                FailureKind.COLUMN_MISMATCH,
                offset,
                f"row has {len(cells)} cells, header has {len(headers)} columns",
            )
        rows.append(list(cells))
    return Table(headers, rows, origin=TableOrigin.PARSED_MARKDOWN)


def parse_all(raw_text: str) -> tuple[list[Table], list[ParseFailure]]:
    """Extract and validate every candidate block in the text.

    Tables and failures each preserve source order. One bad block never
    affects its neighbours.
    """
    tables: list[Table] = []
    failures: list[ParseFailure] = []
    for block in extract_candidates(raw_text):
        outcome = validate_candidate(block)
        if isinstance(outcome, Table):
            tables.append(outcome)
        else:
            failures.append(outcome)
    return tables, failures


def classify_error(failure: ParseFailure) -> ErrorClass:
    """Collapse the five failure kinds into the three reported error classes."""
    if failure.kind is FailureKind.TOO_FEW_ROWS:
        return ErrorClass.TOO_FEW_ROWS
    if failure.kind is FailureKind.COLUMN_MISMATCH:
        return ErrorClass.COLUMN_MISMATCH
    return ErrorClass.INVALID_ROW


def _cell_text(cell: CellValue) -> str:
    if cell is None:
        return ""
    return str(cell)


def serialize_minimal_markdown(table: Table) -> str:
    """Render a table in minimal markdown form.

    One line per row with no padding: ``|h1|h2|``, a separator of exactly
    three hyphens per column, then the data rows. Lines are joined with a
    single newline and there is no trailing newline. Null cells render as
    the empty string, integers in base 10.
    """
    lines = ["|" + "|".join(table.column_headers) + "|"]
    lines.append("|" + "|".join(["---"] * len(table.column_headers)) + "|")
    for row in table.rows:
        lines.append("|" + "|".join(_cell_text(cell) for cell in row) + "|")
    return "\n".join(lines)
