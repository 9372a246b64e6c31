"""Tests for markdown table extraction and validation."""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tabeval import (
    ErrorClass,
    FailureKind,
    ParseFailure,
    Table,
    TableOrigin,
    classify_error,
    extract_candidates,
    parse_all,
    serialize_minimal_markdown,
    validate_candidate,
)

CELL = st.text(
    alphabet=st.characters(blacklist_characters="|\n", blacklist_categories=("Cs",)),
    min_size=1,
    max_size=8,
).filter(lambda s: s.strip())

PROSE_LINE = st.text(
    alphabet=st.characters(blacklist_characters="\n", blacklist_categories=("Cs",)),
    max_size=20,
).filter(lambda s: not s.lstrip().startswith("|"))


def test_extract_candidates_splits_on_prose_and_blank_lines():
    raw = "intro text\n|a|b|\n|---|---|\n|1|2|\n\n|c|\n|---|\nmore prose\n|x|y|"
    blocks = extract_candidates(raw)
    assert [block.lines for block in blocks] == [
        ("|a|b|", "|---|---|", "|1|2|"),
        ("|c|", "|---|"),
        ("|x|y|",),
    ]
    assert [block.start_line for block in blocks] == [1, 5, 8]


def test_extract_candidates_allows_indented_lines():
    blocks = extract_candidates("  |a|\n\t|---|\n |x|")
    assert len(blocks) == 1
    assert blocks[0].lines == ("  |a|", "\t|---|", " |x|")


def test_extract_candidates_empty_text():
    assert extract_candidates("") == []
    assert extract_candidates("just prose\nlines") == []


def _validate(text: str):
    blocks = extract_candidates(text)
    assert len(blocks) == 1
    return validate_candidate(blocks[0])


def test_valid_table_parses_with_origin():
    result = _validate("|a|b|\n|---|---|\n|1|2|\n|3|4|")
    assert isinstance(result, Table)
    assert result.origin is TableOrigin.PARSED_MARKDOWN
    assert result.column_headers == ("a", "b")
    assert result.rows == (("1", "2"), ("3", "4"))


def test_cells_are_stripped_and_empty_cells_kept():
    result = _validate("| a | b |\n| --- | --- |\n|  | x |")
    assert isinstance(result, Table)
    assert result.rows == (("", "x"),)


def test_too_few_rows_before_other_checks():
    # even a malformed single line fails the size check first
    result = _validate("|not even a header")
    assert isinstance(result, ParseFailure)
    assert result.kind is FailureKind.TOO_FEW_ROWS
    result = _validate("|a|b|\n|---|---|")
    assert isinstance(result, ParseFailure)
    assert result.kind is FailureKind.TOO_FEW_ROWS
    assert result.line_offset == 0


def test_invalid_header_not_pipe_terminated():
    result = _validate("|a|b\n|---|---|\n|1|2|")
    assert isinstance(result, ParseFailure)
    assert result.kind is FailureKind.INVALID_HEADER
    assert result.line_offset == 0


def test_invalid_header_empty_cell():
    result = _validate("|a||c|\n|---|---|---|\n|1|2|3|")
    assert isinstance(result, ParseFailure)
    assert result.kind is FailureKind.INVALID_HEADER


def test_invalid_separator_too_few_hyphens():
    result = _validate("|a|b|\n|--|---|\n|1|2|")
    assert isinstance(result, ParseFailure)
    assert result.kind is FailureKind.INVALID_SEPARATOR
    assert result.line_offset == 1


def test_invalid_separator_not_pipe_terminated():
    result = _validate("|a|b|\n|---|---\n|1|2|")
    assert isinstance(result, ParseFailure)
    assert result.kind is FailureKind.INVALID_SEPARATOR


def test_separator_accepts_colons_and_long_runs():
    result = _validate("|a|b|c|d|\n|:---|---:|:----:|------|\n|1|2|3|4|")
    assert isinstance(result, Table)


def test_separator_rejects_stray_characters():
    result = _validate("|a|b|\n|---|-x-|\n|1|2|")
    assert isinstance(result, ParseFailure)
    assert result.kind is FailureKind.INVALID_SEPARATOR


def test_separator_column_mismatch():
    result = _validate("|a|b|\n|---|---|---|\n|1|2|")
    assert isinstance(result, ParseFailure)
    assert result.kind is FailureKind.COLUMN_MISMATCH
    assert result.line_offset == 1


def test_data_row_not_pipe_delimited():
    result = _validate("|a|b|\n|---|---|\n|1|2|\n|3|4")
    assert isinstance(result, ParseFailure)
    assert result.kind is FailureKind.INVALID_DATA_ROW
    assert result.line_offset == 3


def test_data_row_column_mismatch():
    result = _validate("|a|b|\n|---|---|\n|1|2|3|")
    assert isinstance(result, ParseFailure)
    assert result.kind is FailureKind.COLUMN_MISMATCH
    assert result.line_offset == 2


def test_separator_lookalike_mid_table_is_data():
    result = _validate("|a|b|\n|---|---|\n|1|2|\n|---|---|\n|3|4|")
    assert isinstance(result, Table)
    assert result.rows == (("1", "2"), ("---", "---"), ("3", "4"))


def test_parse_all_recovers_tables_and_failures_in_order():
    raw = (
        "Here are results.\n"
        "|a|b|\n|---|---|\n|1|2|\n"
        "\n"
        "|bad|\n|--|\n|x|\n"
        "\n"
        "|c|d|\n|---|---|\n|5|6|\n"
    )
    tables, failures = parse_all(raw)
    assert [t.column_headers for t in tables] == [("a", "b"), ("c", "d")]
    assert len(failures) == 1
    assert failures[0].kind is FailureKind.INVALID_SEPARATOR
    assert failures[0].start_line == 5


def test_parse_all_one_bad_block_never_hides_neighbours():
    raw = "|x|\n\n|a|b|\n|---|---|\n|1|2|"
    tables, failures = parse_all(raw)
    assert len(tables) == 1
    assert len(failures) == 1


@pytest.mark.parametrize(
    "kind,expected",
    [
        (FailureKind.INVALID_HEADER, ErrorClass.INVALID_ROW),
        (FailureKind.INVALID_SEPARATOR, ErrorClass.INVALID_ROW),
        (FailureKind.INVALID_DATA_ROW, ErrorClass.INVALID_ROW),
        (FailureKind.TOO_FEW_ROWS, ErrorClass.TOO_FEW_ROWS),
        (FailureKind.COLUMN_MISMATCH, ErrorClass.COLUMN_MISMATCH),
    ],
)
def test_classify_error_collapses_row_failures(kind, expected):
    assert classify_error(ParseFailure(kind, 0, 0, "")) is expected


def test_serialize_matches_format_exactly():
    table = Table(["A", "B"], [[1, 2]])
    assert serialize_minimal_markdown(table) == "|A|B|\n|---|---|\n|1|2|"


def test_serialize_null_as_empty_and_integers_base_ten():
    table = Table(["a", "b", "c"], [[None, -42, "x"]])
    assert serialize_minimal_markdown(table) == "|a|b|c|\n|---|---|---|\n||-42|x|"


def test_serialize_zero_row_table_is_not_reparseable():
    text = serialize_minimal_markdown(Table(["a", "b"], []))
    assert text == "|a|b|\n|---|---|"
    tables, failures = parse_all(text)
    assert tables == []
    assert failures[0].kind is FailureKind.TOO_FEW_ROWS


@given(data=st.data())
def test_round_trip_identity(data):
    headers = data.draw(st.lists(CELL, min_size=1, max_size=5))
    rows = data.draw(
        st.lists(
            st.lists(CELL, min_size=len(headers), max_size=len(headers)),
            min_size=1,
            max_size=5,
        )
    )
    table = Table(headers, rows)
    tables, failures = parse_all(serialize_minimal_markdown(table))
    assert failures == []
    assert tables == [table]


@given(data=st.data())
def test_prose_wrapping_never_changes_the_recovered_tables(data):
    headers = data.draw(st.lists(CELL, min_size=1, max_size=4))
    rows = data.draw(
        st.lists(
            st.lists(CELL, min_size=len(headers), max_size=len(headers)),
            min_size=1,
            max_size=3,
        )
    )
    table = Table(headers, rows)
    before = data.draw(st.lists(PROSE_LINE, max_size=3))
    after = data.draw(st.lists(PROSE_LINE, max_size=3))
    raw = "\n".join([*before, serialize_minimal_markdown(table), *after])
    tables, _failures = parse_all(raw)
    assert tables == [table]
