"""Score predicted tables against gold tables.

All functions assume the pair has already been aligned (one prediction per
gold table) and normalized. Cells are compared positionally over the union
of the two shapes, rows as multisets, and whole tables both exactly and as
serialized strings. Header rows never participate in any score.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass
from statistics import fmean
from typing import Optional, Sequence

from .mdparse import ErrorClass, ParseFailure, classify_error, serialize_minimal_markdown
from .model import CellKind, CellValue, Table, table_shape

_TOKEN_SPLIT = re.compile(r"[\s|]+")


def _cell_text(cell: CellValue) -> str:
    if cell is None:
        return ""
    return str(cell)


def _f1(tp: int, fp: int, fn: int) -> float:
    if tp + fp + fn == 0:
        return 1.0
    return 2 * tp / (2 * tp + fp + fn)


def _lev_dist(a: str, b: str) -> int:
    if a == b:
        return 0
    # shared prefix and suffix never change the distance
    lo = 0
    hi_a, hi_b = len(a), len(b)
    while lo < hi_a and lo < hi_b and a[lo] == b[lo]:
        lo += 1
    while hi_a > lo and hi_b > lo and a[hi_a - 1] == b[hi_b - 1]:
        hi_a -= 1
        hi_b -= 1
    a, b = a[lo:hi_a], b[lo:hi_b]
    if not a:
        return len(b)
    if not b:
        return len(a)
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i] + [0] * len(b)
        for j, cb in enumerate(b, start=1):
            cost = 0 if ca == cb else 1
            current[j] = min(previous[j] + 1, current[j - 1] + 1, previous[j - 1] + cost)
        previous = current
    return previous[-1]


def levenshtein_ratio(a: str, b: str) -> float:
    """Similarity in [0, 1]: one minus edit distance over the longer length.

    Two empty strings are identical, so the ratio is 1.0.
    """
    longest = max(len(a), len(b))
    if longest == 0:
        return 1.0
    return 1.0 - _lev_dist(a, b) / longest


def _tokenize(text: str) -> list[str]:
    return [token for token in _TOKEN_SPLIT.split(text) if token]


def _lcs_len(a: Sequence[str], b: Sequence[str]) -> int:
    if not a or not b:
        return 0
    previous = [0] * (len(b) + 1)
    for ca in a:
        current = [0] * (len(b) + 1)
        for j, cb in enumerate(b, start=1):
            if ca == cb:
                current[j] = previous[j - 1] + 1
            else:
                current[j] = max(previous[j], current[j - 1])
        previous = current
    return previous[-1]


def rouge_l(pred_text: str, gold_text: str) -> float:
    """Longest-common-subsequence F measure over tokens.

    Tokens are maximal runs of characters other than whitespace and pipes,
    so serialized tables tokenize into their cell words. Two empty token
    sequences score 1.0; one empty side scores 0.0.
    """
    pred_tokens = _tokenize(pred_text)
    gold_tokens = _tokenize(gold_text)
    if not pred_tokens and not gold_tokens:
        return 1.0
    if not pred_tokens or not gold_tokens:
        return 0.0
    lcs = _lcs_len(pred_tokens, gold_tokens)
    if lcs == 0:
        return 0.0
    precision = lcs / len(pred_tokens)
    recall = lcs / len(gold_tokens)
    return 2 * precision * recall / (precision + recall)


def cell_metrics(pred: Table, gold: Table) -> tuple[int, int, int, float]:
    """Positional cell precision/recall counts and F1.

    Positions range over the union of the two shapes. A non-null predicted
    cell where gold is null or absent is a false positive; a non-null gold
    cell that the prediction misses, nulls, or gets wrong is a false
    negative (a wrong value is never additionally a false positive). Null
    against null contributes nothing.
    """
    pred_rows, pred_cols = table_shape(pred)
    gold_rows, gold_cols = table_shape(gold)
    tp = fp = fn = 0
    for i in range(max(pred_rows, gold_rows)):
        for j in range(max(pred_cols, gold_cols)):
            in_pred = i < pred_rows and j < pred_cols
            in_gold = i < gold_rows and j < gold_cols
            if not in_pred and not in_gold:
                continue
            g = gold.rows[i][j] if in_gold else None
            p = pred.rows[i][j] if in_pred else None
            if g is None:
                if in_pred and p is not None:
                    fp += 1
            elif in_pred and p == g:
                tp += 1
            else:
                fn += 1
    return tp, fp, fn, _f1(tp, fp, fn)


def positional_cell_levenshtein(pred: Table, gold: Table) -> float:
    """Mean per-cell Levenshtein ratio over the union of the two shapes.

    Absent and null cells both read as the empty string. Two empty tables
    have no positions and score 1.0.
    """
    pred_rows, pred_cols = table_shape(pred)
    gold_rows, gold_cols = table_shape(gold)
    total = 0.0
    count = 0
    for i in range(max(pred_rows, gold_rows)):
        for j in range(max(pred_cols, gold_cols)):
            in_pred = i < pred_rows and j < pred_cols
            in_gold = i < gold_rows and j < gold_cols
            if not in_pred and not in_gold:
                continue
            p = pred.rows[i][j] if in_pred else None
            g = gold.rows[i][j] if in_gold else None
            total += levenshtein_ratio(_cell_text(p), _cell_text(g))
            count += 1
    if count == 0:
        return 1.0
    return total / count


def row_metrics(pred: Table, gold: Table) -> tuple[int, int, int, float]:
    """Whole-row multiset matching: counts and F1.

    A predicted row is a true positive when an identical gold row is still
    unmatched; duplicate rows must be matched one-for-one.
    """
    pred_counts = Counter(pred.rows)
    gold_counts = Counter(gold.rows)
    tp = sum((pred_counts & gold_counts).values())
    fp = len(pred.rows) - tp
    fn = len(gold.rows) - tp
    return tp, fp, fn, _f1(tp, fp, fn)


def table_exact(pred: Table, gold: Table) -> bool:
    """Same shape and identical cells everywhere."""
    return table_shape(pred) == table_shape(gold) and pred.rows == gold.rows


def _data_lines(table: Table) -> str:
    # serialized form minus the header and separator lines
    return "\n".join(serialize_minimal_markdown(table).split("\n")[2:])


def table_string_metrics(pred: Table, gold: Table) -> tuple[float, float]:
    """(Levenshtein ratio, LCS F measure) over the serialized data rows.

    Both tables are rendered in minimal markdown with the header and
    separator lines dropped, so headers never influence either score.
    """
    pred_text = _data_lines(pred)
    gold_text = _data_lines(gold)
    return levenshtein_ratio(pred_text, gold_text), rouge_l(pred_text, gold_text)


def _squared_errors(pred: Table, gold: Table) -> tuple[float, int]:
    pred_rows, pred_cols = table_shape(pred)
    gold_rows, gold_cols = table_shape(gold)
    total = 0.0
    count = 0
    for i in range(gold_rows):
        for j in range(gold_cols):
            g = gold.rows[i][j]
            if not isinstance(g, int) or isinstance(g, bool):
                continue
            p = pred.rows[i][j] if i < pred_rows and j < pred_cols else None
            if isinstance(p, int) and not isinstance(p, bool):
                diff = p - g
                total += diff * diff
                count += 1
    return total, count


def rmse(pred: Table, gold: Table) -> tuple[Optional[float], int]:
    """Root mean squared error over positions where both cells are integers.

    Returns ``(None, 0)`` when no position qualifies, so text tables and
    all-null pairs never fake a numeric score.
    """
    total, count = _squared_errors(pred, gold)
    if count == 0:
        return None, 0
    return math.sqrt(total / count), count


@dataclass(frozen=True)
class PairScores:
    """Every score for one aligned (prediction, gold) table pair."""

    cell_tp: int
    cell_fp: int
    cell_fn: int
    cell_f1: float
    cell_levenshtein: float
    row_tp: int
    row_fp: int
    row_fn: int
    row_f1: float
    table_exact: bool
    table_levenshtein: float
    table_rouge_l: float
    rmse: Optional[float]
    rmse_pair_count: int
    rmse_squared_error_sum: float


def score_pair(pred: Table, gold: Table, kind: CellKind) -> PairScores:
    """Compute all pair scores at once. Expects normalized tables.

    The numeric error is only attempted for integer-kind tables; the other
    scores are kind independent once cells are normalized.
    """
    cell_tp, cell_fp, cell_fn, cell_f1 = cell_metrics(pred, gold)
    row_tp, row_fp, row_fn, row_f1 = row_metrics(pred, gold)
    table_lev, table_rouge = table_string_metrics(pred, gold)
    if kind is CellKind.NULLABLE_INTEGER:
        sq_sum, pair_count = _squared_errors(pred, gold)
        rmse_value = math.sqrt(sq_sum / pair_count) if pair_count else None
    else:
        sq_sum, pair_count, rmse_value = 0.0, 0, None
    return PairScores(
        cell_tp=cell_tp,
        cell_fp=cell_fp,
        cell_fn=cell_fn,
        cell_f1=cell_f1,
        cell_levenshtein=positional_cell_levenshtein(pred, gold),
        row_tp=row_tp,
        row_fp=row_fp,
        row_fn=row_fn,
        row_f1=row_f1,
        table_exact=table_exact(pred, gold),
        table_levenshtein=table_lev,
        table_rouge_l=table_rouge,
        rmse=rmse_value,
        rmse_pair_count=pair_count,
        rmse_squared_error_sum=sq_sum,
    )


@dataclass(frozen=True)
class PairOutcome:
    """One expected table of one example: either scored or missing."""

    example_id: str
    table_id: str
    present: bool
    scores: Optional[PairScores] = None

    def __post_init__(self) -> None:
        if self.present and self.scores is None:
            raise ValueError("present outcome needs scores")
        if not self.present and self.scores is not None:
            raise ValueError("missing outcome cannot carry scores")


_MEAN_FIELDS = (
    "cell_tp",
    "cell_fp",
    "cell_fn",
    "cell_f1",
    "cell_levenshtein",
    "row_tp",
    "row_fp",
    "row_fn",
    "row_f1",
    "table_exact",
    "table_levenshtein",
    "table_rouge_l",
)


@dataclass(frozen=True)
class TypeReport:
    """Presence and mean scores for one table type (or the overall pool)."""

    expected: int
    present: int
    presence_rate: float
    means: Optional[dict[str, float]]
    rmse: Optional[float]
    rmse_pairs: int


@dataclass(frozen=True)
class EvaluationReport:
    """Aggregated scores for one evaluation run."""

    examples_total: int
    examples_with_missing_tables: int
    failed_generation_examples: int
    overall: TypeReport
    per_type: dict[str, TypeReport]
    error_distribution: dict[str, int]

    def to_dict(self) -> dict:
        """JSON-ready form. Missing metric sections render as empty objects."""

        def type_dict(report: TypeReport) -> dict:
            metrics: dict = {}
            if report.means is not None:
                metrics = dict(report.means)
                metrics["rmse"] = report.rmse
                metrics["rmse_pairs"] = report.rmse_pairs
            return {
                "expected": report.expected,
                "present": report.present,
                "presence_rate": report.presence_rate,
                "metrics": metrics,
            }

        return {
            "examples_total": self.examples_total,
            "examples_with_missing_tables": self.examples_with_missing_tables,
            "failed_generation_examples": self.failed_generation_examples,
            "overall": type_dict(self.overall),
            "per_type": {tid: type_dict(rep) for tid, rep in self.per_type.items()},
            "error_distribution": dict(self.error_distribution),
        }


def _build_type_report(
    outcomes: Sequence[PairOutcome], rmse_mode: str
) -> TypeReport:
    expected = len(outcomes)
    present_scores = [o.scores for o in outcomes if o.present and o.scores is not None]
    present = len(present_scores)
    rate = present / expected if expected else 1.0
    if not present_scores:
        return TypeReport(expected, present, rate, None, None, 0)
    means = {
        name: fmean(float(getattr(s, name)) for s in present_scores)
        for name in _MEAN_FIELDS
    }
    pair_total = sum(s.rmse_pair_count for s in present_scores)
    if rmse_mode == "micro":
        sq_total = sum(s.rmse_squared_error_sum for s in present_scores)
        rmse_value = math.sqrt(sq_total / pair_total) if pair_total else None
    else:
        values = [s.rmse for s in present_scores if s.rmse is not None]
        rmse_value = fmean(values) if values else None
    return TypeReport(expected, present, rate, means, rmse_value, pair_total)


def aggregate(
    outcomes: Sequence[PairOutcome],
    *,
    parse_failures: Sequence[ParseFailure] = (),
    examples_total: Optional[int] = None,
    failed_generation_examples: int = 0,
    rmse_mode: str = "micro",
) -> EvaluationReport:
    """Fold pair outcomes into one report.

    ``rmse_mode`` selects numeric error pooling: ``micro`` pools squared
    errors across pairs before the root, ``macro`` averages per-pair RMSE
    values. Means cover present pairs only; presence is reported alongside
    so absent tables are never silently dropped.
    """
    if rmse_mode not in ("micro", "macro"):
        raise ValueError(f"rmse_mode must be 'micro' or 'macro', got {rmse_mode!r}")
    outcomes = list(outcomes)
    if examples_total is None:
        examples_total = len({o.example_id for o in outcomes})
    missing_examples = len({o.example_id for o in outcomes if not o.present})
    per_type = {
        table_id: _build_type_report(
            [o for o in outcomes if o.table_id == table_id], rmse_mode
        )
        for table_id in sorted({o.table_id for o in outcomes})
    }
    distribution = Counter(classify_error(f).value for f in parse_failures)
    return EvaluationReport(
        examples_total=examples_total,
        examples_with_missing_tables=missing_examples,
        failed_generation_examples=failed_generation_examples,
        overall=_build_type_report(outcomes, rmse_mode),
        per_type=per_type,
        error_distribution={cls.value: distribution.get(cls.value, 0) for cls in ErrorClass},
    )
