"""Dataset loading, evaluation runs, and source-format converters.

A dataset is a JSON-lines file of examples; each example names its input
text and the gold tables it should yield. A run turns a dataset plus a
mode into a report directory: generation happens live against an endpoint
or is replayed from a transcript, outputs are parsed, aligned, normalized,
and scored, and the aggregated report is written deterministically so two
runs over the same inputs produce byte-identical files.
"""

from __future__ import annotations

import csv
import enum
import json
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Union

from .align import (
    DEFAULT_NORMALIZATION,
    NormalizationConfig,
    assign_tables,
    normalize_table,
)
from .client import (
    ContextOverflowError,
    EndpointError,
    Exemplar,
    GenerationConfig,
    GenerationResult,
    LLMClient,
    TokenUsage,
    build_freeform_prompt,
    build_guided_prompt,
)
from .mdparse import ParseFailure, parse_all
from .metrics import EvaluationReport, PairOutcome, aggregate, score_pair
from .model import CellKind, CellValue, ExampleRecord, Table, TableSchema, table_shape
from .schema import (
    SchemaDocument,
    StructuredFailureKind,
    build_schema,
    parse_structured_output,
)


class DatasetError(Exception):
    """A dataset, exemplar, or converter input could not be read."""


class TranscriptError(DatasetError):
    """A transcript file could not be read or does not cover the dataset."""


class RunMode(enum.Enum):
    UNSTRUCTURED = "unstructured"
    STRUCTURED = "structured"
    REPLAY_UNSTRUCTURED = "replay_unstructured"
    REPLAY_STRUCTURED = "replay_structured"

    @property
    def replay(self) -> bool:
        return self in (RunMode.REPLAY_UNSTRUCTURED, RunMode.REPLAY_STRUCTURED)

    @property
    def structured(self) -> bool:
        return self in (RunMode.STRUCTURED, RunMode.REPLAY_STRUCTURED)


_CELL_KINDS = {kind.value: kind for kind in CellKind}


def _load_cell(value: object, where: str) -> CellValue:
    if value is None or isinstance(value, str):
        return value
    if isinstance(value, int) and not isinstance(value, bool):
        return value
    raise DatasetError(f"{where}: cell must be a string, integer, or null, got {value!r}")


def _load_gold_table(obj: object, where: str) -> tuple[TableSchema, Table]:
    if not isinstance(obj, dict):
        raise DatasetError(f"{where}: gold table entry must be an object")
    for key in ("table_id", "column_headers", "cell_kind", "rows"):
        if key not in obj:
            raise DatasetError(f"{where}: gold table entry is missing {key!r}")
    kind_name = obj["cell_kind"]
    if kind_name not in _CELL_KINDS:
        raise DatasetError(
            f"{where}: cell_kind must be one of {sorted(_CELL_KINDS)}, got {kind_name!r}"
        )
    headers = obj["column_headers"]
    if not isinstance(headers, list) or not all(isinstance(h, str) for h in headers):
        raise DatasetError(f"{where}: column_headers must be a list of strings")
    row_headers = obj.get("row_header_values")
    if row_headers is not None and (
        not isinstance(row_headers, list)
        or not all(isinstance(v, str) for v in row_headers)
    ):
        raise DatasetError(f"{where}: row_header_values must be a list of strings or null")
    raw_rows = obj["rows"]
    if not isinstance(raw_rows, list) or not all(isinstance(r, list) for r in raw_rows):
        raise DatasetError(f"{where}: rows must be a list of lists")
    rows = [
        [_load_cell(cell, f"{where} row {i}") for cell in row]
        for i, row in enumerate(raw_rows)
    ]
    try:
        schema = TableSchema(
            table_id=obj["table_id"],
            column_headers=headers,
            cell_kind=_CELL_KINDS[kind_name],
            row_header_values=row_headers,
        )
        table = Table(headers, rows)
    except ValueError as exc:
        raise DatasetError(f"{where}: {exc}") from exc
    return schema, table


def ingest(path: Union[str, Path]) -> list[ExampleRecord]:
    """Load and validate a JSON-lines dataset.

    Every problem is reported with its line number. An unreadable file, a
    malformed line, a malformed example, a duplicate example id, or an
    empty dataset all raise DatasetError.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DatasetError(f"cannot read dataset {path}: {exc}") from exc
    records: list[ExampleRecord] = []
    seen: dict[str, int] = {}
    for lineno, line in enumerate(text.split("\n"), start=1):
        if not line.strip():
            continue
        where = f"{path.name}:{lineno}"
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise DatasetError(f"{where}: invalid JSON: {exc}") from exc
        if not isinstance(obj, dict):
            raise DatasetError(f"{where}: example must be a JSON object")
        for key in ("example_id", "input_text", "gold_tables"):
            if key not in obj:
                raise DatasetError(f"{where}: example is missing {key!r}")
        if not isinstance(obj["example_id"], str):
            raise DatasetError(f"{where}: example_id must be a string")
        if not isinstance(obj["input_text"], str):
            raise DatasetError(f"{where}: input_text must be a string")
        if not isinstance(obj["gold_tables"], list) or not obj["gold_tables"]:
            raise DatasetError(f"{where}: gold_tables must be a non-empty list")
        pairs = [
            _load_gold_table(entry, f"{where} gold_tables[{i}]")
            for i, entry in enumerate(obj["gold_tables"])
        ]
        try:
            record = ExampleRecord(obj["example_id"], obj["input_text"], pairs)
        except ValueError as exc:
            raise DatasetError(f"{where}: {exc}") from exc
        if record.example_id in seen:
            raise DatasetError(
                f"{where}: duplicate example_id {record.example_id!r} "
                f"(first seen on line {seen[record.example_id]})"
            )
        seen[record.example_id] = lineno
        records.append(record)
    if not records:
        raise DatasetError(f"dataset {path} contains no examples")
    return records


@dataclass(frozen=True)
class TableTypeStats:
    count: int
    rows_min: int
    rows_max: int
    rows_mean: float
    cols_min: int
    cols_max: int
    cols_mean: float


@dataclass(frozen=True)
class DatasetStats:
    """Size and shape statistics for a loaded dataset."""

    examples: int
    words_min: int
    words_max: int
    words_mean: float
    per_type: dict[str, TableTypeStats]

    def to_dict(self) -> dict:
        return {
            "examples": self.examples,
            "words": {
                "min": self.words_min,
                "max": self.words_max,
                "mean": self.words_mean,
            },
            "per_type": {
                table_id: {
                    "count": st.count,
                    "rows": {"min": st.rows_min, "max": st.rows_max, "mean": st.rows_mean},
                    "cols": {"min": st.cols_min, "max": st.cols_max, "mean": st.cols_mean},
                }
                for table_id, st in self.per_type.items()
            },
        }


def describe(records: Sequence[ExampleRecord]) -> DatasetStats:
    """Word counts of the inputs and shape statistics of the gold tables.

    Words are whitespace-separated chunks of the input text; table shapes
    count data rows only, headers excluded.
    """
    if not records:
        raise DatasetError("cannot describe an empty dataset")
    words = [len(record.input_text.split()) for record in records]
    shapes: dict[str, list[tuple[int, int]]] = {}
    for record in records:
        for schema, table in record.gold_tables:
            shapes.setdefault(schema.table_id, []).append(table_shape(table))
    per_type = {}
    for table_id in sorted(shapes):
        rows = [r for r, _ in shapes[table_id]]
        cols = [c for _, c in shapes[table_id]]
        per_type[table_id] = TableTypeStats(
            count=len(rows),
            rows_min=min(rows),
            rows_max=max(rows),
            rows_mean=sum(rows) / len(rows),
            cols_min=min(cols),
            cols_max=max(cols),
            cols_mean=sum(cols) / len(cols),
        )
    return DatasetStats(
        examples=len(records),
        words_min=min(words),
        words_max=max(words),
        words_mean=sum(words) / len(words),
        per_type=per_type,
    )


@dataclass(frozen=True)
class TranscriptEntry:
    """One generation outcome, as stored in a transcript file."""

    example_id: str
    mode: str
    raw_text: Optional[str]
    error_kind: Optional[str] = None
    error_detail: str = ""
    usage: Optional[TokenUsage] = None
    latency_s: Optional[float] = None

    def to_json(self) -> dict:
        error = None
        if self.error_kind is not None:
            error = {"kind": self.error_kind, "detail": self.error_detail}
        usage = None
        if self.usage is not None:
            usage = {
                "prompt_tokens": self.usage.prompt_tokens,
                "completion_tokens": self.usage.completion_tokens,
                "total_tokens": self.usage.total_tokens,
            }
        return {
            "example_id": self.example_id,
            "mode": self.mode,
            "raw_text": self.raw_text,
            "error": error,
            "usage": usage,
            "latency_s": self.latency_s,
        }


def load_transcript(path: Union[str, Path]) -> dict[str, TranscriptEntry]:
    """Read a transcript file into a map keyed by example id."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise TranscriptError(f"cannot read transcript {path}: {exc}") from exc
    entries: dict[str, TranscriptEntry] = {}
    for lineno, line in enumerate(text.split("\n"), start=1):
        if not line.strip():
            continue
        where = f"{path.name}:{lineno}"
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise TranscriptError(f"{where}: invalid JSON: {exc}") from exc
        if not isinstance(obj, dict) or not isinstance(obj.get("example_id"), str):
            raise TranscriptError(f"{where}: entry must be an object with an example_id")
        example_id = obj["example_id"]
        if example_id in entries:
            raise TranscriptError(f"{where}: duplicate example_id {example_id!r}")
        raw_text = obj.get("raw_text")
        if raw_text is not None and not isinstance(raw_text, str):
            raise TranscriptError(f"{where}: raw_text must be a string or null")
        error = obj.get("error")
        error_kind = None
        error_detail = ""
        if error is not None:
            if not isinstance(error, dict) or not isinstance(error.get("kind"), str):
                raise TranscriptError(f"{where}: error must be an object with a kind")
            error_kind = error["kind"]
            error_detail = str(error.get("detail", ""))
        if raw_text is None and error_kind is None:
            raise TranscriptError(f"{where}: entry has neither raw_text nor error")
        usage = None
        if isinstance(obj.get("usage"), dict):
            u = obj["usage"]
            usage = TokenUsage(
                prompt_tokens=int(u.get("prompt_tokens", 0) or 0),
                completion_tokens=int(u.get("completion_tokens", 0) or 0),
                total_tokens=int(u.get("total_tokens", 0) or 0),
            )
        latency = obj.get("latency_s")
        entries[example_id] = TranscriptEntry(
            example_id=example_id,
            mode=str(obj.get("mode", "")),
            raw_text=raw_text,
            error_kind=error_kind,
            error_detail=error_detail,
            usage=usage,
            latency_s=float(latency) if isinstance(latency, (int, float)) else None,
        )
    if not entries:
        raise TranscriptError(f"transcript {path} contains no entries")
    return entries


def write_transcript(path: Union[str, Path], entries: Sequence[TranscriptEntry]) -> None:
    lines = [
        json.dumps(entry.to_json(), ensure_ascii=False, sort_keys=True)
        for entry in entries
    ]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


@dataclass(frozen=True)
class RunManifest:
    """Everything one evaluation run depends on."""

    dataset_path: Path
    mode: RunMode
    out_dir: Path
    generation: Optional[GenerationConfig] = None
    normalization: NormalizationConfig = DEFAULT_NORMALIZATION
    transcript_path: Optional[Path] = None
    scoring_workers: int = 1
    exemplar_path: Optional[Path] = None
    exclude_row_header_column: bool = False
    rmse_mode: str = "micro"
    candidate_first_assignment: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "dataset_path", Path(self.dataset_path))
        object.__setattr__(self, "out_dir", Path(self.out_dir))
        if self.transcript_path is not None:
            object.__setattr__(self, "transcript_path", Path(self.transcript_path))
        if self.exemplar_path is not None:
            object.__setattr__(self, "exemplar_path", Path(self.exemplar_path))
        if self.mode.replay and self.transcript_path is None:
            raise ValueError("RunManifest: replay modes need a transcript_path")
        if not self.mode.replay and self.generation is None:
            raise ValueError("RunManifest: live modes need a generation config")
        if self.exemplar_path is not None and self.mode.structured:
            raise ValueError("RunManifest: exemplars only apply to unstructured modes")
        if self.scoring_workers < 1:
            raise ValueError("RunManifest: scoring_workers must be >= 1")
        if self.rmse_mode not in ("micro", "macro"):
            raise ValueError("RunManifest: rmse_mode must be 'micro' or 'macro'")


def load_exemplar(path: Union[str, Path]) -> Exemplar:
    """Read a one-shot exemplar file: an object with input_text and tables_markdown."""
    path = Path(path)
    try:
        obj = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise DatasetError(f"cannot read exemplar {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DatasetError(f"exemplar {path} is not valid JSON: {exc}") from exc
    if (
        not isinstance(obj, dict)
        or not isinstance(obj.get("input_text"), str)
        or not isinstance(obj.get("tables_markdown"), str)
    ):
        raise DatasetError(
            f"exemplar {path} must be an object with string input_text and tables_markdown"
        )
    return Exemplar(input_text=obj["input_text"], serialized_tables=obj["tables_markdown"])


@dataclass(frozen=True)
class ExampleScore:
    example_id: str
    outcomes: tuple[PairOutcome, ...]
    parse_failures: tuple[ParseFailure, ...]


def _drop_first_column(table: Table) -> Table:
    # a single-column table has nothing left to score, keep it whole
    if len(table.column_headers) < 2:
        return table
    return Table(
        table.column_headers[1:],
        [row[1:] for row in table.rows],
        origin=table.origin,
    )


def _score_example(
    record: ExampleRecord,
    entry: TranscriptEntry,
    manifest: RunManifest,
) -> ExampleScore:
    schemas = [schema for schema, _ in record.gold_tables]
    if entry.error_kind is not None or entry.raw_text is None:
        outcomes = tuple(
            PairOutcome(record.example_id, schema.table_id, False) for schema in schemas
        )
        return ExampleScore(record.example_id, outcomes, ())

    parse_failures: tuple[ParseFailure, ...] = ()
    if manifest.mode.structured:
        document = build_schema(schemas)
        tables, structured_failures = parse_structured_output(
            entry.raw_text, document, schemas
        )
        missing_ids = {
            f.table_id
            for f in structured_failures
            if f.kind is StructuredFailureKind.MISSING_TABLE
        }
        predictions: dict[str, Table] = {}
        table_iter = iter(tables)
        for schema in schemas:
            if schema.table_id not in missing_ids:
                predictions[schema.table_id] = next(table_iter)
    else:
        tables, failures = parse_all(entry.raw_text)
        parse_failures = tuple(failures)
        result = assign_tables(
            tables, schemas, candidate_first=manifest.candidate_first_assignment
        )
        predictions = {
            schemas[si].table_id: tables[ci] for si, ci in result.assignments.items()
        }

    outcomes = []
    for schema, gold in record.gold_tables:
        pred = predictions.get(schema.table_id)
        if pred is None:
            outcomes.append(PairOutcome(record.example_id, schema.table_id, False))
            continue
        pred_n = normalize_table(pred, schema.cell_kind, manifest.normalization)
        gold_n = normalize_table(gold, schema.cell_kind, manifest.normalization)
        if manifest.exclude_row_header_column and schema.row_header_values is not None:
            pred_n = _drop_first_column(pred_n)
            gold_n = _drop_first_column(gold_n)
        scores = score_pair(pred_n, gold_n, schema.cell_kind)
        outcomes.append(PairOutcome(record.example_id, schema.table_id, True, scores))
    return ExampleScore(record.example_id, tuple(outcomes), parse_failures)


def _generate_all(
    records: Sequence[ExampleRecord],
    manifest: RunManifest,
    transport,
) -> list[TranscriptEntry]:
    assert manifest.generation is not None
    exemplar = None
    if manifest.exemplar_path is not None:
        exemplar = load_exemplar(manifest.exemplar_path)
    mode_name = "structured" if manifest.mode.structured else "unstructured"
    items = []
    for record in records:
        schemas = [schema for schema, _ in record.gold_tables]
        if manifest.mode.structured:
            document: Optional[SchemaDocument] = build_schema(schemas)
            bundle = build_guided_prompt(record)
        else:
            document = None
            bundle = build_freeform_prompt(record, exemplar)
        items.append((bundle, document))

    with LLMClient(manifest.generation, transport=transport) as client:
        results = client.generate_many(items)

    entries: list[TranscriptEntry] = []
    fatal: Optional[EndpointError] = None
    for record, result in zip(records, results):
        if isinstance(result, GenerationResult):
            entries.append(
                TranscriptEntry(
                    example_id=record.example_id,
                    mode=mode_name,
                    raw_text=result.raw_text,
                    usage=result.usage,
                    latency_s=result.latency_s,
                )
            )
        elif isinstance(result, ContextOverflowError):
            entries.append(
                TranscriptEntry(
                    example_id=record.example_id,
                    mode=mode_name,
                    raw_text=None,
                    error_kind="context_overflow",
                    error_detail=str(result),
                )
            )
        else:
            if fatal is None and isinstance(result, EndpointError):
                fatal = result
            entries.append(
                TranscriptEntry(
                    example_id=record.example_id,
                    mode=mode_name,
                    raw_text=None,
                    error_kind="endpoint",
                    error_detail=str(result),
                )
            )
    if fatal is not None:
        # keep what was generated so the spend is not lost, then abort
        manifest.out_dir.mkdir(parents=True, exist_ok=True)
        partial = manifest.out_dir / "transcript.jsonl"
        write_transcript(partial, entries)
        raise EndpointError(
            f"endpoint failure aborted the run (partial transcript at {partial}): {fatal}"
        ) from fatal
    return entries


def _json_ready(value):
    if isinstance(value, dict):
        return {key: _json_ready(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_ready(item) for item in value]
    if isinstance(value, bool) or not isinstance(value, float):
        return value
    rounded = round(value, 6)
    return 0.0 if rounded == 0 else rounded


def write_report_json(path: Union[str, Path], report: EvaluationReport) -> None:
    """Write a report as canonical JSON: sorted keys, floats rounded to 6 places."""
    payload = _json_ready(report.to_dict())
    Path(path).write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


_CSV_FLOAT_FIELDS = (
    "cell_f1",
    "cell_levenshtein",
    "row_f1",
    "table_levenshtein",
    "table_rouge_l",
)
_CSV_INT_FIELDS = ("cell_tp", "cell_fp", "cell_fn", "row_tp", "row_fp", "row_fn")


def _write_scores_csv(path: Path, scored: Sequence[ExampleScore]) -> None:
    columns = (
        ["example_id", "table_id", "present"]
        + list(_CSV_INT_FIELDS)
        + list(_CSV_FLOAT_FIELDS)
        + ["table_exact", "rmse", "rmse_pairs"]
    )
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(columns)
        for example in scored:
            for outcome in example.outcomes:
                row: list[str] = [outcome.example_id, outcome.table_id]
                if not outcome.present or outcome.scores is None:
                    row.append("0")
                    row.extend([""] * (len(columns) - 3))
                else:
                    s = outcome.scores
                    row.append("1")
                    row.extend(str(getattr(s, name)) for name in _CSV_INT_FIELDS)
                    row.extend(f"{getattr(s, name):.6f}" for name in _CSV_FLOAT_FIELDS)
                    row.append("1" if s.table_exact else "0")
                    row.append("" if s.rmse is None else f"{s.rmse:.6f}")
                    row.append(str(s.rmse_pair_count))
                writer.writerow(row)


def run(manifest: RunManifest, *, transport=None) -> tuple[EvaluationReport, dict[str, Path]]:
    """Execute one evaluation run and write its artifacts.

    Returns the report plus the paths written: report.json,
    per_example_scores.csv, error_distribution.json, transcript.jsonl.
    Replay modes never open a network connection; scoring is pure per
    example, so the artifacts do not depend on worker count.
    """
    records = ingest(manifest.dataset_path)
    if manifest.mode.replay:
        assert manifest.transcript_path is not None
        book = load_transcript(manifest.transcript_path)
        missing = [r.example_id for r in records if r.example_id not in book]
        if missing:
            raise TranscriptError(
                f"transcript does not cover {len(missing)} example(s), "
                f"first missing: {missing[:3]}"
            )
        entries = [book[record.example_id] for record in records]
    else:
        entries = _generate_all(records, manifest, transport)

    if manifest.scoring_workers > 1:
        with ThreadPoolExecutor(max_workers=manifest.scoring_workers) as pool:
            scored = list(
                pool.map(
                    lambda pair: _score_example(pair[0], pair[1], manifest),
                    zip(records, entries),
                )
            )
    else:
        scored = [
            _score_example(record, entry, manifest)
            for record, entry in zip(records, entries)
        ]

    outcomes = [outcome for example in scored for outcome in example.outcomes]
    parse_failures = [
        failure for example in scored for failure in example.parse_failures
    ]
    failed = sum(1 for entry in entries if entry.error_kind is not None)
    report = aggregate(
        outcomes,
        parse_failures=parse_failures,
        examples_total=len(records),
        failed_generation_examples=failed,
        rmse_mode=manifest.rmse_mode,
    )

    manifest.out_dir.mkdir(parents=True, exist_ok=True)
    paths = {
        "report": manifest.out_dir / "report.json",
        "scores": manifest.out_dir / "per_example_scores.csv",
        "errors": manifest.out_dir / "error_distribution.json",
        "transcript": manifest.out_dir / "transcript.jsonl",
    }
    write_report_json(paths["report"], report)
    _write_scores_csv(paths["scores"], scored)
    paths["errors"].write_text(
        json.dumps(_json_ready(report.error_distribution), indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )
    write_transcript(paths["transcript"], entries)
    return report, paths


_MR_PAIR = re.compile(r"([^,\[\]]+)\[([^\]]*)\]")


def convert_e2e(src: Union[str, Path], dst: Union[str, Path]) -> int:
    """Convert the E2E restaurant CSV release into a dataset file.

    The source needs ``mr`` and ``ref`` columns; ``mr`` holds a list like
    ``name[The Vaults], eatType[pub]``. Each example becomes one text-kind
    table named ``restaurant`` with one column per attribute and a single
    data row of values.
    """
    src, dst = Path(src), Path(dst)
    try:
        handle = src.open("r", encoding="utf-8", newline="")
    except OSError as exc:
        raise DatasetError(f"cannot read {src}: {exc}") from exc
    count = 0
    with handle, dst.open("w", encoding="utf-8") as out:
        reader = csv.DictReader(handle)
        if reader.fieldnames is None or not {"mr", "ref"} <= set(reader.fieldnames):
            raise DatasetError(f"{src.name}: expected CSV with 'mr' and 'ref' columns")
        for index, row in enumerate(reader):
            where = f"{src.name} record {index}"
            mr, ref = row.get("mr") or "", row.get("ref") or ""
            pairs = [
                (attr.strip(), value.strip()) for attr, value in _MR_PAIR.findall(mr)
            ]
            if not pairs:
                raise DatasetError(f"{where}: no attribute[value] pairs in {mr!r}")
            headers = [attr for attr, _ in pairs]
            example = {
                "example_id": f"e2e-{index:05d}",
                "input_text": ref,
                "gold_tables": [
                    {
                        "table_id": "restaurant",
                        "column_headers": headers,
                        "cell_kind": "text",
                        "row_header_values": None,
                        "rows": [[value for _, value in pairs]],
                    }
                ],
            }
            try:
                json.dumps(example)
            except (TypeError, ValueError) as exc:  # pragma: no cover - defensive
                raise DatasetError(f"{where}: {exc}") from exc
            out.write(json.dumps(example, ensure_ascii=False) + "\n")
            count += 1
    if count == 0:
        raise DatasetError(f"{src.name}: no records converted")
    return count


def _entity_table(
    obj: object, table_id: str, where: str
) -> dict:
    if not isinstance(obj, dict):
        raise DatasetError(f"{where}: table {table_id!r} must be an object")
    headers = obj.get("headers")
    rows = obj.get("rows")
    if not isinstance(headers, list) or not all(isinstance(h, str) for h in headers):
        raise DatasetError(f"{where}: table {table_id!r} headers must be strings")
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise DatasetError(f"{where}: table {table_id!r} rows must be lists")
    names = []
    for i, row in enumerate(rows):
        if not row or not isinstance(row[0], str):
            raise DatasetError(
                f"{where}: table {table_id!r} row {i} must start with an entity name"
            )
        names.append(row[0])
    return {
        "table_id": table_id,
        "column_headers": headers,
        "cell_kind": "nullable_integer",
        "row_header_values": names,
        "rows": rows,
    }


def convert_rotowire(src: Union[str, Path], dst: Union[str, Path]) -> int:
    """Convert Rotowire-style game summaries into a dataset file.

    The source is JSON lines with a ``text`` field and ``teams`` and/or
    ``players`` objects, each holding ``headers`` and ``rows`` where every
    row starts with the entity name. An example may lack either table type.
    Both tables are integer-kind with the names as fixed row headers.
    """
    src, dst = Path(src), Path(dst)
    try:
        text = src.read_text(encoding="utf-8")
    except OSError as exc:
        raise DatasetError(f"cannot read {src}: {exc}") from exc
    count = 0
    with dst.open("w", encoding="utf-8") as out:
        for lineno, line in enumerate(text.split("\n"), start=1):
            if not line.strip():
                continue
            where = f"{src.name}:{lineno}"
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DatasetError(f"{where}: invalid JSON: {exc}") from exc
            if not isinstance(obj, dict) or not isinstance(obj.get("text"), str):
                raise DatasetError(f"{where}: expected an object with a text field")
            gold = []
            if obj.get("teams") is not None:
                gold.append(_entity_table(obj["teams"], "team", where))
            if obj.get("players") is not None:
                gold.append(_entity_table(obj["players"], "player", where))
            if not gold:
                raise DatasetError(f"{where}: example has neither teams nor players")
            example = {
                "example_id": f"rotowire-{count:05d}",
                "input_text": obj["text"],
                "gold_tables": gold,
            }
            out.write(json.dumps(example, ensure_ascii=False) + "\n")
            count += 1
    if count == 0:
        raise DatasetError(f"{src.name}: no records converted")
    return count


def convert_livesum(src: Union[str, Path], dst: Union[str, Path]) -> int:
    """Convert Livesum-style match commentary into a dataset file.

    The source is JSON lines with ``commentary`` and a ``table`` of
    ``headers`` and ``rows``, each row starting with the team name.
    """
    src, dst = Path(src), Path(dst)
    try:
        text = src.read_text(encoding="utf-8")
    except OSError as exc:
        raise DatasetError(f"cannot read {src}: {exc}") from exc
    count = 0
    with dst.open("w", encoding="utf-8") as out:
        for lineno, line in enumerate(text.split("\n"), start=1):
            if not line.strip():
                continue
            where = f"{src.name}:{lineno}"
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DatasetError(f"{where}: invalid JSON: {exc}") from exc
            if not isinstance(obj, dict) or not isinstance(obj.get("commentary"), str):
                raise DatasetError(f"{where}: expected an object with a commentary field")
            if "table" not in obj:
                raise DatasetError(f"{where}: example is missing its table")
            example = {
                "example_id": f"livesum-{count:05d}",
                "input_text": obj["commentary"],
                "gold_tables": [_entity_table(obj["table"], "team", where)],
            }
            out.write(json.dumps(example, ensure_ascii=False) + "\n")
            count += 1
    if count == 0:
        raise DatasetError(f"{src.name}: no records converted")
    return count
