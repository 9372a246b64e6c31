"""Evaluate table extraction from language model output.

The pipeline: build a prompt (and, for guided decoding, a JSON schema)
from each example's gold table layouts, collect the model output, recover
tables from it, assign them to the expected table types, normalize cells,
and score each aligned pair at cell, row, and table granularity.
"""

from .align import (
    DEFAULT_NORMALIZATION,
    NULL_SYNONYMS,
    AssignmentResult,
    NormalizationConfig,
    assign_tables,
    header_overlap_score,
    normalize_cell,
    normalize_table,
)
from .client import (
    ContextOverflowError,
    EndpointError,
    Exemplar,
    GenerationConfig,
    GenerationError,
    GenerationResult,
    LLMClient,
    PromptBundle,
    TokenUsage,
    build_freeform_prompt,
    build_guided_prompt,
    generate,
    table_outline,
)
from .harness import (
    DatasetError,
    DatasetStats,
    RunManifest,
    RunMode,
    TranscriptEntry,
    TranscriptError,
    convert_e2e,
    convert_livesum,
    convert_rotowire,
    describe,
    ingest,
    load_exemplar,
    load_transcript,
    run,
    write_report_json,
    write_transcript,
)
from .mdparse import (
    CandidateBlock,
    ErrorClass,
    FailureKind,
    ParseFailure,
    classify_error,
    extract_candidates,
    parse_all,
    serialize_minimal_markdown,
    validate_candidate,
)
from .metrics import (
    EvaluationReport,
    PairOutcome,
    PairScores,
    TypeReport,
    aggregate,
    cell_metrics,
    levenshtein_ratio,
    positional_cell_levenshtein,
    rmse,
    rouge_l,
    row_metrics,
    score_pair,
    table_exact,
    table_string_metrics,
)
from .model import (
    CellKind,
    CellValue,
    ExampleRecord,
    Table,
    TableOrigin,
    TableSchema,
    conforms,
    table_shape,
)
from .schema import (
    SchemaBuildError,
    SchemaDocument,
    StructuredFailure,
    StructuredFailureKind,
    build_schema,
    parse_structured_output,
    sanitize_key,
    table_to_instance,
)

__version__ = "0.1.0"

__all__ = [
    "AssignmentResult",
    "CandidateBlock",
    "CellKind",
    "CellValue",
    "ContextOverflowError",
    "DEFAULT_NORMALIZATION",
    "DatasetError",
    "DatasetStats",
    "EndpointError",
    "ErrorClass",
    "EvaluationReport",
    "ExampleRecord",
    "Exemplar",
    "FailureKind",
    "GenerationConfig",
    "GenerationError",
    "GenerationResult",
    "LLMClient",
    "NULL_SYNONYMS",
    "NormalizationConfig",
    "PairOutcome",
    "PairScores",
    "ParseFailure",
    "PromptBundle",
    "RunManifest",
    "RunMode",
    "SchemaBuildError",
    "SchemaDocument",
    "StructuredFailure",
    "StructuredFailureKind",
    "Table",
    "TableOrigin",
    "TableSchema",
    "TokenUsage",
    "TranscriptEntry",
    "TranscriptError",
    "TypeReport",
    "aggregate",
    "assign_tables",
    "build_freeform_prompt",
    "build_guided_prompt",
    "build_schema",
    "cell_metrics",
    "classify_error",
    "conforms",
    "convert_e2e",
    "convert_livesum",
    "convert_rotowire",
    "describe",
    "extract_candidates",
    "generate",
    "header_overlap_score",
    "ingest",
    "levenshtein_ratio",
    "load_exemplar",
    "load_transcript",
    "normalize_cell",
    "normalize_table",
    "parse_all",
    "parse_structured_output",
    "positional_cell_levenshtein",
    "rmse",
    "rouge_l",
    "row_metrics",
    "run",
    "sanitize_key",
    "score_pair",
    "serialize_minimal_markdown",
    "table_exact",
    "table_outline",
    "table_shape",
    "table_string_metrics",
    "table_to_instance",
    "validate_candidate",
    "write_report_json",
    "write_transcript",
]
