"""Command line entry points.

Exit codes: 0 success, 1 usage error, 2 dataset or transcript error,
3 endpoint error.
"""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path
from typing import Optional

import click

from .align import NormalizationConfig
from .client import GenerationConfig, GenerationError
from .harness import (
    DatasetError,
    RunManifest,
    RunMode,
    convert_e2e,
    convert_livesum,
    convert_rotowire,
)
from .harness import describe as describe_stats
from .harness import ingest
from .harness import run as run_evaluation

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATASET = 2
EXIT_ENDPOINT = 3

_API_KEY_VAR = "TABEVAL_API_KEY"

_NORM_FLAG_FIELDS = {
    "collapse-whitespace": "collapse_whitespace",
    "thousands-separators": "strip_thousands_separators",
    "null-synonyms": "map_null_synonyms",
}


def _parse_norm_flags(spec: Optional[str]) -> NormalizationConfig:
    """Parse a comma list like ``null-synonyms,no-collapse-whitespace``.

    Every step defaults to on; a ``no-`` prefix turns a step off.
    """
    values = {field: True for field in _NORM_FLAG_FIELDS.values()}
    if spec:
        for token in spec.split(","):
            token = token.strip()
            if not token:
                continue
            enabled = not token.startswith("no-")
            name = token[3:] if token.startswith("no-") else token
            if name not in _NORM_FLAG_FIELDS:
                raise click.UsageError(
                    f"unknown normalization flag {token!r}; known flags: "
                    + ", ".join(sorted(_NORM_FLAG_FIELDS))
                )
            values[_NORM_FLAG_FIELDS[name]] = enabled
    return NormalizationConfig(**values)


@click.group()
def cli() -> None:
    """Evaluate table extraction from language model output."""


@cli.command("describe")
@click.option("--dataset", "dataset_path", required=True, type=click.Path(path_type=Path))
@click.option("--as-json", is_flag=True, help="Emit the statistics as JSON.")
def describe_command(dataset_path: Path, as_json: bool) -> None:
    """Print dataset size, word counts, and gold table shapes."""
    stats = describe_stats(ingest(dataset_path))
    if as_json:
        click.echo(json.dumps(stats.to_dict(), indent=2, sort_keys=True))
        return
    click.echo(f"examples: {stats.examples}")
    click.echo(
        f"words: min {stats.words_min} max {stats.words_max} "
        f"mean {stats.words_mean:.2f}"
    )
    for table_id, st in stats.per_type.items():
        click.echo(
            f"table {table_id!r}: n {st.count}, "
            f"rows min {st.rows_min} max {st.rows_max} mean {st.rows_mean:.2f}, "
            f"cols min {st.cols_min} max {st.cols_max} mean {st.cols_mean:.2f}"
        )


def _mode_from_name(name: str, replay: bool) -> RunMode:
    if name == "structured":
        return RunMode.REPLAY_STRUCTURED if replay else RunMode.STRUCTURED
    return RunMode.REPLAY_UNSTRUCTURED if replay else RunMode.UNSTRUCTURED


_SHARED_SCORING_OPTIONS = [
    click.option("--norm-flags", default=None, help="Comma list of normalization toggles."),
    click.option("--scoring-workers", default=1, show_default=True, type=int),
    click.option(
        "--rmse-mode",
        default="micro",
        show_default=True,
        type=click.Choice(["micro", "macro"]),
    ),
    click.option(
        "--exclude-row-header-column",
        is_flag=True,
        help="Drop the entity-name column before scoring row-keyed tables.",
    ),
    click.option(
        "--candidate-first",
        is_flag=True,
        help="Assign tables candidate-first instead of gold-first.",
    ),
]


def _with_options(options):
    def wrap(func):
        for option in reversed(options):
            func = option(func)
        return func

    return wrap


def _echo_report(paths: dict[str, Path]) -> None:
    for name in ("report", "scores", "errors", "transcript"):
        click.echo(f"{name}: {paths[name]}")


@cli.command("run")
@click.option("--dataset", "dataset_path", required=True, type=click.Path(path_type=Path))
@click.option("--mode", required=True, type=click.Choice(["unstructured", "structured"]))
@click.option("--out-dir", required=True, type=click.Path(path_type=Path))
@click.option("--endpoint", required=True, help="Chat completions endpoint URL.")
@click.option("--model", required=True, help="Model name sent to the endpoint.")
@click.option("--temperature", default=0.0, show_default=True, type=float)
@click.option("--max-new-tokens", default=4096, show_default=True, type=int)
@click.option("--max-context-tokens", default=6144, show_default=True, type=int)
@click.option("--timeout", default=120.0, show_default=True, type=float)
@click.option("--concurrency", default=4, show_default=True, type=int,
              help="Maximum in-flight generation requests.")
@click.option("--retries", default=3, show_default=True, type=int)
@click.option("--guided-field", default="guided_json", show_default=True,
              help="Request field carrying the decoding schema in structured mode.")
@click.option("--exemplar", "exemplar_path", default=None, type=click.Path(path_type=Path),
              help="One-shot exemplar JSON file (unstructured mode only).")
@_with_options(_SHARED_SCORING_OPTIONS)
def run_command(
    dataset_path: Path,
    mode: str,
    out_dir: Path,
    endpoint: str,
    model: str,
    temperature: float,
    max_new_tokens: int,
    max_context_tokens: int,
    timeout: float,
    concurrency: int,
    retries: int,
    guided_field: str,
    exemplar_path: Optional[Path],
    norm_flags: Optional[str],
    scoring_workers: int,
    rmse_mode: str,
    exclude_row_header_column: bool,
    candidate_first: bool,
) -> None:
    """Generate against a live endpoint and score the outputs."""
    try:
        generation = GenerationConfig(
            endpoint_url=endpoint,
            model_name=model,
            temperature=temperature,
            max_new_tokens=max_new_tokens,
            max_context_tokens=max_context_tokens,
            request_timeout_s=timeout,
            max_concurrent_requests=concurrency,
            retry_limit=retries,
            guided_field=guided_field,
            api_key=os.environ.get(_API_KEY_VAR) or None,
        )
        manifest = RunManifest(
            dataset_path=dataset_path,
            mode=_mode_from_name(mode, replay=False),
            out_dir=out_dir,
            generation=generation,
            normalization=_parse_norm_flags(norm_flags),
            scoring_workers=scoring_workers,
            exemplar_path=exemplar_path,
            exclude_row_header_column=exclude_row_header_column,
            rmse_mode=rmse_mode,
            candidate_first_assignment=candidate_first,
        )
    except ValueError as exc:
        raise click.UsageError(str(exc)) from exc
    _report, paths = run_evaluation(manifest)
    _echo_report(paths)


@cli.command("replay")
@click.option("--dataset", "dataset_path", required=True, type=click.Path(path_type=Path))
@click.option("--mode", required=True, type=click.Choice(["unstructured", "structured"]))
@click.option("--transcript", "transcript_path", required=True,
              type=click.Path(path_type=Path))
@click.option("--out-dir", required=True, type=click.Path(path_type=Path))
@_with_options(_SHARED_SCORING_OPTIONS)
def replay_command(
    dataset_path: Path,
    mode: str,
    transcript_path: Path,
    out_dir: Path,
    norm_flags: Optional[str],
    scoring_workers: int,
    rmse_mode: str,
    exclude_row_header_column: bool,
    candidate_first: bool,
) -> None:
    """Score previously recorded outputs without touching a network."""
    try:
        manifest = RunManifest(
            dataset_path=dataset_path,
            mode=_mode_from_name(mode, replay=True),
            out_dir=out_dir,
            transcript_path=transcript_path,
            normalization=_parse_norm_flags(norm_flags),
            scoring_workers=scoring_workers,
            exclude_row_header_column=exclude_row_header_column,
            rmse_mode=rmse_mode,
            candidate_first_assignment=candidate_first,
        )
    except ValueError as exc:
        raise click.UsageError(str(exc)) from exc
    _report, paths = run_evaluation(manifest)
    _echo_report(paths)


@cli.group("convert")
def convert_group() -> None:
    """Convert public benchmark releases into the dataset format."""


@convert_group.command("e2e")
@click.argument("src", type=click.Path(path_type=Path))
@click.argument("dst", type=click.Path(path_type=Path))
def convert_e2e_command(src: Path, dst: Path) -> None:
    """Convert an E2E CSV file (mr/ref columns)."""
    click.echo(f"wrote {convert_e2e(src, dst)} example(s) to {dst}")


@convert_group.command("rotowire")
@click.argument("src", type=click.Path(path_type=Path))
@click.argument("dst", type=click.Path(path_type=Path))
def convert_rotowire_command(src: Path, dst: Path) -> None:
    """Convert Rotowire-style JSON lines (text, teams, players)."""
    click.echo(f"wrote {convert_rotowire(src, dst)} example(s) to {dst}")


@convert_group.command("livesum")
@click.argument("src", type=click.Path(path_type=Path))
@click.argument("dst", type=click.Path(path_type=Path))
def convert_livesum_command(src: Path, dst: Path) -> None:
    """Convert Livesum-style JSON lines (commentary, table)."""
    click.echo(f"wrote {convert_livesum(src, dst)} example(s) to {dst}")


def main(argv: Optional[list[str]] = None) -> int:
    """Dispatch the CLI and map failures onto the documented exit codes."""
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.UsageError as exc:
        exc.show(file=sys.stderr)
        return EXIT_USAGE
    except click.ClickException as exc:
        exc.show(file=sys.stderr)
        return EXIT_USAGE
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return EXIT_USAGE
    except DatasetError as exc:
        click.echo(f"dataset error: {exc}", err=True)
        return EXIT_DATASET
    except GenerationError as exc:
        click.echo(f"endpoint error: {exc}", err=True)
        return EXIT_ENDPOINT
    return EXIT_OK


def entrypoint() -> None:
    sys.exit(main())
