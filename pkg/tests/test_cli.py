"""Tests for the command line interface and its exit codes."""

import csv
import json

import pytest

from tabeval import NormalizationConfig
from tabeval.cli import EXIT_DATASET, EXIT_ENDPOINT, EXIT_OK, EXIT_USAGE, main
from tabeval.cli import _parse_norm_flags

from .util import gold_markdown, numeric_record, write_dataset, write_raw_transcript


@pytest.fixture()
def gold_setup(tmp_path):
    records = [numeric_record("e1"), numeric_record("e2", base=3)]
    dataset = write_dataset(tmp_path / "ds.jsonl", records)
    transcript = write_raw_transcript(
        tmp_path / "t.jsonl",
        [(r.example_id, gold_markdown(r)) for r in records],
        "unstructured",
    )
    return dataset, transcript


def test_norm_flags_default_all_on():
    assert _parse_norm_flags(None) == NormalizationConfig(True, True, True)


def test_norm_flags_no_prefix_disables():
    config = _parse_norm_flags("no-collapse-whitespace, null-synonyms")
    assert config.collapse_whitespace is False
    assert config.strip_thousands_separators is True
    assert config.map_null_synonyms is True


def test_norm_flags_unknown_name_rejected():
    import click

    with pytest.raises(click.UsageError, match="unknown normalization flag"):
        _parse_norm_flags("trim-everything")


def test_help_exits_zero(capsys):
    assert main(["--help"]) == EXIT_OK
    assert "describe" in capsys.readouterr().out


def test_no_arguments_is_usage_error():
    assert main([]) == EXIT_USAGE


def test_unknown_command_is_usage_error():
    assert main(["frobnicate"]) == EXIT_USAGE


def test_describe_text_output(gold_setup, capsys):
    dataset, _ = gold_setup
    assert main(["describe", "--dataset", str(dataset)]) == EXIT_OK
    out = capsys.readouterr().out
    assert "examples: 2" in out
    assert "table 'team'" in out
    assert "table 'player'" in out


def test_describe_json_output(gold_setup, capsys):
    dataset, _ = gold_setup
    assert main(["describe", "--dataset", str(dataset), "--as-json"]) == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert payload["examples"] == 2
    assert payload["per_type"]["team"]["rows"]["mean"] == 2.0


def test_describe_missing_option_is_usage_error():
    assert main(["describe"]) == EXIT_USAGE


def test_describe_bad_dataset_is_dataset_error(tmp_path, capsys):
    (tmp_path / "ds.jsonl").write_text("{broken\n", encoding="utf-8")
    assert main(["describe", "--dataset", str(tmp_path / "ds.jsonl")]) == EXIT_DATASET
    assert "dataset error" in capsys.readouterr().err


def test_describe_absent_dataset_is_dataset_error(tmp_path):
    assert main(["describe", "--dataset", str(tmp_path / "nope.jsonl")]) == EXIT_DATASET


def test_replay_writes_artifacts(gold_setup, tmp_path, capsys):
    dataset, transcript = gold_setup
    out_dir = tmp_path / "out"
    code = main(
        [
            "replay",
            "--dataset",
            str(dataset),
            "--mode",
            "unstructured",
            "--transcript",
            str(transcript),
            "--out-dir",
            str(out_dir),
        ]
    )
    assert code == EXIT_OK
    report = json.loads((out_dir / "report.json").read_text(encoding="utf-8"))
    assert report["overall"]["presence_rate"] == 1.0
    assert report["overall"]["metrics"]["cell_f1"] == 1.0
    assert (out_dir / "per_example_scores.csv").is_file()
    assert (out_dir / "error_distribution.json").is_file()
    assert (out_dir / "transcript.jsonl").is_file()
    assert "report:" in capsys.readouterr().out


def test_replay_accepts_scoring_options(gold_setup, tmp_path):
    dataset, transcript = gold_setup
    code = main(
        [
            "replay",
            "--dataset",
            str(dataset),
            "--mode",
            "unstructured",
            "--transcript",
            str(transcript),
            "--out-dir",
            str(tmp_path / "out"),
            "--norm-flags",
            "no-thousands-separators",
            "--scoring-workers",
            "2",
            "--rmse-mode",
            "macro",
            "--exclude-row-header-column",
        ]
    )
    assert code == EXIT_OK


def test_replay_bad_norm_flag_is_usage_error(gold_setup, tmp_path):
    dataset, transcript = gold_setup
    code = main(
        [
            "replay",
            "--dataset",
            str(dataset),
            "--mode",
            "unstructured",
            "--transcript",
            str(transcript),
            "--out-dir",
            str(tmp_path / "out"),
            "--norm-flags",
            "bogus",
        ]
    )
    assert code == EXIT_USAGE


def test_replay_missing_transcript_file_is_dataset_error(gold_setup, tmp_path):
    dataset, _ = gold_setup
    code = main(
        [
            "replay",
            "--dataset",
            str(dataset),
            "--mode",
            "unstructured",
            "--transcript",
            str(tmp_path / "absent.jsonl"),
            "--out-dir",
            str(tmp_path / "out"),
        ]
    )
    assert code == EXIT_DATASET


def test_replay_invalid_mode_is_usage_error(gold_setup, tmp_path):
    dataset, transcript = gold_setup
    code = main(
        [
            "replay",
            "--dataset",
            str(dataset),
            "--mode",
            "freestyle",
            "--transcript",
            str(transcript),
            "--out-dir",
            str(tmp_path / "out"),
        ]
    )
    assert code == EXIT_USAGE


def test_run_requires_endpoint_options(gold_setup, tmp_path):
    dataset, _ = gold_setup
    code = main(
        [
            "run",
            "--dataset",
            str(dataset),
            "--mode",
            "unstructured",
            "--out-dir",
            str(tmp_path / "out"),
        ]
    )
    assert code == EXIT_USAGE


def test_run_against_dead_endpoint_is_endpoint_error(gold_setup, tmp_path, capsys):
    dataset, _ = gold_setup
    code = main(
        [
            "run",
            "--dataset",
            str(dataset),
            "--mode",
            "unstructured",
            "--out-dir",
            str(tmp_path / "out"),
            "--endpoint",
            "http://127.0.0.1:9/v1",
            "--model",
            "m",
            "--retries",
            "0",
            "--timeout",
            "2",
            "--concurrency",
            "1",
        ]
    )
    assert code == EXIT_ENDPOINT
    assert "endpoint error" in capsys.readouterr().err
    # the partial transcript still lands so the attempt is inspectable
    assert (tmp_path / "out" / "transcript.jsonl").is_file()


def test_convert_e2e_command(tmp_path, capsys):
    src = tmp_path / "src.csv"
    with src.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["mr", "ref"])
        writer.writerow(["name[Blue Spice], area[city centre]", "Blue Spice downtown."])
    dst = tmp_path / "out.jsonl"
    assert main(["convert", "e2e", str(src), str(dst)]) == EXIT_OK
    assert "wrote 1 example(s)" in capsys.readouterr().out
    assert dst.is_file()


def test_convert_rotowire_command(tmp_path):
    src = tmp_path / "src.jsonl"
    src.write_text(
        json.dumps(
            {
                "text": "A game.",
                "teams": {"headers": ["Team", "Wins"], "rows": [["Hawks", 10]]},
            }
        )
        + "\n",
        encoding="utf-8",
    )
    assert main(["convert", "rotowire", str(src), str(tmp_path / "out.jsonl")]) == EXIT_OK


def test_convert_livesum_command_bad_input_is_dataset_error(tmp_path):
    src = tmp_path / "src.jsonl"
    src.write_text(json.dumps({"commentary": "only words"}) + "\n", encoding="utf-8")
    code = main(["convert", "livesum", str(src), str(tmp_path / "out.jsonl")])
    assert code == EXIT_DATASET


def test_convert_unknown_subcommand_is_usage_error(tmp_path):
    assert main(["convert", "wikibio", "a", "b"]) == EXIT_USAGE
