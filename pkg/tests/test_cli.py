"""Operator CLI: subcommands, exit codes, closed CSV loop."""

import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from avanegar.cli import main

FIXTURE = Path(__file__).parent / "fixtures" / "divan_sample.json"


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


def run(runner, *args):
    return runner.invoke(main, [str(a) for a in args])


def test_ingest_reports_counts(runner, workdir):
    result = run(runner, "ingest", FIXTURE)
    assert result.exit_code == 0, result.output
    assert "ingested 6 lines (50 words)" in result.output
    assert (workdir / "data" / "events.jsonl").exists()


def test_ingest_missing_file_is_io_failure(runner, workdir):
    result = run(runner, "ingest", "nope.json")
    assert result.exit_code == 2


def test_ingest_invalid_document_is_validation_failure(runner, workdir):
    bad = workdir / "bad.json"
    bad.write_text(json.dumps([{"line_id": "x"}]), encoding="utf-8")
    result = run(runner, "ingest", bad)
    assert result.exit_code == 1
    assert "missing keys" in result.output


def test_ingest_unparseable_json_is_validation_failure(runner, workdir):
    bad = workdir / "bad.json"
    bad.write_text("{not json", encoding="utf-8")
    assert run(runner, "ingest", bad).exit_code == 1


def test_gen_tasks_requires_corpus(runner, workdir):
    result = run(runner, "gen-tasks")
    assert result.exit_code == 1
    assert "no corpus" in result.output


def test_gen_tasks_exact_counts(runner, workdir):
    run(runner, "ingest", FIXTURE)
    result = run(runner, "gen-tasks", "--seed", 9, "--disambiguation", 20, "--correction", 2)
    assert result.exit_code == 0, result.output
    assert "generated 22 tasks (2 correction, 20 disambiguation)" in result.output


def test_gen_tasks_rate_mode(runner, workdir):
    run(runner, "ingest", FIXTURE)
    result = run(runner, "gen-tasks", "--rate", 0.4, "--seed", 5)
    assert result.exit_code == 0
    assert "generated" in result.output


def test_export_empty_store_outputs_header(runner, workdir):
    run(runner, "ingest", FIXTURE)
    result = run(runner, "export")
    assert result.exit_code == 0
    assert result.output.startswith("task_id,pwld,word_length,existence_code")


def test_score_fit_export_loop(runner, workdir, inv):
    from avanegar import CorpusStore
    from avanegar.service import ordered_task_ids

    run(runner, "ingest", FIXTURE)
    run(runner, "gen-tasks", "--seed", 9, "--disambiguation", 12, "--correction", 2)

    # answer through the store like the service would
    store = CorpusStore(inv, workdir / "data" / "events.jsonl")
    order = ordered_task_ids(store)
    for k in range(8):
        profile = store.create_profile(l1_language="English", age=20 + k, education="BA")
        session = store.create_session(profile.profile_id, order)
        for i, task_id in enumerate(order):
            task = store.tasks[task_id]
            if task.options and (i + k) % 3:
                payload = {"option_index": (i + k) % len(task.options)}
            else:
                payload = {"ipa": task.truth.source_text}
            store.record_response(session.session_id, task_id, payload)

    scored = run(runner, "score", "-o", "scored.csv")
    assert scored.exit_code == 0, scored.output
    assert "wrote 112 scored responses" in scored.output
    header = (workdir / "scored.csv").read_text("utf-8").splitlines()[0]
    assert header.startswith("seq_no,task_id,session_id")

    exported = run(runner, "export", "-o", "items.csv")
    assert exported.exit_code == 0
    assert "wrote 14 item rows" in exported.output

    fitted = run(runner, "fit", "items.csv")
    assert fitted.exit_code == 0, fitted.output
    assert "R^2:" in fitted.output
    assert "F(3," in fitted.output


def test_fit_rejects_malformed_csv(runner, workdir):
    bad = workdir / "items.csv"
    bad.write_text("a,b\r\n1,2\r\n", encoding="utf-8")
    result = run(runner, "fit", bad)
    assert result.exit_code == 1
    assert "header" in result.output


def test_fit_missing_file_is_io_failure(runner, workdir):
    assert run(runner, "fit", "absent.csv").exit_code == 2
