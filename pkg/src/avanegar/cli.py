"""Operator CLI: ingest, gen-tasks, score, fit, export, serve.

Exit codes: 0 success, 1 validation failure, 2 I/O failure.
"""

from __future__ import annotations

import csv
import functools
import json
import sys
from pathlib import Path

import click

from .analytics import collect_item_stats, export_csv, fit_ols, parse_items_csv
from .distance import CostConfig
from .phonemes import load_default_inventory, load_inventory_file
from .store import CorpusStore
from .tasks import TaskPlan, build_tasks, score_response

EXIT_VALIDATION = 1
EXIT_IO = 2


def _handle_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except OSError as e:
            click.echo(f"i/o error: {e}", err=True)
            sys.exit(EXIT_IO)
        except ValueError as e:
            click.echo(f"error: {e}", err=True)
            sys.exit(EXIT_VALIDATION)

    return wrapper


def _open_store(data_dir: str, inventory_path: str | None) -> CorpusStore:
    inventory = (
        load_inventory_file(inventory_path) if inventory_path else load_default_inventory()
    )
    return CorpusStore(inventory, Path(data_dir) / "events.jsonl")


data_option = click.option(
    "--data", "data_dir", default="data", show_default=True, help="Store directory."
)
inventory_option = click.option(
    "--inventory", "inventory_path", default=None, help="Alternative inventory JSON."
)


@click.group()
def main():
    """Transcription-task service and analysis pipeline."""


@main.command()
@click.argument("alignment_json", type=click.Path(exists=True, dir_okay=False))
@data_option
@inventory_option
@_handle_errors
def ingest(alignment_json, data_dir, inventory_path):
    """Load an audio-aligned corpus document into the store."""
    store = _open_store(data_dir, inventory_path)
    with open(alignment_json, encoding="utf-8") as f:
        try:
            doc = json.load(f)
        except json.JSONDecodeError as e:
            raise ValueError(f"{alignment_json} is not valid JSON: {e}") from e
    lines = store.ingest_alignment(doc)
    click.echo(f"ingested {len(lines)} lines ({sum(len(l.words) for l in lines)} words)")


@main.command("gen-tasks")
@click.option("--rate", default=0.5, show_default=True, help="Chance a candidate word becomes a task.")
@click.option("--seed", default=0, show_default=True)
@click.option("--options", "n_options", default=3, show_default=True, help="Options per disambiguation task.")
@click.option("--disambiguation", "n_disambiguation", type=int, default=None, help="Exact number of disambiguation tasks (overrides --rate).")
@click.option("--correction", "n_correction", type=int, default=None, help="Exact number of correction tasks.")
@click.option("--completion", "n_completion", type=int, default=0, show_default=True, help="Exact number of completion tasks.")
@data_option
@inventory_option
@_handle_errors
def gen_tasks(rate, seed, n_options, n_disambiguation, n_correction, n_completion, data_dir, inventory_path):
    """Build tasks over the ingested corpus, deterministically per seed."""
    store = _open_store(data_dir, inventory_path)
    if not store.lines:
        raise ValueError("no corpus ingested; run `ingest` first")
    plan = TaskPlan(
        seed=seed,
        rate=rate,
        n_options=n_options,
        n_disambiguation=n_disambiguation,
        n_correction=n_correction,
        n_completion=n_completion,
    )
    tasks = build_tasks(store.lines.values(), store.inventory, plan=plan)
    store.add_tasks(tasks)
    by_class: dict[str, int] = {}
    for t in tasks:
        by_class[t.task_class] = by_class.get(t.task_class, 0) + 1
    summary = ", ".join(f"{n} {kind}" for kind, n in sorted(by_class.items()))
    click.echo(f"generated {len(tasks)} tasks ({summary or 'none'})")


@main.command()
@click.option("-o", "--output", type=click.Path(dir_okay=False), default=None, help="Write CSV here instead of stdout.")
@data_option
@inventory_option
@_handle_errors
def score(output, data_dir, inventory_path):
    """Score every stored response against its task's ground truth."""
    store = _open_store(data_dir, inventory_path)
    cfg = CostConfig()
    rows = []
    for r in store.responses:
        task = store.tasks.get(r.task_id)
        if task is None:
            continue
        given = store.resolve_payload(task, r.payload)
        scored = score_response(
            task, given, store.inventory, cfg,
            selected_option_index=r.payload.get("option_index"),
        )
        rows.append(
            [
                r.seq_no,
                r.task_id,
                r.session_id,
                r.profile_id,
                r.participation_mode,
                "" if scored.selected_option_index is None else scored.selected_option_index,
                given.source_text,
                int(scored.is_exact),
                "" if scored.distance_to_truth is None else f"{scored.distance_to_truth:.6f}",
            ]
        )
    out = open(output, "w", newline="", encoding="utf-8") if output else sys.stdout
    try:
        writer = csv.writer(out)
        writer.writerow(
            [
                "seq_no", "task_id", "session_id", "profile_id", "participation_mode",
                "selected_option_index", "given_ipa", "is_exact", "distance_to_truth",
            ]
        )
        writer.writerows(rows)
    finally:
        if output:
            out.close()
            click.echo(f"wrote {len(rows)} scored responses to {output}")


@main.command()
@click.argument("items_csv", type=click.Path(exists=True, dir_okay=False))
@_handle_errors
def fit(items_csv):
    """Fit the error-rate regression to an exported items CSV."""
    with open(items_csv, encoding="utf-8") as f:
        items = parse_items_csv(f.read())
    model = fit_ols(items)
    click.echo(f"items:          {len(items)}")
    click.echo(f"intercept:      {model.intercept: .6f}")
    click.echo(f"coef pwld:      {model.coef_pwld: .6f}")
    click.echo(f"coef length:    {model.coef_length: .6f}")
    click.echo(f"coef existence: {model.coef_existence: .6f}")
    click.echo(f"R^2:            {model.r_squared:.6f}")
    click.echo(f"F({model.df[0]}, {model.df[1]:g}) = {model.f_statistic:.6f}")


@main.command()
@click.option("-o", "--output", type=click.Path(dir_okay=False), default=None, help="Write CSV here instead of stdout.")
@click.option("--pilot-compat", is_flag=True, help="Include unfinished sessions, as the first deployment did.")
@data_option
@inventory_option
@_handle_errors
def export(output, pilot_compat, data_dir, inventory_path):
    """Aggregate responses into the per-item CSV used by `fit`."""
    store = _open_store(data_dir, inventory_path)
    items = collect_item_stats(store, completed_sessions_only=not pilot_compat)
    text = export_csv(items)
    if output:
        Path(output).write_text(text, encoding="utf-8")
        click.echo(f"wrote {len(items)} item rows to {output}")
    else:
        click.echo(text, nl=False)


@main.command()
@click.option("--port", default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--assets", "assets_dir", default="assets", show_default=True, help="Audio assets directory.")
@click.option("--ui", "ui_dir", type=click.Path(exists=True, file_okay=False), default=None,
              help="Built browser client to mount at / (e.g. frontend/dist).")
@click.option("--pilot-compat", is_flag=True, help="Lax profile rules and unfiltered export.")
@data_option
@inventory_option
@_handle_errors
def serve(port, host, assets_dir, ui_dir, pilot_compat, data_dir, inventory_path):
    """Run the HTTP API."""
    import uvicorn

    from .service import create_app

    store = _open_store(data_dir, inventory_path)
    app = create_app(store, assets_dir=assets_dir, ui_dir=ui_dir, pilot_compat=pilot_compat)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
