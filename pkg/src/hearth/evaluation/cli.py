"""Command-line entry points for the evaluation workflow.

Typical session::

    evalrun --backend mock --trials 10 --cells all --out results/
    evalrate --in results/ --rater alice     # writes review_alice.jsonl
    ... fill in the "label" slots ...
    evalrate --in results/ --rater alice     # ingests the labels
    evalreport --in results/ --format table
"""

from __future__ import annotations

import os
import sys
from pathlib import Path

import click

from ..gateway import BackendConfig
from .fixtures import TABLE_CELLS, build_fixture, normalize_command_name
from .reporting import (
    aggregate,
    rate_trials,
    read_review_labels,
    render_csv,
    render_table,
    review_path,
    write_review_file,
)
from .runner import RECORDS_FILENAME, load_records, run_matrix, save_records

DEFAULT_REMOTE_ENDPOINT_VAR = "HEARTH_COMPLETIONS_URL"
DEFAULT_CREDENTIAL_VAR = "HEARTH_API_KEY"
DEFAULT_MODEL_VAR = "HEARTH_MODEL"


def _parse_cells(spec: str) -> list[tuple[str, str]]:
    if spec.strip().lower() == "all":
        return list(TABLE_CELLS)
    cells = []
    for token in spec.split(","):
        token = token.strip()
        if not token:
            continue
        if "/" not in token:
            raise click.BadParameter(
                f"cell {token!r} must look like Context/Command (e.g. Simple/Direct)"
            )
        ctx, cmd = token.split("/", 1)
        cells.append((ctx.strip(), normalize_command_name(cmd.strip())))
    if not cells:
        raise click.BadParameter("no cells given")
    return cells


def _backend_config(backend: str) -> BackendConfig:
    if backend == "mock":
        return BackendConfig(kind="mock")
    endpoint = os.environ.get(DEFAULT_REMOTE_ENDPOINT_VAR)
    if not endpoint:
        raise click.ClickException(
            f"remote backend needs {DEFAULT_REMOTE_ENDPOINT_VAR} set to the completions URL"
        )
    return BackendConfig(
        kind="remote",
        endpoint=endpoint,
        model_name=os.environ.get(DEFAULT_MODEL_VAR, "text-davinci-003"),
        credential_env_var=DEFAULT_CREDENTIAL_VAR,
    )


@click.command()
@click.option("--backend", type=click.Choice(["mock", "remote"]), default="mock")
@click.option("--trials", type=int, default=10, show_default=True)
@click.option("--cells", default="all", show_default=True, help="all or Context/Command list")
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
def evalrun(backend: str, trials: int, cells: str, out_dir: str) -> None:
    """Run the trial grid against a backend and record every response."""
    cell_names = _parse_cells(cells)
    scenarios = [build_fixture(ctx, cmd) for ctx, cmd in cell_names]
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    records_file = out / RECORDS_FILENAME
    if records_file.exists():
        raise click.ClickException(f"{records_file} already exists; refusing to mix runs")
    records = run_matrix(scenarios, trials, _backend_config(backend), out_path=records_file)
    failed = sum(1 for r in records if r.error)
    click.echo(
        f"{len(records)} trials over {len(scenarios)} cells -> {records_file}"
        + (f" ({failed} failed)" if failed else "")
    )


@click.command()
@click.option("--in", "in_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--rater", "rater_id", required=True)
def evalrate(in_dir: str, rater_id: str) -> None:
    """Create a review file for a rater, or ingest it once its labels are filled."""
    records_file = Path(in_dir) / RECORDS_FILENAME
    if not records_file.exists():
        raise click.ClickException(f"no {RECORDS_FILENAME} in {in_dir}")
    records = load_records(records_file)
    review = review_path(in_dir, rater_id)
    if not review.exists():
        write_review_file(records, review)
        click.echo(f"review file written: {review}")
        click.echo('fill each "label" with 0 (poor) or 1 (good), then rerun this command')
        return
    try:
        labels = read_review_labels(review, records)
    except ValueError as exc:
        raise click.ClickException(str(exc))
    rate_trials(records, rater_id, labels)
    save_records(records, records_file)
    click.echo(f"ingested {len(labels)} labels from rater {rater_id!r}")


@click.command()
@click.option("--in", "in_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option(
    "--format", "fmt", type=click.Choice(["table", "csv"]), default="table", show_default=True
)
def evalreport(in_dir: str, fmt: str) -> None:
    """Aggregate rated records into the result grid."""
    records_file = Path(in_dir) / RECORDS_FILENAME
    if not records_file.exists():
        raise click.ClickException(f"no {RECORDS_FILENAME} in {in_dir}")
    records = load_records(records_file)
    try:
        report = aggregate(records)
    except ValueError as exc:
        raise click.ClickException(str(exc))
    if fmt == "table":
        click.echo(render_table(report))
    else:
        sys.stdout.write(render_csv(report))
