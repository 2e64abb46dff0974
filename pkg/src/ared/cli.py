"""Command-line entry points: benchmark tables, interactive sessions backed
by a session file, and the HTTP service."""

from __future__ import annotations

import json
import sys

import click

from . import benchmarks, controller, session_io
from .core import Domain, Provenance, Sample, SessionConfig, VariableRange
from .errors import AredError


@click.group()
def main():
    """Adaptive random experiment design toolkit."""


@main.command()
@click.option("--function", "function_id", required=True,
              type=click.Choice(sorted(benchmarks.BENCHMARKS)))
@click.option("--trials", default=10, show_default=True)
@click.option("--seed", default=20240601, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
def bench(function_id, trials, seed, out_path):
    """Run adaptive-vs-baseline trials and write the comparison CSV."""
    table = benchmarks.run_comparison(function_id, trials, seed)
    session_io.export_comparison_csv(table, out_path)
    counts = [o.adaptive_row.case_count for o in table.trials]
    click.echo(
        f"{function_id}: {trials} trials, selected cases "
        f"min={min(counts)} max={max(counts)} mean={sum(counts)/len(counts):.1f}"
    )
    for row in table.rows:
        mape = "" if row.mape is None else f" mape={row.mape:.3f}%"
        click.echo(
            f"  {row.source:>8} cases={row.case_count:>3} "
            f"mae={row.mae:.5g}{mape} r={row.r:.5f}"
        )
    click.echo(f"wrote {out_path}")


@main.group()
def session():
    """Interactive experiment sessions stored in a JSON file."""


def _load_config_file(path: str) -> tuple[SessionConfig, list[Sample]]:
    with open(path) as fh:
        doc = json.load(fh)
    domain = Domain(
        ivs=[VariableRange(r["name"], r["low"], r["high"]) for r in doc["domain"]["ivs"]],
        dv_name=doc["domain"]["dv_name"],
    )
    overrides = doc.get("overrides", {})
    config = SessionConfig.for_domain(domain, doc.get("rng_seed", 0), **overrides)
    initial = [
        Sample(s["coords"], s["value"], Provenance.INITIAL, i)
        for i, s in enumerate(doc["initial_samples"])
    ]
    return config, initial


@session.command("new")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", default="session.json", show_default=True)
def session_new(config_path, out_path):
    """Start a session from a config file with measured initial samples."""
    try:
        config, initial = _load_config_file(config_path)
        state = controller.start_session(config, initial)
    except (AredError, KeyError, ValueError) as err:
        raise click.ClickException(f"{type(err).__name__}: {err}")
    session_io.save_session(state, out_path)
    click.echo(f"session ready: {len(state.archive)} initial samples -> {out_path}")


@session.command("propose")
@click.option("--session", "session_path", default="session.json", show_default=True,
              type=click.Path(exists=True))
def session_propose(session_path):
    """Propose the next experimental condition."""
    try:
        state = session_io.load_session(session_path)
        sample = controller.propose_next(state)
    except AredError as err:
        raise click.ClickException(f"{type(err).__name__}: {err}")
    session_io.save_session(state, session_path)
    names = [r.name for r in state.domain.ivs]
    coords = ", ".join(f"{n}={c:.6g}" for n, c in zip(names, sample.coords))
    click.echo(f"case #{sample.sequence_index} ({sample.provenance.value}): {coords}")
    predicted = controller.predicted_value(state, sample.coords)
    if predicted is not None:
        click.echo(f"  predicted {state.domain.dv_name} = {predicted:.6g}")
    audit = state.pending_audit
    click.echo(f"  spacing: d={audit.nearest_distance:.4g} > threshold={audit.threshold:.4g}")


@session.command("record")
@click.option("--session", "session_path", default="session.json", show_default=True,
              type=click.Path(exists=True))
@click.option("--value", required=True, type=float)
def session_record(session_path, value):
    """Record the measured value for the pending case."""
    try:
        state = session_io.load_session(session_path)
        record = controller.record_result(state, value)
    except AredError as err:
        raise click.ClickException(f"{type(err).__name__}: {err}")
    session_io.save_session(state, session_path)
    rep = record.report
    click.echo(
        f"archive={record.archive_size} mae={rep.mae:.5g} mape={rep.mape:.3f}% "
        f"r={rep.r:.5f} passed={record.passed}"
    )
    if record.feedback is not None:
        click.echo(f"  feedback around {list(record.feedback.coords)} "
                   f"(ape {record.feedback.triggering_ape:.2f}%)")
    click.echo(f"status: {state.status.value}")


@session.command("export-model")
@click.option("--session", "session_path", default="session.json", show_default=True,
              type=click.Path(exists=True))
@click.option("--out", "out_path", default="model.json", show_default=True)
@click.option("--force", is_flag=True, help="export even before convergence")
def session_export(session_path, out_path, force):
    """Write the trained model artifact."""
    try:
        state = session_io.load_session(session_path)
        artifact = controller.export_model(state, force=force)
    except AredError as err:
        raise click.ClickException(f"{type(err).__name__}: {err}")
    session_io.save_model_artifact(artifact, out_path)
    click.echo(f"model artifact -> {out_path}")


@main.command()
@click.option("--bind", default="127.0.0.1:8000", show_default=True)
@click.option("--data", "data_dir", default=None, help="session store directory")
@click.option("--token", default=None, help="require X-ARED-Token on every request")
def serve(bind, data_dir, token):
    """Serve the HTTP session API (and the dashboard, when built)."""
    import uvicorn

    from .server import create_app, default_static_dir

    host, _, port = bind.rpartition(":")
    if not host or not port.isdigit():
        raise click.ClickException(f"--bind must be HOST:PORT, got {bind!r}")
    app = create_app(data_dir=data_dir, token=token, static_dir=default_static_dir())
    uvicorn.run(app, host=host, port=int(port), log_level="info")


if __name__ == "__main__":
    sys.exit(main())
