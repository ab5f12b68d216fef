"""Command-line reports over the library.

Four subcommands: ``verify`` (exhaustive finite-space soundness sweep),
``bounds`` (bound values for one instance, optionally scored against a
point-set file), ``convergence`` (dyadic refinement study on [0,1]), and
``perturb`` (spike-robustness study).  Reports are CSV or structured
JSON, written atomically; rerunning a command with the same inputs
produces byte-identical files.

Exit codes: 0 on success, 1 when a verification or certification check
fails, 2 for usage and configuration errors.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import reports
from .bounds import bound_set
from .errors import NotUniformError, QmcBoundsError
from .estimator import bound_report
from .experiments import (
    MAX_REFINEMENT_DEPTH,
    NAMED_FUNCTIONS,
    convergence_table,
    named_function,
    perturb_table,
    run_verification,
)
from .instances import load_instances
from .oracle import small_exhaustive_suite
from .pointsets import DEFAULT_ENUMERATION_CAP, STRATEGIES, load_pointset
from .spaces import FiniteSpace

FORMAT_CHOICE = click.Choice(["csv", "structured"])


def _echo_rows(rows, columns) -> None:
    click.echo(reports.render_csv(rows, columns), nl=False)


@click.group()
def main():
    """Uniform point sets with certified integration error bounds."""


@main.command("verify")
@click.option("--suite", type=click.Choice(["small-exhaustive"]), default=None,
              help="Run a built-in instance suite instead of a config file.")
@click.option("--config", "config_path", type=click.Path(path_type=Path), default=None,
              help="JSON file with one instance or a list of instances.")
@click.option("--out", "out_path", type=click.Path(path_type=Path), default=None,
              help="Write per-instance verdict rows here.")
@click.option("--format", "fmt", type=FORMAT_CHOICE, default="csv", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True,
              help="Seed offset for the built-in suite.")
@click.option("--workers", type=int, default=1, show_default=True)
@click.option("--cap", type=int, default=DEFAULT_ENUMERATION_CAP, show_default=True,
              help="Refuse instances with more configurations than this.")
@click.option("--inject-violation", is_flag=True, hidden=True)
def cmd_verify(suite, config_path, out_path, fmt, seed, workers, cap, inject_violation):
    """Exhaustively verify the bounds on finite-space instances."""
    if (suite is None) == (config_path is None):
        raise click.UsageError("pass exactly one of --suite or --config")
    if suite is not None:
        instances = small_exhaustive_suite(seed_offset=seed)
    else:
        try:
            instances = load_instances(config_path)
        except QmcBoundsError as exc:
            raise click.UsageError(str(exc))
        for inst in instances:
            if not isinstance(inst.space, FiniteSpace):
                raise click.UsageError(
                    f"instance {inst.instance_id!r}: verification is finite-space only"
                )
            if inst.n_points is None:
                raise click.UsageError(
                    f"instance {inst.instance_id!r}: verification needs N"
                )
    try:
        verdicts, summary, injected = run_verification(
            instances, cap=cap, workers=workers, inject_violation=inject_violation
        )
    except QmcBoundsError as exc:
        raise click.UsageError(str(exc))
    rows = [reports.verdict_row(v) for v in verdicts]
    if injected is not None:
        rows.append({
            "instance_id": injected["instance_id"],
            "atoms": "", "k": "", "N": "", "configurations": "",
            "worst_error": injected["worst_error"],
            "corollary2": 0.0, "corollary1": 0.0, "theorem1": 0.0,
            "tightness": "", "passed": False, "argmax_configuration": "",
        })
    if out_path is not None:
        reports.emit(out_path, rows, reports.VERDICT_COLUMNS, fmt, summary)
    click.echo(json.dumps(summary))
    if summary["failed"] > 0:
        sys.exit(1)


@main.command("bounds")
@click.option("--config", "config_path", type=click.Path(path_type=Path), required=True,
              help="JSON file with one instance.")
@click.option("--points", "points_path", type=click.Path(path_type=Path), default=None,
              help="Point-set file to score against the bounds.")
@click.option("--out", "out_path", type=click.Path(path_type=Path), default=None)
@click.option("--format", "fmt", type=FORMAT_CHOICE, default="csv", show_default=True)
def cmd_bounds(config_path, points_path, out_path, fmt):
    """Bound values for an instance; with --points, the full report."""
    try:
        instances = load_instances(config_path)
    except QmcBoundsError as exc:
        raise click.UsageError(str(exc))
    if len(instances) != 1:
        raise click.UsageError("bounds needs exactly one instance")
    inst = instances[0]
    try:
        bounds = bound_set(inst.function, inst.partition)
    except QmcBoundsError as exc:
        raise click.UsageError(str(exc))
    if points_path is None:
        rows = [reports.boundset_row(bounds, inst.instance_id, inst.n_points,
                                     inst.partition.k)]
        columns = reports.BOUNDSET_COLUMNS
    else:
        try:
            nodes = load_pointset(points_path, inst.space, inst.partition)
        except QmcBoundsError as exc:
            raise click.UsageError(str(exc))
        try:
            report = bound_report(inst.function, inst.partition, nodes,
                                  inst.instance_id)
        except NotUniformError as exc:
            click.echo(f"not uniform: {exc}", err=True)
            sys.exit(1)
        rows = [reports.report_row(report, inst.partition.k)]
        columns = reports.REPORT_COLUMNS
    if out_path is not None:
        reports.emit(out_path, rows, columns, fmt)
    _echo_rows(rows, columns)


@main.command("convergence")
@click.option("--family", type=click.Choice(NAMED_FUNCTIONS), default="x",
              show_default=True)
@click.option("--depth", type=int, default=6, show_default=True,
              help=f"Dyadic refinement depth, at most {MAX_REFINEMENT_DEPTH}.")
@click.option("--strategy", type=click.Choice(STRATEGIES), default="cell-midpoint",
              show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_path", type=click.Path(path_type=Path), default=None)
@click.option("--format", "fmt", type=FORMAT_CHOICE, default="csv", show_default=True)
def cmd_convergence(family, depth, strategy, seed, out_path, fmt):
    """Bounds and realized errors under dyadic refinement of [0,1]."""
    try:
        f = named_function(family)
        rows = convergence_table(f, depth, strategy, seed)
    except QmcBoundsError as exc:
        raise click.UsageError(str(exc))
    if out_path is not None:
        reports.emit(out_path, rows, reports.CONVERGENCE_COLUMNS, fmt)
    _echo_rows(rows, reports.CONVERGENCE_COLUMNS)


@main.command("perturb")
@click.option("--family", type=click.Choice(NAMED_FUNCTIONS), default="x",
              show_default=True)
@click.option("--cells", "k", type=int, default=4, show_default=True)
@click.option("--spikes", "n_spikes", type=int, default=5, show_default=True)
@click.option("--spike-magnitude", type=float, default=None,
              help="Pin every spike to this value instead of drawing from [1e3, 1e6].")
@click.option("--placement-seeds", type=int, default=1000, show_default=True,
              help="Seeded-random point sets to score before and after.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_path", type=click.Path(path_type=Path), default=None)
@click.option("--format", "fmt", type=FORMAT_CHOICE, default="csv", show_default=True)
def cmd_perturb(family, k, n_spikes, spike_magnitude, placement_seeds, seed,
                out_path, fmt):
    """Show that spike overrides cannot move the certified bounds."""
    if k < 1 or n_spikes < 0 or placement_seeds < 0:
        raise click.UsageError("cells must be >= 1, spikes and seeds >= 0")
    try:
        f = named_function(family)
        rows, summary = perturb_table(
            f, k, n_spikes, seed=seed, magnitude=spike_magnitude,
            placement_seeds=placement_seeds,
        )
    except QmcBoundsError as exc:
        raise click.UsageError(str(exc))
    if out_path is not None:
        reports.emit(out_path, rows, reports.PERTURB_COLUMNS, fmt, summary)
    click.echo(json.dumps(summary))
    if not summary["bounds_identical"] or summary["identical_errors"] != placement_seeds:
        sys.exit(1)


if __name__ == "__main__":
    main()
