"""Experiment drivers behind the command-line reports.

Three studies, all emitting plain row dictionaries for the report
writers:

- convergence: dyadic refinements of [0,1] with one node per cell,
  bounds next to realized errors and the analytic adversarial error.
- perturb: spike overrides fired at a base function; essential bounds
  must not move a bit, a deliberately naive pointwise baseline must blow
  up, and seeded point-set errors must be unchanged.
- verify: the exhaustive finite-space sweep, optionally in parallel.

The adversarial analysis here is the cube-space counterpart of the
finite-space exhaustive oracle.  With one node per cell the error
splits into independent per-cell deviations measure_j * (f(t_j) -
cell_average_j), so the worst edge placement is found by maximizing
each cell's deviation over its two edges separately (closure values;
for a monotone cell those are the extreme deviations).
"""

from __future__ import annotations

import math
import random
from concurrent.futures import ThreadPoolExecutor
from typing import Sequence

import numpy as np

from .bounds import bound_set
from .errors import QmcBoundsError
from .estimator import integration_error
from .funcmodel import Affine, FunctionModel, Quadratic, Sinusoid
from .instances import Instance, instance_to_json
from .oracle import VerificationVerdict, verify_instance
from .pointsets import (
    DEFAULT_ENUMERATION_CAP,
    STRATEGY_RANDOM,
    allocation,
    construct_uniform,
)
from .spaces import CubeSpace, Partition, equal_partition_1d

MAX_REFINEMENT_DEPTH = 20

NAMED_FUNCTIONS = ("x", "x2", "sin2pix", "const")


def named_function(name: str) -> FunctionModel:
    """Small roster of 1D study functions addressable from the CLI."""
    if name == "x":
        return FunctionModel(Affine(0.0, (1.0,)))
    if name == "x2":
        return FunctionModel(Quadratic(0.0, (0.0,), (1.0,)))
    if name == "sin2pix":
        return FunctionModel(Sinusoid(amplitude=1.0, frequency=1.0))
    if name == "const":
        return FunctionModel(Affine(1.0, (0.0,)))
    raise QmcBoundsError(f"unknown function name {name!r}, expected one of {NAMED_FUNCTIONS}")


def _require_study_function(f: FunctionModel) -> None:
    if f.is_finite or f.dimension != 1:
        raise QmcBoundsError("refinement studies need a one-dimensional cube function")
    if f.range_mode is not None:
        raise QmcBoundsError("refinement studies need the exact range oracle")


def edge_placement_worst_error(f: FunctionModel, partition: Partition) -> float:
    """Largest |average - integral| over one-node-per-cell edge placements.

    Requires an allocation of exactly one node per cell.  Deviations are
    evaluated at both cell edges (values on the closure; the right edge
    is approached from inside the half-open cell), and per-cell choices
    are independent, so the two signed extremes assemble cell by cell.
    """
    space = partition.space
    if not isinstance(space, CubeSpace) or space.dimension != 1:
        raise QmcBoundsError("edge placement analysis is one-dimensional")
    counts = allocation(partition, partition.k)
    if any(c != 1 for c in counts):
        raise QmcBoundsError("edge placement analysis needs one node per cell")
    up_terms = []
    down_terms = []
    for cell, measure in zip(partition.cells, partition.measures):
        average = f.cell_integral(cell, space) / measure
        dev_left = f.base_value((cell.lower[0],)) - average
        dev_right = f.base_value((cell.upper[0],)) - average
        up_terms.append(measure * max(dev_left, dev_right))
        down_terms.append(measure * min(dev_left, dev_right))
    return max(math.fsum(up_terms), -math.fsum(down_terms), 0.0)


def convergence_table(f: FunctionModel, depth: int, strategy: str,
                      seed: int = 0) -> list[dict]:
    """Rows (k, bounds, realized error, adversarial error) for k = 2^m."""
    _require_study_function(f)
    if not 1 <= depth <= MAX_REFINEMENT_DEPTH:
        raise QmcBoundsError(f"depth must be in 1..{MAX_REFINEMENT_DEPTH}, got {depth}")
    rows = []
    spike_points = [p for p, _ in f.spikes]
    for m in range(1, depth + 1):
        k = 2 ** m
        partition = equal_partition_1d(k)
        bounds = bound_set(f, partition)
        pointset = construct_uniform(
            partition, k, strategy, seed=seed, avoid_points=spike_points
        )
        realized = integration_error(f, pointset, partition.space)
        rows.append({
            "k": k,
            "corollary2": bounds.corollary2,
            "corollary1": bounds.corollary1,
            "theorem1": bounds.theorem1,
            "realized_error": realized,
            "adversarial_error": edge_placement_worst_error(f, partition),
        })
    return rows


def naive_pointwise_s(f: FunctionModel, partition: Partition,
                      resolution: int = 512) -> float:
    """Deliberately wrong baseline: the worst-cell POINTWISE oscillation.

    Samples a dense grid per cell and, unlike the essential machinery,
    includes the spike coordinates, so a single spike inflates it.  This
    is the foil the perturbation study reports against the certified
    bounds; it certifies nothing.
    """
    space = partition.space
    if not isinstance(space, CubeSpace) or space.dimension != 1:
        raise QmcBoundsError("the naive baseline study is one-dimensional")
    worst = 0.0
    for cell in partition.cells:
        lo, hi = cell.lower[0], cell.upper[0]
        ts = list(np.linspace(lo, hi, resolution + 1))
        ts.extend(p[0] for p, _ in f.spikes if cell.contains(p))
        values = [f.evaluate((t,)) for t in ts]
        worst = max(worst, max(values) - min(values))
    return worst


def perturb_table(f_base: FunctionModel, k: int, n_spikes: int, seed: int = 0,
                  magnitude: float | None = None, placement_seeds: int = 1000,
                  resolution: int = 512) -> tuple[list[dict], dict]:
    """Spike-robustness rows plus a summary.

    Spikes land at seeded-random coordinates with magnitudes drawn
    log-uniformly from [1e3, 1e6] unless one is pinned.  Point sets are
    constructed once per seed with the spike coordinates vetoed, so the
    before/after realized errors compare the same nodes.
    """
    _require_study_function(f_base)
    if f_base.spikes:
        raise QmcBoundsError("the perturbation study adds its own spikes")
    partition = equal_partition_1d(k)
    space = partition.space
    rng = random.Random(seed)
    spikes = []
    for _ in range(n_spikes):
        point = (rng.uniform(0.0, 1.0),)
        value = magnitude if magnitude is not None else 10.0 ** rng.uniform(3.0, 6.0)
        spikes.append((point, value))
    f_spiked = FunctionModel(f_base.base, tuple(spikes), f_base.range_mode)
    spike_points = [p for p, _ in spikes]

    before = bound_set(f_base, partition)
    after = bound_set(f_spiked, partition)
    rows = []
    for name, b, a in (
        ("theorem1", before.theorem1, after.theorem1),
        ("corollary1", before.corollary1, after.corollary1),
        ("corollary2", before.corollary2, after.corollary2),
    ):
        rows.append({
            "metric": name, "seed": "", "before": b, "after": a,
            "identical": b == a,
        })
    naive_before = naive_pointwise_s(f_base, partition, resolution)
    naive_after = naive_pointwise_s(f_spiked, partition, resolution)
    rows.append({
        "metric": "naive_pointwise_s", "seed": "",
        "before": naive_before, "after": naive_after,
        "identical": naive_before == naive_after,
    })
    identical_errors = 0
    for i in range(placement_seeds):
        pointset = construct_uniform(
            partition, k, STRATEGY_RANDOM,
            seed=seed + 1 + i, avoid_points=spike_points,
        )
        err_before = integration_error(f_base, pointset, space)
        err_after = integration_error(f_spiked, pointset, space)
        same = err_before == err_after
        identical_errors += same
        rows.append({
            "metric": "realized_error", "seed": seed + 1 + i,
            "before": err_before, "after": err_after, "identical": same,
        })
    summary = {
        "bounds_identical": all(
            r["identical"] for r in rows
            if r["metric"] in ("theorem1", "corollary1", "corollary2")
        ),
        "naive_before": naive_before,
        "naive_after": naive_after,
        "naive_blowup": naive_after / naive_before if naive_before > 0 else math.inf,
        "placement_seeds": placement_seeds,
        "identical_errors": identical_errors,
        "spikes": n_spikes,
    }
    return rows, summary


def run_verification(instances: Sequence[Instance],
                     cap: int = DEFAULT_ENUMERATION_CAP,
                     workers: int = 1,
                     inject_violation: bool = False):
    """Verify instances (in declared order) and build the summary record.

    Results are collected in instance order regardless of worker count,
    so the output is byte-stable.  ``inject_violation`` appends one
    synthetic failed verdict; it exists so the failure exit path can be
    exercised without a real soundness bug.
    """
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            verdicts = list(pool.map(lambda inst: verify_instance(inst, cap), instances))
    else:
        verdicts = [verify_instance(inst, cap) for inst in instances]
    passed = sum(1 for v in verdicts if v.passed)
    failed = len(verdicts) - passed
    worst: VerificationVerdict | None = None
    for v in verdicts:
        if worst is None or v.tightness > worst.tightness:
            worst = v
    summary = {
        "instances": len(verdicts),
        "passed": passed,
        "failed": failed,
        "max_tightness": worst.tightness if worst is not None else None,
        "worst_instance": instance_to_json(worst.instance) if worst is not None else None,
    }
    injected = None
    if inject_violation:
        injected = {
            "instance_id": "injected-violation",
            "worst_error": 1.0,
            "passed": False,
        }
        summary["instances"] += 1
        summary["failed"] += 1
        summary["injected"] = True
    return verdicts, summary, injected
