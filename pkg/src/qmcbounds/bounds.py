"""Certified worst-case integration error bounds over a partition.

For a partition M_1..M_k with per-cell essential ranges [g_j, G_j],
three bounds on |point-set average - integral| hold simultaneously for
every uniform point set (up to null sets of configurations):

- theorem1   = 2 * distance_to_span(f, partition): twice the sup-norm
  distance from f to the span of the cell indicators (plus constants).
  The certified mechanism: the point-set average of any function in that
  span is exactly its integral, so replacing f by its best approximant l
  costs at most ||f - l||_inf on each side.
- corollary1 = s_value(f, partition) = max_j (G_j - g_j), the worst
  single-cell essential oscillation.
- corollary2 = sum_j measure_j * (G_j - g_j), the measure-weighted
  oscillation.  Always <= corollary1, and it is exact per cell: the
  cell's node average and the cell's integral share [g_j, G_j] scaled by
  measure_j.

Why distance_to_span equals s_value / 2 on a partition: the indicator
span restricted to a partition is exactly the piecewise-constant
functions (the constant 1 is itself the sum of the indicators).  The
cells are disjoint, so each cell's constant can be chosen independently,
and the best constant against an essential range [g, G] is the midpoint
(G + g) / 2 with sup-distance (G - g) / 2; no constant does better than
half the oscillation.  Taking the worst cell gives exactly s_value / 2,
attained by optimal_approximant, hence theorem1 == corollary1 on
partitions.  For families of cells that are not a partition this
independence argument fails, so distance_to_span deliberately accepts a
Partition only; use sup_norm_distance with an explicit competitor (upper
bound 2 * ||f - l||_inf), or the exact finite-space minimax in the
oracle module.

The per-cell upper and lower values keep the positive-part/negative-part
case analysis visible: the upper value is -essinf(f^-) when the positive
part vanishes a.e. on the cell and esssup(f^+) otherwise, and dually for
the lower value.  Both cases reduce to the essential supremum (resp.
infimum) of f itself, which the sign-definite tests pin down.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .funcmodel import FunctionModel
from .spaces import Cell, Partition


@dataclass(frozen=True)
class CellExtrema:
    """Essential upper/lower values of f on one cell, with provenance."""

    cell_index: int
    upper: float
    lower: float
    exact: bool

    @property
    def oscillation(self) -> float:
        return self.upper - self.lower


@dataclass(frozen=True)
class ApproximantCoefficients:
    """Per-cell constants defining a piecewise-constant competitor."""

    constants: tuple[float, ...]


@dataclass(frozen=True)
class BoundSet:
    """The three bound values, the span distance, and exactness."""

    theorem1: float
    corollary1: float
    corollary2: float
    distance: float
    exact: bool


def cell_extrema(f: FunctionModel, cell: Cell, cell_index: int = 0) -> CellExtrema:
    """Essential upper and lower values of f on a cell.

    The split mirrors the positive/negative part definitions.  With
    [lo, hi] the essential range of f on the cell:
    """
    rng = f.essential_range(cell)
    lo, hi = rng.lo, rng.hi
    if hi <= 0.0:
        # f^+ vanishes a.e. on the cell; upper value is -essinf(f^-),
        # and essinf(f^-) = -hi here.
        upper = -(-hi)
    else:
        # f^+ has positive mass; upper value is esssup(f^+) = hi.
        upper = max(hi, 0.0)
    if lo >= 0.0:
        # f^- vanishes a.e.; lower value is essinf(f^+) = lo.
        lower = max(lo, 0.0)
    else:
        # f^- has positive mass; lower value is -esssup(f^-) = lo.
        lower = -(-lo)
    return CellExtrema(cell_index, upper, lower, rng.exact)


def _all_extrema(f: FunctionModel, partition: Partition) -> list[CellExtrema]:
    return [cell_extrema(f, cell, j) for j, cell in enumerate(partition.cells)]


def s_value(f: FunctionModel, partition: Partition) -> float:
    """Largest essential oscillation over the cells."""
    return max(e.oscillation for e in _all_extrema(f, partition))


def optimal_approximant(f: FunctionModel, partition: Partition) -> ApproximantCoefficients:
    """Per-cell essential-range midpoints; the sup-norm best piecewise
    constant, with distance s_value / 2."""
    extrema = _all_extrema(f, partition)
    return ApproximantCoefficients(
        tuple((e.upper + e.lower) / 2.0 for e in extrema)
    )


def _constants_of(l) -> tuple[float, ...]:
    if isinstance(l, ApproximantCoefficients):
        return l.constants
    return tuple(float(c) for c in l)


def sup_norm_distance(f: FunctionModel, l, partition: Partition) -> float:
    """Essential sup-norm distance between f and a piecewise constant l
    given by per-cell constants."""
    constants = _constants_of(l)
    if len(constants) != partition.k:
        raise ValueError(f"{len(constants)} constants for {partition.k} cells")
    worst = 0.0
    for e, c in zip(_all_extrema(f, partition), constants):
        worst = max(worst, abs(e.upper - c), abs(e.lower - c))
    return worst


def distance_to_span(f: FunctionModel, partition: Partition) -> float:
    """Exact sup-norm distance from f to the indicator span of a partition.

    Equals s_value / 2; see the module docstring for why the midpoint
    construction is optimal.  Only partitions are accepted: for an
    arbitrary family of cells the per-cell independence breaks down, and
    the caller must instead supply an explicit competitor to
    sup_norm_distance (upper bound 2 * ||f - l||) or use the exact
    finite-space minimax in the oracle module.
    """
    if not isinstance(partition, Partition):
        raise TypeError("distance_to_span needs a validated Partition")
    return s_value(f, partition) / 2.0


def bound_set(f: FunctionModel, partition: Partition) -> BoundSet:
    """Compute all three bounds in one pass over the cells.

    corollary2 sums measure_j * oscillation_j in cell-index order with
    compensated summation; exact is True only when every cell range came
    from an exact oracle.
    """
    extrema = _all_extrema(f, partition)
    s = max(e.oscillation for e in extrema)
    weighted = math.fsum(
        m * e.oscillation for m, e in zip(partition.measures, extrema)
    )
    distance = s / 2.0
    return BoundSet(
        theorem1=2.0 * distance,
        corollary1=s,
        corollary2=weighted,
        distance=distance,
        exact=all(e.exact for e in extrema),
    )
