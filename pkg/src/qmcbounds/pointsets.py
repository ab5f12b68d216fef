"""Uniform point sets: allocation, construction, checking, enumeration.

A point set of size N is uniform for a partition when every cell M_j
contains exactly N * measure(M_j) nodes.  Those products must all be
integers for such a set to exist at all; ``allocation`` checks that
first and, on failure, suggests the smallest feasible size at or above
the request.

``enumerate_uniform`` walks every uniform configuration of a finite
space as a product of per-cell multisets (node order within a cell never
matters to an average), which keeps the count to a product of
multichoose terms instead of a power of the atom count.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement, product
from typing import Iterable, Iterator, Sequence

from .errors import (
    EnumerationTooLargeError,
    InstanceFormatError,
    NonIntegerAllocationError,
    OutOfDomainError,
)
from .spaces import BoxCell, CubeSpace, FiniteCell, FiniteSpace, Partition, Space, partition_hash

# |N * measure - nearest integer| must stay within this for feasibility.
ALLOCATION_TOL = 1e-9

# Refuse to enumerate configuration sets larger than this by default.
DEFAULT_ENUMERATION_CAP = 10_000_000

STRATEGY_MIDPOINT = "cell-midpoint"
STRATEGY_EQUISPACED = "per-cell-equispaced"
STRATEGY_RANDOM = "seeded-random-in-cell"
STRATEGIES = (STRATEGY_MIDPOINT, STRATEGY_EQUISPACED, STRATEGY_RANDOM)


def _smallest_feasible(measures: Sequence[float], n_points: int) -> int | None:
    """Smallest N' >= n_points with every N' * measure integral, if found."""
    denominators = [
        Fraction(m).limit_denominator(10**9).denominator for m in measures
    ]
    step = math.lcm(*denominators)

    def feasible(n: int) -> bool:
        return all(abs(n * m - round(n * m)) <= ALLOCATION_TOL for m in measures)

    candidate = ((n_points + step - 1) // step) * step
    if candidate == n_points:
        candidate += step
    for n in (candidate, candidate + step, candidate + 2 * step):
        if n >= n_points and feasible(n):
            return n
    for n in range(n_points + 1, n_points + 1_000_001):
        if feasible(n):
            return n
    return None


def allocation(partition: Partition, n_points: int) -> tuple[int, ...]:
    """Exact per-cell node counts N * measure(M_j), or a feasibility error."""
    if n_points < 1:
        raise ValueError(f"n_points must be >= 1, got {n_points}")
    counts = []
    for j, m in enumerate(partition.measures):
        target = n_points * m
        nearest = round(target)
        if abs(target - nearest) > ALLOCATION_TOL:
            raise NonIntegerAllocationError(
                f"cell {j} needs {target!r} nodes for n_points={n_points}; "
                f"smallest feasible size is {_smallest_feasible(partition.measures, n_points)}",
                cell_index=j,
                product=target,
                suggested_n=_smallest_feasible(partition.measures, n_points),
            )
        counts.append(int(nearest))
    if sum(counts) != n_points:
        raise NonIntegerAllocationError(
            f"rounded cell counts sum to {sum(counts)}, not {n_points}",
            suggested_n=_smallest_feasible(partition.measures, n_points),
        )
    return tuple(counts)


@dataclass(frozen=True)
class UniformPointSet:
    """Nodes grouped by cell order, with the allocation that produced them."""

    nodes: tuple
    allocation: tuple[int, ...]
    n_points: int


@dataclass(frozen=True)
class UniformityReport:
    """Outcome of a uniformity check; truthy exactly when it passed."""

    ok: bool
    counts: tuple[int, ...]
    expected: tuple[float, ...]
    n_points: int

    def __bool__(self) -> bool:
        return self.ok


def _place_in_box(cell: BoxCell, count: int, strategy: str,
                  rng: random.Random, avoid: frozenset) -> list[tuple[float, ...]]:
    if strategy == STRATEGY_MIDPOINT:
        center = tuple((lo + hi) / 2.0 for lo, hi in zip(cell.lower, cell.upper))
        return [center] * count
    if strategy == STRATEGY_EQUISPACED:
        # nodes at offsets (i - 1/2)/count along every axis of the cell
        out = []
        for i in range(1, count + 1):
            t = (i - 0.5) / count
            out.append(tuple(lo + (hi - lo) * t for lo, hi in zip(cell.lower, cell.upper)))
        return out
    out = []
    for _ in range(count):
        while True:
            node = tuple(rng.uniform(lo, hi) for lo, hi in zip(cell.lower, cell.upper))
            # uniform() may return the open endpoint; spike coordinates are vetoed
            if cell.contains(node) and node not in avoid:
                out.append(node)
                break
    return out


def _place_in_finite_cell(cell: FiniteCell, count: int, strategy: str,
                          rng: random.Random) -> list[int]:
    atoms = cell.atoms
    if strategy == STRATEGY_MIDPOINT:
        return [atoms[(len(atoms) - 1) // 2]] * count
    if strategy == STRATEGY_EQUISPACED:
        return [atoms[i % len(atoms)] for i in range(count)]
    return [rng.choice(atoms) for _ in range(count)]


def construct_uniform(partition: Partition, n_points: int,
                      strategy: str = STRATEGY_MIDPOINT, seed: int = 0,
                      avoid_points: Iterable = ()) -> UniformPointSet:
    """Build a uniform point set with the requested placement strategy.

    ``avoid_points`` lists exact coordinates the seeded-random strategy
    must never emit (spike overrides, typically); the deterministic
    strategies place nodes without drawing and ignore it.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}, expected one of {STRATEGIES}")
    counts = allocation(partition, n_points)
    rng = random.Random(seed)
    space = partition.space
    nodes: list = []
    if isinstance(space, FiniteSpace):
        for cell, count in zip(partition.cells, counts):
            nodes.extend(_place_in_finite_cell(cell, count, strategy, rng))
    else:
        avoid = frozenset(space.as_point(p) for p in avoid_points)
        for cell, count in zip(partition.cells, counts):
            nodes.extend(_place_in_box(cell, count, strategy, rng, avoid))
    return UniformPointSet(tuple(nodes), counts, n_points)


def _as_nodes(pointset) -> tuple:
    if isinstance(pointset, UniformPointSet):
        return pointset.nodes
    return tuple(pointset)


def is_uniform(pointset, partition: Partition) -> UniformityReport:
    """Count nodes per cell and compare with the exact products N * measure.

    Nodes must lie in the space (error otherwise); a node in no cell is
    counted nowhere and shows up as a shortfall.
    """
    nodes = _as_nodes(pointset)
    n = len(nodes)
    counts = [0] * partition.k
    for node in nodes:
        j = partition.cell_index_of(node)
        if j is not None:
            counts[j] += 1
    expected = tuple(n * m for m in partition.measures)
    ok = n > 0
    for got, want in zip(counts, expected):
        nearest = round(want)
        if abs(want - nearest) > ALLOCATION_TOL or got != nearest:
            ok = False
    return UniformityReport(ok, tuple(counts), expected, n)


@dataclass(frozen=True)
class ConfigurationStream:
    """Re-iterable stream over every uniform configuration of a finite space.

    Each configuration is a tuple over cells; the entry for a cell is a
    nondecreasing tuple of atom indices (a multiset).  Iteration order is
    lexicographic by cell index, then by atom indices, and every call to
    iter() starts a fresh pass.
    """

    total_count: int
    per_cell: tuple[tuple[tuple[int, ...], ...], ...]

    def __iter__(self) -> Iterator[tuple[tuple[int, ...], ...]]:
        return product(*self.per_cell)

    def __len__(self) -> int:
        return self.total_count


def enumerate_uniform(space: Space, partition: Partition, n_points: int,
                      cap: int = DEFAULT_ENUMERATION_CAP) -> ConfigurationStream:
    """All uniform configurations, as per-cell multisets of atom indices.

    The count is the product over cells of multichoose(|cell|, count);
    anything above ``cap`` raises before any work is done.
    """
    if not isinstance(space, FiniteSpace):
        raise OutOfDomainError("exhaustive enumeration is defined for finite spaces only")
    counts = allocation(partition, n_points)
    total = 1
    for cell, count in zip(partition.cells, counts):
        total *= math.comb(len(cell.atoms) + count - 1, count)
    if total > cap:
        raise EnumerationTooLargeError(
            f"{total} configurations exceed the cap of {cap}"
        )
    per_cell = tuple(
        tuple(combinations_with_replacement(cell.atoms, count))
        for cell, count in zip(partition.cells, counts)
    )
    return ConfigurationStream(total, per_cell)


def save_pointset(path, pointset, partition: Partition) -> None:
    """Write the text form: a header with N and the partition hash, then
    one node per line (atom label, or coordinates separated by spaces)."""
    nodes = _as_nodes(pointset)
    space = partition.space
    lines = [f"# qmcbounds-pointset N={len(nodes)} partition={partition_hash(partition)}"]
    for node in nodes:
        if isinstance(space, FiniteSpace):
            lines.append(space.labels[space.as_point(node)])
        else:
            lines.append(" ".join(repr(c) for c in space.as_point(node)))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_pointset(path, space: Space, partition: Partition | None = None) -> tuple:
    """Read the text form back; verifies the header hash when a partition
    is supplied."""
    with open(path, "r", encoding="utf-8") as fh:
        raw = [line.strip() for line in fh if line.strip()]
    if not raw or not raw[0].startswith("# qmcbounds-pointset"):
        raise InstanceFormatError(f"{path}: missing point-set header")
    header = raw[0]
    fields = dict(
        part.split("=", 1) for part in header[1:].split() if "=" in part
    )
    try:
        n_declared = int(fields["N"])
        hash_declared = fields["partition"]
    except (KeyError, ValueError) as exc:
        raise InstanceFormatError(f"{path}: malformed header {header!r}") from exc
    if partition is not None and partition_hash(partition) != hash_declared:
        raise InstanceFormatError(
            f"{path}: point set was written for a different partition"
        )
    nodes = []
    for line in raw[1:]:
        if isinstance(space, FiniteSpace):
            nodes.append(space.index_of(line))
        else:
            nodes.append(tuple(float(tok) for tok in line.split()))
    if len(nodes) != n_declared:
        raise InstanceFormatError(
            f"{path}: header declares {n_declared} nodes, file has {len(nodes)}"
        )
    return tuple(nodes)
