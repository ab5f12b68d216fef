"""Probability spaces, cells, and partitions.

Two kinds of spaces are supported: finite atomic spaces (ordered, labeled
atoms with strictly positive weights summing to 1) and the unit cube
[0,1]^d with Lebesgue measure.  Cells are sets of atom indices on finite
spaces and axis-aligned boxes on cube spaces.

Boxes are half-open, lower <= x < upper in every axis, except that a face
with upper coordinate exactly 1 is closed.  Under this convention a
disjoint family of boxes whose volumes sum to 1 assigns every point of
the cube to exactly one box, so partition membership is unambiguous and
exactly representable with float endpoints.

Points are atom indices (int) on finite spaces and coordinate tuples on
cube spaces; ``as_point`` normalizes user-friendly forms (atom labels,
bare floats in one dimension).
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from typing import ClassVar, Iterable, Mapping, Sequence, Union

from .errors import (
    CoverError,
    EmptyCellError,
    NonPositiveWeightError,
    OutOfDomainError,
    OverlapError,
    WeightSumError,
)

# Absolute tolerance for total-mass checks (weight sums, partition covers).
MASS_TOL = 1e-12


@dataclass(frozen=True)
class FiniteSpace:
    """Finite atomic probability space with labeled atoms."""

    labels: tuple[str, ...]
    weights: tuple[float, ...]

    kind: ClassVar[str] = "finite"

    @property
    def n_atoms(self) -> int:
        return len(self.labels)

    def index_of(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise OutOfDomainError(f"unknown atom label {label!r}") from None

    def as_point(self, value) -> int:
        """Normalize an atom reference (index or label) to an index."""
        if isinstance(value, str):
            return self.index_of(value)
        if isinstance(value, bool) or not isinstance(value, int):
            raise OutOfDomainError(f"not an atom of a finite space: {value!r}")
        if not 0 <= value < self.n_atoms:
            raise OutOfDomainError(f"atom index {value} out of range 0..{self.n_atoms - 1}")
        return value

    def contains(self, point) -> bool:
        try:
            self.as_point(point)
        except OutOfDomainError:
            return False
        return True


@dataclass(frozen=True)
class CubeSpace:
    """The unit cube [0,1]^dimension with Lebesgue measure."""

    dimension: int

    kind: ClassVar[str] = "cube"

    def as_point(self, value) -> tuple[float, ...]:
        """Normalize a point to a coordinate tuple inside the closed cube."""
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            value = (float(value),)
        try:
            coords = tuple(float(c) for c in value)
        except (TypeError, ValueError):
            raise OutOfDomainError(f"not a cube point: {value!r}") from None
        if len(coords) != self.dimension:
            raise OutOfDomainError(
                f"point has {len(coords)} coordinates, space has dimension {self.dimension}"
            )
        for c in coords:
            if not 0.0 <= c <= 1.0 or math.isnan(c):
                raise OutOfDomainError(f"coordinate {c!r} outside [0, 1]")
        return coords

    def contains(self, point) -> bool:
        try:
            self.as_point(point)
        except OutOfDomainError:
            return False
        return True


Space = Union[FiniteSpace, CubeSpace]


def make_finite_space(atoms: Sequence[tuple[str, float]] | Mapping[str, float]) -> FiniteSpace:
    """Build a finite space from (label, weight) pairs.

    Weights must be strictly positive and sum to 1 within MASS_TOL; no
    renormalization is performed, a bad sum is an error.
    """
    if isinstance(atoms, Mapping):
        pairs = list(atoms.items())
    else:
        pairs = [(str(label), float(w)) for label, w in atoms]
    if not pairs:
        raise EmptyCellError("a finite space needs at least one atom")
    labels = tuple(str(label) for label, _ in pairs)
    weights = tuple(float(w) for _, w in pairs)
    if len(set(labels)) != len(labels):
        raise ValueError(f"duplicate atom labels in {labels!r}")
    for label, w in zip(labels, weights):
        if not w > 0.0:
            raise NonPositiveWeightError(f"atom {label!r} has non-positive weight {w!r}")
    total = math.fsum(weights)
    if abs(total - 1.0) > MASS_TOL:
        raise WeightSumError(f"atom weights sum to {total!r}, expected 1")
    return FiniteSpace(labels, weights)


def make_cube_space(dimension: int) -> CubeSpace:
    if dimension < 1:
        raise ValueError(f"dimension must be >= 1, got {dimension}")
    return CubeSpace(int(dimension))


@dataclass(frozen=True)
class FiniteCell:
    """A subset of a finite space, stored as sorted unique atom indices."""

    atoms: tuple[int, ...]

    def __post_init__(self):
        normalized = tuple(sorted(set(int(a) for a in self.atoms)))
        object.__setattr__(self, "atoms", normalized)

    def contains(self, point: int) -> bool:
        return point in self.atoms


@dataclass(frozen=True)
class BoxCell:
    """An axis-aligned box inside the unit cube.

    Half-open in every axis (lower <= x < upper) except that a face with
    upper == 1 is closed.
    """

    lower: tuple[float, ...]
    upper: tuple[float, ...]

    def __post_init__(self):
        lower = tuple(float(c) for c in self.lower)
        upper = tuple(float(c) for c in self.upper)
        if len(lower) != len(upper):
            raise ValueError("lower and upper must have the same length")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def dimension(self) -> int:
        return len(self.lower)

    def volume(self) -> float:
        v = 1.0
        for lo, hi in zip(self.lower, self.upper):
            v *= max(hi - lo, 0.0)
        return v

    def contains(self, point: Sequence[float]) -> bool:
        for c, lo, hi in zip(point, self.lower, self.upper):
            if c < lo:
                return False
            if c >= hi and not (hi == 1.0 and c == 1.0):
                return False
        return True


Cell = Union[FiniteCell, BoxCell]


def box(*bounds: tuple[float, float]) -> BoxCell:
    """Convenience constructor: box((a1, b1), ..., (ad, bd))."""
    lower = tuple(b[0] for b in bounds)
    upper = tuple(b[1] for b in bounds)
    return BoxCell(lower, upper)


def interval(a: float, b: float) -> BoxCell:
    """One-dimensional box [a, b) (closed at b only when b == 1)."""
    return BoxCell((float(a),), (float(b),))


def _boxes_overlap(a: BoxCell, b: BoxCell) -> bool:
    # Positive-volume intersection; shared faces do not count.
    for alo, ahi, blo, bhi in zip(a.lower, a.upper, b.lower, b.upper):
        if min(ahi, bhi) - max(alo, blo) <= 0.0:
            return False
    return True


def _validate_cell(space: Space, cell: Cell, index: int) -> float:
    """Check one cell against its space and return its measure."""
    if isinstance(space, FiniteSpace):
        if not isinstance(cell, FiniteCell):
            raise OutOfDomainError(f"cell {index} is not a finite cell")
        if not cell.atoms:
            raise EmptyCellError(f"cell {index} has no atoms")
        for a in cell.atoms:
            if not 0 <= a < space.n_atoms:
                raise OutOfDomainError(f"cell {index} references missing atom {a}")
        return math.fsum(space.weights[a] for a in cell.atoms)
    if not isinstance(cell, BoxCell):
        raise OutOfDomainError(f"cell {index} is not a box cell")
    if cell.dimension != space.dimension:
        raise OutOfDomainError(
            f"cell {index} has dimension {cell.dimension}, space has {space.dimension}"
        )
    for lo, hi in zip(cell.lower, cell.upper):
        if not (0.0 <= lo <= 1.0 and 0.0 <= hi <= 1.0):
            raise OutOfDomainError(f"cell {index} bounds outside the unit cube")
        if not lo < hi:
            raise EmptyCellError(f"cell {index} has empty extent [{lo!r}, {hi!r})")
    return cell.volume()


@dataclass(frozen=True)
class Partition:
    """An ordered, validated partition of a space into cells.

    ``parents`` maps each cell to its parent's index in the partition it
    was refined from; it is None for partitions built directly.
    """

    space: Space
    cells: tuple[Cell, ...]
    measures: tuple[float, ...]
    parents: tuple[int, ...] | None = None

    @property
    def k(self) -> int:
        return len(self.cells)

    def cell_index_of(self, point) -> int | None:
        """Index of the cell containing the point, None if no cell does."""
        point = self.space.as_point(point)
        for j, cell in enumerate(self.cells):
            if cell.contains(point):
                return j
        return None


def make_partition(space: Space, cells: Sequence[Cell]) -> Partition:
    """Validate cells as a partition of the space and compute measures.

    Cells must be nonempty, pairwise disjoint (positive-measure overlap
    is an error), and cover the space: every atom exactly once on finite
    spaces, total volume 1 within MASS_TOL on cube spaces.
    """
    cells = tuple(cells)
    if not cells:
        raise CoverError("a partition needs at least one cell")
    measures = tuple(_validate_cell(space, cell, j) for j, cell in enumerate(cells))
    for j, m in enumerate(measures):
        if not m > 0.0:
            raise EmptyCellError(f"cell {j} has measure {m!r}")
    if isinstance(space, FiniteSpace):
        seen: dict[int, int] = {}
        for j, cell in enumerate(cells):
            for a in cell.atoms:
                if a in seen:
                    raise OverlapError(f"cells {seen[a]} and {j} share atom {a}")
                seen[a] = j
        missing = [a for a in range(space.n_atoms) if a not in seen]
        if missing:
            raise CoverError(f"atoms {missing} belong to no cell")
    else:
        for i in range(len(cells)):
            for j in range(i + 1, len(cells)):
                if _boxes_overlap(cells[i], cells[j]):
                    raise OverlapError(f"cells {i} and {j} overlap with positive volume")
        total = math.fsum(measures)
        if abs(total - 1.0) > MASS_TOL:
            raise CoverError(f"cell volumes sum to {total!r}, expected 1")
    return Partition(space, cells, measures)


def single_cell_partition(space: Space) -> Partition:
    """The trivial partition whose only cell is the whole space."""
    if isinstance(space, FiniteSpace):
        return make_partition(space, [FiniteCell(tuple(range(space.n_atoms)))])
    d = space.dimension
    return make_partition(space, [BoxCell((0.0,) * d, (1.0,) * d)])


def equal_partition_1d(k: int) -> Partition:
    """[0,1] cut into k equal half-open cells."""
    if k < 1:
        raise ValueError(f"need k >= 1, got {k}")
    space = make_cube_space(1)
    edges = [i / k for i in range(k)] + [1.0]
    cells = [interval(edges[i], edges[i + 1]) for i in range(k)]
    return make_partition(space, cells)


def _validate_split(space: Space, parent: Cell, parent_measure: float,
                    parts: Sequence[Cell], parent_index: int) -> None:
    """A split must be a disjoint cover of its parent cell."""
    parts = tuple(parts)
    if not parts:
        raise CoverError(f"split of cell {parent_index} is empty")
    measures = [_validate_cell(space, c, j) for j, c in enumerate(parts)]
    if isinstance(space, FiniteSpace):
        seen: set[int] = set()
        parent_atoms = set(parent.atoms)
        for j, c in enumerate(parts):
            for a in c.atoms:
                if a not in parent_atoms:
                    raise CoverError(
                        f"split of cell {parent_index} reaches outside it (atom {a})"
                    )
                if a in seen:
                    raise OverlapError(f"split of cell {parent_index} repeats atom {a}")
                seen.add(a)
        if seen != parent_atoms:
            raise CoverError(f"split of cell {parent_index} misses atoms")
    else:
        for j, c in enumerate(parts):
            for lo, hi, plo, phi in zip(c.lower, c.upper, parent.lower, parent.upper):
                if lo < plo or hi > phi:
                    raise CoverError(f"split of cell {parent_index} reaches outside it")
        for i in range(len(parts)):
            for j in range(i + 1, len(parts)):
                if _boxes_overlap(parts[i], parts[j]):
                    raise OverlapError(
                        f"split of cell {parent_index}: parts {i} and {j} overlap"
                    )
        if abs(math.fsum(measures) - parent_measure) > MASS_TOL:
            raise CoverError(f"split of cell {parent_index} does not cover it")


def refine_partition(partition: Partition, splits: Mapping[int, Sequence[Cell]]) -> Partition:
    """Replace selected cells by disjoint covers of themselves.

    ``splits`` maps a cell index to the list of cells replacing it; cells
    not mentioned are kept.  The result records, for every new cell, the
    index of its parent in ``partition``.
    """
    for j in splits:
        if not 0 <= j < partition.k:
            raise ValueError(f"split index {j} out of range for {partition.k} cells")
    new_cells: list[Cell] = []
    parents: list[int] = []
    for j, cell in enumerate(partition.cells):
        if j in splits:
            parts = tuple(splits[j])
            _validate_split(partition.space, cell, partition.measures[j], parts, j)
            new_cells.extend(parts)
            parents.extend([j] * len(parts))
        else:
            new_cells.append(cell)
            parents.append(j)
    refined = make_partition(partition.space, new_cells)
    return Partition(refined.space, refined.cells, refined.measures, tuple(parents))


def dyadic_refine(partition: Partition, axis: int = 0) -> Partition:
    """Halve every box cell along one axis; a 1D convenience for studies."""
    if not isinstance(partition.space, CubeSpace):
        raise ValueError("dyadic_refine needs a cube-space partition")
    splits = {}
    for j, cell in enumerate(partition.cells):
        lo, hi = cell.lower[axis], cell.upper[axis]
        mid = (lo + hi) / 2.0
        left_u = list(cell.upper)
        left_u[axis] = mid
        right_l = list(cell.lower)
        right_l[axis] = mid
        splits[j] = [BoxCell(cell.lower, tuple(left_u)), BoxCell(tuple(right_l), cell.upper)]
    return refine_partition(partition, splits)


def _canonical_cell_text(cell: Cell) -> str:
    if isinstance(cell, FiniteCell):
        return "F:" + ",".join(str(a) for a in cell.atoms)
    spans = ";".join(f"{repr(lo)}..{repr(hi)}" for lo, hi in zip(cell.lower, cell.upper))
    return "B:" + spans


def partition_hash(partition: Partition) -> str:
    """Stable 16-hex digest of the space and cell layout."""
    space = partition.space
    if isinstance(space, FiniteSpace):
        head = "finite|" + ",".join(
            f"{label}:{repr(w)}" for label, w in zip(space.labels, space.weights)
        )
    else:
        head = f"cube:{space.dimension}"
    body = "|".join(_canonical_cell_text(c) for c in partition.cells)
    digest = hashlib.sha256(f"{head}|{body}".encode("utf-8")).hexdigest()
    return digest[:16]
