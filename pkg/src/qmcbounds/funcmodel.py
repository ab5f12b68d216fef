"""Essentially bounded function models with exact per-cell range oracles.

A model is a base function plus a finite tuple of spike overrides
(point, value).  Spikes change pointwise evaluation only: on a cube
space a finite point set is Lebesgue-null, so essential ranges,
integrals, and everything derived from them ignore spikes entirely.  On
a finite space every atom has positive weight, nonempty null sets do not
exist, and spike overrides are therefore rejected at construction.

Base families and their exact essential-range rules over a box cell
(continuity makes the essential range over a positive-volume box equal
to the pointwise range over its closure, so closed forms are exact):

- Affine        intercept + sum_i slope_i * x_i; extremes at box corners,
                separable per axis.
- Quadratic     intercept + sum_i (quad_i * x_i^2 + lin_i * x_i);
                per-axis endpoints plus the vertex when it lies inside.
- Sinusoid      offset + amplitude * sin(2*pi*frequency*x_axis + phase);
                endpoints plus interior critical points of the sine.
- Monotone      arbitrary callable declared coordinate-wise monotone;
                extremes at the two extreme corners.  Integrals use
                adaptive quadrature at QUADRATURE_TOL.
- PiecewiseConstant  constant values on the cells of its own partition;
                range over a query cell collects the values of pieces
                with positive-measure overlap.
- FiniteTable   per-atom values on a finite space; min and max over the
                cell's atoms.

Grid range mode replaces the closed forms of the continuous families
with sampled ranges over a regular grid.  Sampled values are genuine
function values, so the reported hi under-estimates the essential
supremum (and lo over-estimates the infimum) by at most
eps = lipschitz * spacing / 2, which is attached to the result and
propagates an exact=False flag into every derived bound.  The jump
families (PiecewiseConstant, FiniteTable) have no Lipschitz constant and
cheap exact ranges, so they ignore grid mode and stay exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

from .errors import OutOfDomainError, QmcBoundsError
from .spaces import (
    BoxCell,
    Cell,
    CubeSpace,
    FiniteCell,
    FiniteSpace,
    Partition,
    Space,
)

TWO_PI = 2.0 * math.pi

# Declared absolute tolerance of quadrature-backed integrals (Monotone).
QUADRATURE_TOL = 1e-10


@dataclass(frozen=True)
class EssentialRange:
    """Essential infimum and supremum of a model over one cell.

    When ``exact`` is False the values come from grid sampling and
    ``eps`` bounds how far hi may sit below the true supremum (lo above
    the true infimum); sampled values never overshoot.
    """

    lo: float
    hi: float
    exact: bool
    eps: float = 0.0

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"range with lo {self.lo!r} > hi {self.hi!r}")

    @property
    def width(self) -> float:
        return self.hi - self.lo


@dataclass(frozen=True)
class GridRangeMode:
    """Sampled-range fallback: resolution * 2**levels intervals per axis."""

    resolution: int = 64
    levels: int = 2

    def __post_init__(self):
        if self.resolution < 1 or self.levels < 0:
            raise ValueError("grid mode needs resolution >= 1 and levels >= 0")

    @property
    def intervals_per_axis(self) -> int:
        return self.resolution * (2 ** self.levels)


def _require_box(cell: Cell, dimension: int) -> BoxCell:
    if not isinstance(cell, BoxCell) or cell.dimension != dimension:
        raise OutOfDomainError(f"expected a {dimension}-dimensional box cell, got {cell!r}")
    return cell


@dataclass(frozen=True)
class Affine:
    intercept: float
    slopes: tuple[float, ...]

    @property
    def dimension(self) -> int:
        return len(self.slopes)

    def evaluate(self, point: tuple[float, ...]) -> float:
        return self.intercept + math.fsum(a * x for a, x in zip(self.slopes, point))

    def range_on(self, cell: Cell) -> tuple[float, float]:
        cell = _require_box(cell, self.dimension)
        lo = self.intercept
        hi = self.intercept
        for a, l, u in zip(self.slopes, cell.lower, cell.upper):
            lo += min(a * l, a * u)
            hi += max(a * l, a * u)
        return lo, hi

    def integral_over(self, cell: BoxCell, space: CubeSpace) -> float:
        vol = cell.volume()
        center = tuple((l + u) / 2.0 for l, u in zip(cell.lower, cell.upper))
        return vol * self.evaluate(center)

    def lipschitz_bound(self) -> float:
        return math.fsum(abs(a) for a in self.slopes)


@dataclass(frozen=True)
class Quadratic:
    """Separable quadratic: intercept + sum_i (quad_i x_i^2 + lin_i x_i)."""

    intercept: float
    linear: tuple[float, ...]
    quadratic: tuple[float, ...]

    def __post_init__(self):
        if len(self.linear) != len(self.quadratic):
            raise ValueError("linear and quadratic coefficient tuples differ in length")

    @property
    def dimension(self) -> int:
        return len(self.linear)

    def evaluate(self, point: tuple[float, ...]) -> float:
        return self.intercept + math.fsum(
            q * x * x + b * x for q, b, x in zip(self.quadratic, self.linear, point)
        )

    def range_on(self, cell: Cell) -> tuple[float, float]:
        cell = _require_box(cell, self.dimension)
        lo = self.intercept
        hi = self.intercept
        for q, b, l, u in zip(self.quadratic, self.linear, cell.lower, cell.upper):
            candidates = [q * l * l + b * l, q * u * u + b * u]
            if q != 0.0:
                vertex = -b / (2.0 * q)
                if l <= vertex <= u:
                    candidates.append(q * vertex * vertex + b * vertex)
            lo += min(candidates)
            hi += max(candidates)
        return lo, hi

    def integral_over(self, cell: BoxCell, space: CubeSpace) -> float:
        vol = cell.volume()
        # per-axis mean of q t^2 + b t over [l, u]
        avg = math.fsum(
            q * (l * l + l * u + u * u) / 3.0 + b * (l + u) / 2.0
            for q, b, l, u in zip(self.quadratic, self.linear, cell.lower, cell.upper)
        )
        return vol * (self.intercept + avg)

    def lipschitz_bound(self) -> float:
        return math.fsum(
            max(abs(b), abs(2.0 * q + b)) for q, b in zip(self.quadratic, self.linear)
        )


@dataclass(frozen=True)
class Sinusoid:
    """offset + amplitude * sin(2*pi*frequency * x[axis] + phase)."""

    amplitude: float
    frequency: float
    phase: float = 0.0
    offset: float = 0.0
    axis: int = 0
    dimension: int = 1

    def __post_init__(self):
        if not 0 <= self.axis < self.dimension:
            raise ValueError(f"axis {self.axis} out of range for dimension {self.dimension}")
        if self.frequency < 0.0:
            raise ValueError("frequency must be nonnegative")

    def evaluate(self, point: tuple[float, ...]) -> float:
        t = point[self.axis]
        return self.offset + self.amplitude * math.sin(TWO_PI * self.frequency * t + self.phase)

    def _candidates(self, a: float, b: float) -> list[float]:
        ts = [a, b]
        if self.frequency > 0.0 and self.amplitude != 0.0:
            w = TWO_PI * self.frequency
            # critical points: w t + phase = pi/2 + n pi
            n_lo = math.ceil((w * a + self.phase - math.pi / 2.0) / math.pi)
            n_hi = math.floor((w * b + self.phase - math.pi / 2.0) / math.pi)
            for n in range(n_lo, n_hi + 1):
                t = (math.pi / 2.0 + n * math.pi - self.phase) / w
                if a <= t <= b:
                    ts.append(t)
        return ts

    def range_on(self, cell: Cell) -> tuple[float, float]:
        cell = _require_box(cell, self.dimension)
        a, b = cell.lower[self.axis], cell.upper[self.axis]
        values = [
            self.offset + self.amplitude * math.sin(TWO_PI * self.frequency * t + self.phase)
            for t in self._candidates(a, b)
        ]
        return min(values), max(values)

    def integral_over(self, cell: BoxCell, space: CubeSpace) -> float:
        a, b = cell.lower[self.axis], cell.upper[self.axis]
        cross = 1.0
        for i, (l, u) in enumerate(zip(cell.lower, cell.upper)):
            if i != self.axis:
                cross *= u - l
        if self.frequency == 0.0:
            osc = math.sin(self.phase) * (b - a)
        else:
            w = TWO_PI * self.frequency
            osc = (math.cos(w * a + self.phase) - math.cos(w * b + self.phase)) / w
        return cross * (self.offset * (b - a) + self.amplitude * osc)

    def lipschitz_bound(self) -> float:
        return abs(self.amplitude) * TWO_PI * self.frequency


@dataclass(frozen=True)
class Monotone:
    """A callable declared coordinate-wise monotone (+1 up, -1 down per axis).

    The declaration is trusted for ranges (extreme corners); integrals go
    through adaptive quadrature, so this family is for studies rather
    than certified exact arithmetic.  ``lipschitz`` is only needed for
    grid range mode.
    """

    fn: Callable[[tuple[float, ...]], float]
    directions: tuple[int, ...]
    lipschitz: float | None = None
    label: str = ""

    def __post_init__(self):
        if not self.directions or any(d not in (-1, 1) for d in self.directions):
            raise ValueError("directions must be a nonempty tuple of +1/-1")

    @property
    def dimension(self) -> int:
        return len(self.directions)

    def evaluate(self, point: tuple[float, ...]) -> float:
        return float(self.fn(point))

    def range_on(self, cell: Cell) -> tuple[float, float]:
        cell = _require_box(cell, self.dimension)
        low_corner = tuple(
            l if d > 0 else u for d, l, u in zip(self.directions, cell.lower, cell.upper)
        )
        high_corner = tuple(
            u if d > 0 else l for d, l, u in zip(self.directions, cell.lower, cell.upper)
        )
        return float(self.fn(low_corner)), float(self.fn(high_corner))

    def integral_over(self, cell: BoxCell, space: CubeSpace) -> float:
        from scipy import integrate

        if self.dimension == 1:
            value, _ = integrate.quad(
                lambda t: float(self.fn((t,))),
                cell.lower[0],
                cell.upper[0],
                epsabs=QUADRATURE_TOL,
                epsrel=QUADRATURE_TOL,
            )
            return value
        ranges = list(zip(cell.lower, cell.upper))
        value, _ = integrate.nquad(
            lambda *xs: float(self.fn(tuple(xs))),
            ranges,
            opts={"epsabs": QUADRATURE_TOL, "epsrel": QUADRATURE_TOL},
        )
        return value

    def lipschitz_bound(self) -> float | None:
        return self.lipschitz


@dataclass(frozen=True)
class PiecewiseConstant:
    """Constant on each cell of its own partition (finite or cube space)."""

    partition: Partition
    values: tuple[float, ...]

    def __post_init__(self):
        if len(self.values) != self.partition.k:
            raise ValueError(
                f"{len(self.values)} values for {self.partition.k} cells"
            )
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))

    @property
    def dimension(self) -> int | None:
        space = self.partition.space
        return space.dimension if isinstance(space, CubeSpace) else None

    def evaluate(self, point) -> float:
        j = self.partition.cell_index_of(point)
        if j is None:
            raise OutOfDomainError(f"point {point!r} lies in no cell of the piece layout")
        return self.values[j]

    def _overlap_measure(self, piece: Cell, cell: Cell) -> float:
        if isinstance(piece, FiniteCell):
            if not isinstance(cell, FiniteCell):
                raise OutOfDomainError("mixed cell kinds")
            space = self.partition.space
            shared = set(piece.atoms) & set(cell.atoms)
            return math.fsum(space.weights[a] for a in shared)
        if not isinstance(cell, BoxCell):
            raise OutOfDomainError("mixed cell kinds")
        m = 1.0
        for plo, phi, clo, chi in zip(piece.lower, piece.upper, cell.lower, cell.upper):
            m *= max(min(phi, chi) - max(plo, clo), 0.0)
        return m

    def range_on(self, cell: Cell) -> tuple[float, float]:
        hits = [
            v
            for piece, v in zip(self.partition.cells, self.values)
            if self._overlap_measure(piece, cell) > 0.0
        ]
        if not hits:
            raise OutOfDomainError(f"cell {cell!r} meets no piece with positive measure")
        return min(hits), max(hits)

    def integral_over(self, cell: Cell, space: Space) -> float:
        return math.fsum(
            v * self._overlap_measure(piece, cell)
            for piece, v in zip(self.partition.cells, self.values)
        )

    def lipschitz_bound(self) -> float | None:
        return None


@dataclass(frozen=True)
class FiniteTable:
    """Per-atom values on a finite space; optional labels enable lookups."""

    values: tuple[float, ...]
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if self.labels is not None:
            if len(self.labels) != len(self.values):
                raise ValueError("labels and values differ in length")
            object.__setattr__(self, "labels", tuple(str(s) for s in self.labels))

    @property
    def dimension(self) -> None:
        return None

    def evaluate(self, point: int) -> float:
        return self.values[point]

    def range_on(self, cell: Cell) -> tuple[float, float]:
        if not isinstance(cell, FiniteCell):
            raise OutOfDomainError(f"expected a finite cell, got {cell!r}")
        vals = [self.values[a] for a in cell.atoms]
        return min(vals), max(vals)

    def integral_over(self, cell: FiniteCell, space: FiniteSpace) -> float:
        return math.fsum(space.weights[a] * self.values[a] for a in cell.atoms)

    def lipschitz_bound(self) -> float | None:
        return None


BaseFunction = Union[Affine, Quadratic, Sinusoid, Monotone, PiecewiseConstant, FiniteTable]

# Families whose closed-form ranges grid mode replaces.
_CONTINUOUS_FAMILIES = (Affine, Quadratic, Sinusoid, Monotone)


@dataclass(frozen=True)
class FunctionModel:
    """Base function plus spike overrides plus a range-oracle mode.

    Spikes are (point, value) pairs matched by exact coordinates during
    evaluation.  They are a null set, so they never reach ranges or
    integrals, and they are rejected on finite spaces where no nonempty
    null set exists.
    """

    base: BaseFunction
    spikes: tuple[tuple[tuple[float, ...], float], ...] = ()
    range_mode: GridRangeMode | None = None

    _spike_map: dict = field(init=False, repr=False, compare=False, hash=False, default=None)

    def __post_init__(self):
        if self.is_finite and self.spikes:
            raise QmcBoundsError(
                "spike overrides are not allowed on finite spaces: "
                "every atom has positive measure"
            )
        normalized = []
        for point, value in self.spikes:
            if isinstance(point, (int, float)):
                point = (float(point),)
            normalized.append((tuple(float(c) for c in point), float(value)))
        object.__setattr__(self, "spikes", tuple(normalized))
        object.__setattr__(self, "_spike_map", dict(normalized))

    @property
    def is_finite(self) -> bool:
        base = self.base
        if isinstance(base, FiniteTable):
            return True
        if isinstance(base, PiecewiseConstant):
            return isinstance(base.partition.space, FiniteSpace)
        return False

    @property
    def dimension(self) -> int | None:
        return self.base.dimension

    def _normalize_point(self, point):
        if self.is_finite:
            base = self.base
            if isinstance(point, str):
                if isinstance(base, FiniteTable) and base.labels is not None:
                    if point not in base.labels:
                        raise OutOfDomainError(f"unknown atom label {point!r}")
                    return base.labels.index(point)
                if isinstance(base, PiecewiseConstant):
                    return base.partition.space.index_of(point)
                raise OutOfDomainError("label lookup needs a labeled table")
            if isinstance(point, bool) or not isinstance(point, int):
                raise OutOfDomainError(f"not an atom reference: {point!r}")
            if isinstance(base, PiecewiseConstant):
                n = base.partition.space.n_atoms
            else:
                n = len(base.values)
            if not 0 <= point < n:
                raise OutOfDomainError(f"atom index {point} out of range 0..{n - 1}")
            return point
        if isinstance(point, (int, float)) and not isinstance(point, bool):
            point = (float(point),)
        coords = tuple(float(c) for c in point)
        d = self.dimension
        if d is not None and len(coords) != d:
            raise OutOfDomainError(f"point has {len(coords)} coordinates, expected {d}")
        for c in coords:
            if not 0.0 <= c <= 1.0 or math.isnan(c):
                raise OutOfDomainError(f"coordinate {c!r} outside [0, 1]")
        return coords

    def evaluate(self, point) -> float:
        """Pointwise value; spike overrides win on exact coordinate match."""
        point = self._normalize_point(point)
        if not self.is_finite and point in self._spike_map:
            return self._spike_map[point]
        return self.base.evaluate(point)

    def base_value(self, point) -> float:
        """Pointwise value of the base alone, ignoring spikes."""
        return self.base.evaluate(self._normalize_point(point))

    def essential_range(self, cell: Cell) -> EssentialRange:
        """Essential range over a positive-measure cell; spikes never matter."""
        base = self.base
        if self.range_mode is None or not isinstance(base, _CONTINUOUS_FAMILIES):
            lo, hi = base.range_on(cell)
            return EssentialRange(float(lo), float(hi), exact=True)
        return self._grid_range(cell)

    def _grid_range(self, cell: Cell) -> EssentialRange:
        import numpy as np

        base = self.base
        d = base.dimension
        cell = _require_box(cell, d)
        lipschitz = base.lipschitz_bound()
        if lipschitz is None:
            raise QmcBoundsError(
                "grid range mode needs a declared Lipschitz bound for this family"
            )
        n = self.range_mode.intervals_per_axis
        axes = [np.linspace(lo, hi, n + 1) for lo, hi in zip(cell.lower, cell.upper)]
        mesh = np.meshgrid(*axes, indexing="ij")
        points = np.stack([m.ravel() for m in mesh], axis=-1)
        values = [base.evaluate(tuple(p)) for p in points]
        spacing = max((hi - lo) / n for lo, hi in zip(cell.lower, cell.upper))
        eps = lipschitz * spacing / 2.0
        return EssentialRange(min(values), max(values), exact=False, eps=eps)

    def integral(self, space: Space) -> float:
        """Integral over the whole space; spikes are null and ignored."""
        base = self.base
        if isinstance(space, FiniteSpace):
            if not self.is_finite:
                raise OutOfDomainError("cube-family model integrated over a finite space")
            return math.fsum(
                space.weights[i] * base.evaluate(i) for i in range(space.n_atoms)
            )
        if self.is_finite:
            raise OutOfDomainError("finite-space model integrated over a cube space")
        d = space.dimension
        full = BoxCell((0.0,) * d, (1.0,) * d)
        return base.integral_over(full, space)

    def cell_integral(self, cell: Cell, space: Space) -> float:
        """Integral restricted to one cell."""
        base = self.base
        if isinstance(space, FiniteSpace):
            if not isinstance(cell, FiniteCell):
                raise OutOfDomainError("finite space needs finite cells")
            return math.fsum(space.weights[a] * base.evaluate(a) for a in cell.atoms)
        return base.integral_over(cell, space)


def scaled(f: FunctionModel, factor: float) -> FunctionModel:
    """factor * f, for the families where scaling stays in the family."""
    base = f.base
    factor = float(factor)
    if isinstance(base, Affine):
        new = Affine(factor * base.intercept, tuple(factor * a for a in base.slopes))
    elif isinstance(base, Quadratic):
        new = Quadratic(
            factor * base.intercept,
            tuple(factor * b for b in base.linear),
            tuple(factor * q for q in base.quadratic),
        )
    elif isinstance(base, Sinusoid):
        new = Sinusoid(
            factor * base.amplitude,
            base.frequency,
            base.phase,
            factor * base.offset,
            base.axis,
            base.dimension,
        )
    elif isinstance(base, PiecewiseConstant):
        new = PiecewiseConstant(base.partition, tuple(factor * v for v in base.values))
    elif isinstance(base, FiniteTable):
        new = FiniteTable(tuple(factor * v for v in base.values), base.labels)
    else:
        raise QmcBoundsError(f"cannot scale family {type(base).__name__}")
    spikes = tuple((p, factor * v) for p, v in f.spikes)
    return FunctionModel(new, spikes, f.range_mode)


def shifted(f: FunctionModel, offset: float) -> FunctionModel:
    """f + offset, for the families where shifting stays in the family."""
    base = f.base
    offset = float(offset)
    if isinstance(base, Affine):
        new = Affine(base.intercept + offset, base.slopes)
    elif isinstance(base, Quadratic):
        new = Quadratic(base.intercept + offset, base.linear, base.quadratic)
    elif isinstance(base, Sinusoid):
        new = Sinusoid(
            base.amplitude, base.frequency, base.phase,
            base.offset + offset, base.axis, base.dimension,
        )
    elif isinstance(base, PiecewiseConstant):
        new = PiecewiseConstant(base.partition, tuple(v + offset for v in base.values))
    elif isinstance(base, FiniteTable):
        new = FiniteTable(tuple(v + offset for v in base.values), base.labels)
    else:
        raise QmcBoundsError(f"cannot shift family {type(base).__name__}")
    spikes = tuple((p, v + offset) for p, v in f.spikes)
    return FunctionModel(new, spikes, f.range_mode)
