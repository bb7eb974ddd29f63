"""Sampling lattices, materialized level sets and discrete set-limit diagnostics.

Level sets are exact on the lattice: membership is decided by evaluating g at
each lattice point, with no interpolation. Topological notions (closure,
hemicontinuity) are replaced by one-lattice-step dilations and Hausdorff gaps,
so every verdict in this module is a finite-resolution heuristic.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

import numpy as np
from scipy.ndimage import binary_dilation, binary_erosion
from scipy.spatial import cKDTree

from .funcspec import FuncExpr, evaluate_many

SUBLEVEL = "sublevel"
SUPERLEVEL = "superlevel"
EMPTY = "empty"


class GridError(ValueError):
    pass


class InvalidBoundsError(GridError):
    pass


class SymmetryInfeasibleError(GridError):
    pass


class MismatchedGridError(GridError):
    pass


@dataclass(frozen=True)
class SampleGrid:
    """A tensor lattice over a box in R^d, points enumerated in C order."""

    bounds: tuple
    resolution: tuple
    symmetric: bool = False

    def __post_init__(self):
        if len(self.bounds) != len(self.resolution) or not self.bounds:
            raise InvalidBoundsError("bounds and resolution must have the same nonzero length")
        for (lo, hi), n in zip(self.bounds, self.resolution):
            if not (math.isfinite(lo) and math.isfinite(hi)) or not lo < hi:
                raise InvalidBoundsError(f"need finite lo < hi, got [{lo}, {hi}]")
            if int(n) != n or n < 2:
                raise InvalidBoundsError(f"resolution must be an integer >= 2, got {n}")
        if self.symmetric:
            for (lo, hi), n in zip(self.bounds, self.resolution):
                if lo != -hi or n % 2 == 0:
                    raise SymmetryInfeasibleError(
                        f"axis [{lo}, {hi}] with {n} points is not negation-closed")

    @property
    def dimension(self) -> int:
        return len(self.bounds)

    @property
    def shape(self) -> tuple:
        return tuple(int(n) for n in self.resolution)

    @property
    def size(self) -> int:
        return int(np.prod(self.shape))

    @cached_property
    def axes(self) -> tuple:
        out = []
        for (lo, hi), n in zip(self.bounds, self.shape):
            if self.symmetric:
                # hi*k/m is sign-symmetric in floating point, so -x is on the lattice
                m = (n - 1) // 2
                k = np.arange(-m, m + 1, dtype=float)
                ax = hi * k / m
            else:
                i = np.arange(n, dtype=float)
                ax = (lo * (n - 1 - i) + hi * i) / (n - 1)
            ax.setflags(write=False)
            out.append(ax)
        return tuple(out)

    @cached_property
    def points(self) -> np.ndarray:
        mesh = np.meshgrid(*self.axes, indexing="ij")
        pts = np.stack([m.reshape(-1) for m in mesh], axis=1)
        pts.setflags(write=False)
        return pts

    @property
    def steps(self) -> tuple:
        return tuple((hi - lo) / (n - 1) for (lo, hi), n in zip(self.bounds, self.shape))

    @property
    def max_step(self) -> float:
        return max(self.steps)

    @property
    def diagonal_step(self) -> float:
        return math.sqrt(sum(h * h for h in self.steps))

    @property
    def origin_included(self) -> bool:
        return all(bool(np.any(ax == 0.0)) for ax in self.axes)

    @property
    def origin_index(self) -> int | None:
        if not self.origin_included:
            return None
        idx = tuple(int(np.flatnonzero(ax == 0.0)[0]) for ax in self.axes)
        return int(np.ravel_multi_index(idx, self.shape))

    @property
    def inscribed_radius(self) -> float:
        """Radius of the largest origin-centred ball inside the box."""
        return min(min(-lo, hi) for lo, hi in self.bounds)

    def negation_index(self) -> np.ndarray:
        """Lattice index of -x for every lattice index x (symmetric grids only)."""
        if not self.symmetric:
            raise SymmetryInfeasibleError("grid is not symmetric")
        return np.arange(self.size - 1, -1, -1)

    def ident(self) -> str:
        axes = " x ".join(f"[{lo!r},{hi!r}]/{n}" for (lo, hi), n in zip(self.bounds, self.shape))
        return axes + (" symmetric" if self.symmetric else "")


def make_grid(bounds, resolution, symmetric: bool = False) -> SampleGrid:
    """Build a lattice; ``bounds`` is one (lo, hi) pair or one pair per axis."""
    b = np.asarray(bounds, dtype=float)
    if b.ndim == 1:
        b = b.reshape(1, 2)
    if b.ndim != 2 or b.shape[1] != 2:
        raise InvalidBoundsError(f"bounds must be (lo, hi) pairs, got {bounds!r}")
    res = np.atleast_1d(np.asarray(resolution))
    if res.size == 1 and b.shape[0] > 1:
        res = np.repeat(res, b.shape[0])
    if res.size != b.shape[0]:
        raise InvalidBoundsError("one resolution per axis is required")
    return SampleGrid(tuple((float(lo), float(hi)) for lo, hi in b),
                      tuple(int(n) for n in res), bool(symmetric))


@lru_cache(maxsize=128)
def values_on(fn: FuncExpr, grid: SampleGrid) -> np.ndarray:
    """Values of fn at every lattice point (cached, read-only)."""
    if fn.dimension != grid.dimension:
        raise MismatchedGridError(
            f"function has dimension {fn.dimension}, grid has {grid.dimension}")
    v = evaluate_many(fn, grid.points)
    v.setflags(write=False)
    return v


# --------------------------------------------------------------------------
# level sets


@dataclass(frozen=True, eq=False)
class LevelSet:
    grid: SampleGrid
    kind: str
    threshold: float
    members: np.ndarray
    values: np.ndarray = field(repr=False)

    @property
    def is_empty(self) -> bool:
        return self.members.size == 0

    @property
    def points(self) -> np.ndarray:
        return self.grid.points[self.members]

    def __len__(self) -> int:
        return int(self.members.size)

    def __contains__(self, index) -> bool:
        i = np.searchsorted(self.members, index)
        return bool(i < self.members.size and self.members[i] == index)

    def mask(self) -> np.ndarray:
        m = np.zeros(self.grid.size, dtype=bool)
        m[self.members] = True
        return m

    def to_csv(self, path_or_file) -> None:
        """One row per member: x1..xd, g_value."""
        header = [f"x{i}" for i in range(1, self.grid.dimension + 1)] + ["g_value"]
        rows = [[repr(float(c)) for c in p] + [repr(float(v))]
                for p, v in zip(self.points, self.values)]
        if hasattr(path_or_file, "write"):
            _write_rows(path_or_file, header, rows)
        else:
            with open(path_or_file, "w", newline="") as fh:
                _write_rows(fh, header, rows)


def _write_rows(fh, header, rows):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)


def _level_set(g: FuncExpr, grid: SampleGrid, s: float, kind: str) -> LevelSet:
    gv = values_on(g, grid)
    hit = gv <= s if kind == SUBLEVEL else s <= gv
    members = np.flatnonzero(hit)
    members.setflags(write=False)
    vals = gv[members]
    return LevelSet(grid, kind, float(s), members, vals)


def sublevel(g: FuncExpr, grid: SampleGrid, s: float) -> LevelSet:
    """Lattice points x with g(x) <= s."""
    return _level_set(g, grid, s, SUBLEVEL)


def superlevel(g: FuncExpr, grid: SampleGrid, s: float) -> LevelSet:
    """Lattice points x with s <= g(x)."""
    return _level_set(g, grid, s, SUPERLEVEL)


# --------------------------------------------------------------------------
# distances between lattice sets


def directed_hausdorff(a: np.ndarray, b: np.ndarray):
    """sup over a of the distance to b; EMPTY if either set is empty."""
    if len(a) == 0 or len(b) == 0:
        return EMPTY
    d, _ = cKDTree(b).query(a, k=1)
    return float(np.max(d))


def hausdorff(a: np.ndarray, b: np.ndarray):
    if len(a) == 0 and len(b) == 0:
        return 0.0
    ab = directed_hausdorff(a, b)
    ba = directed_hausdorff(b, a)
    if ab == EMPTY or ba == EMPTY:
        return EMPTY
    return max(ab, ba)


def _stencil(grid: SampleGrid) -> np.ndarray:
    return np.ones((3,) * grid.dimension, dtype=bool)


def dilate(grid: SampleGrid, mask: np.ndarray) -> np.ndarray:
    """Grow a membership mask by one lattice step along every axis and diagonal."""
    return binary_dilation(mask.reshape(grid.shape), structure=_stencil(grid)).reshape(-1)


def erode(grid: SampleGrid, mask: np.ndarray) -> np.ndarray:
    """Inverse step of `dilate`; points outside the window count as members."""
    return binary_erosion(mask.reshape(grid.shape), structure=_stencil(grid),
                          border_value=1).reshape(-1)


@dataclass(frozen=True, eq=False)
class PKLimitResult:
    liminf_members: np.ndarray
    limsup_members: np.ndarray
    hausdorff_gap_to_target: object  # float, or EMPTY


def pk_limits(sets: Sequence[LevelSet], target: LevelSet,
              tail_fraction: float = 0.5) -> PKLimitResult:
    """Discrete Painleve-Kuratowski lower and upper limits of a set sequence.

    A point is in the lower limit when it lies in the one-step dilation of
    every set of the tail (the last ``tail_fraction`` of the sequence), and in
    the upper limit when it lies in the dilation of at least one tail set.
    Both masks are then eroded by one step, so the pair dilate/erode acts as a
    lattice closure: a constant sequence has its own set as both limits.
    """
    if not sets:
        raise ValueError("pk_limits needs a nonempty sequence")
    grid = target.grid
    for s in sets:
        if s.grid != grid:
            raise MismatchedGridError("all level sets must share the target's grid")
    start = min(int(len(sets) * (1 - tail_fraction)), len(sets) - 1)
    tail = sets[start:]
    low = np.ones(grid.size, dtype=bool)
    up = np.zeros(grid.size, dtype=bool)
    for s in tail:
        d = dilate(grid, s.mask())
        low &= d
        up |= d
    liminf = np.flatnonzero(erode(grid, low))
    limsup = np.flatnonzero(erode(grid, up))
    gap = hausdorff(grid.points[limsup], target.points)
    return PKLimitResult(liminf, limsup, gap)


# --------------------------------------------------------------------------
# hemicontinuity


@dataclass(frozen=True)
class HemicontinuityProbe:
    s: float
    deltas: tuple
    lower_gaps: tuple  # gap(M(s), M(s - delta)) per delta
    upper_gaps: tuple  # gap(M(s + delta), M(s)) per delta
    tolerance: float
    lower_verdict: str
    upper_verdict: str


def _verdict(gaps, tol, name):
    numeric = [g for g in gaps if g != EMPTY]
    if not numeric:
        return "undetermined"
    return f"{name}-like" if numeric[-1] <= tol else f"not-{name}-like"


def hemicontinuity_probe(g: FuncExpr, grid: SampleGrid, s: float,
                         deltas: Iterable[float], tolerance: float | None = None
                         ) -> HemicontinuityProbe:
    """Compare M(s) = [g <= s] with its neighbours M(s - delta) and M(s + delta).

    The gap "tends to zero" when the gap at the smallest delta is within
    ``tolerance`` (default: smallest delta plus one diagonal lattice step).
    """
    deltas = tuple(float(d) for d in deltas)
    if not deltas or any(d <= 0 for d in deltas):
        raise ValueError("deltas must be positive")
    if any(a <= b for a, b in zip(deltas, deltas[1:])):
        raise ValueError("deltas must be sorted decreasing")
    if tolerance is None:
        tolerance = deltas[-1] + grid.diagonal_step
    here = sublevel(g, grid, s).points
    lower, upper = [], []
    for d in deltas:
        lower.append(directed_hausdorff(here, sublevel(g, grid, s - d).points))
        upper.append(directed_hausdorff(sublevel(g, grid, s + d).points, here))
    return HemicontinuityProbe(
        float(s), deltas, tuple(lower), tuple(upper), float(tolerance),
        _verdict(lower, tolerance, "lower-hemicontinuous"),
        _verdict(upper, tolerance, "upper-hemicontinuous"),
    )
