"""Lattice envelopes: sup of f over [g <= s] and inf of f over [s <= g].

All optima are taken over the finite lattice, so they are attained whenever
the feasible set is nonempty. Ties between optimizers go to the lowest
lattice index.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .extreal import ExtReal, format_token
from .funcspec import FuncExpr, builtin, negate
from .grid import SampleGrid, SymmetryInfeasibleError, values_on

SUP_ENV = "sup-env"
INF_ENV = "inf-env"
HAHN_UPPER = "hahn-upper"
HAHN_LOWER = "hahn-lower"
KINDS = (SUP_ENV, INF_ENV, HAHN_UPPER, HAHN_LOWER)


def _check_s(s: float) -> float:
    s = float(s)
    if math.isnan(s):
        raise ValueError("s must not be NaN")
    return s


def _lowest_index(candidates: np.ndarray) -> int:
    return int(candidates.min())


def sup_env_witness(f: FuncExpr, g: FuncExpr, grid: SampleGrid, s: float):
    """(value, lattice index) of the max of f over [g <= s]; (-inf, None) if empty."""
    s = _check_s(s)
    fv = values_on(f, grid)
    feasible = values_on(g, grid) <= s
    if not feasible.any():
        return ExtReal.neg_inf(), None
    best = fv[feasible].max()
    return ExtReal(best), int(np.flatnonzero(feasible & (fv == best))[0])


def inf_env_witness(f: FuncExpr, g: FuncExpr, grid: SampleGrid, s: float):
    """(value, lattice index) of the min of f over [s <= g]; (+inf, None) if empty."""
    s = _check_s(s)
    fv = values_on(f, grid)
    feasible = s <= values_on(g, grid)
    if not feasible.any():
        return ExtReal.pos_inf(), None
    best = fv[feasible].min()
    return ExtReal(best), int(np.flatnonzero(feasible & (fv == best))[0])


def sup_env(f: FuncExpr, g: FuncExpr, grid: SampleGrid, s: float) -> ExtReal:
    return sup_env_witness(f, g, grid, s)[0]


def inf_env(f: FuncExpr, g: FuncExpr, grid: SampleGrid, s: float) -> ExtReal:
    return inf_env_witness(f, g, grid, s)[0]


def _norm_for(grid: SampleGrid) -> FuncExpr:
    return builtin(f"euclid_norm({grid.dimension})")


def hahn_upper(f: FuncExpr, grid: SampleGrid, s: float) -> ExtReal:
    """sup of f over the lattice ball of radius s."""
    if s < 0:
        raise ValueError("the norm envelopes are defined for s >= 0")
    return sup_env(f, _norm_for(grid), grid, s)


def hahn_lower(f: FuncExpr, grid: SampleGrid, s: float) -> ExtReal:
    """inf of f over lattice points with norm >= s."""
    if s < 0:
        raise ValueError("the norm envelopes are defined for s >= 0")
    return inf_env(f, _norm_for(grid), grid, s)


@dataclass(frozen=True)
class DualCheck:
    passed: bool
    inf_value: ExtReal
    neg_sup_value: ExtReal


def dual_check(f: FuncExpr, g: FuncExpr, grid: SampleGrid, s: float) -> DualCheck:
    """Compare inf_env(f, g, s) with -sup_env(-f, -g, -s) for exact equality."""
    if not grid.symmetric:
        raise SymmetryInfeasibleError("dual_check requires a symmetric grid")
    lhs = inf_env(f, g, grid, s)
    rhs = -sup_env(negate(f), negate(g), grid, -_check_s(s))
    return DualCheck(lhs == rhs, lhs, rhs)


# --------------------------------------------------------------------------
# tables


@dataclass(frozen=True, eq=False)
class EnvelopeTable:
    kind: str
    s_values: tuple
    values: tuple  # of ExtReal
    witnesses: tuple  # lattice index or None
    grid: SampleGrid
    f_label: str = ""
    g_label: str = ""

    def __len__(self) -> int:
        return len(self.s_values)

    @property
    def provenance(self) -> dict:
        return {"f": self.f_label, "g": self.g_label, "grid": self.grid.ident(),
                "grid_step": list(self.grid.steps), "kind": self.kind}

    def value_at(self, s: float) -> ExtReal:
        i = self.s_values.index(float(s))
        return self.values[i]

    def floats(self) -> np.ndarray:
        return np.array([v.value for v in self.values])

    def witness_point(self, i: int):
        w = self.witnesses[i]
        return None if w is None else tuple(float(c) for c in self.grid.points[w])

    def rows(self) -> list:
        out = []
        for i, (s, v) in enumerate(zip(self.s_values, self.values)):
            w = self.witness_point(i)
            coords = [""] * self.grid.dimension if w is None or not v.is_finite \
                else [repr(c) for c in w]
            out.append([repr(float(s)), format_token(v.value)] + coords)
        return out

    def to_csv(self, path_or_file) -> None:
        header = ["s", "value"] + [f"witness_x{i}" for i in range(1, self.grid.dimension + 1)]
        if hasattr(path_or_file, "write"):
            _write(path_or_file, header, self.rows())
        else:
            with open(path_or_file, "w", newline="") as fh:
                _write(fh, header, self.rows())


def _write(fh, header, rows):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)


def _sweep(fv: np.ndarray, gv: np.ndarray, s_values: Sequence[float], maximize: bool):
    """Prefix optima over lattice points sorted by g (ascending for sup, descending for inf)."""
    if maximize:
        order = np.argsort(gv, kind="stable")
        keys = gv[order]
        acc = np.maximum.accumulate(fv[order])
        mono = acc
        empty = ExtReal.neg_inf()
    else:
        order = np.argsort(-gv, kind="stable")
        keys = -gv[order]
        acc = np.minimum.accumulate(fv[order])
        mono = -acc
        empty = ExtReal.pos_inf()
    fs = fv[order]
    values, witnesses = [], []
    for s in s_values:
        # points feasible for s form a prefix of the sorted order
        k = int(np.searchsorted(keys, s if maximize else -s, side="right"))
        if k == 0:
            values.append(empty)
            witnesses.append(None)
            continue
        best = acc[k - 1]
        p = int(np.searchsorted(mono[:k], best if maximize else -best, side="left"))
        tied = order[p:k][fs[p:k] == best]
        values.append(ExtReal(best))
        witnesses.append(_lowest_index(tied))
    return values, witnesses


def envelope_table(f: FuncExpr, g: FuncExpr | None, grid: SampleGrid,
                   s_values: Iterable[float], kind: str = SUP_ENV) -> EnvelopeTable:
    """Envelope values at strictly increasing s, computed in one sweep.

    For the hahn kinds ``g`` is ignored (pass None) and the Euclidean norm is used.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown table kind {kind!r}; expected one of {KINDS}")
    s_values = tuple(_check_s(s) for s in s_values)
    if any(a >= b for a, b in zip(s_values, s_values[1:])):
        raise ValueError("s_values must be strictly increasing")
    if kind in (HAHN_UPPER, HAHN_LOWER):
        if s_values and s_values[0] < 0:
            raise ValueError("the norm envelopes are defined for s >= 0")
        g = _norm_for(grid)
    if f.dimension != grid.dimension or g.dimension != grid.dimension:
        raise ValueError("f, g and grid dimensions must agree")
    maximize = kind in (SUP_ENV, HAHN_UPPER)
    values, witnesses = _sweep(values_on(f, grid), values_on(g, grid), s_values, maximize)
    return EnvelopeTable(kind, s_values, tuple(values), tuple(witnesses), grid,
                         f.name, g.name)


def s_grid_select(g: FuncExpr, grid: SampleGrid, breakpoints: Iterable[float] = (),
                  count: int = 11) -> list:
    """`count` evenly spaced order statistics of g over the lattice, plus breakpoints.

    The order statistics always include min g and max g and are attained
    values, so table entries at them sit exactly on level-set boundaries.
    """
    if count < 2:
        raise ValueError("count must be at least 2")
    v = np.sort(values_on(g, grid))
    n = v.size
    idx = [(i * (n - 1) + (count - 1) // 2) // (count - 1) for i in range(count)]
    chosen = {float(v[i]) for i in idx}
    chosen.update(_check_s(b) for b in breakpoints)
    return sorted(chosen)
