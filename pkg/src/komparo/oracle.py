"""Brute-force reference values and the randomized equivalence suite.

The reference scans every lattice point once per query in plain Python,
with no sorting and no reuse between thresholds. It shares only function
evaluation and the lattice definition with the envelope code.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import certify
from . import envelope as env
from .extreal import ExtReal
from .funcspec import FuncExpr, evaluate_many, parse
from .grid import SampleGrid, make_grid

DEFAULT_BUDGET = 10 ** 7


class BudgetExceededError(RuntimeError):
    pass


class BruteForce:
    """Exhaustive optima of f over level sets of g, one scan per query."""

    def __init__(self, f: FuncExpr, g: FuncExpr, grid: SampleGrid, budget: int = DEFAULT_BUDGET):
        if grid.size > budget:
            raise BudgetExceededError(f"lattice has {grid.size} points, budget is {budget}")
        self.f_values = evaluate_many(f, grid.points).tolist()
        self.g_values = evaluate_many(g, grid.points).tolist()

    def sup(self, s: float):
        best, where = None, None
        for i, (fx, gx) in enumerate(zip(self.f_values, self.g_values)):
            if gx <= s and (best is None or fx > best):
                best, where = fx, i
        if best is None:
            return ExtReal.neg_inf(), None
        return ExtReal(best), where

    def inf(self, s: float):
        best, where = None, None
        for i, (fx, gx) in enumerate(zip(self.f_values, self.g_values)):
            if s <= gx and (best is None or fx < best):
                best, where = fx, i
        if best is None:
            return ExtReal.pos_inf(), None
        return ExtReal(best), where


def brute_sup(f: FuncExpr, g: FuncExpr, grid: SampleGrid, s: float,
              budget: int = DEFAULT_BUDGET) -> ExtReal:
    return BruteForce(f, g, grid, budget).sup(s)[0]


def brute_inf(f: FuncExpr, g: FuncExpr, grid: SampleGrid, s: float,
              budget: int = DEFAULT_BUDGET) -> ExtReal:
    return BruteForce(f, g, grid, budget).inf(s)[0]


def lattice_lipschitz(f: FuncExpr, grid: SampleGrid) -> float:
    """Largest difference quotient of f between axis-neighbouring lattice points."""
    v = evaluate_many(f, grid.points).reshape(grid.shape)
    best = 0.0
    for axis, h in enumerate(grid.steps):
        best = max(best, float(np.max(np.abs(np.diff(v, axis=axis)))) / h)
    return best


# --------------------------------------------------------------------------
# random instances


def _monomial(exps) -> str:
    parts = []
    for i, e in enumerate(exps, start=1):
        if e == 1:
            parts.append(f"x{i}")
        elif e > 1:
            parts.append(f"x{i}^{e}")
    return "*".join(parts)


def _signed_sum(coeffs, monos) -> str:
    text = ""
    for n, (c, mono) in enumerate(zip(coeffs, monos)):
        mag = f"{abs(c):.2f}"
        term = f"{mag}*{mono}" if mono else mag
        if n == 0:
            text = term if c >= 0 else f"0 - {term}"
        else:
            text += (" + " if c >= 0 else " - ") + term
    return text


def random_polynomial(rng: np.random.Generator, d: int, max_degree: int = 4) -> str:
    """Text of a sparse polynomial of degree <= max_degree, coefficients in [-2, 2]."""
    if d == 1:
        monos = [(k,) for k in range(max_degree + 1)]
    else:
        monos = [(i, j) for i in range(max_degree + 1) for j in range(max_degree + 1 - i)]
    count = int(rng.integers(1, min(5, len(monos)) + 1))
    chosen = sorted(rng.choice(len(monos), size=count, replace=False))
    coeffs = [round(float(rng.uniform(-2, 2)), 2) for _ in chosen]
    return _signed_sum(coeffs, [_monomial(monos[i]) for i in chosen])


def random_function(rng: np.random.Generator, d: int) -> str:
    """A polynomial, or with probability 1/2 two polynomials split by a hyperplane."""
    if rng.random() < 0.5:
        return random_polynomial(rng, d)
    normal = _signed_sum([round(float(rng.uniform(-1, 1)), 2) for _ in range(d)],
                         [f"x{i}" for i in range(1, d + 1)])
    offset = round(float(rng.uniform(0, 0.5)), 2)
    op = "<=" if rng.random() < 0.5 else "<"
    return (f"piecewise {{ {normal} {op} {offset:.2f} : {random_polynomial(rng, d)} ; "
            f"else : {random_polynomial(rng, d)} }}")


@dataclass
class Instance:
    f: FuncExpr
    g: FuncExpr
    grid: SampleGrid
    s_values: list


def random_instance(rng: np.random.Generator) -> Instance:
    d = int(rng.integers(1, 3))
    half = float(rng.choice([0.5, 1.0, 1.5, 2.0, 2.5, 3.0]))
    if d == 1:
        n = 2 * int(rng.integers(10, 501)) + 1
    else:
        n = 2 * int(rng.integers(5, 51)) + 1
    grid = make_grid([(-half, half)] * d, n, symmetric=True)
    f = parse(random_function(rng, d), d)
    g = parse(random_function(rng, d), d)
    gv = evaluate_many(g, grid.points)
    lo, hi = float(gv.min()), float(gv.max())
    s = set()
    s.add(lo - 1.0)  # empty sublevel
    s.add(hi + 1.0)  # empty superlevel
    s.update(float(gv[k]) for k in rng.integers(0, grid.size, size=4))  # ties with g
    s.update(float(x) for x in rng.uniform(lo - 0.5, hi + 0.5, size=4))
    s.update((lo, hi))
    return Instance(f, g, grid, sorted(s))


# --------------------------------------------------------------------------
# suite


@dataclass
class SuiteSummary:
    trials: int
    passes: int
    first_failure: dict | None = None
    counters: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.passes == self.trials

    def to_dict(self) -> dict:
        d = {"trials": self.trials, "passes": self.passes}
        if self.first_failure is not None:
            d["first_failure"] = self.first_failure
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def _check_instance(inst: Instance, table_fn: Callable, counters: dict):
    """Return a divergence record, or None when every property holds."""
    bf = BruteForce(inst.f, inst.g, inst.grid)
    counters["max_lattice"] = max(counters.get("max_lattice", 0), inst.grid.size)
    for kind, ref in ((env.SUP_ENV, bf.sup), (env.INF_ENV, bf.inf)):
        table = table_fn(inst.f, inst.g, inst.grid, inst.s_values, kind)
        mono = certify.check_monotone(table)
        if mono.verdict != certify.HOLDS:
            counters["monotone_violations"] = counters.get("monotone_violations", 0) + 1
            return {"property": "monotone", "kind": kind, "witness": mono.witness}
        for s, value, wit in zip(table.s_values, table.values, table.witnesses):
            expect, ewit = ref(s)
            if value.value.hex() != expect.value.hex() or wit != ewit:
                return {"property": "oracle", "kind": kind, "s": s,
                        "envelope": str(value), "oracle": str(expect),
                        "envelope_witness": wit, "oracle_witness": ewit}
    empty_seen = False
    for s in inst.s_values:
        dc = env.dual_check(inst.f, inst.g, inst.grid, s)
        empty_seen = empty_seen or dc.inf_value.is_pos_inf
        if not dc.passed:
            return {"property": "duality", "s": s, "inf": str(dc.inf_value),
                    "neg_sup": str(dc.neg_sup_value)}
    if empty_seen:
        counters["dual_empty_instances"] = counters.get("dual_empty_instances", 0) + 1
    sw = certify.check_sandwich(inst.f, inst.g, inst.grid)
    if sw.verdict != certify.HOLDS:
        counters["sandwich_violations"] = counters.get("sandwich_violations", 0) + 1
        return {"property": "sandwich", "witness": sw.witness}
    return None


def equivalence_suite(random_seed: int, trials: int,
                      table_fn: Callable = env.envelope_table) -> SuiteSummary:
    """Compare envelope tables with the brute-force scan on random instances.

    Each instance also exercises the duality identity, the sandwich bounds
    and raw-table monotonicity. ``table_fn`` lets tests inject a faulty
    implementation to confirm the harness catches it.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    rng = np.random.default_rng(random_seed)
    counters: dict = {}
    passes, first = 0, None
    start = time.perf_counter()
    for t in range(trials):
        inst = random_instance(rng)
        bad = _check_instance(inst, table_fn, counters)
        if bad is None:
            passes += 1
        elif first is None:
            bad.update({"trial": t, "f": str(inst.f), "g": str(inst.g),
                        "grid": inst.grid.ident()})
            first = bad
    counters["seconds"] = time.perf_counter() - start
    return SuiteSummary(trials, passes, first, counters)
