"""Lattice checks of the structural properties of the envelopes.

Each check returns a :class:`CheckResult`. Exact-zero conditions are tested
up to ``tau_zero``; conditions about an infimum that need not be attained (a
sequence along which f vanishes) use ``tau_grid``, a tolerance at lattice
resolution. Anything that would need behaviour at infinity is reported as
window-qualified: "holds-on-window", never a plain "holds".
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import envelope as env
from .extreal import ExtReal, format_token
from .funcspec import FuncExpr, evaluate
from .grid import SampleGrid, values_on

HOLDS = "holds"
HOLDS_ON_WINDOW = "holds-on-window"
FAILS = "fails"
INCONCLUSIVE = "inconclusive"
VERDICTS = (HOLDS, HOLDS_ON_WINDOW, FAILS, INCONCLUSIVE)

BOUNDED_DOMAIN_LIMIT = "bounded-domain-limit"
PD_ASSERTION_VIOLATED = "pd-assertion-violated"

TAU_ZERO = 1e-9


class ConfigError(ValueError):
    pass


class PDAssertionViolated(ValueError):
    def __init__(self, message: str, point):
        self.point = tuple(float(c) for c in point)
        super().__init__(f"{message} at x={self.point}")


class NeighborhoodEmptyError(ValueError):
    pass


class EmptyAnnulusError(ValueError):
    pass


@dataclass
class CheckResult:
    check_id: str
    verdict: str
    witness: dict | None = None
    detail: str = ""
    reason: str | None = None
    data: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.verdict not in VERDICTS:
            raise ValueError(f"bad verdict {self.verdict!r}")
        if self.verdict == FAILS and not self.witness:
            raise ValueError(f"{self.check_id}: a failing check needs a witness")
        if self.verdict == INCONCLUSIVE and not self.reason:
            raise ValueError(f"{self.check_id}: an inconclusive check needs a reason code")

    @property
    def ok(self) -> bool:
        return self.verdict != FAILS

    def to_dict(self) -> dict:
        d = {"check_id": self.check_id, "verdict": self.verdict,
             "witness": _jsonable(self.witness), "detail": self.detail}
        if self.reason:
            d["reason"] = self.reason
        if self.data:
            d["data"] = _jsonable(self.data)
        return d


def _jsonable(obj):
    if obj is None or isinstance(obj, (str, bool)):
        return obj
    if isinstance(obj, ExtReal):
        return obj.value if obj.is_finite else format_token(obj.value)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else format_token(v)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _pt(grid: SampleGrid, index) -> list:
    return [float(c) for c in grid.points[int(index)]]


def _first(mask: np.ndarray) -> int:
    return int(np.flatnonzero(mask)[0])


# --------------------------------------------------------------------------
# monotonicity


def check_monotone(table: env.EnvelopeTable, check_id: str = "monotone") -> CheckResult:
    if len(table) == 0:
        raise ValueError("check_monotone needs a nonempty table")
    for i in range(len(table) - 1):
        if table.values[i] > table.values[i + 1]:
            s0, s1 = table.s_values[i], table.s_values[i + 1]
            return CheckResult(
                check_id, FAILS, {"s": [s0, s1]},
                f"{table.kind}: value {table.values[i]} at s={s0!r} exceeds "
                f"{table.values[i + 1]} at s={s1!r}")
    return CheckResult(check_id, HOLDS, None,
                       f"{table.kind}: {len(table)} entries nondecreasing")


# --------------------------------------------------------------------------
# positive definiteness on the nonnegative reals


def _positive_probes(s_probe) -> tuple:
    s_probe = tuple(float(s) for s in s_probe)
    if not s_probe or any(s <= 0 for s in s_probe):
        raise ValueError("s_probe must be a nonempty list of strictly positive values")
    return s_probe


def _require_origin(grid: SampleGrid):
    if not grid.origin_included:
        raise ValueError("this check needs a grid that contains the origin")


def check_supdef(f: FuncExpr, g: FuncExpr, grid: SampleGrid, s_probe: Sequence[float],
                 tau_zero: float = TAU_ZERO, tau_grid: float | None = None,
                 check_id: str = "supdef") -> CheckResult:
    """Is the sup-envelope zero at 0 and positive for s > 0?

    Tested through three lattice conditions: (1) f > 0 somewhere on
    [g <= s] for each probed s; (2) [g <= 0] is nonempty and f <= 0 on it;
    (3) |f| gets within ``tau_grid`` of 0 on [g <= 0].
    """
    _require_origin(grid)
    s_probe = _positive_probes(s_probe)
    tau_grid = tau_zero if tau_grid is None else tau_grid
    fv, gv = values_on(f, grid), values_on(g, grid)
    conditions, witnesses, details = {}, {}, {}

    conditions[1] = HOLDS
    for s in s_probe:
        if not np.any((fv > tau_zero) & (gv <= s)):
            conditions[1] = FAILS
            witnesses[1] = {"condition": 1, "s": s}
            details[1] = f"(1) f <= {tau_zero:g} on all of [g <= {s!r}]"
            break

    zero = gv <= 0
    if not zero.any():
        conditions[2] = FAILS
        witnesses[2] = {"condition": 2, "s": 0.0}
        details[2] = "(2) [g <= 0] is empty on the lattice"
    else:
        bad = zero & (fv > tau_zero)
        if bad.any():
            conditions[2] = FAILS
            k = _first(bad)
            witnesses[2] = {"condition": 2, "point": _pt(grid, k), "f": float(fv[k])}
            if not np.any(fv <= tau_zero):
                details[2] = "(2) [f <= 0] is empty on the lattice, so [g <= 0] is not inside it"
            else:
                details[2] = f"(2) f = {float(fv[k])!r} > 0 at a point of [g <= 0]"
        else:
            conditions[2] = HOLDS

    if zero.any():
        a = np.abs(fv[zero])
        j = int(np.argmin(a))
        k = int(np.flatnonzero(zero)[j])
        if a[j] <= tau_grid:
            conditions[3] = HOLDS
        else:
            conditions[3] = FAILS
            witnesses[3] = {"condition": 3, "point": _pt(grid, k), "f": float(fv[k])}
            details[3] = f"(3) min |f| over [g <= 0] is {float(a[j])!r} > {tau_grid:g}"
    else:
        conditions[3] = FAILS
        witnesses[3] = {"condition": 3, "s": 0.0}
        details[3] = "(3) [g <= 0] is empty on the lattice"

    failed = [c for c in (1, 2, 3) if conditions[c] == FAILS]
    data = {"conditions": {str(c): v for c, v in conditions.items()}}
    if failed:
        c = failed[0]
        return CheckResult(check_id, FAILS, witnesses[c],
                           "; ".join(details[k] for k in failed), data=data)
    return CheckResult(check_id, HOLDS, None, "conditions (1), (2), (3) hold on the lattice",
                       data=data)


def verify_positive_definite(f: FuncExpr, grid: SampleGrid, tau_zero: float = TAU_ZERO):
    """Raise PDAssertionViolated unless f(0) ~ 0 and f > 0 elsewhere on the lattice."""
    _require_origin(grid)
    o = grid.origin_index
    fv = values_on(f, grid)
    if abs(fv[o]) > tau_zero:
        raise PDAssertionViolated(f"f(0) = {float(fv[o])!r} is not zero", grid.points[o])
    others = np.ones(grid.size, dtype=bool)
    others[o] = False
    bad = others & (fv <= tau_zero)
    if bad.any():
        k = _first(bad)
        raise PDAssertionViolated(f"f = {float(fv[k])!r} is not positive away from 0", grid.points[k])


def check_supdef_pd_shortcut(f: FuncExpr, g: FuncExpr, grid: SampleGrid,
                             s_probe: Sequence[float], f_is_pd: bool = True,
                             tau_zero: float = TAU_ZERO,
                             check_id: str = "supdef_pd_shortcut") -> CheckResult:
    """Shortcut for positive definite f: [g <= s] has a nonzero point, [g <= 0] = {0}."""
    if not f_is_pd:
        raise ValueError("the shortcut applies only when f is asserted positive definite")
    s_probe = _positive_probes(s_probe)
    verify_positive_definite(f, grid, tau_zero)
    o = grid.origin_index
    gv = values_on(g, grid)
    nonzero = np.ones(grid.size, dtype=bool)
    nonzero[o] = False
    for s in s_probe:
        if not np.any((gv <= s) & nonzero):
            return CheckResult(check_id, FAILS, {"s": s},
                               f"[g <= {s!r}] is reduced to the origin on the lattice")
    zero = gv <= 0
    if not zero[o]:
        return CheckResult(check_id, FAILS, {"point": _pt(grid, o)},
                           f"g(0) = {float(gv[o])!r} > 0, so the origin is not in [g <= 0]")
    extra = zero & nonzero
    if extra.any():
        k = _first(extra)
        return CheckResult(check_id, FAILS, {"point": _pt(grid, k)},
                           f"[g <= 0] contains the nonzero point with g = {float(gv[k])!r}")
    return CheckResult(check_id, HOLDS, None,
                       "[g <= 0] = {0} and every probed [g <= s] has a nonzero point")


def check_infdef(f: FuncExpr, g: FuncExpr, grid: SampleGrid, s_probe: Sequence[float],
                 tau_zero: float = TAU_ZERO, tau_grid: float | None = None,
                 check_id: str = "infdef") -> CheckResult:
    """Is the inf-envelope zero at 0 and positive for s > 0?

    Conditions: (1) for each probed s, f is bounded below on [s <= g] by
    some b_s > 0 (reported); (2) [0 <= g] is nonempty and f >= 0 on it;
    (3) |f| gets within ``tau_grid`` of 0 on [0 <= g].
    """
    _require_origin(grid)
    s_probe = _positive_probes(s_probe)
    tau_grid = tau_zero if tau_grid is None else tau_grid
    fv, gv = values_on(f, grid), values_on(g, grid)
    conditions, witnesses, details = {}, {}, {}

    conditions[1] = HOLDS
    b_s = []
    for s in s_probe:
        region = s <= gv
        if not region.any():
            b_s.append(math.inf)  # vacuous: any b_s > 0 works
            continue
        j = int(np.argmin(fv[region]))
        k = int(np.flatnonzero(region)[j])
        b_s.append(float(fv[k]))
        if fv[k] <= tau_zero and conditions[1] == HOLDS:
            conditions[1] = FAILS
            witnesses[1] = {"condition": 1, "s": s, "point": _pt(grid, k), "f": float(fv[k])}
            details[1] = f"(1) f = {float(fv[k])!r} <= {tau_zero:g} on [{s!r} <= g]"

    zero = 0 <= gv
    if not zero.any():
        conditions[2] = FAILS
        witnesses[2] = {"condition": 2, "s": 0.0}
        details[2] = "(2) [0 <= g] is empty on the lattice"
    else:
        bad = zero & (fv < -tau_zero)
        if bad.any():
            k = _first(bad)
            conditions[2] = FAILS
            witnesses[2] = {"condition": 2, "point": _pt(grid, k), "f": float(fv[k])}
            details[2] = f"(2) f = {float(fv[k])!r} < 0 at a point of [0 <= g]"
        else:
            conditions[2] = HOLDS

    if zero.any():
        a = np.abs(fv[zero])
        j = int(np.argmin(a))
        k = int(np.flatnonzero(zero)[j])
        if a[j] <= tau_grid:
            conditions[3] = HOLDS
        else:
            conditions[3] = FAILS
            witnesses[3] = {"condition": 3, "point": _pt(grid, k), "f": float(fv[k])}
            details[3] = f"(3) min |f| over [0 <= g] is {float(a[j])!r} > {tau_grid:g}"
    else:
        conditions[3] = FAILS
        witnesses[3] = {"condition": 3, "s": 0.0}
        details[3] = "(3) [0 <= g] is empty on the lattice"

    data = {"conditions": {str(c): v for c, v in conditions.items()},
            "b_s": dict(zip((repr(s) for s in s_probe), b_s))}
    failed = [c for c in (1, 2, 3) if conditions[c] == FAILS]
    if failed:
        c = failed[0]
        return CheckResult(check_id, FAILS, witnesses[c],
                           "; ".join(details[k] for k in failed), data=data)
    return CheckResult(check_id, HOLDS, {"s": list(s_probe), "b_s": b_s},
                       "conditions (1), (2), (3) hold on the lattice", data=data)


def _touches_boundary(grid: SampleGrid, mask: np.ndarray) -> bool:
    m = mask.reshape(grid.shape)
    for axis in range(grid.dimension):
        if m.take(0, axis=axis).any() or m.take(-1, axis=axis).any():
            return True
    return False


def check_infdef_sufficient(f: FuncExpr, g: FuncExpr, grid: SampleGrid,
                            s_probe: Sequence[float] = (), tau_zero: float = TAU_ZERO,
                            radius_ladder: Sequence[float] | None = None,
                            level_targets: Sequence[float] | None = None,
                            check_id: str = "infdef_sufficient") -> CheckResult:
    """Lattice premises of the semicontinuity-based sufficient condition.

    f >= 0; min g <= 0; the zero set of f is nonempty and inside the zero set
    of g; and a bounded set C_s = [f <= f(y_s)] with y_s the minimizer of f
    on [s <= g]. C_s counts as bounded when it stays off the lattice
    boundary, or else when f passes the level-boundedness check.
    """
    _require_origin(grid)
    fv, gv = values_on(f, grid), values_on(g, grid)
    premises = {}

    neg = fv < -tau_zero
    if neg.any():
        k = _first(neg)
        return CheckResult(check_id, FAILS, {"premise": "nonnegative", "point": _pt(grid, k)},
                           f"f = {float(fv[k])!r} < 0", data={"premises": {"nonnegative": FAILS}})
    premises["nonnegative"] = HOLDS

    kmin = int(np.argmin(gv))
    if gv[kmin] > tau_zero:
        premises["inf_g_nonpositive"] = FAILS
        return CheckResult(check_id, FAILS,
                           {"premise": "inf_g_nonpositive", "point": _pt(grid, kmin)},
                           f"min g over the lattice is {float(gv[kmin])!r} > 0",
                           data={"premises": premises})
    premises["inf_g_nonpositive"] = HOLDS

    zf = np.abs(fv) <= tau_zero
    if not zf.any():
        k = int(np.argmin(np.abs(fv)))
        premises["zero_sets"] = FAILS
        return CheckResult(check_id, FAILS, {"premise": "zero_sets", "point": _pt(grid, k)},
                           f"{{f = 0}} is empty on the lattice (min |f| = {float(abs(fv[k]))!r})",
                           data={"premises": premises})
    outside = zf & (np.abs(gv) > tau_zero)
    if outside.any():
        k = _first(outside)
        premises["zero_sets"] = FAILS
        return CheckResult(check_id, FAILS, {"premise": "zero_sets", "point": _pt(grid, k)},
                           f"f vanishes where g = {float(gv[k])!r} != 0",
                           data={"premises": premises})
    premises["zero_sets"] = HOLDS

    unbounded = []
    for s in s_probe:
        region = s <= gv
        if not region.any():
            continue  # C_s is empty beyond max g
        j = int(np.argmin(fv[region]))
        y = int(np.flatnonzero(region)[j])
        if _touches_boundary(grid, fv <= fv[y]):
            unbounded.append(float(s))
    if not unbounded:
        premises["compact_sets"] = HOLDS
        return CheckResult(check_id, HOLDS, None,
                           "all premises hold on the lattice; C_s stays inside the window",
                           data={"premises": premises})
    lb = check_level_bounded(f, grid, radius_ladder, level_targets)
    premises["compact_sets"] = lb.verdict
    if lb.verdict == HOLDS_ON_WINDOW:
        return CheckResult(check_id, HOLDS, None,
                           "all premises hold; C_s bounded through level-boundedness of f",
                           data={"premises": premises})
    return CheckResult(check_id, INCONCLUSIVE, {"s": unbounded},
                       "C_s reaches the lattice boundary and level-boundedness of f "
                       "is not established on the window",
                       reason=BOUNDED_DOMAIN_LIMIT, data={"premises": premises})


# --------------------------------------------------------------------------
# semicontinuity


@dataclass(frozen=True)
class SemicontinuityProbe:
    value: float
    radii: tuple
    shell_min: tuple
    shell_max: tuple
    liminf: float
    limsup: float
    lsc_gap: float
    usc_gap: float
    tolerance: float

    @property
    def lsc_like(self) -> bool:
        return self.lsc_gap <= self.tolerance

    @property
    def usc_like(self) -> bool:
        return self.usc_gap <= self.tolerance

    @property
    def verdict(self) -> str:
        if self.lsc_like and self.usc_like:
            return "continuous-like"
        if self.lsc_like:
            return "lsc-like"
        if self.usc_like:
            return "usc-like"
        return "neither"


def _limit_at_zero(radii: Sequence[float], values: Sequence[float]) -> float:
    """Estimate lim_{r -> 0} of shell extrema sampled at decreasing radii.

    Polynomial extrapolation through the last three samples (Neville),
    accepted only when the samples are monotone and the extrapolated value
    continues the trend by no more than the sampled spread; otherwise the
    value at the smallest radius is used.
    """
    r = list(radii[-3:])
    v = list(values[-3:])
    last = v[-1]
    if len(v) < 2 or not all(math.isfinite(x) for x in v):
        return last
    steps = [b - a for a, b in zip(v, v[1:])]
    if not (all(d >= 0 for d in steps) or all(d <= 0 for d in steps)):
        return last
    p = list(v)
    n = len(r)
    for m in range(1, n):
        for i in range(n - m):
            p[i] = ((0 - r[i + m]) * p[i] + (r[i] - 0) * p[i + 1]) / (r[i] - r[i + m])
    est = p[0]
    spread = abs(v[-1] - v[0])
    trend = math.copysign(1.0, v[-1] - v[0]) if spread else 0.0
    move = est - last
    if spread == 0:
        return last
    if move * trend < 0 or abs(move) > spread:
        return last
    return est


def _gap(hi: float, lo: float) -> float:
    if hi == lo:
        return 0.0
    return max(0.0, hi - lo)


def _probe(value: float, dists: np.ndarray, vals: np.ndarray, radii, width: float,
           tolerance: float) -> SemicontinuityProbe:
    radii = tuple(float(r) for r in radii)
    if not radii or any(r <= 0 for r in radii):
        raise ValueError("radii must be positive")
    if any(a <= b for a, b in zip(radii, radii[1:])):
        raise ValueError("radii must be sorted decreasing")
    mins, maxs = [], []
    for r in radii:
        shell = (dists > 0) & (np.abs(dists - r) <= width / 2)
        if not shell.any():
            raise NeighborhoodEmptyError(
                f"no lattice point at distance {r!r} (lattice step {width!r})")
        mins.append(float(vals[shell].min()))
        maxs.append(float(vals[shell].max()))
    lo = _limit_at_zero(radii, mins)
    hi = _limit_at_zero(radii, maxs)
    return SemicontinuityProbe(float(value), radii, tuple(mins), tuple(maxs), lo, hi,
                               _gap(value, lo), _gap(hi, value), float(tolerance))


def semicontinuity_probe(fn, at, radii: Sequence[float], grid: SampleGrid | None = None,
                         tolerance: float = TAU_ZERO) -> SemicontinuityProbe:
    """Compare a value with the limits of shell minima/maxima at shrinking radii.

    ``fn`` is a FuncExpr (then ``grid`` is required and ``at`` is a point) or
    an EnvelopeTable (then ``at`` is an s-value of the table and shells are
    taken over the table's s-values).
    """
    if isinstance(fn, env.EnvelopeTable):
        s = np.asarray(fn.s_values, dtype=float)
        vals = fn.floats()
        at = float(at)
        if at not in fn.s_values:
            raise ValueError(f"s={at!r} is not an entry of the table")
        value = float(fn.value_at(at).value)
        width = float(np.min(np.diff(s))) if s.size > 1 else math.inf
        return _probe(value, np.abs(s - at), vals, radii, width, tolerance)
    if grid is None:
        raise ValueError("a grid is required to probe a function")
    p = np.atleast_1d(np.asarray(at, dtype=float))
    value = evaluate(fn, p)
    dists = np.sqrt(np.sum((grid.points - p) ** 2, axis=1))
    return _probe(value, dists, values_on(fn, grid), radii, min(grid.steps), tolerance)


def check_semicontinuity(fn, ats: Iterable, radii: Sequence[float],
                         grid: SampleGrid | None = None, tolerance: float = TAU_ZERO,
                         check_id: str = "semicontinuity") -> CheckResult:
    """Aggregate probes: holds when every probe is both lsc-like and usc-like."""
    probes = {}
    first_bad = None
    for at in ats:
        pr = semicontinuity_probe(fn, at, radii, grid, tolerance)
        key = repr(at if np.isscalar(at) else [float(c) for c in np.atleast_1d(at)])
        probes[key] = {"lsc_gap": pr.lsc_gap, "usc_gap": pr.usc_gap, "verdict": pr.verdict}
        if first_bad is None and pr.verdict != "continuous-like":
            first_bad = (at, pr)
    data = {"probes": probes, "radii": list(radii), "tolerance": tolerance}
    if not probes:
        return CheckResult(check_id, INCONCLUSIVE, None, "no probe points",
                           reason="no-probes", data=data)
    if first_bad:
        at, pr = first_bad
        where = {"s": float(at)} if np.isscalar(at) else \
            {"point": [float(c) for c in np.atleast_1d(at)]}
        return CheckResult(check_id, FAILS, where,
                           f"{pr.verdict}: lsc_gap={pr.lsc_gap!r}, usc_gap={pr.usc_gap!r}",
                           data=data)
    return CheckResult(check_id, HOLDS, None,
                       f"{len(probes)} probe(s) continuous-like within {tolerance:g}", data=data)


# --------------------------------------------------------------------------
# behaviour at infinity (window-qualified)


def default_ladder(grid: SampleGrid) -> list:
    r = grid.inscribed_radius
    return [0.25 * r, 0.5 * r, 0.75 * r]


def _max_on_ball(fn: FuncExpr, grid: SampleGrid, radius: float) -> float:
    norms = np.sqrt(np.sum(grid.points ** 2, axis=1))
    return float(values_on(fn, grid)[norms <= radius].max())


def check_level_bounded(fn: FuncExpr, grid: SampleGrid,
                        radius_ladder: Sequence[float] | None = None,
                        targets: Sequence[float] | None = None,
                        check_id: str = "level_bounded") -> CheckResult:
    """Minima of fn over lattice annuli r_i <= |x| <= r_{i+1} must grow past every target.

    The last annulus runs to the radius of the largest ball inside the grid.
    Default targets: the max of fn over the ball of the first rung.
    """
    ladder = default_ladder(grid) if radius_ladder is None else [float(r) for r in radius_ladder]
    if not ladder or any(a >= b for a, b in zip(ladder, ladder[1:])) or ladder[0] <= 0:
        raise ValueError("radius ladder must be increasing and positive")
    outer = grid.inscribed_radius
    if ladder[-1] > outer:
        raise EmptyAnnulusError(f"ladder rung {ladder[-1]!r} exceeds inscribed radius {outer!r}")
    if targets is None:
        targets = [_max_on_ball(fn, grid, ladder[0])]
    targets = [float(t) for t in targets]
    fv = values_on(fn, grid)
    norms = np.sqrt(np.sum(grid.points ** 2, axis=1))
    edges = ladder + [outer]
    mins, argmins = [], []
    for lo, hi in zip(edges, edges[1:]):
        ring = (norms >= lo) & (norms <= hi)
        if not ring.any():
            raise EmptyAnnulusError(f"no lattice point with {lo!r} <= |x| <= {hi!r}")
        j = int(np.argmin(fv[ring]))
        argmins.append(int(np.flatnonzero(ring)[j]))
        mins.append(float(fv[argmins[-1]]))
    unmet = [t for t in targets if not any(m > t for m in mins)]
    growing = len(mins) < 2 or mins[-1] >= mins[-2]
    data = {"ladder": ladder, "annulus_min": mins, "targets": targets}
    if not unmet and growing:
        return CheckResult(check_id, HOLDS_ON_WINDOW, None,
                           f"annulus minima {mins} exceed every target on the window", data=data)
    if unmet and len(mins) >= 2 and mins[-1] > mins[-2]:
        return CheckResult(check_id, INCONCLUSIVE, {"point": _pt(grid, argmins[-1])},
                           f"annulus minima still growing at the window edge; "
                           f"targets {unmet} not reached",
                           reason=BOUNDED_DOMAIN_LIMIT, data=data)
    k = argmins[-1]
    why = f"targets {unmet} never exceeded" if unmet else "annulus minima decrease at the edge"
    return CheckResult(check_id, FAILS, {"point": _pt(grid, k), "value": float(fv[k])},
                       f"{why}; min over the outer annulus is {float(fv[k])!r}", data=data)


def check_divergence(table: env.EnvelopeTable, targets: Sequence[float],
                     check_id: str = "divergence") -> CheckResult:
    """Does the table climb past every target within its s-range?"""
    targets = [float(t) for t in targets]
    vals = table.floats()
    finite = [i for i, v in enumerate(vals) if math.isfinite(v)]
    unmet = [t for t in targets if not np.any(vals >= t)]
    data = {"targets": targets}
    if not unmet:
        return CheckResult(check_id, HOLDS_ON_WINDOW, None,
                           f"{table.kind} reaches every target by s={table.s_values[-1]!r}",
                           data=data)
    if not finite:
        return CheckResult(check_id, INCONCLUSIVE, None, "no finite table entry",
                           reason="no-finite-values", data=data)
    i = finite[-1]
    witness = {"s": table.s_values[i], "value": float(vals[i])}
    if len(finite) >= 2 and vals[finite[-1]] > vals[finite[-2]]:
        return CheckResult(check_id, INCONCLUSIVE, witness,
                           f"still increasing at the window edge; targets {unmet} not reached",
                           reason=BOUNDED_DOMAIN_LIMIT, data=data)
    return CheckResult(check_id, FAILS, witness,
                       f"flat at {float(vals[i])!r} at the window edge; targets {unmet} not reached",
                       data=data)


# --------------------------------------------------------------------------
# sandwich


def check_sandwich(f: FuncExpr, g: FuncExpr, grid: SampleGrid,
                   check_id: str = "sandwich") -> CheckResult:
    """inf_env(g(x)) <= f(x) <= sup_env(g(x)) at every lattice point, exactly."""
    fv, gv = values_on(f, grid), values_on(g, grid)
    levels = np.unique(gv)
    up = env.envelope_table(f, g, grid, levels, env.SUP_ENV).floats()
    low = env.envelope_table(f, g, grid, levels, env.INF_ENV).floats()
    pos = np.searchsorted(levels, gv)
    bad = (low[pos] > fv) | (fv > up[pos])
    if bad.any():
        k = _first(bad)
        return CheckResult(check_id, FAILS, {"point": _pt(grid, k)},
                           f"{float(low[pos[k]])!r} <= {float(fv[k])!r} <= {float(up[pos[k]])!r} violated")
    return CheckResult(check_id, HOLDS, None,
                       f"bounds hold at all {grid.size} lattice points")


# --------------------------------------------------------------------------
# report


CHECK_IDS = ("monotone", "supdef", "supdef_pd_shortcut", "infdef", "infdef_sufficient",
             "sandwich", "semicontinuity_f", "semicontinuity_sup_table",
             "semicontinuity_inf_table", "level_bounded_f", "divergence_sup",
             "experiment_inf_continuity")
DEFAULT_CHECKS = tuple(c for c in CHECK_IDS
                       if c not in ("supdef_pd_shortcut", "experiment_inf_continuity"))


@dataclass
class ReportConfig:
    s_values: Sequence[float]
    hahn: bool = False
    checks: Sequence[str] = DEFAULT_CHECKS
    tau_zero: float = TAU_ZERO
    tau_grid: float | None = None
    tau_table: float | None = None
    tau_probe: float | None = None
    s_probe: Sequence[float] | None = None
    probe_points: Sequence | None = None
    probe_radii: Sequence[float] | None = None
    table_probe_s: Sequence[float] = ()
    table_probe_radii: Sequence[float] | None = None
    radius_ladder: Sequence[float] | None = None
    level_targets: Sequence[float] | None = None
    divergence_targets: Sequence[float] | None = None

    def validate(self):
        if not self.s_values:
            raise ConfigError("s-grid is empty")
        unknown = [c for c in self.checks if c not in CHECK_IDS]
        if unknown:
            raise ConfigError(f"unknown check ids {unknown}; known: {list(CHECK_IDS)}")
        if self.tau_zero < 0 or any(t is not None and t < 0
                                    for t in (self.tau_grid, self.tau_table, self.tau_probe)):
            raise ConfigError("tolerances must be nonnegative")


@dataclass
class CertReport:
    checks: list
    provenance: dict
    tables: dict = field(default_factory=dict, repr=False)

    def result(self, check_id: str) -> CheckResult:
        for c in self.checks:
            if c.check_id == check_id:
                return c
        raise KeyError(check_id)

    def verdict(self, check_id: str) -> str:
        return self.result(check_id).verdict

    @property
    def any_fails(self) -> bool:
        return any(c.verdict == FAILS for c in self.checks)

    def to_dict(self) -> dict:
        return {"provenance": _jsonable(self.provenance),
                "checks": [c.to_dict() for c in self.checks]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def summary_lines(self) -> list:
        return [f"{c.check_id}: {c.verdict}" + (f" ({c.reason})" if c.reason else "")
                for c in self.checks]


def full_report(f: FuncExpr, g: FuncExpr | None, grid: SampleGrid,
                config: ReportConfig) -> CertReport:
    """Run the configured checks; results come back in CHECK_IDS order."""
    config.validate()
    if config.hahn or g is None:
        g = env._norm_for(grid)
    s_values = sorted(set(float(s) for s in config.s_values))
    if config.hahn and s_values[0] < 0:
        raise ConfigError("norm mode restricts the s-grid to s >= 0")
    up_kind, low_kind = (env.HAHN_UPPER, env.HAHN_LOWER) if config.hahn \
        else (env.SUP_ENV, env.INF_ENV)
    sup_t = env.envelope_table(f, g, grid, s_values, up_kind)
    inf_t = env.envelope_table(f, g, grid, s_values, low_kind)
    tau, tau_grid = config.tau_zero, (config.tau_grid if config.tau_grid is not None
                                      else config.tau_zero)
    tau_table = config.tau_table if config.tau_table is not None else tau_grid
    tau_probe = config.tau_probe if config.tau_probe is not None else tau
    s_probe = list(config.s_probe) if config.s_probe is not None \
        else [s for s in s_values if s > 0][:3]
    h = grid.max_step
    probe_radii = config.probe_radii or [3 * h, 2 * h, h]
    spacing = float(f"{np.min(np.diff(s_values)):.12g}") if len(s_values) > 1 else h
    table_radii = config.table_probe_radii or [3 * spacing, 2 * spacing, spacing]
    points = config.probe_points
    if points is None:
        points = [grid.points[grid.origin_index]] if grid.origin_included else []
    wanted = set(config.checks)
    out = []

    def run(check_id, thunk):
        if check_id not in wanted:
            return
        try:
            out.append(thunk())
        except PDAssertionViolated as e:
            out.append(CheckResult(check_id, INCONCLUSIVE, {"point": list(e.point)}, str(e),
                                   reason=PD_ASSERTION_VIOLATED))
        except (ValueError, NeighborhoodEmptyError, EmptyAnnulusError) as e:
            out.append(CheckResult(check_id, INCONCLUSIVE, None, str(e),
                                   reason="precondition-unmet"))

    def monotone():
        a, b = check_monotone(sup_t), check_monotone(inf_t)
        if a.verdict == FAILS:
            return a
        if b.verdict == FAILS:
            return b
        return CheckResult("monotone", HOLDS, None, f"{a.detail}; {b.detail}")

    def experiment():
        probes = {}
        for s in config.table_probe_s:
            pr = semicontinuity_probe(inf_t, s, table_radii, tolerance=tau_table)
            probes[repr(float(s))] = {"lsc_gap": pr.lsc_gap, "usc_gap": pr.usc_gap,
                                      "value": pr.value}
        return CheckResult("experiment_inf_continuity", INCONCLUSIVE, None,
                           "continuity probes of the inf-envelope; no verdict is drawn",
                           reason="experiment-no-verdict",
                           data={"probes": probes, "radii": list(table_radii)})

    divergence_targets = config.divergence_targets
    if divergence_targets is None:
        divergence_targets = [_max_on_ball(f, grid, 0.5 * grid.inscribed_radius)]

    run("monotone", monotone)
    run("supdef", lambda: check_supdef(f, g, grid, s_probe, tau, tau_grid))
    run("supdef_pd_shortcut", lambda: check_supdef_pd_shortcut(f, g, grid, s_probe, True, tau))
    run("infdef", lambda: check_infdef(f, g, grid, s_probe, tau, tau_grid))
    run("infdef_sufficient", lambda: check_infdef_sufficient(
        f, g, grid, s_probe, tau, config.radius_ladder, config.level_targets))
    run("sandwich", lambda: check_sandwich(f, g, grid))
    if not points:
        wanted.discard("semicontinuity_f")
    if not config.table_probe_s:
        wanted -= {"semicontinuity_sup_table", "semicontinuity_inf_table"}
    run("semicontinuity_f", lambda: check_semicontinuity(
        f, points, probe_radii, grid, tau_probe, "semicontinuity_f"))
    run("semicontinuity_sup_table", lambda: check_semicontinuity(
        sup_t, config.table_probe_s, table_radii, None, tau_table, "semicontinuity_sup_table"))
    run("semicontinuity_inf_table", lambda: check_semicontinuity(
        inf_t, config.table_probe_s, table_radii, None, tau_table, "semicontinuity_inf_table"))
    run("level_bounded_f", lambda: check_level_bounded(
        f, grid, config.radius_ladder, config.level_targets, "level_bounded_f"))
    run("divergence_sup", lambda: check_divergence(sup_t, divergence_targets, "divergence_sup"))
    run("experiment_inf_continuity", experiment)

    provenance = {"f": f.name, "g": g.name, "grid": grid.ident(),
                  "grid_step": list(grid.steps),
                  "s_grid": {"count": len(s_values), "min": s_values[0], "max": s_values[-1]},
                  "tau_zero": tau, "tau_grid": tau_grid, "tau_table": tau_table,
                  "tau_probe": tau_probe}
    return CertReport(out, provenance, {up_kind: sup_t, low_kind: inf_t})
