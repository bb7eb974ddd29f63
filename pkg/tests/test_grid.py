import io
import math

import numpy as np
import pytest

from komparo.funcspec import builtin, negate, parse
from komparo.grid import (EMPTY, InvalidBoundsError, MismatchedGridError, SymmetryInfeasibleError,
                          directed_hausdorff, hausdorff, hemicontinuity_probe, make_grid,
                          pk_limits, sublevel, superlevel)

IDENT = builtin("identity_1d")
NORM1 = builtin("euclid_norm(1)")
WELL = builtin("double_well")


def test_line_grid(line):
    assert line.size == 1001
    assert line.steps[0] == pytest.approx(0.01)
    assert line.origin_included
    assert line.points[line.origin_index, 0] == 0.0


def test_square_grid():
    gr = make_grid([[-1, 1], [-1, 1]], [101, 101], symmetric=True)
    assert gr.size == 101 * 101
    assert tuple(gr.points[gr.origin_index]) == (0.0, 0.0)


def test_symmetric_lattice_closed_under_negation():
    gr = make_grid([[-1.3, 1.3], [-0.7, 0.7]], [15, 9], symmetric=True)
    assert np.array_equal(gr.points[gr.negation_index()], -gr.points)


@pytest.mark.parametrize("bounds,res", [([0, 1], 2), ([-1, 1], 4)])
def test_symmetry_infeasible(bounds, res):
    with pytest.raises(SymmetryInfeasibleError):
        make_grid(bounds, res, symmetric=True)


@pytest.mark.parametrize("bounds,res", [([1, 0], 5), ([0, math.inf], 5), ([0, 1], 1)])
def test_invalid_bounds(bounds, res):
    with pytest.raises(InvalidBoundsError):
        make_grid(bounds, res)


def test_sublevel_identity(line):
    m = sublevel(IDENT, line, 2.0)
    assert len(m) == 701
    assert m.points.max() == 2.0


def test_norm_level_sets(line):
    assert sublevel(NORM1, line, -1.0).is_empty
    assert len(superlevel(NORM1, line, 0.0)) == line.size


def test_superlevel_identity(line):
    m = superlevel(IDENT, line, 0.0)
    assert m.points.min() == 0.0 and len(m) == 501


def test_double_well_sublevel_near_minimum(line):
    # on this lattice min f = f(+-0.71) = -0.24998..., so [f <= -0.25] is empty
    assert sublevel(WELL, line, -0.25).is_empty
    m = sublevel(WELL, line, -0.24995)
    assert sorted(m.points[:, 0]) == [-0.71, 0.71]


def test_double_well_superlevel(line):
    m = superlevel(WELL, line, 12.0)
    x = m.points[:, 0]
    assert np.all(np.abs(x) >= 2.0)
    assert len(m) == 2 * 301


def test_nesting_and_membership_duality(line):
    g = parse("x1^3 - 2*x1 + piecewise { x1 < 0.3 : 1 ; else : 0 }", 1)
    prev = None
    for s in np.linspace(-8, 8, 33):
        cur = sublevel(g, line, s)
        if prev is not None:
            assert np.isin(prev.members, cur.members).all()
        assert np.array_equal(cur.members, superlevel(negate(g), line, -s).members)
        prev = cur


def test_level_set_csv(line):
    buf = io.StringIO()
    sublevel(IDENT, line, -4.99).to_csv(buf)
    assert buf.getvalue() == "x1,g_value\n-5.0,-5.0\n-4.99,-4.99\n"


def test_mismatched_dimension():
    with pytest.raises(MismatchedGridError):
        sublevel(builtin("euclid_norm(2)"), make_grid([-1, 1], 5), 0.0)


def test_hausdorff_empty_token():
    a = np.array([[0.0]])
    none = np.empty((0, 1))
    assert directed_hausdorff(a, none) == EMPTY
    assert hausdorff(a, none) == EMPTY
    assert hausdorff(none, none) == 0.0
    assert hausdorff(a, np.array([[0.5], [2.0]])) == 2.0


class TestPK:
    def test_increasing_sequence(self, line):
        seq = [sublevel(IDENT, line, 1 - 1 / n) for n in range(1, 401)]
        target = sublevel(IDENT, line, 1.0)
        r = pk_limits(seq, target)
        assert np.isin(r.liminf_members, r.limsup_members).all()
        assert r.hausdorff_gap_to_target <= line.max_step + 1e-12

    def test_constant_sequence(self, line):
        s = sublevel(IDENT, line, 0.5)
        r = pk_limits([s] * 6, s)
        assert np.array_equal(r.liminf_members, s.members)
        assert np.array_equal(r.limsup_members, s.members)
        assert r.hausdorff_gap_to_target == 0.0

    def test_alternating_empty_full(self, line):
        empty, full = sublevel(IDENT, line, -9.0), sublevel(IDENT, line, 9.0)
        r = pk_limits([empty, full] * 5, full)
        assert r.liminf_members.size == 0
        assert r.limsup_members.size == line.size

    def test_mismatched(self, line):
        other = make_grid([-5, 5], 11, symmetric=True)
        with pytest.raises(MismatchedGridError):
            pk_limits([sublevel(IDENT, other, 0.0)], sublevel(IDENT, line, 0.0))


class TestHemicontinuity:
    def test_norm_gaps_equal_delta(self, line):
        p = hemicontinuity_probe(NORM1, line, 1.0, [0.1, 0.01])
        for d, lo, up in zip(p.deltas, p.lower_gaps, p.upper_gaps):
            assert abs(lo - d) <= 0.01 and abs(up - d) <= 0.01
        assert p.lower_verdict == "lower-hemicontinuous-like"
        assert p.upper_verdict == "upper-hemicontinuous-like"

    def test_step_function_below(self, line):
        step = parse("piecewise { x1 < 0 : 0 ; else : 1 }", 1)
        p = hemicontinuity_probe(step, line, 0.5, [0.1, 0.01])
        assert p.lower_gaps == (0.0, 0.0)
        assert p.lower_verdict == "lower-hemicontinuous-like"

    def test_empty_gap_token(self, line):
        p = hemicontinuity_probe(NORM1, line, 0.05, [0.1, 0.01])
        assert p.lower_gaps[0] == EMPTY
        assert p.lower_gaps[1] != EMPTY

    def test_deltas_must_decrease(self, line):
        with pytest.raises(ValueError):
            hemicontinuity_probe(NORM1, line, 1.0, [0.01, 0.1])
