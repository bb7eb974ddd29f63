import json

import pytest

from komparo import envelope as env
from komparo.extreal import ExtReal
from komparo.funcspec import builtin
from komparo.grid import make_grid
from komparo.oracle import (BruteForce, BudgetExceededError, brute_inf, brute_sup,
                            equivalence_suite, lattice_lipschitz)


def test_exmupper(line, exm):
    assert brute_sup(*exm, line, 2.0) == 4.0


def test_double_well_lower_envelope(line):
    v = brute_inf(builtin("double_well"), builtin("euclid_norm(1)"), line, 0.5).value
    # x^4 - x^2 changes by at most ~0.004 over one step of 0.01 near 1/sqrt(2)
    assert abs(v + 0.25) <= 0.005


def test_empty_sets(line, exm):
    assert brute_sup(*exm, line, -6.0) == ExtReal.neg_inf()
    assert brute_inf(*exm, line, 6.0) == ExtReal.pos_inf()


def test_budget(exm):
    with pytest.raises(BudgetExceededError):
        BruteForce(*exm, make_grid([-1, 1], 101), budget=100)


def test_lipschitz_double_well(line):
    # the steepest difference quotient lies between f'(4.99) and f'(5) = 490
    def fprime(x):
        return 4 * x ** 3 - 2 * x

    assert fprime(4.99) <= lattice_lipschitz(builtin("double_well"), line) <= fprime(5.0)


def test_suite_passes():
    out = equivalence_suite(0, 100)
    assert out.passed, out.first_failure
    assert json.loads(out.to_json()) == {"passes": 100, "trials": 100}


def test_suite_deterministic():
    a, b = equivalence_suite(7, 5), equivalence_suite(7, 5)
    assert a.to_json() == b.to_json()
    assert a.counters["max_lattice"] == b.counters["max_lattice"]


def test_zero_trials():
    with pytest.raises(ValueError):
        equivalence_suite(0, 0)


def test_mutant_is_caught():
    def plus_one(f, g, grid, s, kind):
        t = env.envelope_table(f, g, grid, s, kind)
        vals = tuple(ExtReal(v.value + 1) for v in t.values)
        return env.EnvelopeTable(t.kind, t.s_values, vals, t.witnesses, t.grid)

    out = equivalence_suite(0, 3, table_fn=plus_one)
    assert not out.passed
    rec = out.first_failure
    assert rec["property"] == "oracle" and rec["trial"] == 0
    assert "first_failure" in json.loads(out.to_json())
