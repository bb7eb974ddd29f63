import math

import pytest

from komparo.extreal import ExtReal, format_token, parse_token


def test_order():
    lo, hi = ExtReal.neg_inf(), ExtReal.pos_inf()
    assert lo < ExtReal(-1e308) < ExtReal(0.0) < ExtReal(1e308) < hi
    assert ExtReal(2.0) == 2.0


def test_negation_of_infinities():
    assert -ExtReal.neg_inf() == ExtReal.pos_inf()
    assert (-ExtReal.pos_inf()).is_neg_inf


def test_nan_rejected():
    with pytest.raises(ValueError):
        ExtReal(math.nan)


@pytest.mark.parametrize("v,text", [(-math.inf, "-inf"), (math.inf, "+inf"), (0.25, "0.25")])
def test_tokens(v, text):
    assert format_token(v) == text
    assert parse_token(text) == ExtReal(v)
