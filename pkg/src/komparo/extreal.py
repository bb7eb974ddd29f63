"""Extended reals: a float that may be -inf or +inf but never NaN."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import total_ordering

NEG_INF_TOKEN = "-inf"
POS_INF_TOKEN = "+inf"


@total_ordering
@dataclass(frozen=True, eq=False)
class ExtReal:
    value: float

    def __post_init__(self):
        v = float(self.value)
        if math.isnan(v):
            raise ValueError("ExtReal cannot hold NaN")
        object.__setattr__(self, "value", v)

    @classmethod
    def neg_inf(cls) -> ExtReal:
        return cls(-math.inf)

    @classmethod
    def pos_inf(cls) -> ExtReal:
        return cls(math.inf)

    @property
    def is_finite(self) -> bool:
        return math.isfinite(self.value)

    @property
    def is_neg_inf(self) -> bool:
        return self.value == -math.inf

    @property
    def is_pos_inf(self) -> bool:
        return self.value == math.inf

    def __neg__(self) -> ExtReal:
        return ExtReal(-self.value)

    def __float__(self) -> float:
        return self.value

    def _other(self, other) -> float:
        if isinstance(other, ExtReal):
            return other.value
        if isinstance(other, (int, float)):
            return float(other)
        return NotImplemented

    def __eq__(self, other) -> bool:
        o = self._other(other)
        if o is NotImplemented:
            return NotImplemented
        return self.value == o

    def __lt__(self, other) -> bool:
        o = self._other(other)
        if o is NotImplemented:
            return NotImplemented
        return self.value < o

    def __hash__(self) -> int:
        return hash(self.value)

    def __str__(self) -> str:
        return format_token(self.value)

    def __repr__(self) -> str:
        return f"ExtReal({format_token(self.value)})"


def format_token(v: float) -> str:
    """Serialize a float with the fixed infinity tokens; finite values use repr."""
    if v == math.inf:
        return POS_INF_TOKEN
    if v == -math.inf:
        return NEG_INF_TOKEN
    return repr(float(v))


def parse_token(text: str) -> ExtReal:
    text = text.strip()
    if text == POS_INF_TOKEN:
        return ExtReal.pos_inf()
    if text == NEG_INF_TOKEN:
        return ExtReal.neg_inf()
    v = float(text)
    if not math.isfinite(v):
        raise ValueError(f"non-canonical extended real token {text!r}")
    return ExtReal(v)
