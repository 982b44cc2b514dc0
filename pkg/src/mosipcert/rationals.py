"""Exact rational scalars, extended reals and symbolic -sqrt values.

Everything on the certification path computes with rationals.  gmpy2.mpq is used
when available (noticeably faster); fractions.Fraction otherwise.  Floats are
rejected at the boundary: callers that have float data must rationalize it
explicitly and own the rounding decision.
"""

from __future__ import annotations

import math
from typing import Iterable, Sequence, Union

try:  # pragma: no cover - exercised implicitly by the whole suite
    from gmpy2 import mpq as Q
except ImportError:  # pragma: no cover
    from fractions import Fraction as Q  # type: ignore[assignment]

QLike = Union[int, str, tuple, list, "Q"]

ZERO = Q(0)
ONE = Q(1)


def as_q(value: QLike) -> Q:
    """Coerce ints, strings, [num, den] pairs and rationals to Q. Floats are refused."""
    if isinstance(value, float):
        raise TypeError(f"refusing to coerce float {value!r}; rationalize explicitly")
    if isinstance(value, (tuple, list)):
        num, den = value
        if isinstance(num, float) or isinstance(den, float):
            raise TypeError(f"refusing to coerce float pair {value!r}")
        return Q(int(num), int(den))
    return Q(value)


def q_pair(value) -> list:
    """Serialize a rational as a [numerator, denominator] pair of plain ints."""
    q = as_q(value)
    return [int(q.numerator), int(q.denominator)]


def vec_q(values: Iterable[QLike]) -> list:
    return [as_q(v) for v in values]


def qdot(a: Sequence, b: Sequence) -> Q:
    if len(a) != len(b):
        raise ValueError(f"dot of length {len(a)} vs {len(b)}")
    total = ZERO
    for x, y in zip(a, b):
        total += x * y
    return total


class _Infinity:
    """Signed infinity singleton, comparable with rationals and NegSqrt values."""

    __slots__ = ("sign",)

    def __init__(self, sign: int):
        self.sign = sign

    def __repr__(self):
        return "+inf" if self.sign > 0 else "-inf"

    def __eq__(self, other):
        return isinstance(other, _Infinity) and other.sign == self.sign

    def __hash__(self):
        return hash(("mosipcert-inf", self.sign))

    def __lt__(self, other):
        if isinstance(other, _Infinity):
            return self.sign < other.sign
        return self.sign < 0

    def __gt__(self, other):
        if isinstance(other, _Infinity):
            return self.sign > other.sign
        return self.sign > 0

    def __le__(self, other):
        return self == other or self < other

    def __ge__(self, other):
        return self == other or self > other

    def __neg__(self):
        return NEG_INF if self.sign > 0 else POS_INF

    def __float__(self):
        return math.inf if self.sign > 0 else -math.inf


POS_INF = _Infinity(1)
NEG_INF = _Infinity(-1)


class NegSqrt:
    """The exact value -sqrt(radicand) for a rational radicand >= 0.

    Only comparisons against rationals, zero and other NegSqrt values are
    needed (feasibility and slack checks), and all of them reduce to rational
    comparisons by squaring.  Collapses to a plain rational when the radicand
    is a perfect square.
    """

    __slots__ = ("radicand",)

    def __new__(cls, radicand):
        r = as_q(radicand)
        if r < 0:
            raise ValueError(f"negative radicand {r}")
        exact = sqrt_exact(r)
        if exact is not None:
            return -exact
        obj = object.__new__(cls)
        obj.radicand = r
        return obj

    def __repr__(self):
        return f"-sqrt({self.radicand})"

    def __float__(self):
        return -math.sqrt(float(self.radicand))

    def __eq__(self, other):
        if isinstance(other, NegSqrt):
            return self.radicand == other.radicand
        if isinstance(other, _Infinity):
            return False
        # A non-collapsed NegSqrt is irrational, never equal to a rational.
        return False

    def __hash__(self):
        return hash(("mosipcert-negsqrt", self.radicand))

    def __lt__(self, other):
        if isinstance(other, NegSqrt):
            return self.radicand > other.radicand
        if isinstance(other, _Infinity):
            return other.sign > 0
        q = as_q(other)
        if q >= 0:
            return True  # strictly negative < nonnegative
        return self.radicand > q * q

    def __gt__(self, other):
        if isinstance(other, NegSqrt):
            return self.radicand < other.radicand
        if isinstance(other, _Infinity):
            return other.sign < 0
        q = as_q(other)
        if q >= 0:
            return False
        return self.radicand < q * q

    def __le__(self, other):
        return not self.__gt__(other)

    def __ge__(self, other):
        return not self.__lt__(other)

    def __neg__(self):
        raise TypeError("positive square roots are not modeled; compare against the negative")


#: Extended-real values produced by function evaluation.
ExtReal = Union[Q, _Infinity, NegSqrt]


def is_finite(value) -> bool:
    return not isinstance(value, _Infinity)


def ext_float(value) -> float:
    return float(value)


def sqrt_exact(q):
    """Exact rational sqrt of q, or None if irrational."""
    q = as_q(q)
    if q < 0:
        raise ValueError("sqrt of negative rational")
    num, den = int(q.numerator), int(q.denominator)
    rn, rd = math.isqrt(num), math.isqrt(den)
    if rn * rn == num and rd * rd == den:
        return Q(rn, rd)
    return None


def sqrt_lower_bound(q, bits: int = 40):
    """Largest convenient rational lb with lb <= sqrt(q); exact when sqrt(q) is rational."""
    q = as_q(q)
    if q < 0:
        raise ValueError("sqrt of negative rational")
    exact = sqrt_exact(q)
    if exact is not None:
        return exact
    num, den = int(q.numerator), int(q.denominator)
    scale = 1 << bits
    s = math.isqrt(num * den * scale * scale)
    return Q(s, den * scale)


def float_to_q(x: float, max_den: int = 10**6):
    """Deliberate float -> rational conversion (for oracle-suggested points only)."""
    from fractions import Fraction

    return as_q(
        [Fraction(x).limit_denominator(max_den).numerator,
         Fraction(x).limit_denominator(max_den).denominator]
    )
