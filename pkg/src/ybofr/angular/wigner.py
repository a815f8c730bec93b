"""Wigner 3j, 6j and 9j symbols.

Racah sums are evaluated with exact integer/rational arithmetic on doubled
quantum numbers, so only the final square root is rounded. Arguments may be
ints, floats such as 0.5, Fractions, strings like "3/2" or HalfInt.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

from .halfint import triangle, twice


@lru_cache(maxsize=None)
def _fact(n: int) -> int:
    return math.factorial(n)


def _h(t: int) -> int:
    # doubled value -> integer, caller guarantees evenness
    return t // 2


def _delta_sq(ta: int, tb: int, tc: int) -> Fraction:
    return Fraction(
        _fact(_h(ta + tb - tc)) * _fact(_h(ta - tb + tc)) * _fact(_h(-ta + tb + tc)),
        _fact(_h(ta + tb + tc) + 1),
    )


def _signed_sqrt(sign_sum: Fraction, radicand: Fraction) -> float:
    if sign_sum == 0 or radicand == 0:
        return 0.0
    # square the sum into the radicand so the only rounding is one sqrt
    mag = math.sqrt(sign_sum * sign_sum * radicand)
    return mag if sign_sum > 0 else -mag


@lru_cache(maxsize=100_000)
def _three_j(t1: int, t2: int, t3: int, tm1: int, tm2: int, tm3: int) -> tuple[Fraction, Fraction]:
    """Return (signed Racah sum, radicand) with value = sum * sqrt(radicand)."""
    zero = (Fraction(0), Fraction(0))
    if tm1 + tm2 + tm3 != 0:
        return zero
    if not triangle(t1, t2, t3):
        return zero
    for tj, tm in ((t1, tm1), (t2, tm2), (t3, tm3)):
        if abs(tm) > tj or (tj - tm) % 2:
            return zero
    radicand = _delta_sq(t1, t2, t3) * (
        _fact(_h(t1 + tm1)) * _fact(_h(t1 - tm1)) * _fact(_h(t2 + tm2))
        * _fact(_h(t2 - tm2)) * _fact(_h(t3 + tm3)) * _fact(_h(t3 - tm3))
    )
    kmin = max(0, _h(t2 - t3 - tm1), _h(t1 - t3 + tm2))
    kmax = min(_h(t1 + t2 - t3), _h(t1 - tm1), _h(t2 + tm2))
    total = Fraction(0)
    for k in range(kmin, kmax + 1):
        denom = (
            _fact(k) * _fact(_h(t3 - t2 + tm1) + k) * _fact(_h(t3 - t1 - tm2) + k)
            * _fact(_h(t1 + t2 - t3) - k) * _fact(_h(t1 - tm1) - k) * _fact(_h(t2 + tm2) - k)
        )
        total += Fraction((-1) ** k, denom)
    if _h(t1 - t2 - tm3) % 2:
        total = -total
    return total, radicand


def wigner3j(j1, j2, j3, m1, m2, m3) -> float:
    """Wigner 3j symbol (j1 j2 j3; m1 m2 m3). Returns 0 for forbidden arguments."""
    s, rad = _three_j(twice(j1), twice(j2), twice(j3), twice(m1), twice(m2), twice(m3))
    return _signed_sqrt(s, rad)


def clebsch_gordan(j1, m1, j2, m2, j, m) -> float:
    """<j1 m1 j2 m2 | j m> in the Condon-Shortley convention."""
    t1, t2, tj, tm = twice(j1), twice(j2), twice(j), twice(m)
    phase = -1 if _h(t1 - t2 + tm) % 2 else 1
    return phase * math.sqrt(tj + 1) * wigner3j(j1, j2, j, m1, m2, -tm / 2)


@lru_cache(maxsize=100_000)
def _six_j(t1: int, t2: int, t3: int, t4: int, t5: int, t6: int) -> tuple[Fraction, Fraction]:
    zero = (Fraction(0), Fraction(0))
    triads = ((t1, t2, t3), (t1, t5, t6), (t4, t2, t6), (t4, t5, t3))
    if not all(triangle(*tr) for tr in triads):
        return zero
    radicand = Fraction(1)
    for tr in triads:
        radicand *= _delta_sq(*tr)
    sums = [_h(a + b + c) for a, b, c in triads]
    pairs = (_h(t1 + t2 + t4 + t5), _h(t2 + t3 + t5 + t6), _h(t3 + t1 + t6 + t4))
    total = Fraction(0)
    for t in range(max(sums), min(pairs) + 1):
        denom = 1
        for s in sums:
            denom *= _fact(t - s)
        for p in pairs:
            denom *= _fact(p - t)
        total += Fraction((-1) ** t * _fact(t + 1), denom)
    return total, radicand


def wigner6j(j1, j2, j3, j4, j5, j6) -> float:
    """Wigner 6j symbol {j1 j2 j3; j4 j5 j6}. Returns 0 when a triad fails."""
    s, rad = _six_j(*(twice(x) for x in (j1, j2, j3, j4, j5, j6)))
    return _signed_sqrt(s, rad)


@lru_cache(maxsize=50_000)
def _nine_j(args: tuple[int, ...]) -> float:
    t1, t2, t3, t4, t5, t6, t7, t8, t9 = args
    rows = ((t1, t2, t3), (t4, t5, t6), (t7, t8, t9))
    cols = ((t1, t4, t7), (t2, t5, t8), (t3, t6, t9))
    if not all(triangle(*tr) for tr in rows + cols):
        return 0.0
    lo = max(abs(t1 - t9), abs(t4 - t8), abs(t2 - t6))
    hi = min(t1 + t9, t4 + t8, t2 + t6)
    total = 0.0
    for tx in range(lo, hi + 1, 2):
        term = (
            wigner6j(t1 / 2, t4 / 2, t7 / 2, t8 / 2, t9 / 2, tx / 2)
            * wigner6j(t2 / 2, t5 / 2, t8 / 2, t4 / 2, tx / 2, t6 / 2)
            * wigner6j(t3 / 2, t6 / 2, t9 / 2, tx / 2, t1 / 2, t2 / 2)
        )
        total += (-1) ** tx * (tx + 1) * term
    return total


def wigner9j(j1, j2, j3, j4, j5, j6, j7, j8, j9) -> float:
    """Wigner 9j symbol, rows (j1 j2 j3), (j4 j5 j6), (j7 j8 j9)."""
    return _nine_j(tuple(twice(x) for x in (j1, j2, j3, j4, j5, j6, j7, j8, j9)))
