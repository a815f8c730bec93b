"""Exact integer / half-integer angular momentum values."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Real


@dataclass(frozen=True, order=True)
class HalfInt:
    """An angular momentum quantum number stored as ``2*j``.

    >>> HalfInt.of("3/2") + HalfInt.of(1)
    HalfInt(5/2)
    """

    twice: int

    @classmethod
    def of(cls, value) -> HalfInt:
        if isinstance(value, HalfInt):
            return value
        if isinstance(value, str):
            value = Fraction(value)
        if isinstance(value, bool):
            raise TypeError("bool is not an angular momentum")
        if isinstance(value, int):
            return cls(2 * value)
        if isinstance(value, (Fraction, Real)):
            doubled = Fraction(value) * 2
            if doubled.denominator != 1:
                raise ValueError(f"{value!r} is not a multiple of 1/2")
            return cls(int(doubled))
        raise TypeError(f"cannot interpret {value!r} as a half-integer")

    @property
    def is_integer(self) -> bool:
        return self.twice % 2 == 0

    def __float__(self) -> float:
        return self.twice / 2

    def __int__(self) -> int:
        if not self.is_integer:
            raise ValueError(f"{self} is half-integral")
        return self.twice // 2

    def as_fraction(self) -> Fraction:
        return Fraction(self.twice, 2)

    def __add__(self, other) -> HalfInt:
        return HalfInt(self.twice + HalfInt.of(other).twice)

    __radd__ = __add__

    def __sub__(self, other) -> HalfInt:
        return HalfInt(self.twice - HalfInt.of(other).twice)

    def __rsub__(self, other) -> HalfInt:
        return HalfInt(HalfInt.of(other).twice - self.twice)

    def __neg__(self) -> HalfInt:
        return HalfInt(-self.twice)

    def __abs__(self) -> HalfInt:
        return HalfInt(abs(self.twice))

    def __repr__(self) -> str:
        return f"HalfInt({self})"

    def __str__(self) -> str:
        if self.is_integer:
            return str(self.twice // 2)
        return f"{self.twice}/2"

    def projections(self) -> list[HalfInt]:
        """All m = -j, -j+1, ..., j."""
        return [HalfInt(t) for t in range(-self.twice, self.twice + 1, 2)]

    def dim(self) -> int:
        return self.twice + 1


def twice(value) -> int:
    """Doubled integer for any value accepted by :meth:`HalfInt.of`."""
    return HalfInt.of(value).twice


def triangle(ta: int, tb: int, tc: int) -> bool:
    """Triangle rule on doubled values, including integer perimeter."""
    return (
        ta >= 0
        and tb >= 0
        and tc >= 0
        and abs(ta - tb) <= tc <= ta + tb
        and (ta + tb + tc) % 2 == 0
    )
