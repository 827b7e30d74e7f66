"""Gaussian rationals and the exact value types of orbital integrals.

All orbital-integral bookkeeping is exact: series coefficients, transfer
factors and derivative values live in Q(i).  A LogValue is r0 + r1*log(q)
with both coefficients Gaussian rational; equality is exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

Rat = Union[int, Fraction]


@dataclass(frozen=True)
class GaussRational:
    """a + b*i with a, b in Q."""

    re: Fraction
    im: Fraction

    @staticmethod
    def of(re: Rat, im: Rat = 0) -> "GaussRational":
        return GaussRational(Fraction(re), Fraction(im))

    def __add__(self, other):
        other = _coerce(other)
        return GaussRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussRational(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) + (-self)

    def __mul__(self, other):
        other = _coerce(other)
        return GaussRational(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def inverse(self) -> "GaussRational":
        n = self.re * self.re + self.im * self.im
        if n == 0:
            raise ZeroDivisionError("inverse of 0 in Q(i)")
        return GaussRational(self.re / n, -self.im / n)

    def __truediv__(self, other):
        return self * _coerce(other).inverse()

    def conjugate(self) -> "GaussRational":
        return GaussRational(self.re, -self.im)

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def is_real(self) -> bool:
        return self.im == 0

    def __bool__(self):
        return not self.is_zero()

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}*i"
        return f"{self.re}+{self.im}*i"


def _coerce(x) -> GaussRational:
    if isinstance(x, GaussRational):
        return x
    if isinstance(x, (int, Fraction)):
        return GaussRational(Fraction(x), Fraction(0))
    raise TypeError(f"cannot coerce {type(x)} into Q(i)")


QI_ZERO = GaussRational.of(0)
QI_ONE = GaussRational.of(1)
QI_I = GaussRational.of(0, 1)


def fourth_root_power(k: int) -> GaussRational:
    """i^k as a Gaussian rational."""
    return (QI_ONE, QI_I, -QI_ONE, -QI_I)[k % 4]


@dataclass(frozen=True)
class LogValue:
    """r0 + r1*log(q), exact."""

    r0: GaussRational
    r1: GaussRational

    @staticmethod
    def of(r0: Rat = 0, r1: Rat = 0) -> "LogValue":
        return LogValue(_coerce(r0), _coerce(r1))

    def __add__(self, other):
        return LogValue(self.r0 + other.r0, self.r1 + other.r1)

    def __sub__(self, other):
        return LogValue(self.r0 - other.r0, self.r1 - other.r1)

    def __neg__(self):
        return LogValue(-self.r0, -self.r1)

    def scale(self, c) -> "LogValue":
        c = _coerce(c)
        return LogValue(c * self.r0, c * self.r1)

    def is_zero(self) -> bool:
        return self.r0.is_zero() and self.r1.is_zero()

    def __str__(self):
        return f"{self.r0} + ({self.r1})*log q"
