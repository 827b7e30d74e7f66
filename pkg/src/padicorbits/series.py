"""Finitely supported Laurent data in q^{-s}.

An OrbitalSeries stores sum_k c_k * q^{-k s} as a map k -> c_k with
Gaussian-rational coefficients.  Exponents are allowed in (1/2)Z because
in the ramified case |b|^s contributes half-integer powers of q^{-s};
orbital integrals themselves always have integer support.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterable, Tuple

from .gaussian import GaussRational, LogValue, QI_ZERO, _coerce


class OrbitalSeries:
    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Dict[Fraction, GaussRational] | None = None):
        self.coeffs: Dict[Fraction, GaussRational] = {}
        if coeffs:
            for k, c in coeffs.items():
                self._bump(Fraction(k), _coerce(c))

    def _bump(self, k: Fraction, c: GaussRational):
        cur = self.coeffs.get(k, QI_ZERO) + c
        if cur.is_zero():
            self.coeffs.pop(k, None)
        else:
            self.coeffs[k] = cur

    @staticmethod
    def zero() -> "OrbitalSeries":
        return OrbitalSeries()

    @staticmethod
    def monomial(k, c=1) -> "OrbitalSeries":
        """c * q^{-k s}."""
        return OrbitalSeries({Fraction(k): _coerce(c)})

    def __add__(self, other: "OrbitalSeries") -> "OrbitalSeries":
        out = OrbitalSeries(dict(self.coeffs))
        for k, c in other.coeffs.items():
            out._bump(k, c)
        return out

    def __neg__(self):
        return OrbitalSeries({k: -c for k, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "OrbitalSeries":
        c = _coerce(c)
        if c.is_zero():
            return OrbitalSeries()
        return OrbitalSeries({k: c * v for k, v in self.coeffs.items()})

    def shift(self, j) -> "OrbitalSeries":
        """Multiply by q^{-j s}."""
        j = Fraction(j)
        return OrbitalSeries({k + j: c for k, c in self.coeffs.items()})

    def __mul__(self, other: "OrbitalSeries") -> "OrbitalSeries":
        out = OrbitalSeries()
        for k1, c1 in self.coeffs.items():
            for k2, c2 in other.coeffs.items():
                out._bump(k1 + k2, c1 * c2)
        return out

    def value_at_zero(self) -> GaussRational:
        total = QI_ZERO
        for c in self.coeffs.values():
            total = total + c
        return total

    def derivative_at_zero(self) -> LogValue:
        """d/ds at s=0; the result is (sum_k -k c_k) * log q."""
        r1 = QI_ZERO
        for k, c in self.coeffs.items():
            r1 = r1 + _coerce(-k) * c
        return LogValue(QI_ZERO, r1)

    def is_zero(self) -> bool:
        return not self.coeffs

    def support(self) -> Iterable[Fraction]:
        return sorted(self.coeffs)

    def items(self) -> Iterable[Tuple[Fraction, GaussRational]]:
        return sorted(self.coeffs.items())

    def __eq__(self, other):
        return isinstance(other, OrbitalSeries) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(tuple(self.items()))

    def __str__(self):
        if not self.coeffs:
            return "0"
        return " + ".join(f"({c})*q^(-{k}s)" for k, c in self.items())


def series_derivative_at_zero(series: OrbitalSeries) -> LogValue:
    return series.derivative_at_zero()
