"""Exact p-adic orbital integrals, hermitian lattices, intersection
numbers, and lattice-chain local models at desk scale (n <= 4)."""

from .gaussian import GaussRational, LogValue
from .padic import (
    PadicContext,
    BaseElem,
    ExtElem,
    QuatElem,
    quadratic_character,
    extended_character,
    f1_measure,
    shell_measure,
)
from .series import OrbitalSeries, series_derivative_at_zero

__all__ = [
    "PadicContext",
    "BaseElem",
    "ExtElem",
    "QuatElem",
    "GaussRational",
    "LogValue",
    "OrbitalSeries",
    "quadratic_character",
    "extended_character",
    "f1_measure",
    "shell_measure",
    "series_derivative_at_zero",
]
