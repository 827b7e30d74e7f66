"""Failure modes shared across the library.

Every computation either returns a result certified at the working
precision or raises; silent rounding never happens.
"""


class PadicError(Exception):
    pass


class ZeroInput(PadicError):
    """A character or inverse was requested at zero."""


class InsufficientPrecision(PadicError):
    """Not enough certified digits to decide the requested question."""


class NotAVertexLattice(PadicError):
    """L does not satisfy L <= L^dual <= pi^{-1} L."""


class PreconditionViolated(PadicError):
    pass


class NotRegularSemisimple(PadicError):
    pass


class NotInDomain(PadicError):
    """Cayley-type map applied where the defining determinant vanishes."""


class InfiniteLength(PadicError):
    """Conductor of a central element; the lifting locus is not finite."""


class NonIntegral(PadicError):
    pass


class GermDoesNotStabilize(PadicError):
    """No neighborhood level within precision certifies the germ model."""


class NoSplitComplement(PadicError):
    """Isotropic-vector search failed; the input point is not flat."""
