"""Symmetric-space and unitary-group elements at n = 2 (rs tests up to
n = 3), matching, transfer factors, Cayley transform, the level-shift
map on the top-right block, and the star involution.

The five verification settings differ in the extension type, the gram
matrices of the matrix-model unitary groups, and a sign twist in the
quaternion presentation; they are threaded through matching and the
intersection formulas as an explicit Setting value.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .errors import (InsufficientPrecision, NotInDomain,
                     NotRegularSemisimple, PadicError)
from .gaussian import GaussRational
from .padic import (BaseElem, ExtElem, PadicContext, QuatElem,
                    extended_character, quadratic_character, solve_norm,
                    solve_norm_quat_pure)


class MatF:
    """Small dense matrix over the quadratic extension."""

    __slots__ = ("ctx", "rows")

    def __init__(self, ctx: PadicContext, rows: Sequence[Sequence[ExtElem]]):
        self.ctx = ctx
        self.rows = [list(r) for r in rows]

    @property
    def n(self) -> int:
        return len(self.rows)

    @staticmethod
    def from_scalars(ctx, rows) -> "MatF":
        conv = lambda t: t if isinstance(t, ExtElem) else ctx.ext(t)
        return MatF(ctx, [[conv(t) for t in r] for r in rows])

    @staticmethod
    def identity(ctx, n) -> "MatF":
        return MatF.from_scalars(ctx, [[1 if i == j else 0 for j in range(n)]
                                       for i in range(n)])

    @staticmethod
    def diagonal(ctx, entries) -> "MatF":
        n = len(entries)
        conv = lambda t: t if isinstance(t, ExtElem) else ctx.ext(t)
        return MatF(ctx, [[conv(entries[i]) if i == j else ctx.ext(0)
                           for j in range(n)] for i in range(n)])

    def __getitem__(self, ij):
        return self.rows[ij[0]][ij[1]]

    def __add__(self, other):
        return MatF(self.ctx, [[a + b for a, b in zip(r1, r2)]
                               for r1, r2 in zip(self.rows, other.rows)])

    def __sub__(self, other):
        return MatF(self.ctx, [[a - b for a, b in zip(r1, r2)]
                               for r1, r2 in zip(self.rows, other.rows)])

    def __neg__(self):
        return MatF(self.ctx, [[-a for a in r] for r in self.rows])

    def __mul__(self, other):
        if isinstance(other, MatF):
            n, m, k = self.n, len(other.rows[0]), other.n
            out = []
            for i in range(n):
                row = []
                for j in range(m):
                    acc = self.ctx.ext(0)
                    for t in range(k):
                        acc = acc + self.rows[i][t] * other.rows[t][j]
                    row.append(acc)
                out.append(row)
            return MatF(self.ctx, out)
        return self.scale(other)

    def scale(self, c) -> "MatF":
        c = c if isinstance(c, ExtElem) else self.ctx.ext(c)
        return MatF(self.ctx, [[c * a for a in r] for r in self.rows])

    def conj_entries(self) -> "MatF":
        return MatF(self.ctx, [[a.conj() for a in r] for r in self.rows])

    def transpose(self) -> "MatF":
        return MatF(self.ctx, [[self.rows[j][i] for j in range(self.n)]
                               for i in range(len(self.rows[0]))])

    def trace(self) -> ExtElem:
        acc = self.ctx.ext(0)
        for i in range(self.n):
            acc = acc + self.rows[i][i]
        return acc

    def det(self) -> ExtElem:
        n = self.n
        acc = self.ctx.ext(0)
        for perm in itertools.permutations(range(n)):
            sign = _perm_sign(perm)
            term = self.ctx.ext(sign)
            for i in range(n):
                term = term * self.rows[i][perm[i]]
            acc = acc + term
        return acc

    def minor(self, i, j) -> "MatF":
        return MatF(self.ctx, [[self.rows[r][c] for c in range(self.n) if c != j]
                               for r in range(self.n) if r != i])

    def inverse(self) -> "MatF":
        n = self.n
        d = self.det()
        dinv = d.inverse()
        cof = [[(self.minor(j, i).det() if n > 1 else self.ctx.ext(1))
                * self.ctx.ext((-1) ** ((i + j) % 2)) * dinv
                for j in range(n)] for i in range(n)]
        return MatF(self.ctx, cof)

    def apply(self, vec: Sequence[ExtElem]) -> List[ExtElem]:
        return [sum((self.rows[i][j] * vec[j] for j in range(self.n)),
                    self.ctx.ext(0)) for i in range(self.n)]

    def is_integral(self) -> bool:
        return all(a.val_ge(0) for r in self.rows for a in r)

    def eq_mod(self, other: "MatF", m: int) -> bool:
        d = self - other
        return all(a.val_ge(m) for r in d.rows for a in r)

    def char_coeffs(self) -> List[ExtElem]:
        """Coefficients [c_0, ..., c_{n-1}] of T^n + c_{n-1}T^{n-1} + ... + c_0."""
        n = self.n
        if n == 1:
            return [-self.rows[0][0]]
        if n == 2:
            return [self.det(), -self.trace()]
        if n == 3:
            e1 = self.trace()
            e2 = self.ctx.ext(0)
            for i in range(3):
                for j in range(i + 1, 3):
                    e2 = e2 + (self.rows[i][i] * self.rows[j][j]
                               - self.rows[i][j] * self.rows[j][i])
            return [-self.det(), e2, -e1]
        raise PadicError("characteristic polynomial only for n <= 3")


def _perm_sign(perm) -> int:
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        length = 0
        j = i
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


# Regular semi-simplicity and element classes --------------------------------


def _cyclic_matrix(mat: MatF) -> MatF:
    """Columns e, x e, ..., x^{n-1} e for e = (0, ..., 0, 1)."""
    ctx, n = mat.ctx, mat.n
    e = [ctx.ext(0)] * (n - 1) + [ctx.ext(1)]
    cols = [e]
    for _ in range(n - 1):
        cols.append(mat.apply(cols[-1]))
    return MatF(ctx, [[cols[j][i] for j in range(n)] for i in range(n)])


def regular_semisimple(mat: MatF) -> bool:
    """True iff {x^i e} and {t(x)^i e} are both linearly independent."""
    if mat.n > 3:
        raise PadicError("rs test provided for n <= 3 only")
    for m in (mat, mat.transpose()):
        d = _cyclic_matrix(m).det()
        if d.is_exact_zero():
            return False
        d.valuation()  # raises InsufficientPrecision if undecided
    return True


class SymmetricElem:
    """gamma in S_n(F0): matrix over F with gamma * conj(gamma) = 1."""

    def __init__(self, mat: MatF, check: bool = True):
        self.mat = mat
        self.ctx = mat.ctx
        if check:
            lvl = min(self.ctx.max_level(), 2 * self.ctx.f0prec - 4)
            prod = mat * mat.conj_entries()
            if not prod.eq_mod(MatF.identity(self.ctx, mat.n), lvl):
                raise PadicError("defining relation gamma*conj(gamma)=1 fails")

    @staticmethod
    def from_ab(ctx: PadicContext, a: ExtElem, b: ExtElem) -> "SymmetricElem":
        """The regular semi-simple element with upper row (a, b)."""
        bbar = b.conj()
        one = ctx.ext(1)
        c = (one - ctx.ext(a.norm())) * bbar.inverse()
        d = -(a.conj()) * b * bbar.inverse()
        return SymmetricElem(MatF(ctx, [[a, b], [c, d]]))

    @property
    def a(self):
        return self.mat[0, 0]

    @property
    def b(self):
        return self.mat[0, 1]

    @property
    def c(self):
        return self.mat[1, 0]

    @property
    def d(self):
        return self.mat[1, 1]

    def is_rs(self) -> bool:
        return regular_semisimple(self.mat)

    def det(self) -> ExtElem:
        return self.mat.det()


class LieSymmetricElem:
    """y in the tangent space: y + conj(y) = 0."""

    def __init__(self, mat: MatF, check: bool = True):
        self.mat = mat
        self.ctx = mat.ctx
        if check:
            s = mat + mat.conj_entries()
            if not all(t.val_ge(mat.ctx.max_level()) for r in s.rows for t in r):
                raise PadicError("defining relation y + conj(y) = 0 fails")

    @staticmethod
    def from_abcd(ctx, a, b, c, d) -> "LieSymmetricElem":
        conv = lambda t: t if isinstance(t, ExtElem) else ctx.ext(t)
        return LieSymmetricElem(MatF(ctx, [[conv(a), conv(b)],
                                           [conv(c), conv(d)]]))

    @property
    def a(self):
        return self.mat[0, 0]

    @property
    def b(self):
        return self.mat[0, 1]

    @property
    def c(self):
        return self.mat[1, 0]

    @property
    def d(self):
        return self.mat[1, 1]

    def is_rs(self) -> bool:
        return regular_semisimple(self.mat)


class UnitaryMatrixElem:
    """Element of U(J) for a diagonal gram J, in the matrix model."""

    def __init__(self, mat: MatF, gram: Tuple[Fraction, ...], check: bool = True):
        self.mat = mat
        self.ctx = mat.ctx
        self.gram = tuple(Fraction(g) for g in gram)
        if check:
            J = MatF.diagonal(self.ctx, list(self.gram))
            lhs = mat.conj_entries().transpose() * J * mat
            if not lhs.eq_mod(J, self.ctx.max_level()):
                raise PadicError("not unitary for the given gram")

    def conj_by_torus(self, lam: ExtElem) -> "UnitaryMatrixElem":
        h = MatF.diagonal(self.ctx, [lam, self.ctx.ext(1)])
        hinv = MatF.diagonal(self.ctx, [lam.inverse(), self.ctx.ext(1)])
        return UnitaryMatrixElem(hinv * self.mat * h, self.gram, check=False)


class LieUnitaryMatrixElem:
    """Element of Lie U(J): conj-transpose(x) J + J x = 0."""

    def __init__(self, mat: MatF, gram: Tuple[Fraction, ...], check: bool = True):
        self.mat = mat
        self.ctx = mat.ctx
        self.gram = tuple(Fraction(g) for g in gram)
        if check:
            J = MatF.diagonal(self.ctx, list(self.gram))
            s = mat.conj_entries().transpose() * J + J * mat
            if not all(t.val_ge(self.ctx.max_level()) for r in s.rows for t in r):
                raise PadicError("not in the unitary Lie algebra")

    def conj_by_torus(self, lam: ExtElem) -> "LieUnitaryMatrixElem":
        h = MatF.diagonal(self.ctx, [lam, self.ctx.ext(1)])
        hinv = MatF.diagonal(self.ctx, [lam.inverse(), self.ctx.ext(1)])
        return LieUnitaryMatrixElem(hinv * self.mat * h, self.gram, check=False)


@dataclass
class UnitaryQuatElem:
    """Group element in the quaternion presentation diag(1, alpha) *
    [[a, b], [twist*b, a]] with a in F, b in the minus part of D,
    N(a) + twist * N(b) = 1, alpha norm one."""

    ctx: PadicContext
    a: ExtElem
    b: QuatElem
    alpha: ExtElem
    twist_eps_inverse: bool = False  # presentation uses eps^{-1} * N(b)

    def norm_b(self) -> BaseElem:
        return self.b.reduced_norm()

    def conj_by_torus(self, lam: ExtElem) -> "UnitaryQuatElem":
        # diag(lam,1)-conjugation rescales b by lam^{-1}
        return UnitaryQuatElem(self.ctx, self.a, lam.inverse() * self.b,
                               self.alpha, self.twist_eps_inverse)


@dataclass
class LieUnitaryQuatElem:
    """Lie element [[a, b], [twist*b, d]] with a, d on the trace-zero
    line and b in the minus part of D."""

    ctx: PadicContext
    a: ExtElem
    b: QuatElem
    d: ExtElem
    twist_eps_inverse: bool = False

    def norm_b(self) -> BaseElem:
        return self.b.reduced_norm()

    def conj_by_torus(self, lam: ExtElem) -> "LieUnitaryQuatElem":
        return LieUnitaryQuatElem(self.ctx, self.a, lam.inverse() * self.b,
                                  self.d, self.twist_eps_inverse)


# Settings --------------------------------------------------------------------


@dataclass(frozen=True)
class Setting:
    """One verification scenario: extension type, matrix-model gram and
    distinguished lattice, quaternion twist, and which matching side the
    matrix model realizes."""

    name: str
    ramified: bool
    matrix_side: int
    gram2: str      # symbolic second gram entry: '1', '-1', 'w', '-eps'
    lattice: str    # 'selfdual' or 'pi_modular' (the ram-even pair)
    quat_eps_inverse: bool

    def gram(self, ctx: PadicContext) -> Tuple[Fraction, Fraction]:
        second = {
            "1": Fraction(1),
            "-1": Fraction(-1),
            "w": Fraction(ctx.p),
            "-eps": Fraction(-ctx.epsilon),
        }[self.gram2]
        return (Fraction(1), second)

    def context(self, p: int, prec: int = 64,
                eta_tilde_pi: Optional[GaussRational] = None) -> PadicContext:
        return PadicContext(p, prec=prec, ramified=self.ramified,
                            eta_tilde_pi=eta_tilde_pi)


SETTINGS = {
    "unram-selfdual": Setting("unram-selfdual", False, 0, "1", "selfdual", False),
    "unram-almost-selfdual": Setting("unram-almost-selfdual", False, 1, "w",
                                     "selfdual", False),
    "ram-even-n2": Setting("ram-even-n2", True, 0, "-1", "pi_modular", False),
    "ram-selfdual-0": Setting("ram-selfdual-0", True, 1, "-eps", "selfdual", True),
    "ram-selfdual-1": Setting("ram-selfdual-1", True, 0, "-1", "selfdual", False),
}


# Matching ---------------------------------------------------------------------


def matching_side(gamma: SymmetricElem) -> int:
    """0 or 1: the index of the hermitian space whose unitary group
    contains a match, read off from eta(N(a) - 1)."""
    if not gamma.is_rs():
        raise NotRegularSemisimple("side defined for rs elements only")
    t = gamma.a.norm() - gamma.ctx.base(1)
    return 0 if quadratic_character(gamma.ctx, t) == 1 else 1


def matching_side_lie(y: LieSymmetricElem) -> int:
    if not y.is_rs():
        raise NotRegularSemisimple("side defined for rs elements only")
    bc = (y.b * y.c).x0  # product of conjugate-symmetric entries is in F0
    prod = y.b * y.c
    if not prod.x1.is_exact_zero() and not prod.x1.val_ge(y.ctx.max_level()):
        raise PadicError("bc not in the base field")
    return 0 if quadratic_character(y.ctx, bc) == 1 else 1


def match_invariants(elem) -> dict:
    """Conjugation invariants that detect matching at n = 2."""
    if isinstance(elem, SymmetricElem):
        return {"a": elem.a, "det": elem.det()}
    if isinstance(elem, LieSymmetricElem):
        return {"a": elem.a, "d": elem.d, "bc": elem.b * elem.c}
    if isinstance(elem, UnitaryQuatElem):
        # embedded determinant is conj(alpha); upper-left entry is a
        return {"a": elem.a, "det": elem.alpha.conj()}
    if isinstance(elem, LieUnitaryQuatElem):
        return {"a": elem.a, "d": -elem.d, "bc_from_norm": elem.norm_b()}
    if isinstance(elem, UnitaryMatrixElem):
        return {"a": elem.mat[0, 0], "det": elem.mat.det()}
    if isinstance(elem, LieUnitaryMatrixElem):
        return {"a": elem.mat[0, 0], "d": elem.mat[1, 1],
                "bc": elem.mat[0, 1] * elem.mat[1, 0]}
    raise TypeError(f"no invariants for {type(elem)}")


def match_check(gamma, g, setting: Optional[Setting] = None,
                level: Optional[int] = None) -> bool:
    """Certified test that gamma (symmetric side) matches g (unitary side).

    Group case: equal determinants and equal upper-left entries.  Lie
    case: equal diagonal and the product of off-diagonal entries equals
    minus the (twisted) reduced norm, per the setting's convention.
    """
    ctx = gamma.ctx
    lvl = level if level is not None else ctx.max_level()
    inv_g = match_invariants(g)
    if isinstance(gamma, SymmetricElem):
        return (gamma.a.eq_mod(inv_g["a"], lvl)
                and gamma.det().eq_mod(inv_g["det"], lvl))
    if isinstance(gamma, LieSymmetricElem):
        if isinstance(g, LieUnitaryQuatElem):
            twist = Fraction(1, ctx.epsilon) if g.twist_eps_inverse else Fraction(1)
            target = ctx.ext(-twist * 1) * ctx.ext(g.norm_b())
            return (gamma.a.eq_mod(inv_g["a"], lvl)
                    and gamma.d.eq_mod(inv_g["d"], lvl)
                    and (gamma.b * gamma.c).eq_mod(target, lvl))
        return (gamma.a.eq_mod(inv_g["a"], lvl)
                and gamma.d.eq_mod(inv_g["d"], lvl)
                and (gamma.b * gamma.c).eq_mod(inv_g["bc"], lvl))
    raise TypeError("first argument must be a symmetric-side element")


# Transfer factors -------------------------------------------------------------


def transfer_factor_symmetric(gamma: SymmetricElem) -> GaussRational:
    """omega on the symmetric space: the extended character of
    det(gamma)^{-floor(n/2)} det(e, gamma e, ...)."""
    mat = gamma.mat
    n = mat.n
    d = _cyclic_matrix(mat).det()
    if d.is_exact_zero():
        raise NotRegularSemisimple("transfer factor at an irregular element")
    m = n // 2
    det = mat.det()
    val = d
    for _ in range(m):
        val = val * det.inverse()
    return extended_character(mat.ctx, val)


def transfer_factor_lie(y: LieSymmetricElem) -> GaussRational:
    d = _cyclic_matrix(y.mat).det()
    if d.is_exact_zero():
        raise NotRegularSemisimple("transfer factor at an irregular element")
    return extended_character(y.ctx, d)


def transfer_factor_pair(gamma1: MatF, gamma2: MatF) -> GaussRational:
    """omega on the product group, via r(g) = g conj(g)^{-1}."""
    ctx = gamma1.ctx
    n = gamma2.n
    g = _embed_smaller(gamma1, n).inverse() * gamma2
    r = g * g.conj_entries().inverse()
    omega = transfer_factor_symmetric(SymmetricElem(r, check=False))
    if n % 2 == 0:
        omega = omega * extended_character(ctx, g.det())
    return omega


def _embed_smaller(mat: MatF, n: int) -> MatF:
    """diag(mat, 1, ..., 1) of size n."""
    ctx = mat.ctx
    k = mat.n
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            if i < k and j < k:
                row.append(mat[i, j])
            else:
                row.append(ctx.ext(1 if i == j else 0))
        rows.append(row)
    return MatF(ctx, rows)


# Cayley transform and friends ---------------------------------------------------


def cayley(xi: ExtElem, y: MatF) -> MatF:
    """xi (1+y)(1-y)^{-1}; raises NotInDomain when det(1-y) = 0."""
    ctx = y.ctx
    one = MatF.identity(ctx, y.n)
    den = one - y
    d = den.det()
    if d.is_exact_zero():
        raise NotInDomain("det(1 - y) = 0")
    return (one + y) * den.inverse() * MatF.diagonal(ctx, [xi] * y.n)


def cayley_inverse(xi: ExtElem, gamma: MatF) -> MatF:
    ctx = gamma.ctx
    xi_mat = MatF.diagonal(ctx, [xi] * gamma.n)
    den = gamma + xi_mat
    if den.det().is_exact_zero():
        raise NotInDomain("det(gamma + xi) = 0")
    return (gamma - xi_mat) * den.inverse()


def is_integral_element(mat: MatF) -> bool:
    """Characteristic polynomial has integral coefficients."""
    return all(c.val_ge(0) for c in mat.char_coeffs())


def is_strongly_integral(y: MatF) -> bool:
    if not is_integral_element(y):
        return False
    d = (MatF.identity(y.ctx, y.n) - y).det()
    return d.val_ge(0) and not d.val_ge(1)


def is_xi_strongly_integral(gamma: MatF, xi: ExtElem) -> bool:
    if not is_integral_element(gamma):
        return False
    d = (gamma + MatF.diagonal(gamma.ctx, [xi] * gamma.n)).det()
    return d.val_ge(0) and not d.val_ge(1)


def rescale_upper_right(mat: MatF, inverse: bool = False) -> MatF:
    """Scale the top-right block (rows < n-1, last column) by 1/varpi,
    or by varpi when inverse=True.  Unramified contexts only."""
    ctx = mat.ctx
    if ctx.ramified:
        raise PadicError("the level-shift map is an unramified-context tool")
    c = ctx.ext(Fraction(ctx.p) if inverse else Fraction(1, ctx.p))
    rows = [list(r) for r in mat.rows]
    n = mat.n
    for i in range(n - 1):
        rows[i][n - 1] = c * rows[i][n - 1]
    return MatF(ctx, rows)


def star_involution(mat: MatF) -> MatF:
    """diag(1,...,1,varpi^{-1}) * transpose(mat) * diag(1,...,1,varpi)."""
    ctx = mat.ctx
    n = mat.n
    w = Fraction(ctx.p)
    left = MatF.diagonal(ctx, [1] * (n - 1) + [Fraction(1, ctx.p)])
    right = MatF.diagonal(ctx, [1] * (n - 1) + [w])
    return left * mat.transpose() * right


# Manufacture of matching elements ----------------------------------------------


def build_matching_matrix_group(gamma: SymmetricElem,
                                setting: Setting) -> UnitaryMatrixElem:
    """The matrix-model match of gamma, built from its invariants by
    solving the norm equation N(c') = (1 - N a) g1/g2 and Hensel lifting."""
    ctx = gamma.ctx
    if matching_side(gamma) != setting.matrix_side:
        raise PadicError("gamma is on the other side for this setting")
    g1, g2 = setting.gram(ctx)
    a = gamma.a
    mu = gamma.det()
    target = (ctx.base(1) - a.norm()) * ctx.base(g1 / g2)
    cp = solve_norm(ctx, target)
    b = ctx.ext(-Fraction(g2 / g1)) * mu * cp.conj()
    d = mu * a.conj()
    mat = MatF(ctx, [[a, b], [cp, d]])
    return UnitaryMatrixElem(mat, setting.gram(ctx))


def build_matching_matrix_lie(y: LieSymmetricElem,
                              setting: Setting) -> LieUnitaryMatrixElem:
    ctx = y.ctx
    if matching_side_lie(y) != setting.matrix_side:
        raise PadicError("y is on the other side for this setting")
    g1, g2 = setting.gram(ctx)
    prod = y.b * y.c
    target = ctx.base(-g2 / g1) * prod.x0
    bx = solve_norm(ctx, target)
    cx = ctx.ext(-Fraction(g1 / g2)) * bx.conj()
    mat = MatF(ctx, [[y.a, bx], [cx, y.d]])
    return LieUnitaryMatrixElem(mat, setting.gram(ctx))


def build_matching_quat_group(gamma: SymmetricElem,
                              setting: Setting) -> UnitaryQuatElem:
    """The quaternion-presentation match (ramified settings)."""
    ctx = gamma.ctx
    if not setting.ramified:
        raise PadicError("quaternion presentation is for ramified settings")
    quat_side = 1 - setting.matrix_side
    if matching_side(gamma) != quat_side:
        raise PadicError("gamma is on the other side for this setting")
    a = gamma.a
    alpha = gamma.det().conj()
    one_minus = ctx.base(1) - a.norm()
    if setting.quat_eps_inverse:
        # N a + eps^{-1} N b = 1
        target = ctx.base(ctx.epsilon) * one_minus
    else:
        target = one_minus
    b = solve_norm_quat_pure(ctx, target)
    return UnitaryQuatElem(ctx, a, b, alpha, setting.quat_eps_inverse)


def build_matching_quat_lie(y: LieSymmetricElem,
                            setting: Setting) -> LieUnitaryQuatElem:
    ctx = y.ctx
    if not setting.ramified:
        raise PadicError("quaternion presentation is for ramified settings")
    quat_side = 1 - setting.matrix_side
    if matching_side_lie(y) != quat_side:
        raise PadicError("y is on the other side for this setting")
    prod = (y.b * y.c).x0
    target = -prod
    if setting.quat_eps_inverse:
        target = ctx.base(-ctx.epsilon) * prod
    b = solve_norm_quat_pure(ctx, target)
    return LieUnitaryQuatElem(ctx, y.a, b, -y.d, setting.quat_eps_inverse)
