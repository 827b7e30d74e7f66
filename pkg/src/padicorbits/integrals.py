"""Exact n = 2 orbital integrals.

The conjugation orbit of gamma = [[a, b], [c, d]] under the split torus
diag(x, 1), x in F0^x, moves b to b/x and c to c*x.  An orbital integral
is therefore a sum over shells v(x) = k of eta-weighted unit measures of
congruence conditions in x; every test function here reduces per shell
to a single unit congruence class, so each coefficient is an exact
rational times a character value, and the whole integral is a finitely
supported series in q^{-s}.

Unitary orbital integrals at n = 2 are F^1-averages: exact rationals via
the certified norm-one measure.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple

from .errors import (GermDoesNotStabilize, InsufficientPrecision,
                     NotRegularSemisimple, PadicError)
from .gaussian import GaussRational, LogValue, QI_ZERO, _coerce
from .padic import (BaseElem, ExtElem, PadicContext, f1_measure, legendre,
                    quadratic_character, extended_character)
from .series import OrbitalSeries
from .orbits import (LieSymmetricElem, LieUnitaryMatrixElem, MatF, Setting,
                     SymmetricElem, UnitaryMatrixElem, transfer_factor_lie,
                     transfer_factor_symmetric)


# Unit congruence classes within a fixed shell ---------------------------------


class UnitClass:
    """Subset of O^x of the form {u : u = r mod p^t}, or all units, or empty."""

    __slots__ = ("kind", "r", "t")

    def __init__(self, kind: str, r: int = 0, t: int = 0):
        self.kind = kind  # 'empty' | 'full' | 'class'
        self.r = r
        self.t = t

    @staticmethod
    def empty():
        return UnitClass("empty")

    @staticmethod
    def full():
        return UnitClass("full")

    @staticmethod
    def congruence(r: int, t: int, p: int):
        if t <= 0:
            return UnitClass("full")
        r %= p**t
        if r % p == 0:
            return UnitClass("empty")
        return UnitClass("class", r, t)

    def intersect(self, other: "UnitClass", p: int) -> "UnitClass":
        if self.kind == "empty" or other.kind == "empty":
            return UnitClass.empty()
        if self.kind == "full":
            return other
        if other.kind == "full":
            return self
        lo, hi = (self, other) if self.t <= other.t else (other, self)
        if (hi.r - lo.r) % p**lo.t != 0:
            return UnitClass.empty()
        return hi

    def measure(self, p: int) -> Fraction:
        if self.kind == "empty":
            return Fraction(0)
        if self.kind == "full":
            return Fraction(1)
        return Fraction(1, (p - 1) * p ** (self.t - 1))

    def eta_weighted_measure(self, ctx: PadicContext, k: int) -> GaussRational:
        """Integral of eta(x) over {x = p^k u : u in self} against the
        unit-shell measure."""
        p = ctx.p
        if self.kind == "empty":
            return QI_ZERO
        if not ctx.ramified:
            return _coerce((-1) ** (k % 2) * self.measure(p))
        if self.kind == "full":
            return QI_ZERO  # ramified eta integrates to zero over O^x
        sign = legendre((-1) ** (k % 2) * self.r, p)
        return _coerce(sign * self.measure(p))


def solve_linear_class(ctx: PadicContext, coeff: ExtElem, rhs: ExtElem,
                       modlevel: int, shell: int) -> UnitClass:
    """Unit classes u with coeff * (p^shell u) = rhs  (mod pi^modlevel).

    coeff and rhs live in F; the unknown runs over F0^x in a fixed
    shell.  Levels are pi-adic."""
    e = 2 if ctx.ramified else 1
    p = ctx.p
    vc = float("inf") if coeff.is_exact_zero() else coeff.valuation()
    if vc + e * shell >= modlevel:
        # coeff*x vanishes to the requested level: pure condition on rhs
        return UnitClass.full() if rhs.val_ge(modlevel) else UnitClass.empty()
    xi = rhs * coeff.inverse()
    t = modlevel - vc  # pi-adic congruence level on x
    if ctx.ramified:
        # x is real, so the pi-coordinate of xi must vanish to level t
        if not xi.x1.val_ge(t // 2):  # ceil((t-1)/2) == t//2
            return UnitClass.empty()
        t0 = (t + 1) // 2  # p-adic level on the real coordinate
    else:
        if not xi.x1.val_ge(t):
            return UnitClass.empty()
        t0 = t
    real = xi.x0
    if real.is_exact_zero() or real.val_ge(t0):
        return UnitClass.full() if shell >= t0 else UnitClass.empty()
    v0 = real.valuation()
    if v0 != shell:
        return UnitClass.empty()
    return UnitClass.congruence(real.unit_residue(t0 - v0), t0 - v0, p)


# Test functions on the symmetric space / its tangent space ---------------------


class SymmetricTestFunction:
    """Signed combination of congruence balls and the named lattice sets."""

    def __init__(self, ctx: PadicContext, terms=None, label: str = ""):
        self.ctx = ctx
        self.terms = list(terms or [])  # (GaussRational, term)
        self.label = label

    def add(self, coeff, term):
        self.terms.append((_coerce(coeff), term))
        return self

    def level(self) -> int:
        return max((t.level for _, t in self.terms), default=0)

    def evaluate(self, mat: MatF) -> GaussRational:
        total = QI_ZERO
        for coeff, term in self.terms:
            if term.contains(mat):
                total = total + coeff
        return total


class _WindowTerm:
    """Named sets decided by entry valuations: the integral matrices of
    S resp. its tangent space, optionally intersected with the lower
    block congruence mod varpi."""

    def __init__(self, ctx: PadicContext, lower_congruence: bool):
        self.ctx = ctx
        self.lower_congruence = lower_congruence
        self.level = (2 if ctx.ramified else 1) if lower_congruence else 0

    def contains(self, mat: MatF) -> bool:
        if not mat.is_integral():
            return False
        if self.lower_congruence:
            e = 2 if self.ctx.ramified else 1
            return mat[0, 1].val_ge(e)
        return True

    def const_ok(self, a, b, c, d) -> bool:
        return a.val_ge(0) and d.val_ge(0)

    def shell_window(self, a, b, c, d) -> Optional[Tuple[int, int]]:
        # integral entries: v(b) - e k >= e*shift and v(c) + e k >= 0
        e = 2 if self.ctx.ramified else 1
        shift = 1 if self.lower_congruence else 0
        vb, vc = b.valuation(), c.valuation()
        lo = _ceil_div(-vc, e)
        hi = _floor_div(vb - e * shift, e)
        if lo > hi:
            return None
        return (lo, hi)

    def shell_class(self, a, b, c, d, k) -> UnitClass:
        lo_hi = self.shell_window(a, b, c, d)
        if lo_hi and lo_hi[0] <= k <= lo_hi[1]:
            return UnitClass.full()
        return UnitClass.empty()


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


def _floor_div(a: int, b: int) -> int:
    return a // b


class _BallTerm:
    """Congruence ball {x = center mod pi^level} in 2x2 matrices."""

    def __init__(self, center: MatF, level: int):
        self.center = center
        self.ctx = center.ctx
        self.level = level

    def contains(self, mat: MatF) -> bool:
        return mat.eq_mod(self.center, self.level)

    def const_ok(self, a, b, c, d) -> bool:
        return (a.eq_mod(self.center[0, 0], self.level)
                and d.eq_mod(self.center[1, 1], self.level))

    def shell_class(self, a, b, c, d, k) -> UnitClass:
        ctx = self.ctx
        # b/x = c12 (mod pi^L)  <=>  c12 * x = b (mod pi^{L + e k})
        e = 2 if ctx.ramified else 1
        cls1 = solve_linear_class(ctx, self.center[0, 1], b,
                                  self.level + e * k, k)
        # c*x = c21 (mod pi^L)
        cls2 = solve_linear_class(ctx, c, self.center[1, 0], self.level, k)
        return cls1.intersect(cls2, ctx.p)

    def shell_window(self, a, b, c, d) -> Optional[Tuple[int, int]]:
        ctx = self.ctx
        e = 2 if ctx.ramified else 1
        L = self.level
        vb, vc = b.valuation(), c.valuation()
        c12, c21 = self.center[0, 1], self.center[1, 0]
        lo = hi = None

        def meet(val):
            nonlocal lo, hi
            lo = val if lo is None else max(lo, val)
            hi = val if hi is None else min(hi, val)

        if c12.val_ge(L):
            # v(b) - e k >= L
            hi = _floor_div(vb - L, e)
        else:
            k0, rem = divmod(vb - c12.valuation(), e)
            if rem:
                return None
            meet(k0)
        if c21.val_ge(L):
            # v(c) + e k >= L
            v = _ceil_div(L - vc, e)
            lo = v if lo is None else max(lo, v)
        else:
            k0, rem = divmod(c21.valuation() - vc, e)
            if rem:
                return None
            meet(k0)
        if lo is None or hi is None or lo > hi:
            return None
        return (lo, hi)


def integral_matrices(ctx: PadicContext) -> SymmetricTestFunction:
    """Indicator of the integral points of the symmetric space (or of
    its tangent space; the membership test is the same)."""
    return SymmetricTestFunction(ctx, [(GaussRational.of(1),
                                        _WindowTerm(ctx, False))],
                                 label="1_integral")

def lower_congruence_subset(ctx: PadicContext) -> SymmetricTestFunction:
    """Indicator of the integral points whose upper-right entry vanishes
    mod varpi (the level structure K' and its Lie analog)."""
    return SymmetricTestFunction(ctx, [(GaussRational.of(1),
                                        _WindowTerm(ctx, True))],
                                 label="1_lower_level")


def ball_function(center: MatF, level: int,
                  coeff=1) -> SymmetricTestFunction:
    return SymmetricTestFunction(center.ctx,
                                 [(_coerce(coeff), _BallTerm(center, level))],
                                 label=f"ball@{level}")


# The shell engine ---------------------------------------------------------------


def _entry_quadruple(elem) -> Tuple[ExtElem, ExtElem, ExtElem, ExtElem]:
    m = elem.mat
    return m[0, 0], m[0, 1], m[1, 0], m[1, 1]


def orbital_series(elem, f: SymmetricTestFunction,
                   check_edges: bool = True) -> OrbitalSeries:
    """Orb(elem, f, s) as exact Laurent data, for elem a regular
    semi-simple element of the symmetric space or its tangent space."""
    if not elem.is_rs():
        raise NotRegularSemisimple("orbital integral needs bc != 0")
    ctx = elem.ctx
    a, b, c, d = _entry_quadruple(elem)
    out = OrbitalSeries()
    for coeff, term in f.terms:
        if not term.const_ok(a, b, c, d):
            continue
        window = term.shell_window(a, b, c, d)
        if window is None:
            continue
        lo, hi = window
        for k in range(lo - 2, hi + 3):
            cls = term.shell_class(a, b, c, d, k)
            w = cls.eta_weighted_measure(ctx, k)
            if not w.is_zero():
                if check_edges and not (lo <= k <= hi):
                    raise PadicError("shell outside the analytic window "
                                     "carries mass; window bound is wrong")
                out = out + OrbitalSeries.monomial(k, coeff * w)
    return out


def orbital_value(elem, f) -> GaussRational:
    return orbital_series(elem, f).value_at_zero()


def orbital_derivative(elem, f) -> LogValue:
    return orbital_series(elem, f).derivative_at_zero()


# Unitary-side test functions and integrals ---------------------------------------


class UnitaryTestFunction:
    """Indicator of a lattice stabilizer (group or Lie) or of a product
    set K_flat * K inside the matrix model."""

    def __init__(self, ctx: PadicContext, basis: MatF, kind: str,
                 label: str = "", search_level: int = 2):
        self.ctx = ctx
        self.basis = basis
        self.basis_inv = basis.inverse()
        self.kind = kind  # 'group' | 'lie' | 'product'
        self.label = label
        self.search_level = search_level

    def _stabilizes(self, mat: MatF) -> bool:
        return (self.basis_inv * mat * self.basis).is_integral()

    def contains(self, mat: MatF) -> bool:
        if self.kind in ("group", "lie"):
            return self._stabilizes(mat)
        # product set: exists lambda in F^1 with diag(lambda,1)^{-1} g in K
        results = []
        for lv in (self.search_level, self.search_level + 1):
            reps = _norm_one_reps(self.ctx, lv)
            found = False
            for lam in reps:
                h = MatF.diagonal(self.ctx, [lam.inverse(), self.ctx.ext(1)])
                if self._stabilizes(h * mat):
                    found = True
                    break
            results.append(found)
        if results[0] != results[1]:
            raise InsufficientPrecision("product-set search did not stabilize")
        return results[0]


def _norm_one_reps(ctx, level):
    from .padic import norm_one_residues
    return norm_one_residues(ctx, max(level, 1))


def stabilizer_function(ctx: PadicContext, basis: MatF, lie: bool = False,
                        label: str = "") -> UnitaryTestFunction:
    return UnitaryTestFunction(ctx, basis, "lie" if lie else "group", label)


def product_set_function(ctx: PadicContext, basis: MatF, search_level: int = 2,
                         label: str = "") -> UnitaryTestFunction:
    return UnitaryTestFunction(ctx, basis, "product", label,
                               search_level=search_level)


def _is_diagonal(mat: MatF) -> bool:
    return all(mat[i, j].is_exact_zero()
               for i in range(mat.n) for j in range(mat.n) if i != j)


def unitary_orbital(g, f: UnitaryTestFunction, level: int = 2) -> Fraction:
    """Orb(g, f) over the norm-one torus with total volume one.

    For a stabilizer of a lattice with diagonal basis the integrand is
    exactly torus-invariant (the torus is a unit diagonal), so a single
    evaluation suffices; otherwise an exact F^1 average is taken.
    """
    ctx = g.ctx
    if f.kind in ("group", "lie") and _is_diagonal(f.basis):
        return Fraction(1 if f.contains(g.mat) else 0)

    def cond(lam: ExtElem) -> bool:
        return f.contains(g.conj_by_torus(lam).mat)

    return f1_measure(ctx, cond, level)


def pi_modular_basis(ctx: PadicContext, sign: int) -> MatF:
    """Basis of the two uniformizer-modular lattices between pi*L and L
    for the split gram diag(1, -1): columns (1, +-1) and (0, pi)."""
    pi = ctx.uniformizer()
    return MatF(ctx, [[ctx.ext(1), ctx.ext(0)], [ctx.ext(sign), pi]])


def setting_unitary_function(ctx: PadicContext, setting: Setting, name: str
                             ) -> UnitaryTestFunction:
    """The named compact-set indicators of each setting."""
    ident = MatF.identity(ctx, 2)
    if name in ("K", "K0", "K1"):
        return stabilizer_function(ctx, ident, label=name)
    if name in ("k", "k0", "k1"):
        return stabilizer_function(ctx, ident, lie=True, label=name)
    if name in ("KflatK+", "KflatK-"):
        basis = pi_modular_basis(ctx, 1 if name.endswith("+") else -1)
        return product_set_function(ctx, basis, label=name)
    if name in ("k+", "k-"):
        basis = pi_modular_basis(ctx, 1 if name.endswith("+") else -1)
        return stabilizer_function(ctx, basis, lie=True, label=name)
    raise PadicError(f"unknown unitary test function {name}")


# Germ expansion --------------------------------------------------------------


@dataclass
class GermFit:
    """Exact two-slope model around an irregular center."""

    center: Tuple[ExtElem, ExtElem]
    side: int
    phi_plus: OrbitalSeries
    phi_minus: OrbitalSeries
    neighborhood_level: int
    residual_ok: bool
    label: str = ""

    def phi_plus_at_zero(self) -> GaussRational:
        return self.phi_plus.value_at_zero()

    def phi_minus_at_zero(self) -> GaussRational:
        return self.phi_minus.value_at_zero()


def _solve_gauss(rows: List[List[GaussRational]],
                 rhs: List[GaussRational]) -> Optional[List[GaussRational]]:
    """Particular solution of an exact linear system, or None."""
    m = len(rows)
    n = len(rows[0]) if rows else 0
    A = [list(r) + [v] for r, v in zip(rows, rhs)]
    piv_cols = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if not A[i][c].is_zero()), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = A[r][c].inverse()
        A[r] = [inv * t for t in A[r]]
        for i in range(m):
            if i != r and not A[i][c].is_zero():
                f = A[i][c]
                A[i] = [ti - f * tr for ti, tr in zip(A[i], A[r])]
        piv_cols.append(c)
        r += 1
        if r == m:
            break
    for i in range(r, m):
        if not A[i][n].is_zero():
            return None  # inconsistent
    sol = [QI_ZERO] * n
    for i, c in enumerate(piv_cols):
        sol[c] = A[i][n]
    return sol


def _model_lhs(gamma: SymmetricElem, f: SymmetricTestFunction) -> OrbitalSeries:
    return orbital_series(gamma, f).scale(transfer_factor_symmetric(gamma))


def _sample_parameters(gamma: SymmetricElem) -> Tuple[Fraction, int, int]:
    ctx = gamma.ctx
    # |b| = q^{-v_F(b)/2} when ramified, q^{-v_F(b)} when unramified
    beta = Fraction(gamma.b.valuation(), 2 if ctx.ramified else 1)
    one_minus = ctx.base(1) - gamma.a.norm()
    nu = one_minus.valuation()
    eta_sign = quadratic_character(ctx, gamma.a.norm() - ctx.base(1))
    return beta, nu, eta_sign


def fit_germ_expansion(f: SymmetricTestFunction,
                       center: Tuple[ExtElem, ExtElem],
                       samples: Sequence[SymmetricElem],
                       holdout: Sequence[SymmetricElem],
                       neighborhood_level: int,
                       label: str = "") -> GermFit:
    """Solve exactly for the two Laurent slopes phi_+/phi_- of the germ
    model omega * Orb(gamma, f, s) = phi_+(s)|b|^s +
    phi_-(s) eta(Na-1) |(1-Na)/conj(b)|^{-s} on the given samples, then
    require the residual to vanish identically on the held-out samples.
    """
    if not samples:
        raise GermDoesNotStabilize("no samples supplied")
    data = []
    for gamma in samples:
        beta, nu, eta_sign = _sample_parameters(gamma)
        data.append((beta, nu, eta_sign, _model_lhs(gamma, f)))
    plus_exp = sorted({k - beta for beta, nu, s, L in data for k in L.coeffs})
    minus_exp = sorted({k - beta + nu for beta, nu, s, L in data
                        for k in L.coeffs})
    if not plus_exp and not minus_exp:
        fit = GermFit(center, data[0][2], OrbitalSeries(), OrbitalSeries(),
                      neighborhood_level, True, label)
        return _check_holdout(fit, f, holdout)
    cols = [("+", e) for e in plus_exp] + [("-", e) for e in minus_exp]
    rows, rhs = [], []
    for beta, nu, eta_sign, L in data:
        exps = set(L.coeffs)
        exps |= {e + beta for _, e in cols if _ == "+"}
        exps |= {e + beta - nu for sgn, e in cols if sgn == "-"}
        for e in sorted(exps):
            row = []
            for sgn, j in cols:
                hit = (sgn == "+" and j + beta == e) or \
                      (sgn == "-" and j + beta - nu == e)
                w = GaussRational.of(1 if sgn == "+" else eta_sign)
                row.append(w if hit else QI_ZERO)
            rows.append(row)
            rhs.append(L.coeffs.get(e, QI_ZERO))
    sol = _solve_gauss(rows, rhs)
    if sol is None:
        raise GermDoesNotStabilize("germ model inconsistent on the samples")
    phip = OrbitalSeries({e: sol[i] for i, (sgn, e) in enumerate(cols)
                          if sgn == "+" and not sol[i].is_zero()})
    phim = OrbitalSeries({e: sol[i] for i, (sgn, e) in enumerate(cols)
                          if sgn == "-" and not sol[i].is_zero()})
    fit = GermFit(center, data[0][2], phip, phim, neighborhood_level, True,
                  label)
    return _check_holdout(fit, f, holdout)


def germ_model_prediction(fit: GermFit, gamma: SymmetricElem) -> OrbitalSeries:
    beta, nu, eta_sign = _sample_parameters(gamma)
    pred = fit.phi_plus.shift(beta)
    pred = pred + fit.phi_minus.shift(beta - nu).scale(eta_sign)
    return pred


def _check_holdout(fit: GermFit, f, holdout) -> GermFit:
    for gamma in holdout:
        lhs = _model_lhs(gamma, f)
        if not (lhs - germ_model_prediction(fit, gamma)).is_zero():
            fit.residual_ok = False
            raise GermDoesNotStabilize(
                "held-out sample violates the fitted germ model")
    return fit


def lie_germ_model_lhs(y: LieSymmetricElem,
                       f: SymmetricTestFunction) -> OrbitalSeries:
    """Plain Orb(y, f, s); the Lie model carries the character weights on
    the right-hand side instead."""
    return orbital_series(y, f)


def fit_lie_germ_expansion(f: SymmetricTestFunction,
                           samples: Sequence[LieSymmetricElem],
                           holdout: Sequence[LieSymmetricElem],
                           neighborhood_level: int,
                           label: str = "") -> GermFit:
    """Exact fit of Orb(y, f, s) = phi_+(s) etatilde(b) |b|^s +
    phi_-(s) etatilde(c)^{-1} |c|^{-s}."""
    if not samples:
        raise GermDoesNotStabilize("no samples supplied")
    data = []
    for y in samples:
        ctx = y.ctx
        bexp = Fraction(y.b.valuation(), 2 if ctx.ramified else 1)
        cexp = Fraction(y.c.valuation(), 2 if ctx.ramified else 1)
        wb = extended_character(ctx, y.b)
        wc = extended_character(ctx, y.c).inverse()
        data.append((bexp, cexp, wb, wc, orbital_series(y, f)))
    plus_exp = sorted({k - b for b, c, wb, wc, L in data for k in L.coeffs})
    minus_exp = sorted({k + c for b, c, wb, wc, L in data for k in L.coeffs})
    cols = [("+", e) for e in plus_exp] + [("-", e) for e in minus_exp]
    rows, rhs = [], []
    for bexp, cexp, wb, wc, L in data:
        exps = set(L.coeffs)
        exps |= {e + bexp for sgn, e in cols if sgn == "+"}
        exps |= {e - cexp for sgn, e in cols if sgn == "-"}
        for e in sorted(exps):
            row = []
            for sgn, j in cols:
                if sgn == "+" and j + bexp == e:
                    row.append(wb)
                elif sgn == "-" and j - cexp == e:
                    row.append(wc)
                else:
                    row.append(QI_ZERO)
            rows.append(row)
            rhs.append(L.coeffs.get(e, QI_ZERO))
    sol = _solve_gauss(rows, rhs)
    if sol is None:
        raise GermDoesNotStabilize("Lie germ model inconsistent")
    phip = OrbitalSeries({e: sol[i] for i, (sgn, e) in enumerate(cols)
                          if sgn == "+" and not sol[i].is_zero()})
    phim = OrbitalSeries({e: sol[i] for i, (sgn, e) in enumerate(cols)
                          if sgn == "-" and not sol[i].is_zero()})
    fit = GermFit((None, None), -1, phip, phim, neighborhood_level, True, label)
    for y in holdout:
        ctx = y.ctx
        bexp = Fraction(y.b.valuation(), 2 if ctx.ramified else 1)
        cexp = Fraction(y.c.valuation(), 2 if ctx.ramified else 1)
        wb = extended_character(ctx, y.b)
        wc = extended_character(ctx, y.c).inverse()
        pred = phip.shift(bexp).scale(wb) + phim.shift(-cexp).scale(wc)
        if not (orbital_series(y, f) - pred).is_zero():
            raise GermDoesNotStabilize("held-out Lie sample violates the fit")
    return fit
