"""Intersection numbers at n = 2 via the conductor of quaternion
elements, and the conjugation-matrix oracle that re-derives the closed
forms from lifting conditions.

The closed forms: 2 v(N b) + 2 in the uniformizer-modular even setting,
v(N b) + 1 in the two principally polarized settings, with zero branches
when the relevant entries fail to be integral.  The oracle conjugates
the 2x2 quaternion presentation by the explicit base-change matrix,
decides which branch is integral by the norm-one invariant mod pi, and
measures the surviving lifting locus by the conductor filtration
O_F + pi^l O_D.
"""

from __future__ import annotations

from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .errors import (InfiniteLength, NonIntegral, NotRegularSemisimple,
                     PadicError)
from .padic import BaseElem, ExtElem, PadicContext, QuatElem
from .orbits import LieUnitaryQuatElem, Setting, UnitaryQuatElem

INFINITE = float("inf")


class QuatMatrix:
    """2x2 matrix over the quaternion algebra (order matters)."""

    __slots__ = ("ctx", "rows")

    def __init__(self, ctx: PadicContext, rows: Sequence[Sequence[QuatElem]]):
        self.ctx = ctx
        self.rows = [list(r) for r in rows]

    @staticmethod
    def from_entries(ctx, rows) -> "QuatMatrix":
        conv = lambda t: t if isinstance(t, QuatElem) else ctx.quat(t)
        return QuatMatrix(ctx, [[conv(t) for t in r] for r in rows])

    def __getitem__(self, ij):
        return self.rows[ij[0]][ij[1]]

    def __mul__(self, other: "QuatMatrix") -> "QuatMatrix":
        z = self.ctx.quat(0)
        out = []
        for i in range(2):
            row = []
            for j in range(2):
                acc = z
                for t in range(2):
                    acc = acc + self.rows[i][t] * other.rows[t][j]
                row.append(acc)
            out.append(row)
        return QuatMatrix(self.ctx, out)

    def __add__(self, other):
        return QuatMatrix(self.ctx, [[a + b for a, b in zip(r1, r2)]
                                     for r1, r2 in zip(self.rows, other.rows)])

    def __sub__(self, other):
        return QuatMatrix(self.ctx, [[a - b for a, b in zip(r1, r2)]
                                     for r1, r2 in zip(self.rows, other.rows)])

    def __neg__(self):
        return QuatMatrix(self.ctx, [[-a for a in r] for r in self.rows])

    def scale_left(self, c: QuatElem) -> "QuatMatrix":
        return QuatMatrix(self.ctx, [[c * a for a in r] for r in self.rows])

    def is_integral(self) -> bool:
        return all(a.is_integral() for r in self.rows for a in r)

    def inverse(self) -> "QuatMatrix":
        """Gaussian elimination over the division algebra (left inverse,
        which is also the right inverse)."""
        ctx = self.ctx
        one, zero = ctx.quat(1), ctx.quat(0)
        a = [list(r) for r in self.rows]
        inv = [[one, zero], [zero, one]]
        piv = 0 if not a[0][0].reduced_norm().is_exact_zero() else 1
        if piv == 1:
            a[0], a[1] = a[1], a[0]
            inv[0], inv[1] = inv[1], inv[0]
        p00 = a[0][0].inverse()
        a[0] = [p00 * t for t in a[0]]
        inv[0] = [p00 * t for t in inv[0]]
        f = a[1][0]
        a[1] = [t - f * s for t, s in zip(a[1], a[0])]
        inv[1] = [t - f * s for t, s in zip(inv[1], inv[0])]
        p11 = a[1][1].inverse()
        a[1] = [p11 * t for t in a[1]]
        inv[1] = [p11 * t for t in inv[1]]
        f = a[0][1]
        a[0] = [t - f * s for t, s in zip(a[0], a[1])]
        inv[0] = [t - f * s for t, s in zip(inv[0], inv[1])]
        return QuatMatrix(ctx, inv)


def gross_length(x: QuatElem) -> int:
    """The length l(x) + 1 of the lifting locus of x on the canonical
    deformation, where l is the conductor of x relative to the embedded
    O_F: the largest l with x in O_F + pi^l O_D (membership tested
    coordinatewise on the filtration)."""
    ctx = x.ctx
    if not x.is_integral():
        raise NonIntegral("conductor defined for integral elements")
    if x.b.is_exact_zero():
        raise InfiniteLength("central element: x lies in F")
    ell = 0
    bound = ctx.max_level()
    while ell + 1 <= bound:
        # x in O_F + pi^{ell+1} O_D iff the w-coordinate vanishes there
        if not x.b.val_ge(ell + 1):
            break
        ell += 1
    else:
        raise InfiniteLength("conductor exceeds the certified precision")
    return ell + 1


def _entry_lifting_length(e: QuatElem):
    """Length of the locus where a single O_D-entry lifts: infinite for
    central entries, conductor + 1 otherwise, 0 when non-integral."""
    if not e.is_integral():
        return 0
    if e.b.is_exact_zero() or e.b.val_ge(e.ctx.max_level()):
        # central to within the certified digits
        return INFINITE
    return gross_length(e)


def joint_lifting_length(m: QuatMatrix):
    """Length of the locus where every entry lifts."""
    return min(_entry_lifting_length(e) for r in m.rows for e in r)


# Closed forms ------------------------------------------------------------------


def _norm_b_valuation(b: QuatElem) -> int:
    n = b.reduced_norm()
    if n.is_exact_zero():
        raise NotRegularSemisimple("b = 0")
    return n.valuation()


def intersection_number(elem, setting: Setting) -> int:
    """The closed-form intersection number of the given setting."""
    if not setting.ramified:
        raise PadicError("closed forms exist in the ramified settings only")
    if isinstance(elem, UnitaryQuatElem):
        v = _norm_b_valuation(elem.b)
        if setting.name == "ram-even-n2":
            return 2 * v + 2
        if setting.name == "ram-selfdual-0":
            if elem.a.is_integral() and elem.b.is_integral():
                return v + 1
            return 0
        if setting.name == "ram-selfdual-1":
            # the norm-one constraint makes a and b integral automatically
            if not (elem.a.is_integral() and elem.b.is_integral()):
                raise PadicError("presentation constraint violated")
            return v + 1
        raise PadicError(f"no closed form for {setting.name}")
    if isinstance(elem, LieUnitaryQuatElem):
        v = _norm_b_valuation(elem.b)
        ok = (elem.a.is_integral() and elem.d.is_integral()
              and elem.b.is_integral())
        if setting.name == "ram-even-n2":
            return 2 * v + 2 if ok else 0
        if setting.name in ("ram-selfdual-0", "ram-selfdual-1"):
            return v + 1 if ok else 0
        raise PadicError(f"no closed form for {setting.name}")
    raise TypeError(f"no intersection number for {type(elem)}")


# The conjugation oracle ----------------------------------------------------------


def _base_change(ctx: PadicContext) -> Tuple[QuatMatrix, QuatMatrix, QuatMatrix]:
    """phi0 = [[1, pi], [1, -pi]], its inverse, and the component swap
    kappa0 = [[0, pi], [pi^{-1}, 0]]."""
    pi = ctx.quat(ctx.uniformizer())
    piinv = ctx.quat(ctx.uniformizer().inverse())
    one, zero = ctx.quat(1), ctx.quat(0)
    half = ctx.quat(Fraction(1, 2))
    phi0 = QuatMatrix(ctx, [[one, pi], [one, -pi]])
    phi0_inv = QuatMatrix(ctx, [[half, half],
                                [half * piinv, -(half * piinv)]])
    kappa0 = QuatMatrix(ctx, [[zero, pi], [piinv, zero]])
    return phi0, phi0_inv, kappa0


def _group_matrix(g: UnitaryQuatElem) -> QuatMatrix:
    ctx = g.ctx
    a = ctx.quat(g.a)
    alpha = ctx.quat(g.alpha)
    lower = alpha * g.b
    if g.twist_eps_inverse:
        lower = ctx.quat(Fraction(1, ctx.epsilon)) * lower
    return QuatMatrix(ctx, [[a, g.b], [lower, alpha * a]])


def _lie_matrix(x: LieUnitaryQuatElem) -> QuatMatrix:
    ctx = x.ctx
    lower = x.b
    if x.twist_eps_inverse:
        lower = ctx.quat(Fraction(1, ctx.epsilon)) * lower
    return QuatMatrix(ctx, [[ctx.quat(x.a), x.b], [lower, ctx.quat(x.d)]])


def intersection_number_oracle(elem, setting: Setting) -> int:
    """Re-derive the intersection number from lifting conditions.

    Even uniformizer-modular setting: conjugate the presentation by the
    base change into the product model, pick the integral branch (the
    plain one or the kappa-twisted one, decided by the norm-one
    invariant mod pi; fail loudly if both appear integral), then twice
    the joint lifting length of the surviving matrix.

    Principally polarized settings: the presentation matrix itself is
    the lifting constraint; its joint lifting length, or zero.
    """
    ctx = elem.ctx
    if setting.name == "ram-even-n2":
        phi0, phi0_inv, kappa0 = _base_change(ctx)
        mat = _group_matrix(elem) if isinstance(elem, UnitaryQuatElem) \
            else _lie_matrix(elem)
        conj = phi0_inv * mat * phi0
        conj_k = conj * kappa0
        len_plain = joint_lifting_length(conj)
        len_kappa = joint_lifting_length(conj_k)
        if isinstance(elem, UnitaryQuatElem):
            if len_plain > 0 and len_kappa > 0:
                raise PadicError("both branches integral: cannot decide")
            r = elem.alpha.unit_residue_in_k()
            expected_plain = (r == 1)
            if expected_plain != (len_plain > 0) and (len_plain or len_kappa):
                raise PadicError("branch disagrees with the mod-pi invariant")
        survivors = [t for t in (len_plain, len_kappa) if t != 0]
        if not survivors:
            return 0
        length = max(survivors)
        if length == INFINITE:
            raise InfiniteLength("irregular input: lifting locus not finite")
        return 2 * int(length)
    if setting.name in ("ram-selfdual-0", "ram-selfdual-1"):
        mat = _group_matrix(elem) if isinstance(elem, UnitaryQuatElem) \
            else _lie_matrix(elem)
        length = joint_lifting_length(mat)
        if length == INFINITE:
            raise InfiniteLength("irregular input: lifting locus not finite")
        return int(length)
    raise PadicError(f"no oracle for {setting.name}")


# Algebra membership in the unramified 2x2 quaternion model -----------------------


def quat_matrix_coordinates(m: QuatMatrix) -> List[BaseElem]:
    """Flatten to 16 base-field coordinates."""
    out = []
    for r in m.rows:
        for e in r:
            out.extend([e.a.x0, e.a.x1, e.b.x0, e.b.x1])
    return out


def _column_reduce_membership(gens: List[List[BaseElem]],
                              target: List[BaseElem],
                              ctx: PadicContext, level: int) -> bool:
    """Is target in the O-span of gens, modulo p^level?

    Column echelon over the valuation ring: slack columns p^level * e_i
    guarantee a pivot in every row, and minimal-valuation pivoting keeps
    every elimination quotient integral."""
    nrows = len(target)
    slack = ctx.base(Fraction(ctx.p) ** level)
    zero = ctx.zero()
    cols = [list(g) for g in gens]
    for i in range(nrows):
        col = [zero] * nrows
        col[i] = slack
        cols.append(col)
    t = list(target)
    used = [False] * len(cols)

    def val(e):
        if e.is_exact_zero():
            return None
        try:
            return e.valuation()
        except Exception:
            return None

    for row in range(nrows):
        piv = pv = None
        for j, col in enumerate(cols):
            v = None if used[j] else val(col[row])
            if v is not None and (pv is None or v < pv):
                piv, pv = j, v
        assert piv is not None, "slack column guarantees a pivot"
        used[piv] = True
        pivot = cols[piv]
        inv = pivot[row].inverse()
        for j, col in enumerate(cols):
            if used[j] and j != piv:
                continue
            if j == piv:
                continue
            v = val(col[row])
            if v is None:
                continue
            f = col[row] * inv
            cols[j] = [a - f * b for a, b in zip(col, pivot)]
        v = val(t[row])
        if v is not None:
            f = t[row] * inv
            if f.valuation() < 0:
                return False
            t = [a - f * b for a, b in zip(t, pivot)]
    guard = max(level, 1)
    return all(e.is_exact_zero() or e.val_ge(guard) for e in t)


def algebra_module(ctx: PadicContext, x: QuatMatrix,
                   rounds: int = 3) -> List[List[BaseElem]]:
    """O-module generators of the subalgebra generated over the embedded
    O_F by x inside the 2x2 endomorphism model: the F-action is
    pi -> diag(pi, -pi) (ramified) or the scalar delta (unramified)."""
    if ctx.ramified:
        u = ctx.uniformizer()
        act = QuatMatrix(ctx, [[ctx.quat(u), ctx.quat(0)],
                               [ctx.quat(0), ctx.quat(-u)]])
    else:
        u = ctx.ext(0, 1)
        act = QuatMatrix(ctx, [[ctx.quat(u), ctx.quat(0)],
                               [ctx.quat(0), ctx.quat(u.conj())]])
    one = QuatMatrix.from_entries(ctx, [[1, 0], [0, 1]])
    gens = [one, act, x, act * x, x * x, act * (x * x),
            x * x * x, act * (x * x * x)]
    return [quat_matrix_coordinates(g) for g in gens]


def algebra_contains(ctx: PadicContext, x: QuatMatrix, y: QuatMatrix,
                     level: Optional[int] = None) -> bool:
    lvl = level if level is not None else ctx.max_level() // 2
    return _column_reduce_membership(algebra_module(ctx, x),
                                     quat_matrix_coordinates(y), ctx, lvl)
