"""Deterministic sample generation, stratified by valuation data.

All randomness flows through a seeded random.Random so that identical
configurations reproduce identical grids.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import List, Optional, Tuple

from .errors import PadicError
from .padic import (BaseElem, ExtElem, PadicContext, norm_one_residues,
                    norm_one_unit, quadratic_character, solve_norm)
from .orbits import LieSymmetricElem, MatF, SymmetricElem


def random_unit(ctx: PadicContext, rng: random.Random) -> BaseElem:
    p = ctx.p
    digits = rng.randrange(1, p**4)
    if digits % p == 0:
        digits += 1
    return BaseElem.from_unit(ctx, 0, digits)


def random_field_unit(ctx: PadicContext, rng: random.Random) -> ExtElem:
    """Random unit of O_F with a few random digits."""
    p = ctx.p
    while True:
        x0 = rng.randrange(p**3)
        x1 = rng.randrange(p**3)
        x = ctx.ext(x0, x1)
        if x.is_integral() and x.is_unit():
            return x


def element_of_valuation(ctx: PadicContext, rng: random.Random,
                         v: int) -> ExtElem:
    """Random element of F with v_F = v."""
    u = random_field_unit(ctx, rng)
    pi = ctx.uniformizer()
    if ctx.ramified:
        out = u
        if v >= 0:
            for _ in range(v):
                out = out * pi
        else:
            piinv = pi.inverse()
            for _ in range(-v):
                out = out * piinv
        return out
    return u * ctx.ext(Fraction(ctx.p) ** v)


def base_with_unit_class(ctx: PadicContext, rng: random.Random, v: int,
                         eta_sign: Optional[int]) -> BaseElem:
    """Random z in F0 with v(z) = v and prescribed eta-class."""
    for _ in range(400):
        u = random_unit(ctx, rng)
        z = u * ctx.base(Fraction(ctx.p) ** v)
        if eta_sign is None or quadratic_character(ctx, z) == eta_sign:
            return z
    raise PadicError("could not hit the requested character class")


def sample_symmetric(ctx: PadicContext, rng: random.Random, beta: int, nu: int,
                     eta_sign: Optional[int] = None,
                     a_shift: int = 0) -> SymmetricElem:
    """gamma(a, b) with v_F(b) = beta, v(1 - N a) = nu, and eta(1 - N a)
    in the requested class.  a_shift > 0 multiplies a by p^{-a_shift} to
    produce non-integral samples."""
    for _ in range(400):
        z = base_with_unit_class(ctx, rng, nu, eta_sign)
        try:
            if quadratic_character(ctx, ctx.base(1) - z) == 1:
                break
        except Exception:
            continue
    else:
        raise PadicError("no norm 1 - z in the requested stratum")
    a = solve_norm(ctx, ctx.base(1) - z)
    # randomize a inside its norm class by a norm-one unit
    lam = rng.choice(norm_one_residues(ctx, 2))
    a = a * lam
    if a_shift:
        a = a * ctx.ext(Fraction(1, ctx.p**a_shift))
        # 1 - N a now has valuation -2*a_shift; still fine for sampling
    b = element_of_valuation(ctx, rng, beta)
    return SymmetricElem.from_ab(ctx, a, b)


def angular_unit(ctx: PadicContext, w: ExtElem, rng: random.Random) -> ExtElem:
    """A unit u with u / conj(u) = w, for w of norm one (Hilbert 90:
    u = c + w conj(c) for any c keeping u a unit)."""
    for c in ([ctx.ext(1), ctx.ext(0, 1), ctx.ext(1, 1)] +
              [random_field_unit(ctx, rng) for _ in range(8)]):
        u = c + w * c.conj()
        if not u.is_exact_zero() and u.is_integral() and u.is_unit():
            return u
    raise PadicError("could not solve u/conj(u) = w")


def sample_near_center(ctx: PadicContext, rng: random.Random,
                       a0: ExtElem, d0: ExtElem, beta: int, nu: int,
                       eta_sign: Optional[int] = None) -> SymmetricElem:
    """gamma(a, b) close to diag(a0, d0): a = a0 * sqrt(1 - z) with
    v(z) = nu, and the angular part of b chosen so that the lower-right
    entry approaches d0.  The parity of beta is forced by the center."""
    z = base_with_unit_class(ctx, rng, nu, eta_sign)
    a = a0 * ctx.ext((ctx.base(1) - z).sqrt(), 0)
    # b/conj(b) must approach -d0/conj(a) = -a d0 (as N a -> 1); with
    # b = pi^beta u this pins u/conj(u) = (-1)^beta * target (ramified)
    w_target = norm_one_unit(ctx, -(a.conj().inverse()) * d0)
    if ctx.ramified:
        need_odd = (w_target.unit_residue_in_k() != 1)
        if beta % 2 != (1 if need_odd else 0):
            raise PadicError("beta parity incompatible with this center")
        u = angular_unit(ctx, -w_target if need_odd else w_target, rng)
        b = u
        pi = ctx.uniformizer()
        for _ in range(beta):
            b = b * pi
    else:
        u = angular_unit(ctx, w_target, rng)
        b = u * ctx.ext(Fraction(ctx.p) ** beta)
    return SymmetricElem.from_ab(ctx, a, b)


def center_beta_parity(ctx: PadicContext, a0: ExtElem, d0: ExtElem) -> int:
    """Near diag(a0, d0) the parity of v_F(b) is locked (ramified case):
    b/conj(b) = (-1)^{v_F(b)} mod pi must match -a0 d0."""
    w = -(a0 * d0)
    r = w.unit_residue_in_k()
    return 0 if r == 1 else 1


def trace_zero_element(ctx: PadicContext, rng: random.Random,
                       v: int) -> ExtElem:
    """Random element of the trace-zero line (pi F0 ramified, delta F0
    unramified) with v_F = v.  Ramified v must be odd."""
    u = random_unit(ctx, rng)
    if ctx.ramified:
        if v % 2 == 0:
            raise PadicError("trace-zero entries have odd valuation")
        return ctx.ext(0, u * ctx.base(Fraction(ctx.p) ** ((v - 1) // 2)))
    return ctx.ext(0, u * ctx.base(Fraction(ctx.p) ** v))


def sample_lie(ctx: PadicContext, rng: random.Random, vb: int, vc: int,
               eta_sign: Optional[int] = None,
               va: Optional[int] = None,
               vd: Optional[int] = None) -> LieSymmetricElem:
    """y(a, b, c, d) with prescribed entry valuations on the trace-zero
    line and optional character class of bc."""
    va = va if va is not None else (1 if ctx.ramified else 0)
    vd = vd if vd is not None else (1 if ctx.ramified else 0)
    for _ in range(200):
        a = trace_zero_element(ctx, rng, va)
        d = trace_zero_element(ctx, rng, vd)
        b = trace_zero_element(ctx, rng, vb)
        c = trace_zero_element(ctx, rng, vc)
        y = LieSymmetricElem.from_abcd(ctx, a, b, c, d)
        prod = (b * c).x0
        if eta_sign is None or quadratic_character(ctx, prod) == eta_sign:
            return y
    raise PadicError("could not hit the requested Lie stratum")


def norm_one_element(ctx: PadicContext, rng: random.Random,
                     nontrivial: bool = False) -> ExtElem:
    reps = norm_one_residues(ctx, 3)
    if not nontrivial:
        return rng.choice(reps)
    others = [r for r in reps
              if not (r - ctx.ext(1)).val_ge(2)
              and not (r + ctx.ext(1)).val_ge(2)]
    return rng.choice(others if others else reps)
