"""Verification pipelines: matching-pair grids for the fundamental-lemma
identities, irregular orbital integrals, intersection-number cross
checks, germ fits with the derivative-constancy law, and the reduction
identities (level shift, Cayley, star involution, line counts, lifting
invariance).

Each pipeline emits CheckRecord rows carrying both sides as exact
values, so a failure localizes to a coefficient.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import PadicError
from .gaussian import GaussRational, LogValue, QI_ZERO
from .padic import (PadicContext, extended_character, norm_one_residues,
                    quadratic_character, solve_norm)
from .series import OrbitalSeries
from .orbits import (MatF, SETTINGS, Setting, SymmetricElem, LieSymmetricElem,
                     UnitaryMatrixElem, LieUnitaryMatrixElem,
                     build_matching_matrix_group, build_matching_matrix_lie,
                     build_matching_quat_group, build_matching_quat_lie,
                     cayley, cayley_inverse, is_strongly_integral,
                     is_xi_strongly_integral, match_check, matching_side,
                     matching_side_lie, regular_semisimple,
                     rescale_upper_right, star_involution,
                     transfer_factor_lie, transfer_factor_symmetric)
from .integrals import (SymmetricTestFunction, UnitaryTestFunction,
                        ball_function, fit_germ_expansion,
                        fit_lie_germ_expansion, integral_matrices,
                        lower_congruence_subset, orbital_derivative,
                        orbital_series, orbital_value,
                        setting_unitary_function, unitary_orbital)
from .intersections import (intersection_number, intersection_number_oracle)
from .sampling import (angular_unit, center_beta_parity, norm_one_element,
                       sample_lie, sample_near_center, sample_symmetric,
                       trace_zero_element)


@dataclass
class CheckRecord:
    check: str
    params: Dict[str, str]
    lhs: LogValue
    rhs: LogValue
    passed: bool
    certificates: Dict[str, str] = field(default_factory=dict)
    expected_fail: bool = False

    def ok(self) -> bool:
        return self.passed != self.expected_fail


def _lv(x) -> LogValue:
    if isinstance(x, LogValue):
        return x
    if isinstance(x, GaussRational):
        return LogValue(x, QI_ZERO)
    return LogValue(GaussRational.of(Fraction(x)), QI_ZERO)


def _gamma_params(gamma: SymmetricElem) -> Dict[str, str]:
    ctx = gamma.ctx
    nu = (ctx.base(1) - gamma.a.norm()).valuation()
    return {"v_b": str(gamma.b.valuation()), "v_one_minus_Na": str(nu),
            "side": str(matching_side(gamma))}


# Fundamental-lemma grids -------------------------------------------------------


def fl_check(setting: Setting, p: int, count: int, seed: int,
             prec: int = 64,
             window: Tuple[int, int] = (-3, 3)) -> List[CheckRecord]:
    """The n = 2 transfer identities for the unramified settings: on the
    matched side the weighted symmetric-space integral equals the
    unitary one; on the other side it vanishes."""
    if setting.ramified:
        raise PadicError("fl-check runs in the unramified settings")
    ctx = setting.context(p, prec)
    rng = random.Random(seed)
    f = integral_matrices(ctx) if setting.name == "unram-selfdual" \
        else lower_congruence_subset(ctx)
    sign = 1 if setting.name == "unram-selfdual" else -1  # (-1)^{n-1} twist
    ku = setting_unitary_function(ctx, setting, "K")
    records = []
    strata = [(b, nu) for b in range(window[0], window[1] + 1)
              for nu in range(0, window[1] + 1)]
    i = 0
    while len(records) < count:
        beta, nu = strata[i % len(strata)]
        i += 1
        shift = 1 if (i % 7 == 0) else 0
        gamma = sample_symmetric(ctx, rng, beta, nu, a_shift=shift)
        side = matching_side(gamma)
        omega = transfer_factor_symmetric(gamma)
        lhs = omega * orbital_value(gamma, f) * GaussRational.of(sign)
        if side == setting.matrix_side:
            g = build_matching_matrix_group(gamma, setting)
            rhs = GaussRational.of(unitary_orbital(g, ku))
            rec = CheckRecord("fl-transfer", _gamma_params(gamma),
                              _lv(lhs), _lv(rhs), lhs == rhs)
        else:
            rec = CheckRecord("fl-vanishing", _gamma_params(gamma),
                              _lv(lhs), _lv(0), lhs.is_zero())
        records.append(rec)
    return records


def fl_lie_check(setting: Setting, p: int, count: int, seed: int,
                 prec: int = 64) -> List[CheckRecord]:
    """Lie-algebra version of the same transfer identities."""
    ctx = setting.context(p, prec)
    rng = random.Random(seed)
    f = integral_matrices(ctx) if setting.name == "unram-selfdual" \
        else lower_congruence_subset(ctx)
    sign = 1 if setting.name == "unram-selfdual" else -1
    ku = setting_unitary_function(ctx, setting, "k")
    records = []
    i = 0
    while len(records) < count:
        vb, vc = (i % 5) - 2, ((i * 3) % 5) - 2
        i += 1
        y = sample_lie(ctx, rng, vb, vc)
        side = matching_side_lie(y)
        omega = transfer_factor_lie(y)
        lhs = omega * orbital_value(y, f) * GaussRational.of(sign)
        if side == setting.matrix_side:
            x = build_matching_matrix_lie(y, setting)
            rhs = GaussRational.of(unitary_orbital(x, ku))
            rec = CheckRecord("fl-lie-transfer", {"v_b": str(vb), "v_c": str(vc)},
                              _lv(lhs), _lv(rhs), lhs == rhs)
        else:
            rec = CheckRecord("fl-lie-vanishing", {"v_b": str(vb), "v_c": str(vc)},
                              _lv(lhs), _lv(0), lhs.is_zero())
        records.append(rec)
    return records


# Irregular orbital integrals ----------------------------------------------------


def irregular_orbital_check(setting: Setting, p: int, count: int, seed: int,
                            prec: int = 64) -> List[CheckRecord]:
    """Group case: the distinguished compact set absorbs every irregular
    diagonal, so the integral is 1.  Lie case: 1 exactly on integral
    diagonals, 0 otherwise."""
    if not setting.ramified:
        raise PadicError("irregular-orbital lemmas are ramified statements")
    ctx = setting.context(p, prec)
    rng = random.Random(seed)
    gram = setting.gram(ctx)
    if setting.lattice == "pi_modular":
        fg_names = ["KflatK+", "KflatK-"]
        fl_names = ["k+", "k-"]
    else:
        fg_names = ["K"]
        fl_names = ["k"]
    records = []
    for i in range(count):
        a = norm_one_element(ctx, rng)
        d = norm_one_element(ctx, rng)
        g = UnitaryMatrixElem(MatF(ctx, [[a, ctx.ext(0)], [ctx.ext(0), d]]),
                              gram, check=False)
        for name in fg_names:
            fu = setting_unitary_function(ctx, setting, name)
            val = unitary_orbital(g, fu)
            records.append(CheckRecord(
                f"irregular-group-{name}", {"i": str(i)},
                _lv(GaussRational.of(val)), _lv(1), val == 1))
        va = 1 if i % 3 else -1
        vd = 1 if i % 2 else -1
        x = LieUnitaryMatrixElem(
            MatF(ctx, [[trace_zero_element(ctx, rng, va), ctx.ext(0)],
                       [ctx.ext(0), trace_zero_element(ctx, rng, vd)]]),
            gram, check=False)
        expected = 1 if (va > 0 and vd > 0) else 0
        for name in fl_names:
            fu = setting_unitary_function(ctx, setting, name)
            val = unitary_orbital(x, fu)
            records.append(CheckRecord(
                f"irregular-lie-{name}", {"i": str(i), "va": str(va),
                                          "vd": str(vd)},
                _lv(GaussRational.of(val)), _lv(expected), val == expected))
    return records


# Intersection numbers -----------------------------------------------------------


def intersection_check(setting: Setting, p: int, count: int, seed: int,
                       prec: int = 64) -> List[CheckRecord]:
    if not setting.ramified:
        raise PadicError("intersection formulas are ramified statements")
    ctx = setting.context(p, prec)
    rng = random.Random(seed)
    quat_side = 1 - setting.matrix_side
    records = []
    i = 0
    while len(records) < count:
        beta, nu = i % 4, (i // 4) % 3
        i += 1
        gamma = sample_symmetric(ctx, rng, beta, nu)
        if matching_side(gamma) != quat_side:
            continue
        g = build_matching_quat_group(gamma, setting)
        lam = norm_one_element(ctx, rng)
        g = g.conj_by_torus(lam)  # orbit invariance exercised on the fly
        cf = intersection_number(g, setting)
        orc = intersection_number_oracle(g, setting)
        records.append(CheckRecord("int-group", _gamma_params(gamma),
                                   _lv(cf), _lv(orc), cf == orc))
        vb = 2 * (i % 3) + 1
        vc = 2 * ((i // 3) % 2) + 1
        y = sample_lie(ctx, rng, vb, vc,
                       eta_sign=(1 if quat_side == 0 else -1),
                       va=(1 if i % 5 else -1))
        if matching_side_lie(y) != quat_side:
            continue
        x = build_matching_quat_lie(y, setting)
        x = x.conj_by_torus(norm_one_element(ctx, rng))
        cf = intersection_number(x, setting)
        orc = intersection_number_oracle(x, setting)
        records.append(CheckRecord("int-lie", {"v_b": str(vb), "v_c": str(vc)},
                                   _lv(cf), _lv(orc), cf == orc))
    return records


# Germ expansion -----------------------------------------------------------------


def germ_centers(ctx: PadicContext) -> List[Tuple]:
    one = ctx.ext(1)
    w = norm_one_element(ctx, random.Random(0), nontrivial=True)
    return [(one, one), (one, -one), (w, one)]


def _ball_near_center(ctx, a0, d0, kind: str, j: int, level: int,
                      rng) -> SymmetricTestFunction:
    """A congruence ball whose conjugation saturation accumulates at
    diag(a0, d0): kind 'P' pins the upper-right entry (plus-slope data),
    kind 'M' pins the lower-left entry (minus-slope data)."""
    from .padic import norm_one_unit
    w_ctr = norm_one_unit(ctx, -(a0.conj().inverse()) * d0)
    need_odd = (w_ctr.unit_residue_in_k() != 1)
    if j % 2 != (1 if need_odd else 0):
        raise PadicError("entry valuation parity incompatible with center")
    u = angular_unit(ctx, -w_ctr if need_odd else w_ctr, rng)
    pi = ctx.uniformizer()
    entry = u
    for _ in range(j):
        entry = entry * pi
    zero = ctx.ext(0)
    if kind == "P":
        center = MatF(ctx, [[a0, entry], [zero, d0]])
    else:
        # the lower-left entry of gamma(a,b) is (1-Na)/conj(b): its
        # angular part is conj-inverse of b's, i.e. the same class
        center = MatF(ctx, [[a0, zero], [entry, d0]])
    return ball_function(center, level)


@dataclass
class GermReport:
    records: List[CheckRecord]
    fits: list


def germ_check(setting: Setting, p: int, seed: int, prec: int = 64,
               holdout_count: int = 30,
               with_int_consistency: bool = True) -> GermReport:
    """Per center: fit the germ model for four congruence balls with an
    exactly vanishing residual on held-out samples; then balance a
    combination so the plus and minus slopes cancel at s = 0 and assert
    the derivative-constancy law, and (optionally) the constancy of
    2*omega*dOrb + Int * log q against the matched intersection numbers.
    """
    if not setting.ramified:
        raise PadicError("germ pipeline runs in the ramified settings")
    ctx = setting.context(p, prec)
    rng = random.Random(seed)
    side = 1 - setting.matrix_side  # the side carrying the derivative law
    eta_i = 1 if side == 0 else -1
    records: List[CheckRecord] = []
    fits = []
    for ci, (a0, d0) in enumerate(germ_centers(ctx)):
        parity = center_beta_parity(ctx, a0, d0)
        L = 3 + parity
        jP, jM = parity, parity + 2
        balls = [("P", jP), ("P", jP + 2), ("M", jM), ("M", jM + 2)]
        fns = [_ball_near_center(ctx, a0, d0, kind, j, L, rng)
               for kind, j in balls]
        # stratified neighborhood samples, both character classes
        def neighborhood(num):
            out = []
            t = 0
            while len(out) < num:
                beta = parity + 2 * (t % 4) + 4
                nu = 4 + (t % 3)
                sgn = 1 if (t // 3) % 2 == 0 else -1
                t += 1
                try:
                    out.append(sample_near_center(ctx, rng, a0, d0, beta, nu,
                                                  eta_sign=sgn))
                except PadicError:
                    continue
            return out

        fit_samples = neighborhood(14)
        holdout = neighborhood(holdout_count)
        cfits = []
        for (kind, j), f in zip(balls, fns):
            fit = fit_germ_expansion(f, (a0, d0), fit_samples, holdout,
                                     neighborhood_level=L,
                                     label=f"center{ci}-{kind}{j}")
            cfits.append(fit)
            records.append(CheckRecord(
                "germ-residual", {"center": str(ci), "ball": f"{kind}{j}"},
                _lv(0), _lv(0), fit.residual_ok,
                certificates={"holdout": str(len(holdout))}))
        fits.extend(cfits)
        # balanced combination: phi_+(0) + eta_i phi_-(0) = 0, scaled so
        # the slopes match the irregular unitary values of the setting
        # (1 in the uniformizer-modular setting, 1/2 in the self-dual
        # ones, with the side-dependent sign on the minus slope)
        plus_fit = next((g for g in cfits if not g.phi_plus_at_zero().is_zero()),
                        None)
        minus_fit = next((g for g in cfits
                          if not g.phi_minus_at_zero().is_zero()), None)
        if plus_fit is None or minus_fit is None:
            records.append(CheckRecord(
                "germ-balance", {"center": str(ci)}, _lv(0), _lv(1), False,
                certificates={"reason": "no nonzero slope found"}))
            continue
        base = GaussRational.of(Fraction(1, 2)
                                if setting.lattice == "selfdual" else 1)
        norm_minus = GaussRational.of(-eta_i) * base
        scale_minus = norm_minus * minus_fit.phi_minus_at_zero().inverse()
        scale_plus = (GaussRational.of(-eta_i) * norm_minus
                      * plus_fit.phi_plus_at_zero().inverse())
        combo = SymmetricTestFunction(ctx, label=f"balanced-center{ci}")
        fplus = fns[cfits.index(plus_fit)]
        fminus = fns[cfits.index(minus_fit)]
        for c, t in fplus.terms:
            combo.add(scale_plus * c, t)
        for c, t in fminus.terms:
            combo.add(scale_minus * c, t)
        combo_fit = fit_germ_expansion(combo, (a0, d0), fit_samples, holdout,
                                       neighborhood_level=L,
                                       label=f"balanced-{ci}")
        pp, pm = combo_fit.phi_plus_at_zero(), combo_fit.phi_minus_at_zero()
        balanced = (pp + GaussRational.of(eta_i) * pm).is_zero()
        records.append(CheckRecord(
            "germ-balance", {"center": str(ci)},
            _lv(pp), _lv(GaussRational.of(-eta_i) * pm), balanced))
        # derivative constancy on the setting-matched side
        side_samples = [g for g in holdout
                        if matching_side(g) == side][:12]
        consts = []
        sums = []
        for gamma in side_samples:
            om = transfer_factor_symmetric(gamma)
            dv = orbital_series(gamma, combo).scale(om).derivative_at_zero()
            nu = (ctx.base(1) - gamma.a.norm()).valuation()
            corr = GaussRational.of(-2 * eta_i * nu) * pm
            consts.append(dv.scale(2) + LogValue(QI_ZERO, corr))
            if with_int_consistency:
                gq = build_matching_quat_group(gamma, setting)
                num = intersection_number(gq, setting)
                sums.append(dv.scale(2) + LogValue(QI_ZERO,
                                                   GaussRational.of(num)))
        const_ok = all(c == consts[0] for c in consts) and len(consts) >= 2
        records.append(CheckRecord(
            "germ-derivative-constancy", {"center": str(ci)},
            consts[0] if consts else _lv(0),
            consts[-1] if consts else _lv(0), const_ok,
            certificates={"samples": str(len(consts))}))
        if with_int_consistency:
            sum_ok = all(s == sums[0] for s in sums) and len(sums) >= 2
            records.append(CheckRecord(
                "germ-int-sum-constancy", {"center": str(ci)},
                sums[0] if sums else _lv(0), sums[-1] if sums else _lv(0),
                sum_ok, certificates={"samples": str(len(sums))}))
    return GermReport(records, fits)
