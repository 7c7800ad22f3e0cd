"""
Courbe de Gross A(p) : invariants (m, n, c4, c6), unité ρ et période Ω de Chowla–Selberg.
"""
from dataclasses import dataclass, field
from typing import Dict, List

import mpmath as mp

from directions.cocycle import Cocycle, delta_conjugate, delta_value
from directions.heckechar import HeckeCharacter, quadratic_character
from utils.analytic import (DEFAULT_PREC, GUARD_BITS, LatticeBasis, LatticeComparison, agm_real_period,
                            compare_lattices, delta_of_lattice, gamma_character_product,
                            hilbert_class_polynomial, j_invariant, recognize_integer, rounded, tolerance,
                            with_escalation)
from utils.errors import PrecisionError
from utils.quadfield import FieldContext, legendre, make_field


@dataclass(frozen=True)
class GrossCurveData:
    p: int
    j0: mp.mpc
    m: mp.mpf
    n: mp.mpf
    c4: mp.mpf
    c6: mp.mpf
    discriminant: mp.mpf
    hilbert_polynomial: List[int]
    recognized: Dict[str, int] = field(default_factory=dict)
    prec: int = DEFAULT_PREC

    @property
    def is_integral(self) -> bool:
        return bool(self.recognized)


def _gross_curve(ctx: FieldContext, prec: int) -> GrossCurveData:
    p = ctx.p
    with mp.workprec(prec + GUARD_BITS):
        j0 = j_invariant(ctx.unit_ideal(), prec)
        j_real = mp.re(j0)
        m = mp.cbrt(j_real) if j_real >= 0 else -mp.cbrt(-j_real)
        n = legendre(2, p) * mp.sqrt((1728 - j_real) / p)
        c4 = -m * p
        c6 = n * p * p
        disc = (c4 ** 3 - c6 ** 2) / 1728
        recognized: Dict[str, int] = {}
        if ctx.h == 1:
            for name, value in (("j0", j_real), ("m", m), ("n", n), ("c4", c4), ("c6", c6), ("discriminant", disc)):
                k = recognize_integer(value, prec, threshold=mp.mpf(10) ** (-(prec // 8)))
                if k is None:
                    raise PrecisionError(f"{name} = {value} is not recognized as an integer at {prec} bits")
                recognized[name] = k
    return GrossCurveData(p=p, j0=j0, m=m, n=n, c4=c4, c6=c6, discriminant=disc,
                          hilbert_polynomial=hilbert_class_polynomial(ctx, prec),
                          recognized=recognized, prec=prec)


def gross_curve(p: int, prec: int = DEFAULT_PREC) -> GrossCurveData:
    """
    A(p) : y² = x³ + (mp/(2⁴·3))x - np²/(2⁵·3³) :
    - m réel avec m³ = j(O_K) ;
    - n² = (j - 1728)/(-p), signe de n égal à (2/p) ;
    - c4 = -mp, c6 = np², discriminant -p³.
    Entiers reconnus (avec montée en précision) quand h = 1.
    """
    ctx = make_field(p)
    return with_escalation(lambda current: _gross_curve(ctx, current), prec)


def rho_unit(c: Cocycle) -> mp.mpf:
    """ ρ = ∏_c δ(rep_c)/√N(rep_c), réel positif. """
    with mp.workprec(c.prec + GUARD_BITS):
        prod = mp.mpc(1)
        for rep in c.ctx.class_reps:
            prod *= delta_value(c, rep) / mp.sqrt(rep.norm)
        if mp.fabs(mp.im(prod)) > tolerance(c.prec) * mp.fabs(prod):
            raise PrecisionError(f"ρ = {prod} is not real")
        rho = mp.re(prod)
    return rounded(rho, c.prec)


def rho_unit_conjugates(c: Cocycle) -> List[mp.mpc]:
    """ ^σρ pour σ ∈ Gal(H/K). """
    out = []
    with mp.workprec(c.prec + GUARD_BITS):
        for cls in range(c.ctx.h):
            prod = mp.mpc(1)
            for rep in c.ctx.class_reps:
                prod *= delta_conjugate(c, cls, rep) / mp.sqrt(rep.norm)
            out.append(prod)
    return out


def rho_norm_residual(c: Cocycle) -> mp.mpf:
    """ |∏_σ |^σρ| - 1| : ρ est une unité. """
    with mp.workprec(c.prec + GUARD_BITS):
        prod = mp.mpf(1)
        for value in rho_unit_conjugates(c):
            prod *= mp.fabs(value)
        residual = mp.fabs(prod - 1)
    return rounded(residual, c.prec)


def rho_unit_via_psi(c: Cocycle) -> mp.mpf:
    """ ∏_c δ(rep_c)/ψ(rep_c), ψ le caractère de Hecke quadratique ; égal à ρ. """
    psi = HeckeCharacter(c.ctx, quadratic_character(c.p), prec=c.prec)
    with mp.workprec(c.prec + GUARD_BITS):
        prod = mp.mpc(1)
        for rep in c.ctx.class_reps:
            prod *= delta_value(c, rep) / psi.value(rep)
        out = mp.re(prod)
    return rounded(out, c.prec)


@dataclass(frozen=True)
class PeriodData:
    omega: mp.mpc
    rho: mp.mpf
    h: int
    lattice: LatticeBasis
    is_real: bool
    delta_residual: mp.mpf


def omega_period(p: int, c: Cocycle, prec: int = DEFAULT_PREC) -> PeriodData:
    """
    Ω = i^{(p+1)/4}·(ρ·(2π)^{(2h+1-p)/4}·√p^{(1-3h)/2}·∏_{(m/p)=1} Γ(m/p))^{1/h} :
    - racine h-ième réelle positive, signe normalisé (partie réelle ou imaginaire positive) ;
    - Ω réel si p ≡ -1 (mod 8), imaginaire pur sinon ;
    - résidu relatif de Δ(Ω·O_K) = -p³.
    """
    if prec < 128:
        raise ValueError(f"period computation needs at least 128 bits, got {prec}")
    if c.p != p:
        raise ValueError(f"cocycle belongs to Q(√-{c.p}), not Q(√-{p})")
    h = c.ctx.h
    with mp.workprec(prec + GUARD_BITS):
        rho = rho_unit(c)
        inner = (rho * (2 * mp.pi) ** (mp.mpf(2 * h + 1 - p) / 4)
                 * mp.sqrt(p) ** (mp.mpf(1 - 3 * h) / 2) * gamma_character_product(p, prec))
        radius = inner ** (mp.mpf(1) / h)
        is_real = ((p + 1) // 4) % 2 == 0
        omega = mp.mpc(radius) if is_real else mp.mpc(0, radius)
        omega_k = (1 + mp.sqrt(-p)) / 2
        lattice = LatticeBasis(omega, omega * omega_k)
        delta = delta_of_lattice(lattice, prec)
        residual = mp.fabs(delta + mp.mpf(p) ** 3) / mp.mpf(p) ** 3
    return PeriodData(omega=omega, rho=rho, h=h, lattice=lattice, is_real=is_real,
                      delta_residual=rounded(residual, prec))


@dataclass(frozen=True)
class PeriodCheck:
    comparison: LatticeComparison
    agm_lattice: LatticeBasis
    omega_lattice: LatticeBasis

    @property
    def passed(self) -> bool:
        return self.comparison.equal


def period_cross_check(gc: GrossCurveData, pd: PeriodData, prec: int = DEFAULT_PREC) -> PeriodCheck:
    """ Réseau AGM de (c4, c6) comparé à Ω·O_K (égalité à une unité ±1 près). """
    if pd.h != 1:
        raise ValueError(f"AGM cross-check needs a curve over Q (h = 1), got h = {pd.h}")
    agm = agm_real_period(gc.c4, gc.c6, prec)
    return PeriodCheck(comparison=compare_lattices(agm, pd.lattice, prec), agm_lattice=agm, omega_lattice=pd.lattice)


@dataclass(frozen=True)
class TwistedInvariants:
    c4: mp.mpc
    c6: mp.mpc
    j: mp.mpc
    discriminant: mp.mpc


def twisted_curve_invariants(gc: GrossCurveData, u) -> TwistedInvariants:
    """ (u⁴c4, u⁶c6) : même j, discriminant multiplié par u¹², réseau divisé par u. """
    with mp.workprec(gc.prec + GUARD_BITS):
        u = mp.mpc(u)
        if u == 0:
            raise ValueError("scaling factor must be nonzero")
        c4 = gc.c4 * u ** 4
        c6 = gc.c6 * u ** 6
        disc = (c4 ** 3 - c6 ** 2) / 1728
        j = c4 ** 3 / disc
    return TwistedInvariants(c4=c4, c6=c6, j=j, discriminant=disc)
