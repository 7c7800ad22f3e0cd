"""
L'application δ : I(𝔭) → H, le cocycle λ(𝔞) = N(𝔞)/δ(𝔞̄), ses tordus λ_u,
les sommes g_σ, la Φ-trace, le projecteur pr et la recherche de cocycles modulaires.

Conventions :
- δ((a)) = ±a avec (±a/𝔭) = +1 ; sur x = (β/den)·rep_k, δ(x) = δ((β))/δ((den))·δ(rep_k) ;
- ^{σ_c}δ(x) = δ(rep_{c⁻¹}·x)/δ(rep_{c⁻¹}) (relation de cocycle) ;
- ^{𝔞}ζ_p = ζ_p^{N𝔞} ; ^{𝔞⁻¹}λ(𝔞) = δ(𝔞).
"""
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import mpmath as mp
import numpy as np
import sympy

from directions.delta_solver import STATUS_NAMES, DeltaRootSolver, RootSearchStats
from directions.heckechar import (ArtinGroup, EtaCharacter, HeckeCharacter, phi_embeddings,
                                  psi_principal, psi_to_cyclo, ramanujan_weight)
from utils.analytic import (DEFAULT_PREC, GUARD_BITS, MAX_PREC, delta_of_ideal, embed,
                            poly_from_roots, recognize_quadint, tolerance, with_escalation)
from utils.cyclo import (CycloElem, GaloisShift, GroupAlgebraElem, X, cyclotomic_poly, euler_phi,
                         galois_apply, gaussian_periods, theta_apply)
from utils.errors import PrecisionError
from utils.quadfield import (FieldContext, Ideal, QuadInt, ideal_mul, is_principal,
                             jacobi_symbol_mod_p, legendre, normalize_generator, principal_ideal,
                             sample_ideals)


def delta_on_principal(a) -> QuadInt:
    """ δ((a)) = ε·a, ε = ±1 avec (εa/𝔭) = +1. """
    if a.residue_mod_p() == 0:
        raise ValueError(f"{a} is divisible by 𝔭 = (√-{a.p})")
    return normalize_generator(a)


def principal_sign(beta: QuadInt, den: int) -> int:
    return jacobi_symbol_mod_p(beta) * legendre(den, beta.p)


@dataclass(frozen=True, eq=False)
class Cocycle:
    """
    δ sur les représentants de classes (valeurs complexes au plongement √-p = i√p)
    et règle de signe sur les idéaux principaux.
    """
    ctx: FieldContext
    class_values: Tuple[mp.mpc, ...]
    root_indices: Tuple[int, ...]
    prec: int
    principal_rule: str = "δ((a)) = ±a with (δ/𝔭) = +1"
    stats: Optional[RootSearchStats] = field(default=None, repr=False)

    @property
    def p(self) -> int:
        return self.ctx.p

    def choices(self) -> Dict[str, object]:
        return {
            "root_indices": list(self.root_indices),
            "class_reps": [str(rep) for rep in self.ctx.class_reps],
            "principal_rule": self.principal_rule,
        }


def _check_coprime(x: Ideal) -> None:
    if not x.is_coprime_to_p():
        raise ValueError(f"ideal {x} is not coprime to 𝔭 = (√-{x.p})")


def delta_value(c: Cocycle, x: Ideal) -> mp.mpc:
    _check_coprime(x)
    k, beta, den = c.ctx.factor(x)
    with mp.workprec(c.prec + GUARD_BITS):
        out = principal_sign(beta, den) * embed(beta) / den * c.class_values[k]
    return out


def delta_exact(c: Cocycle, x: Ideal) -> QuadInt:
    """ δ(x) ∈ O_K quand h = 1. """
    if c.ctx.h != 1:
        raise ValueError(f"δ is exact in O_K only for class number 1 (h = {c.ctx.h})")
    _check_coprime(x)
    _, beta, den = c.ctx.factor(x)
    return beta * principal_sign(beta, den)


def delta_conjugate(c: Cocycle, cls: int, x: Ideal) -> mp.mpc:
    """ ^{σ_cls}δ(x) avec σ_cls l'automorphisme de H/K associé à la classe cls. """
    rep = c.ctx.class_reps[c.ctx.inverse_class(cls)]
    with mp.workprec(c.prec + GUARD_BITS):
        out = delta_value(c, ideal_mul(rep, x)) / delta_value(c, rep)
    return out


def lambda_value(c: Cocycle, x: Ideal) -> mp.mpc:
    """ λ(x) = N(x)/δ(x̄). """
    with mp.workprec(c.prec + GUARD_BITS):
        out = x.norm / delta_value(c, x.conjugate())
    return out


def lambda_conjugate(c: Cocycle, cls: int, x: Ideal) -> mp.mpc:
    with mp.workprec(c.prec + GUARD_BITS):
        out = x.norm / delta_conjugate(c, cls, x.conjugate())
    return out


def _product_table(ctx: FieldContext) -> Dict[Tuple[int, int], Tuple[int, QuadInt, int]]:
    return {(a, b): ctx.factor(ideal_mul(ctx.class_reps[a], ctx.class_reps[b]))
            for a in range(ctx.h) for b in range(ctx.h)}


def _orbit(ctx: FieldContext, values: Sequence[mp.mpc], table, i: int) -> List[mp.mpc]:
    """ Conjugués ^{σ_c}δ(rep_i), c parcourant Cl(K). """
    out = []
    for cls in range(ctx.h):
        inv = ctx.inverse_class(cls)
        k, beta, den = table[(inv, i)]
        out.append(principal_sign(beta, den) * embed(beta) / den * values[k] / values[inv])
    return out


def _orbit_defect(ctx: FieldContext, values: Sequence[mp.mpc], table, prec: int) -> mp.mpf:
    """ Plus grande distance des coefficients des polynômes d'orbite à O_K. """
    worst = mp.mpf(0)
    for i in range(ctx.h):
        for coeff in poly_from_roots(_orbit(ctx, values, table, i)):
            _, dist = recognize_quadint(coeff, ctx.p, prec)
            worst = max(worst, dist / max(mp.mpf(1), mp.fabs(coeff)))
    return worst


def _twelfth_roots(ctx: FieldContext, prec: int) -> List[List[mp.mpc]]:
    base = delta_of_ideal(ctx.unit_ideal(), prec)
    roots = []
    for rep in ctx.class_reps:
        z = base / delta_of_ideal(rep, prec)
        principal = z ** (mp.mpf(1) / 12)
        roots.append([principal * mp.expjpi(mp.mpf(r) / 6) for r in range(12)])
    return roots


def _resolve(ctx: FieldContext, prec: int) -> Cocycle:
    with mp.workprec(prec + GUARD_BITS):
        roots = _twelfth_roots(ctx, prec)
        tol = tolerance(prec)
        stats = DeltaRootSolver(ctx, roots, tol).solve()
        if not stats.solved:
            raise PrecisionError(f"root search ended with status {STATUS_NAMES.get(stats.status, 'UNKNOWN')}")
        table = _product_table(ctx)
        survivors = []
        for assignment in stats.assignments:
            values = [roots[i][r] for i, r in enumerate(assignment)]
            if _orbit_defect(ctx, values, table, prec) < tol:
                survivors.append((assignment, values))
    if len(survivors) != 1:
        raise PrecisionError(f"{len(survivors)} consistent root assignments at {prec} bits (expected exactly one)")
    assignment, values = survivors[0]
    return Cocycle(ctx=ctx, class_values=tuple(values), root_indices=tuple(assignment), prec=prec, stats=stats)


def compute_delta(ctx: FieldContext, prec: int = DEFAULT_PREC, max_prec: int = MAX_PREC) -> Cocycle:
    """
    Détermine δ sur les représentants :
    - racines 12-ièmes de Δ(O)/Δ(rep_i), choix énumérés par CP-SAT sous les contraintes
      δ(O_K) = 1 et δ(rep̄) = conj δ(rep) ;
    - filtre : chaque polynôme d'orbite ∏_c (X - ^{σ_c}δ(rep_i)) doit être à coefficients dans O_K ;
    - une seule affectation doit survivre, sinon la précision est doublée.
    """
    if ctx.h == 1:
        return Cocycle(ctx=ctx, class_values=(mp.mpc(1),), root_indices=(0,), prec=prec)
    return with_escalation(lambda current: _resolve(ctx, current), prec, max_prec)


@dataclass(frozen=True)
class DeltaCertificate:
    twelfth_power: mp.mpf
    norm_symbols: Tuple[int, ...]
    absolute_norm: mp.mpf
    cocycle_relation: mp.mpf
    conjugation: mp.mpf
    orbit_integrality: mp.mpf
    assignments_found: int
    tolerance: mp.mpf

    @property
    def passed(self) -> bool:
        residuals = (self.twelfth_power, self.absolute_norm, self.cocycle_relation,
                     self.conjugation, self.orbit_integrality)
        return all(r < self.tolerance for r in residuals) and all(s == 1 for s in self.norm_symbols)

    @property
    def max_residual(self) -> mp.mpf:
        return max(self.twelfth_power, self.absolute_norm, self.cocycle_relation,
                   self.conjugation, self.orbit_integrality)


def _rel(a, b) -> mp.mpf:
    return mp.fabs(a - b) / max(mp.mpf(1), mp.fabs(b))


def delta_certificate(c: Cocycle, rng: Optional[np.random.Generator] = None, samples: int = 20) -> DeltaCertificate:
    """
    Résidus des conditions vérifiées par δ :
    - δ(𝔞)^12 = Δ(O)/Δ(𝔞) sur les représentants ;
    - (N_{H/K} δ(rep)/𝔭) = +1 ;
    - ∏_c |^{σ_c}δ(𝔞)|² = N(𝔞)^h ;
    - δ(𝔞𝔟) = δ(𝔞)·^{𝔞⁻¹}δ(𝔟) sur des couples tirés au hasard ;
    - δ(𝔞̄) = conj δ(𝔞) ;
    - intégralité des polynômes d'orbite.
    """
    ctx = c.ctx
    rng = rng if rng is not None else np.random.default_rng(0)
    with mp.workprec(c.prec + GUARD_BITS):
        base = delta_of_ideal(ctx.unit_ideal(), c.prec)
        twelfth = mp.mpf(0)
        for rep, value in zip(ctx.class_reps, c.class_values):
            twelfth = max(twelfth, _rel(value ** 12, base / delta_of_ideal(rep, c.prec)))
        table = _product_table(ctx)
        symbols = []
        absolute = mp.mpf(0)
        for i, rep in enumerate(ctx.class_reps):
            orbit = _orbit(ctx, c.class_values, table, i)
            norm = mp.mpc(1)
            size = mp.mpf(1)
            for v in orbit:
                norm *= v
                size *= mp.fabs(v) ** 2
            alpha, _ = recognize_quadint(norm, ctx.p, c.prec)
            symbols.append(jacobi_symbol_mod_p(alpha) if alpha is not None and alpha.residue_mod_p() else 0)
            absolute = max(absolute, _rel(size, mp.mpf(rep.norm) ** ctx.h))
        xs = sample_ideals(ctx, rng, samples)
        ys = sample_ideals(ctx, rng, samples)
        relation = mp.mpf(0)
        conjugation = mp.mpf(0)
        for x, y in zip(xs, ys):
            lhs = delta_value(c, ideal_mul(x, y))
            rhs = delta_value(c, x) * delta_conjugate(c, ctx.inverse_class(ctx.class_of(x)), y)
            relation = max(relation, _rel(lhs, rhs))
            conjugation = max(conjugation, _rel(delta_value(c, x.conjugate()), mp.conj(delta_value(c, x))))
        integrality = _orbit_defect(ctx, c.class_values, table, c.prec)
    found = len(c.stats.assignments) if c.stats is not None else 1
    return DeltaCertificate(twelfth_power=twelfth, norm_symbols=tuple(symbols), absolute_norm=absolute,
                            cocycle_relation=relation, conjugation=conjugation,
                            orbit_integrality=integrality, assignments_found=found,
                            tolerance=tolerance(c.prec))


@dataclass(frozen=True)
class TwistWitness:
    """ Élément u ∈ L ∩ Q(ζ_p) et la Φ-trace de λ_u. """
    u: CycloElem
    trace_value: CycloElem
    branch: str

    def to_dict(self) -> Dict[str, object]:
        return {"u": self.u, "trace": self.trace_value, "branch": self.branch}


class TwistedCocycle:
    """
    λ_u(𝔞) = λ(𝔞)·u/^𝔞u pour u ∈ Q(ζ_p) fixé par ζ_p ↦ ζ_p^{g^{2d}} (donc u ∈ L).
    """

    def __init__(self, cocycle: Cocycle, chi: EtaCharacter, u: Optional[CycloElem] = None):
        self.cocycle = cocycle
        self.ctx = cocycle.ctx
        self.chi = chi
        self.d = chi.nebentypus_order
        self.artin = ArtinGroup(self.ctx, self.d)
        p = self.ctx.p
        self.u = u if u is not None else CycloElem.one(p)
        if self.u.n != p:
            raise ValueError(f"twist element must lie in Q(ζ_{p}), got Q(ζ_{self.u.n})")
        if self.u.is_zero():
            raise ValueError("twist element must be nonzero")
        if galois_apply(pow(self.artin.g, 2 * self.d, p), self.u) != self.u:
            raise ValueError(f"twist element is not fixed by ζ ↦ ζ^{pow(self.artin.g, 2 * self.d, p)}: it is not in L")

    @property
    def degree(self) -> int:
        """ [L : K] = h·d. """
        return self.ctx.h * self.d

    @property
    def prec(self) -> int:
        return self.cocycle.prec

    def twisted(self, v: CycloElem) -> "TwistedCocycle":
        return TwistedCocycle(self.cocycle, self.chi, self.u * v)

    def u_conjugate(self, exponent: int) -> mp.mpc:
        return galois_apply(exponent, self.u).to_complex()

    def value(self, x: Ideal) -> mp.mpc:
        """ λ_u(x) au plongement fixé. """
        with mp.workprec(self.prec + GUARD_BITS):
            out = lambda_value(self.cocycle, x) * self.u_conjugate(1) / self.u_conjugate(x.norm % self.ctx.p)
        return out

    def conjugate_value(self, sigma: Tuple[int, int], x: Ideal) -> mp.mpc:
        """ σ(λ_u(x)) pour σ = (classe, indice cyclique) ∈ Gal(L/K). """
        p = self.ctx.p
        s = self.artin.zeta_exponent(sigma)
        with mp.workprec(self.prec + GUARD_BITS):
            out = (lambda_conjugate(self.cocycle, sigma[0], x) * self.u_conjugate(s)
                   / self.u_conjugate((s * x.norm) % p))
        return out

    def coefficient(self, x: Ideal) -> mp.mpc:
        """ ^{x⁻¹}λ_u(x) = δ(x)·^{x⁻¹}u/u. """
        with mp.workprec(self.prec + GUARD_BITS):
            out = (delta_value(self.cocycle, x) * self.u_conjugate(self.artin.inverse_zeta_exponent(x))
                   / self.u_conjugate(1))
        return out

    def coefficient_exact(self, x: Ideal) -> CycloElem:
        """ Même coefficient dans Q(ζ_p), pour h = 1. """
        delta = CycloElem.from_quadint(delta_exact(self.cocycle, x))
        if self.u == CycloElem.one(self.ctx.p):
            return delta
        return delta * galois_apply(self.artin.inverse_zeta_exponent(x), self.u) / self.u

    def __repr__(self):
        return f"TwistedCocycle(p={self.ctx.p}, d={self.d}, u={self.u})"


def conjugate_witness(w: TwistWitness, j: int) -> TwistWitness:
    """ Conjugué ζ_p ↦ ζ_p^j du témoin (la Φ-trace suit par équivariance). """
    return TwistWitness(u=galois_apply(j, w.u), trace_value=galois_apply(j, w.trace_value), branch="conjugate")


def g_sigma(lam: TwistedCocycle, sigma: HeckeCharacter) -> mp.mpc:
    """ g_σ(λ) = Σ_{𝔞 ∈ Gal(L/K)} ^{𝔞⁻¹}λ(𝔞)/^σψ(𝔞). """
    with mp.workprec(lam.prec + GUARD_BITS):
        total = mp.mpc(0)
        for elem in lam.artin.elements():
            x = lam.artin.rep_ideal(elem)
            total += lam.coefficient(x) / sigma.value(x)
    return total


def g_sigma_exact(lam: TwistedCocycle, member: EtaCharacter) -> CycloElem:
    """ g_σ dans Q(ζ_{p(p-1)}) pour h = 1 (σ agit par η ↦ member). """
    if lam.ctx.h != 1:
        raise ValueError("exact g_σ is only available for class number 1")
    p = lam.ctx.p
    n = p * (p - 1)
    total = CycloElem.zero(n)
    for elem in lam.artin.elements():
        x = lam.artin.rep_ideal(elem)
        generator = x.principal_generator if x.principal_generator is not None else is_principal(x)
        psi = psi_to_cyclo(psi_principal(member, generator))
        total = total + lam.coefficient_exact(x).lift(n) / psi
    return total


def projector_weights(chi: EtaCharacter, h: int) -> List[int]:
    """ w_j = h·(-1)^j·Σ_{η'} ζ_{p-1}^{-t'j}, j = 0..d-1 : seuls les (g^j) survivent à la Φ-somme. """
    d = chi.nebentypus_order
    return [h * (-1) ** j * ramanujan_weight(chi, j) for j in range(d)]


def _pr(chi: EtaCharacter, h: int, u: CycloElem) -> CycloElem:
    p = chi.p
    out = CycloElem.zero(p)
    for j, w in enumerate(projector_weights(chi, h)):
        if w:
            out = out + galois_apply(pow(chi.g, -2 * j, p), u) * w
    return out


def projector_apply(lam: TwistedCocycle, u: CycloElem) -> CycloElem:
    """
    pr(u) = Σ_𝔞 (Σ_σ 1/^σψ(𝔞))·^{𝔞⁻¹}λ(𝔞)·^{𝔞⁻¹}u, exact, sans choix de prolongement de ψ.
    Pour λ = λ_v : pr_λ(u) = pr(uv)/v.
    """
    if u.is_zero():
        return CycloElem.zero(lam.ctx.p)
    return _pr(lam.chi, lam.ctx.h, u * lam.u) / lam.u


def trace_phi(lam: TwistedCocycle) -> CycloElem:
    """ tr_Φ(λ) = Σ_σ g_σ(λ) = pr_λ(1). """
    return projector_apply(lam, CycloElem.one(lam.ctx.p))


def trace_phi_numeric(lam: TwistedCocycle, members: Optional[List[HeckeCharacter]] = None) -> mp.mpc:
    members = members if members is not None else phi_embeddings(lam.ctx, lam.chi, lam.prec)
    with mp.workprec(lam.prec + GUARD_BITS):
        total = mp.mpc(0)
        for sigma in members:
            total += g_sigma(lam, sigma)
    return total


def projector_matrix(chi: EtaCharacter, h: int) -> sympy.Matrix:
    """ Matrice de pr sur la base des périodes de Gauss P_0..P_{d-1} (circulante). """
    d = chi.nebentypus_order
    weights = projector_weights(chi, h)
    m = sympy.zeros(d, d)
    for i in range(d):
        for j, w in enumerate(weights):
            m[(i - j) % d, i] += w
    return m


def projector_matrix_numeric(artin: ArtinGroup, chi: EtaCharacter) -> np.ndarray:
    """ Matrice de pr sur la représentation régulière C^{Gal(L/K)}. """
    elements = artin.elements()
    index = {e: k for k, e in enumerate(elements)}
    m = np.zeros((len(elements), len(elements)))
    for j, w in enumerate(projector_weights(chi, artin.ctx.h)):
        shift = (0, (-j) % artin.d)
        for e in elements:
            m[index[artin.compose(shift, e)], index[e]] += w
    return m


@dataclass(frozen=True)
class ProjectorSpectrum:
    rank: int
    eigen_multiplicities: Dict[int, int]
    idempotence_residual: float
    expected_rank: int

    @property
    def passed(self) -> bool:
        return self.rank == self.expected_rank and self.idempotence_residual == 0.0


def projector_spectrum(artin: ArtinGroup, chi: EtaCharacter) -> ProjectorSpectrum:
    """ Rang (SVD), valeurs propres arrondies et résidu de pr² = [L:K]·pr. """
    m = projector_matrix_numeric(artin, chi)
    degree = artin.order
    rank = int(np.linalg.matrix_rank(m))
    eigen: Dict[int, int] = {}
    for value in np.linalg.eigvals(m):
        key = int(round(value.real))
        eigen[key] = eigen.get(key, 0) + 1
    residual = float(np.abs(m @ m - degree * m).max())
    return ProjectorSpectrum(rank=rank, eigen_multiplicities=dict(sorted(eigen.items())),
                             idempotence_residual=residual, expected_rank=artin.ctx.h * euler_phi(artin.d))


def _closed_form_generator(chi: EtaCharacter) -> CycloElem:
    """ Θ((X^k - 1)/Φ_k)(ζ_p), k = (p-1)/2, τ = Artin de (g) : ζ_p ↦ ζ_p^{g²}. """
    p = chi.p
    k = (p - 1) // 2
    quotient, _ = sympy.Poly(X ** k - 1, X).div(cyclotomic_poly(k))
    poly = GroupAlgebraElem.from_sympy(quotient, k)
    tau = GaloisShift(p, pow(chi.g, 2, p))
    return theta_apply(poly, tau, CycloElem.zeta(p))


def _eigenspace_generator(chi: EtaCharacter, h: int) -> CycloElem:
    d = chi.nebentypus_order
    m = projector_matrix(chi, h)
    kernel = (m - h * d * sympy.eye(d)).nullspace()
    if not kernel:
        raise PrecisionError("the modular eigenspace of pr is empty")
    vector = kernel[0]
    periods = gaussian_periods(chi.p, chi.g, d)
    out = CycloElem.zero(chi.p)
    for i, period in enumerate(periods):
        coeff = sympy.Rational(vector[i])
        if coeff:
            out = out + period * Fraction(int(coeff.p), int(coeff.q))
    return out


def make_modular(lam: TwistedCocycle) -> TwistWitness:
    """
    Cherche u avec tr_Φ(λ_u) = [L:K] :
    - λ déjà modulaire : u = 1 ;
    - ord η = p - 1 : forme close Θ((X^k - 1)/Φ_k)(ζ_p) ;
    - tr_Φ(λ) ≠ 0 : u = tr_Φ(λ) ;
    - sinon un vecteur de l'espace propre ℳ de pr sur la base des périodes de Gauss.
    """
    p, h = lam.ctx.p, lam.ctx.h
    degree = lam.degree
    trace = trace_phi(lam)
    if trace == CycloElem.from_rational(p, degree):
        u, branch = CycloElem.one(p), "identity"
    elif lam.chi.order == p - 1:
        u, branch = _closed_form_generator(lam.chi) / lam.u, "closed_form"
    elif not trace.is_zero():
        u, branch = trace, "trace"
    else:
        u, branch = _eigenspace_generator(lam.chi, h) / lam.u, "eigenspace"
    new_trace = trace_phi(lam.twisted(u))
    if new_trace != CycloElem.from_rational(p, degree):
        raise PrecisionError(f"twist from branch '{branch}' has tr_Φ = {new_trace}, expected {degree}")
    return TwistWitness(u=u, trace_value=new_trace, branch=branch)


@dataclass(frozen=True)
class CoboundaryWitness:
    """ Valeurs σ(u) pour σ ∈ Gal(L/K) (ordre de ArtinGroup.elements()) et résidu. """
    values: Tuple[mp.mpc, ...]
    residual: mp.mpf


def _field_basis(lam: TwistedCocycle) -> List[List[mp.mpc]]:
    """ Vecteurs de plongements de θ^k·P_i, θ = δ(rep du générateur) : famille génératrice de L/K. """
    artin, ctx = lam.artin, lam.ctx
    elements = artin.elements()
    periods = gaussian_periods(ctx.p, artin.g, artin.d)
    period_vectors = [[galois_apply(artin.zeta_exponent(s), period).to_complex() for s in elements]
                      for period in periods]
    gen = ctx.generator_class() or 0
    theta = [delta_conjugate(lam.cocycle, s[0], ctx.class_reps[gen]) for s in elements]
    basis = []
    for k in range(ctx.h):
        for vec in period_vectors:
            basis.append([theta[n] ** k * vec[n] for n in range(len(elements))])
    return basis


def is_cohomologous(lam1: TwistedCocycle, lam2: TwistedCocycle,
                    rng: Optional[np.random.Generator] = None, attempts: int = 4) -> Optional[CoboundaryWitness]:
    """
    Cherche u avec λ1(𝔞)/λ2(𝔞) = ^𝔞u/u (Hilbert 90) :
    - r_τ = λ1/λ2 sur les représentants de Gal(L/K), en tous les plongements ;
    - b = Σ_τ r_τ·^τw pour w ∈ L aléatoire, u = 1/b ;
    - vérification de r_𝔞[σ] = u[σ∘𝔞]/u[σ] ; None si le rapport n'est pas un cobord.
    """
    if lam1.ctx is not lam2.ctx or lam1.d != lam2.d:
        raise ValueError("cocycles must share the field context and the Nebentypus order")
    rng = rng if rng is not None else np.random.default_rng(0)
    artin = lam1.artin
    prec = min(lam1.prec, lam2.prec)
    tol = tolerance(prec)
    elements = artin.elements()
    index = {e: k for k, e in enumerate(elements)}
    size = len(elements)
    with mp.workprec(prec + GUARD_BITS):
        ratio = []
        for tau in elements:
            x = artin.rep_ideal(tau)
            ratio.append([lam1.conjugate_value(s, x) / lam2.conjugate_value(s, x) for s in elements])
        basis = _field_basis(lam1)
        for _ in range(attempts):
            coeffs = [int(c) for c in rng.integers(-9, 10, size=len(basis))]
            w = [sum(c * vec[n] for c, vec in zip(coeffs, basis)) for n in range(size)]
            b = []
            for s in elements:
                acc = mp.mpc(0)
                for t_idx, tau in enumerate(elements):
                    acc += ratio[t_idx][index[s]] * w[index[artin.compose(s, tau)]]
                b.append(acc)
            if min(mp.fabs(v) for v in b) < tol:
                continue
            u = [1 / v for v in b]
            residual = mp.mpf(0)
            for t_idx, tau in enumerate(elements):
                for s in elements:
                    expected = u[index[artin.compose(s, tau)]] / u[index[s]]
                    residual = max(residual, _rel(ratio[t_idx][index[s]], expected))
            if residual < tol:
                return CoboundaryWitness(values=tuple(u), residual=residual)
            return None
    return None


@dataclass(frozen=True)
class TwistIdentity:
    gauss_sum_residual: mp.mpf
    trace_equivariant: bool


def twist_identity_residuals(lam: TwistedCocycle, a: QuadInt,
                             members: Optional[List[HeckeCharacter]] = None) -> TwistIdentity:
    """
    Pour 𝔞 = (a) et γ = ^{𝔞⁻¹}λ(𝔞) :
    - g_σ(λ_γ)·γ = g_σ(λ)·^σψ(𝔞) pour tout σ ∈ Φ ;
    - tr_Φ(λ_γ) = ^{𝔞⁻¹}tr_Φ(λ), exactement.
    """
    p = lam.ctx.p
    x = principal_ideal(a)
    _check_coprime(x)
    inv = lam.artin.inverse_zeta_exponent(x)
    gamma = CycloElem.from_quadint(delta_on_principal(a)) * galois_apply(inv, lam.u) / lam.u
    twisted = lam.twisted(gamma)
    members = members if members is not None else phi_embeddings(lam.ctx, lam.chi, lam.prec)
    with mp.workprec(lam.prec + GUARD_BITS):
        gamma_c = gamma.to_complex()
        worst = mp.mpf(0)
        for sigma in members:
            lhs = g_sigma(twisted, sigma) * gamma_c
            rhs = g_sigma(lam, sigma) * sigma.value(x)
            worst = max(worst, _rel(lhs, rhs))
    equivariant = trace_phi(twisted) == galois_apply(inv, trace_phi(lam))
    return TwistIdentity(gauss_sum_residual=worst, trace_equivariant=equivariant)


@dataclass(frozen=True)
class CoefficientSpan:
    rank: int
    expected_rank: int
    dropped_residual: mp.mpf

    @property
    def passed(self) -> bool:
        return self.rank == self.expected_rank


def coefficient_span(lam: TwistedCocycle) -> CoefficientSpan:
    """
    Dimension sur K de l'espace engendré par les ^{𝔞⁻¹}λ(𝔞), 𝔞 parcourant Gal(L/K) :
    - ligne 𝔞 : conjugués σ(^{𝔞⁻¹}λ(𝔞)) pour σ ∈ Gal(L/K), de sorte que le rang complexe
      de la matrice est le rang sur K de la famille ;
    - rang numérique par valeurs singulières (seuil tolerance(prec)·max) ;
    - hφ(d) attendu quand λ est modulaire.
    """
    artin, p = lam.artin, lam.ctx.p
    elements = artin.elements()
    prec = lam.prec
    with mp.workprec(prec + GUARD_BITS):
        rows = []
        for a in elements:
            x = artin.rep_ideal(a)
            inv = artin.inverse_zeta_exponent(x)
            row = []
            for sigma in elements:
                s = artin.zeta_exponent(sigma)
                row.append(delta_conjugate(lam.cocycle, sigma[0], x) * lam.u_conjugate((s * inv) % p)
                           / lam.u_conjugate(s))
            rows.append(row)
        singular = sorted((mp.fabs(v) for v in mp.svd_c(mp.matrix(rows), compute_uv=False)), reverse=True)
        cutoff = tolerance(prec) * singular[0]
        rank = sum(1 for v in singular if v > cutoff)
        dropped = singular[rank] / singular[0] if rank < len(singular) else mp.mpf(0)
    return CoefficientSpan(rank=rank, expected_rank=lam.ctx.h * euler_phi(lam.d), dropped_residual=dropped)


def conjugate_branch_coefficient(lam: TwistedCocycle, x: Ideal) -> mp.mpc:
    """ N(x)/λ_u(x̄) : coefficient de la variante K ⊆ E_f. """
    with mp.workprec(lam.prec + GUARD_BITS):
        out = x.norm / lam.value(x.conjugate())
    return out
