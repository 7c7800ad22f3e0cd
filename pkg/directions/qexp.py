"""
Développements en q des directions elliptiques h = Σ ^{𝔞⁻¹}λ(𝔞) q^{N𝔞}, des formes
^σf = Σ ^σψ(𝔞) q^{N𝔞}, et vérification de la structure de Hecke.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from math import gcd, isqrt
from typing import Callable, Dict, List, Optional, Tuple, Union

import mpmath as mp

from directions.cocycle import (Cocycle, TwistedCocycle, TwistWitness, delta_exact, delta_value,
                                g_sigma, trace_phi)
from directions.heckechar import (EtaCharacter, HeckeCharacter, nebentypus, phi_embeddings,
                                  quadratic_character)
from utils.analytic import GUARD_BITS, recognize_integer, recognize_minpoly, recognize_quadint, tolerance
from utils.cyclo import CycloElem, galois_apply
from utils.errors import ChoiceRequiredError
from utils.quadfield import FieldContext, Ideal, QuadInt, ideal_mul, is_prime, kronecker_minus_p

MAX_WORKERS = 8
MIN_HECKE_TERMS = 20

Coefficient = Union[int, CycloElem, mp.mpc]


def ideal_table(ctx: FieldContext, B: int) -> Dict[int, List[Ideal]]:
    """ Idéaux premiers à 𝔭 de norme n, pour n = 1..B (une seule énumération partagée). """
    if B < 1:
        raise ValueError(f"number of terms must be >= 1, got {B}")
    norms = range(1, B + 1)
    with ThreadPoolExecutor(max_workers=MAX_WORKERS) as executor:
        rows = list(executor.map(ctx.ideals_of_norm, norms))
    return dict(zip(norms, rows))


@dataclass(frozen=True)
class ExpansionComponent:
    """ Terme (g_σ/[L:K])·^σf de la décomposition d'une direction. """
    weight: mp.mpc
    character: HeckeCharacter
    coefficients: Tuple[mp.mpc, ...]


@dataclass(frozen=True)
class QExpansion:
    level: int
    d: int
    bound: int
    coefficients: Tuple[Coefficient, ...]
    prec: int
    eta: Optional[EtaCharacter] = None
    components: Tuple[ExpansionComponent, ...] = field(default=(), compare=False)
    provenance: Dict[str, object] = field(default_factory=dict, compare=False)
    source: Optional[TwistedCocycle] = field(default=None, repr=False, compare=False)

    @property
    def p(self) -> int:
        return isqrt(self.level)

    def coefficient(self, n: int) -> Coefficient:
        if not 1 <= n <= self.bound:
            raise ValueError(f"coefficient index {n} outside 1..{self.bound}")
        return self.coefficients[n - 1]


def _to_mpc(value) -> mp.mpc:
    if isinstance(value, CycloElem):
        return value.to_complex()
    if isinstance(value, Fraction):
        return mp.mpc(mp.mpf(value.numerator) / value.denominator)
    return mp.mpc(value)


def newform_expansion(psi: HeckeCharacter, table: Dict[int, List[Ideal]]) -> Tuple[mp.mpc, ...]:
    """ Coefficients de ^σf = Σ ^σψ(𝔞) q^{N𝔞}. """
    with mp.workprec(psi.prec + GUARD_BITS):
        out = []
        for n in sorted(table):
            total = mp.mpc(0)
            for x in table[n]:
                total += psi.value(x)
            out.append(total)
    return tuple(out)


def _exact_coefficients(lam: TwistedCocycle, table: Dict[int, List[Ideal]]) -> Tuple[Coefficient, ...]:
    p = lam.ctx.p
    out: List[Coefficient] = []
    if lam.d == 1 and lam.u == CycloElem.one(p):
        for n in sorted(table):
            total = QuadInt(0, 0, p)
            for x in table[n]:
                total = total + delta_exact(lam.cocycle, x)
            if not total.is_rational():
                raise ValueError(f"coefficient a_{n} = {total} is not rational")
            out.append(total.a)
        return tuple(out)
    for n in sorted(table):
        total = CycloElem.zero(p)
        for x in table[n]:
            total = total + lam.coefficient_exact(x)
        out.append(total)
    return tuple(out)


def _numeric_coefficients(lam: TwistedCocycle, table: Dict[int, List[Ideal]]) -> Tuple[mp.mpc, ...]:
    with mp.workprec(lam.prec + GUARD_BITS):
        out = []
        for n in sorted(table):
            total = mp.mpc(0)
            for x in table[n]:
                total += lam.coefficient(x)
            out.append(total)
    return tuple(out)


def _components(lam: TwistedCocycle, table: Dict[int, List[Ideal]],
                members: Optional[List[HeckeCharacter]]) -> Tuple[ExpansionComponent, ...]:
    members = members if members is not None else phi_embeddings(lam.ctx, lam.chi, lam.prec)
    out = []
    for member in members:
        with mp.workprec(lam.prec + GUARD_BITS):
            weight = g_sigma(lam, member) / lam.degree
        out.append(ExpansionComponent(weight=weight, character=member,
                                      coefficients=newform_expansion(member, table)))
    return tuple(out)


def _build(lam: TwistedCocycle, B: int, branch: str, table: Optional[Dict[int, List[Ideal]]],
           members: Optional[List[HeckeCharacter]]) -> QExpansion:
    table = table if table is not None else ideal_table(lam.ctx, B)
    if len(table) < B:
        raise ValueError(f"ideal table covers {len(table)} norms, {B} requested")
    table = {n: table[n] for n in range(1, B + 1)}
    coefficients = _exact_coefficients(lam, table) if lam.ctx.h == 1 else _numeric_coefficients(lam, table)
    provenance: Dict[str, object] = {
        "cocycle": lam.cocycle.choices(),
        "eta_exponent": lam.chi.t,
        "twist": lam.u,
        "branch": branch,
    }
    try:
        components = _components(lam, table, members)
    except ChoiceRequiredError as e:
        components = ()
        provenance["components"] = f"unavailable: {e}"
    eigen = lam.ctx.h == 1 and lam.d == 1
    return QExpansion(level=lam.ctx.p ** 2, d=lam.d, bound=B, coefficients=coefficients, prec=lam.prec,
                      eta=lam.chi if eigen else None, components=components,
                      provenance=provenance, source=lam)


def canonical_direction(c: Cocycle, B: int, table: Optional[Dict[int, List[Ideal]]] = None) -> QExpansion:
    """
    g = Σ_{(𝔞,𝔭)=1} δ(𝔞) q^{N𝔞}, Nebentypus trivial :
    - coefficients entiers quand h = 1 ;
    - réels (valeurs complexes) sinon.
    """
    if B < 1:
        raise ValueError(f"number of terms must be >= 1, got {B}")
    lam = TwistedCocycle(c, quadratic_character(c.p))
    return _build(lam, B, "canonical", table, None)


def direction_from_twist(c: Cocycle, w: TwistWitness, chi: EtaCharacter, B: int,
                         table: Optional[Dict[int, List[Ideal]]] = None,
                         members: Optional[List[HeckeCharacter]] = None) -> QExpansion:
    """ h = Σ ^{𝔞⁻¹}λ_w(𝔞) q^{N𝔞} pour un témoin w rendant λ modulaire. """
    if B < 1:
        raise ValueError(f"number of terms must be >= 1, got {B}")
    lam = TwistedCocycle(c, chi, w.u)
    trace = trace_phi(lam)
    if trace != CycloElem.from_rational(c.p, lam.degree):
        raise ValueError(f"twist is not modular: tr_Φ(λ_u) = {trace}, expected [L:K] = {lam.degree}")
    return _build(lam, B, w.branch, table, members)


def decompose_direction(qe: QExpansion) -> Optional[mp.mpf]:
    """ max_n |a_n - Σ_σ (g_σ/[L:K])·a_n(^σf)|, None sans composantes. """
    if not qe.components:
        return None
    with mp.workprec(qe.prec + GUARD_BITS):
        worst = mp.mpf(0)
        for n in range(1, qe.bound + 1):
            total = mp.mpc(0)
            for comp in qe.components:
                total += comp.weight * comp.coefficients[n - 1]
            a_n = _to_mpc(qe.coefficient(n))
            worst = max(worst, mp.fabs(a_n - total) / max(mp.mpf(1), mp.fabs(a_n)))
    return worst


@dataclass(frozen=True)
class HeckeReport:
    multiplicativity: mp.mpf
    recursion: mp.mpf
    p_column: bool
    inert_vanishing: bool
    decomposition: Optional[mp.mpf]
    series_checked: int
    tolerance: mp.mpf

    @property
    def max_residual(self) -> mp.mpf:
        residuals = [self.multiplicativity, self.recursion]
        if self.decomposition is not None:
            residuals.append(self.decomposition)
        return max(residuals)

    @property
    def passed(self) -> bool:
        return self.p_column and self.inert_vanishing and self.max_residual < self.tolerance


def _residual(lhs, rhs) -> mp.mpf:
    if isinstance(lhs, (int, Fraction)) and isinstance(rhs, (int, Fraction)):
        return mp.mpf(abs(lhs - rhs))
    return mp.fabs(_to_mpc(lhs) - _to_mpc(rhs))


def _epsilon(chi: EtaCharacter) -> Callable[[int], Union[int, mp.mpc]]:
    def value(n: int):
        e = nebentypus(chi, n)
        return int(e.rational_value()) if e.is_rational() else e.to_complex()
    return value


def _eigen_residuals(coeffs, eps, p: int, tol) -> Tuple[mp.mpf, mp.mpf, bool, bool]:
    """
    Relations d'une forme propre normalisée :
    - a_{mn} = a_m a_n pour m, n premiers entre eux ;
    - a_{ℓ^{r+1}} = a_ℓ a_{ℓ^r} - ε(ℓ) ℓ a_{ℓ^{r-1}} pour ℓ ∤ p ;
    - a_n = 0 si p | n, et a_ℓ = 0 pour ℓ inerte.
    """
    B = len(coeffs)

    def a(n):
        return coeffs[n - 1]

    mult = _residual(a(1), 1)
    for m in range(2, B + 1):
        for n in range(m + 1, B // m + 1):
            if gcd(m, n) == 1:
                mult = max(mult, _residual(a(m * n), a(m) * a(n)))
    rec = mp.mpf(0)
    for ell in range(2, B + 1):
        if not is_prime(ell) or ell == p:
            continue
        e = eps(ell)
        power = ell
        while power * ell <= B:
            previous = a(power // ell) if power > ell else 1
            rec = max(rec, _residual(a(power * ell), a(ell) * a(power) - e * ell * previous))
            power *= ell
    p_column = all(_residual(a(n), 0) < tol for n in range(p, B + 1, p))
    inert = all(_residual(a(ell), 0) < tol for ell in range(2, B + 1)
                if ell != p and is_prime(ell) and kronecker_minus_p(p, ell) == -1)
    return mult, rec, p_column, inert


def hecke_verify(qe: QExpansion, chi: Optional[EtaCharacter] = None) -> HeckeReport:
    """
    Contrôle les relations de Hecke :
    - sur la série elle-même lorsqu'elle est une forme propre (ou si chi est donné) ;
    - sur chaque composante ^σf, avec ε_σ(n) = (n/p)·η_σ(n) ;
    - résidu de la décomposition h = Σ (g_σ/[L:K])·^σf.
    """
    if qe.bound < MIN_HECKE_TERMS:
        raise ValueError(f"Hecke verification needs at least {MIN_HECKE_TERMS} terms, got {qe.bound}")
    p = qe.p
    tol = tolerance(qe.prec)
    series = []
    own = chi if chi is not None else qe.eta
    if own is not None:
        series.append((qe.coefficients, own))
    for comp in qe.components:
        series.append((comp.coefficients, comp.character.chi))
    mult, rec = mp.mpf(0), mp.mpf(0)
    p_column, inert = True, True
    with mp.workprec(qe.prec + GUARD_BITS):
        for coeffs, character in series:
            m, r, pc, iv = _eigen_residuals(coeffs, _epsilon(character), p, tol)
            mult, rec = max(mult, m), max(rec, r)
            p_column, inert = p_column and pc, inert and iv
    return HeckeReport(multiplicativity=mult, recursion=rec, p_column=p_column, inert_vanishing=inert,
                       decomposition=decompose_direction(qe), series_checked=len(series), tolerance=tol)


def _conjugate_by_ideal(qe: QExpansion, x: Ideal) -> QExpansion:
    """
    ι(ψ(x))*h : coefficients Σ_{N𝔟=n} δ(x𝔟)·^{(x𝔟)⁻¹}u/u, comparés à Σ_σ (g_σ/[L:K])·^σψ(x)·a_n(^σf).
    """
    lam = qe.source
    if lam is None:
        raise ValueError("expansion carries no cocycle; it cannot be conjugated by an ideal")
    if not x.is_coprime_to_p():
        raise ValueError(f"ideal {x} is not coprime to 𝔭")
    p = lam.ctx.p
    table = ideal_table(lam.ctx, qe.bound)
    with mp.workprec(qe.prec + GUARD_BITS):
        base = lam.u_conjugate(1)
        coefficients = []
        for n in range(1, qe.bound + 1):
            total = mp.mpc(0)
            for y in table[n]:
                xy = ideal_mul(x, y)
                total += delta_value(lam.cocycle, xy) * lam.u_conjugate(pow(xy.norm % p, -1, p)) / base
            coefficients.append(total)
        components = tuple(replace(comp, weight=comp.weight * comp.character.value(x)) for comp in qe.components)
        residual = None
        if components:
            residual = mp.mpf(0)
            for n, a_n in enumerate(coefficients, start=1):
                expected = mp.mpc(0)
                for comp in components:
                    expected += comp.weight * comp.coefficients[n - 1]
                residual = max(residual, mp.fabs(a_n - expected) / max(mp.mpf(1), mp.fabs(a_n)))
    provenance = dict(qe.provenance, scalar=f"ψ({x})", twist_identity_residual=residual)
    return replace(qe, coefficients=tuple(coefficients), eta=None, components=components,
                   provenance=provenance, source=None)


def _galois_index(chi: EtaCharacter, member: EtaCharacter) -> int:
    """ j premier à p-1 avec t·j ≡ t' (mod p-1). """
    m = chi.p - 1
    for j in range(1, m):
        if gcd(j, m) == 1 and (chi.t * j - member.t) % m == 0:
            return j
    raise ValueError(f"η_{member.t} is not a Galois conjugate of η_{chi.t}")


def _conjugate_by_scalar(qe: QExpansion, scalar: CycloElem) -> QExpansion:
    """ ι(a)*h = Σ_σ (g_σ/[L:K])·σ(a)·^σf pour a ∈ Q(ζ_{p-1}). """
    if not qe.components or qe.source is None:
        raise ValueError("expansion has no newform components; scalar conjugation is unavailable")
    chi = qe.source.chi
    if scalar.n != chi.p - 1:
        raise ValueError(f"scalar must lie in Q(ζ_{chi.p - 1}), got Q(ζ_{scalar.n})")
    with mp.workprec(qe.prec + GUARD_BITS):
        components = tuple(
            replace(comp, weight=comp.weight * galois_apply(_galois_index(chi, comp.character.chi), scalar).to_complex())
            for comp in qe.components)
        coefficients = []
        for n in range(1, qe.bound + 1):
            total = mp.mpc(0)
            for comp in components:
                total += comp.weight * comp.coefficients[n - 1]
            coefficients.append(total)
    provenance = dict(qe.provenance, scalar=str(scalar))
    return replace(qe, coefficients=tuple(coefficients), eta=None, components=components,
                   provenance=provenance, source=None)


def conjugate_directions(qe: QExpansion, scalar: Union[int, CycloElem, Ideal]) -> QExpansion:
    """
    Autres directions elliptiques ι(a)*h :
    - scalaire 1 : h inchangée ;
    - idéal x premier à 𝔭 : a = ψ(x), identité de torsion vérifiée coefficient par coefficient ;
    - élément de Q(ζ_{p-1}) : conjugaison de chaque composante ^σf.
    """
    if isinstance(scalar, Ideal):
        return _conjugate_by_ideal(qe, scalar)
    if isinstance(scalar, int):
        scalar = CycloElem.from_rational(qe.p - 1, scalar)
    if scalar.is_zero():
        raise ValueError("scalar must be nonzero")
    if scalar == CycloElem.one(scalar.n):
        return qe
    return _conjugate_by_scalar(qe, scalar)


@dataclass(frozen=True)
class RecognitionReport:
    values: Tuple[str, ...]
    failures: int


def recognize_coefficients(qe: QExpansion, limit: Optional[int] = None) -> RecognitionReport:
    """
    Reconnaissance exacte des premiers coefficients :
    - exacts déjà (entiers, Q(ζ_p)) : recopiés ;
    - entier, puis élément de O_K, puis polynôme minimal de degré <= h ;
    - échec compté, jamais arrondi.
    """
    limit = min(limit or qe.bound, qe.bound)
    h = qe.source.ctx.h if qe.source is not None else 1
    values = []
    failures = 0
    for n in range(1, limit + 1):
        a_n = qe.coefficient(n)
        if isinstance(a_n, (int, CycloElem)):
            values.append(str(a_n))
            continue
        k = recognize_integer(a_n, qe.prec)
        if k is not None:
            values.append(str(k))
            continue
        alpha, _ = recognize_quadint(a_n, qe.p, qe.prec)
        if alpha is not None:
            values.append(str(alpha))
            continue
        poly = recognize_minpoly(a_n, h, qe.prec) if h > 1 else None
        if poly is not None:
            values.append("root of " + str(poly))
            continue
        failures += 1
        values.append("?")
    return RecognitionReport(values=tuple(values), failures=failures)
