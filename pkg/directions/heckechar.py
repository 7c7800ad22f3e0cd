"""
Caractères η de (O_K/𝔭)* avec η(-1) = -1, caractères de Hecke ψ((a)) = a·η(a) de
conducteur 𝔭 = (√-p), Nebentypus, orbites de Galois et comptage des dimensions.
"""
from dataclasses import dataclass, field
from functools import lru_cache
from math import gcd
from typing import Dict, List, Optional, Tuple, Union

import mpmath as mp
import sympy

from utils.analytic import DEFAULT_PREC, GUARD_BITS, embed
from utils.cyclo import CycloElem, euler_phi
from utils.errors import ChoiceRequiredError
from utils.quadfield import (FieldContext, Ideal, QuadInt, ideal_mul, ideal_power, is_principal,
                             legendre, make_field, primitive_root, principal_ideal)

PsiValue = Tuple[QuadInt, CycloElem]


@lru_cache(maxsize=None)
def discrete_logs(p: int, g: int) -> Dict[int, int]:
    """ Table m ↦ ind_g(m) pour m dans (Z/pZ)*. """
    logs = {}
    cur = 1
    for i in range(p - 1):
        logs[cur] = i
        cur = (cur * g) % p
    return logs


def _residue(a: Union[int, QuadInt], p: int) -> int:
    m = a.residue_mod_p() if isinstance(a, QuadInt) else a % p
    if m == 0:
        raise ValueError(f"{a} is divisible by 𝔭 = (√-{p}); η is undefined there")
    return m


@dataclass(frozen=True)
class EtaCharacter:
    """
    η(a) = ζ_{p-1}^{t·ind_g(m)} où a ≡ m (mod 𝔭), t impair.
    """
    p: int
    g: int
    t: int

    def __post_init__(self):
        if self.t % 2 == 0 or not 1 <= self.t < self.p - 1:
            raise ValueError(f"exponent t = {self.t} must be odd with 1 <= t < {self.p - 1}")

    @property
    def order(self) -> int:
        return (self.p - 1) // gcd(self.t, self.p - 1)

    @property
    def nebentypus_order(self) -> int:
        return self.order // 2

    def conjugate(self, j: int) -> "EtaCharacter":
        """ Conjugué par ζ_{p-1} ↦ ζ_{p-1}^j. """
        if gcd(j, self.p - 1) != 1:
            raise ValueError(f"gcd({j}, {self.p - 1}) != 1")
        return EtaCharacter(self.p, self.g, (self.t * j) % (self.p - 1))

    def exponent(self, a: Union[int, QuadInt]) -> int:
        """ Exposant e avec η(a) = ζ_{p-1}^e. """
        m = _residue(a, self.p)
        return (self.t * discrete_logs(self.p, self.g)[m]) % (self.p - 1)

    def kernel(self) -> frozenset:
        return frozenset(m for m in range(1, self.p) if self.exponent(m) == 0)

    def orbit(self) -> List["EtaCharacter"]:
        """ Conjugués distincts de η, triés par exposant (même noyau). """
        ts = sorted({(self.t * j) % (self.p - 1) for j in range(1, self.p - 1) if gcd(j, self.p - 1) == 1})
        return [EtaCharacter(self.p, self.g, t) for t in ts]

    def __str__(self):
        return f"η_{self.t} (mod {self.p}, g={self.g}, ord {self.order})"


def quadratic_character(p: int) -> EtaCharacter:
    """ η = (·/𝔭), d = 1. """
    return EtaCharacter(p, primitive_root(p), (p - 1) // 2)


@dataclass(frozen=True)
class CharacterOrbit:
    nebentypus_order: int
    representatives: Tuple[EtaCharacter, ...]
    dimension: int

    @property
    def eta_order(self) -> int:
        return 2 * self.nebentypus_order


def _check_order(p: int, d: int) -> None:
    if d < 1 or ((p - 1) // 2) % d:
        raise ValueError(f"d = {d} does not divide (p-1)/2 = {(p - 1) // 2}")


def enumerate_characters(p: int) -> List[CharacterOrbit]:
    """
    Une orbite par diviseur d de (p-1)/2 :
    - représentants : les t impairs avec (p-1)/gcd(t, p-1) = 2d ;
    - dimension : h·φ(d).
    """
    ctx = make_field(p)
    g = primitive_root(p)
    orbits = []
    for d in sympy.divisors((p - 1) // 2):
        d = int(d)
        reps = tuple(EtaCharacter(p, g, t) for t in range(1, p - 1, 2)
                     if (p - 1) // gcd(t, p - 1) == 2 * d)
        orbits.append(CharacterOrbit(nebentypus_order=d, representatives=reps, dimension=ctx.h * euler_phi(d)))
    return orbits


def character_for_order(p: int, d: int) -> EtaCharacter:
    """ Représentant de plus petit exposant de l'orbite d. """
    _check_order(p, d)
    for orbit in enumerate_characters(p):
        if orbit.nebentypus_order == d:
            return orbit.representatives[0]
    raise ValueError(f"no character of Nebentypus order {d} modulo {p}")


def eta_value(chi: EtaCharacter, a: Union[int, QuadInt]) -> CycloElem:
    return CycloElem.zeta(chi.p - 1, chi.exponent(a))


def eta_complex(chi: EtaCharacter, a: Union[int, QuadInt]) -> mp.mpc:
    return mp.expjpi(mp.mpf(2 * chi.exponent(a)) / (chi.p - 1))


def psi_principal(chi: EtaCharacter, a: QuadInt) -> PsiValue:
    """ ψ((a)) = a·η(a), sous forme de couple (a, η(a)). """
    return a, eta_value(chi, a)


def psi_to_cyclo(value: PsiValue) -> CycloElem:
    """ Produit a·η(a) dans Q(ζ_{p(p-1)}). """
    alpha, root = value
    n = alpha.p * (alpha.p - 1)
    return CycloElem.from_quadint(alpha).lift(n) * root.lift(n)


def psi_principal_complex(chi: EtaCharacter, a: QuadInt) -> mp.mpc:
    return embed(a) * eta_complex(chi, a)


def nebentypus(chi: EtaCharacter, n: int) -> CycloElem:
    """ ε(n) = (n/p)·η(n), nul si p | n. """
    if n % chi.p == 0:
        return CycloElem.zero(chi.p - 1)
    return eta_value(chi, n) * legendre(n, chi.p)


def ramanujan_weight(chi: EtaCharacter, j: int) -> int:
    """ Σ_{η' ∈ orbite} ζ_{p-1}^{-t'·j}, entier (somme de Ramanujan). """
    total = CycloElem.zero(chi.p - 1)
    for member in chi.orbit():
        total = total + CycloElem.zeta(chi.p - 1, -member.t * j)
    return int(total.rational_value())


def trace_psi(chi: EtaCharacter, x: Ideal) -> QuadInt:
    """
    Φ-trace de ψ sur un idéal premier à 𝔭 :
    - x = (a) : a·h·Σ_{η'} η'(a), la somme sur l'orbite étant entière ;
    - x non principal : 0.
    """
    if not x.is_coprime_to_p():
        raise ValueError(f"ideal {x} is not coprime to 𝔭")
    ctx = make_field(chi.p)
    a = is_principal(x)
    if a is None:
        return QuadInt(0, 0, chi.p)
    total = CycloElem.zero(chi.p - 1)
    for member in chi.orbit():
        total = total + eta_value(member, a)
    return a * (ctx.h * int(total.rational_value()))


def dimension_of_Af(p: int, d: int) -> int:
    _check_order(p, d)
    return make_field(p).h * euler_phi(d)


@dataclass(frozen=True)
class SplittingFieldData:
    ray_over_hilbert: int
    l_over_hilbert: int
    l_over_k: int


def splitting_field_data(p: int, d: int) -> SplittingFieldData:
    """ ([K_𝔭 : H], [L : H], [L : K]) = ((p-1)/2, d, h·d). """
    _check_order(p, d)
    h = make_field(p).h
    return SplittingFieldData(ray_over_hilbert=(p - 1) // 2, l_over_hilbert=d, l_over_k=h * d)


class ArtinGroup:
    """
    Gal(L/K) ≅ Cl(K) × Z/d :
    - un idéal x premier à 𝔭 a pour coordonnées (classe de x, ind_g(N x mod p)/2 mod d) ;
    - l'élément (c, i) est représenté par rep_c·(g^j), j = i - e_c (mod d) ;
    - son action sur ζ_p est ζ_p ↦ ζ_p^{N}, N la norme du représentant.
    """

    def __init__(self, ctx: FieldContext, d: int):
        _check_order(ctx.p, d)
        self.ctx = ctx
        self.d = d
        self.g = primitive_root(ctx.p)
        self.logs = discrete_logs(ctx.p, self.g)
        self.offsets = [self._cyclic_coordinate(rep) for rep in ctx.class_reps]
        self.representatives: Dict[Tuple[int, int], Ideal] = {}
        for c, rep in enumerate(ctx.class_reps):
            for i in range(d):
                j = (i - self.offsets[c]) % d
                scalar = principal_ideal(QuadInt(self.g ** j, 0, ctx.p))
                self.representatives[(c, i)] = ideal_mul(rep, scalar) if j else rep

    @property
    def order(self) -> int:
        return self.ctx.h * self.d

    def _cyclic_coordinate(self, x: Ideal) -> int:
        n = x.norm % self.ctx.p
        if n == 0:
            raise ValueError(f"ideal {x} is not coprime to 𝔭")
        return (self.logs[n] // 2) % self.d

    def coords(self, x: Ideal) -> Tuple[int, int]:
        return self.ctx.class_of(x), self._cyclic_coordinate(x)

    def elements(self) -> List[Tuple[int, int]]:
        return [(c, i) for c in range(self.ctx.h) for i in range(self.d)]

    def compose(self, a: Tuple[int, int], b: Tuple[int, int]) -> Tuple[int, int]:
        return self.ctx.compose(a[0], b[0]), (a[1] + b[1]) % self.d

    def inverse(self, a: Tuple[int, int]) -> Tuple[int, int]:
        return self.ctx.inverse_class(a[0]), (-a[1]) % self.d

    def rep_ideal(self, a: Tuple[int, int]) -> Ideal:
        return self.representatives[a]

    def zeta_exponent(self, a: Tuple[int, int]) -> int:
        return self.rep_ideal(a).norm % self.ctx.p

    def inverse_zeta_exponent(self, x: Ideal) -> int:
        """ Exposant de ^{x⁻¹} sur ζ_p : (N x)^{-1} mod p. """
        return pow(x.norm % self.ctx.p, -1, self.ctx.p)


class HeckeCharacter:
    """
    Prolongement de ψ((a)) = a·η(a) à tous les idéaux premiers à 𝔭, pour Cl(K) cyclique :
    - 𝔤 = représentant de la classe génératrice, 𝔤^h = (β) ;
    - ψ(𝔤) = (β·η(β))^{1/h}·e^{2iπr/h} (racine principale puis indice r) ;
    - ψ(rep_c) = ψ(𝔤)^e / ψ((β'/den)) quand 𝔤^e = (β'/den)·rep_c.
    Pour h = 1 aucun choix n'intervient.
    """

    def __init__(self, ctx: FieldContext, chi: EtaCharacter, root_index: int = 0,
                 generator_class: Optional[int] = None, prec: int = DEFAULT_PREC):
        self.ctx = ctx
        self.chi = chi
        self.root_index = root_index % ctx.h
        self.prec = prec
        self.generator_class = None
        self.generator_value = None
        with mp.workprec(prec + GUARD_BITS):
            self.rep_values = self._rep_values(generator_class)

    def _principal(self, alpha: QuadInt) -> mp.mpc:
        return psi_principal_complex(self.chi, alpha)

    def _rep_values(self, generator_class: Optional[int]) -> List[mp.mpc]:
        ctx = self.ctx
        if ctx.h == 1:
            return [mp.mpc(1)]
        gen = generator_class if generator_class is not None else ctx.generator_class()
        if gen is None or ctx.class_order(gen) != ctx.h:
            raise ChoiceRequiredError(
                f"class group of Q(√-{ctx.p}) is not cyclic (or class {gen} does not generate it); "
                "ψ cannot be extended without an explicit choice")
        self.generator_class = gen
        g_ideal = ctx.class_reps[gen]
        beta = is_principal(ideal_power(g_ideal, ctx.h))
        if beta is None:
            raise ValueError(f"{g_ideal}^{ctx.h} is not principal")
        base = self._principal(beta) ** (mp.mpf(1) / ctx.h)
        self.generator_value = base * mp.expjpi(mp.mpf(2 * self.root_index) / ctx.h)
        values: List[Optional[mp.mpc]] = [None] * ctx.h
        power = ctx.unit_ideal()
        for e in range(ctx.h):
            k, b_prime, den = ctx.factor(power)
            principal_part = self._principal(b_prime) / self._principal(QuadInt(den, 0, ctx.p))
            values[k] = self.generator_value ** e / principal_part
            power = ideal_mul(power, g_ideal)
        return values

    def value(self, x: Ideal) -> mp.mpc:
        if not x.is_coprime_to_p():
            raise ValueError(f"ideal {x} is not coprime to 𝔭")
        with mp.workprec(self.prec + GUARD_BITS):
            k, beta, den = self.ctx.factor(x)
            out = self._principal(beta) / self._principal(QuadInt(den, 0, self.ctx.p)) * self.rep_values[k]
        return out

    def choices(self) -> Dict[str, object]:
        if self.ctx.h == 1:
            return {"eta_exponent": self.chi.t}
        return {
            "eta_exponent": self.chi.t,
            "generator_class": self.generator_class,
            "generator_ideal": str(self.ctx.class_reps[self.generator_class]),
            "root_index": self.root_index,
        }

    def __repr__(self):
        return f"HeckeCharacter(p={self.ctx.p}, t={self.chi.t}, r={self.root_index})"


def phi_embeddings(ctx: FieldContext, chi: EtaCharacter, prec: int = DEFAULT_PREC,
                   generator_class: Optional[int] = None) -> List[HeckeCharacter]:
    """ Les h·φ(d) caractères ^σψ, σ ∈ Φ, indexés par (t', r). """
    return [HeckeCharacter(ctx, member, r, generator_class, prec)
            for member in chi.orbit() for r in range(ctx.h)]


def trace_psi_numeric(ctx: FieldContext, chi: EtaCharacter, x: Ideal, prec: int = DEFAULT_PREC,
                      members: Optional[List[HeckeCharacter]] = None) -> mp.mpc:
    """ Σ_{σ∈Φ} ^σψ(x) à travers les prolongements explicites. """
    members = members if members is not None else phi_embeddings(ctx, chi, prec)
    with mp.workprec(prec + GUARD_BITS):
        total = mp.mpc(0)
        for psi in members:
            total += psi.value(x)
    return total
