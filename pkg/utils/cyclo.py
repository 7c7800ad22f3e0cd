"""
Arithmétique exacte dans les corps cyclotomiques Q(ζ_n) et opérateur Θ de
l'algèbre de groupe F[X]/(X^k - 1) agissant sur un module galoisien cyclique.

- CycloElem : base des puissances 1, ζ, ..., ζ^{φ(n)-1}, réduction modulo Φ_n ;
- GroupAlgebraElem : coefficients indexés par l'exposant, X^k s'identifiant à 1 ;
- GaloisShift / CyclicModule : deux réalisations d'une action cyclique τ.
"""
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import mpmath as mp
import numpy as np
import sympy
from sympy import Matrix, Poly, QQ, Rational, Symbol, invert

X = Symbol("X")
# chiffres conservés dans la clé de tri des spectres numériques
SPECTRUM_DIGITS = 9


def _to_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    r = Rational(value)
    return Fraction(int(r.p), int(r.q))


def _to_rational(value: Fraction) -> Rational:
    return Rational(value.numerator, value.denominator)


def euler_phi(n: int) -> int:
    return int(sympy.totient(n))


def multiplicative_order(s: int, n: int) -> int:
    if gcd(s, n) != 1:
        raise ValueError(f"{s} is not invertible modulo {n}")
    e, cur = 1, s % n
    while cur != 1 % n:
        cur = (cur * s) % n
        e += 1
    return e


def cyclotomic_poly(k: int) -> Poly:
    """ Polynôme cyclotomique Φ_k à coefficients entiers. """
    if k < 1:
        raise ValueError(f"cyclotomic index must be >= 1, got {k}")
    return Poly(sympy.cyclotomic_poly(k, X), X, domain="ZZ")


@lru_cache(maxsize=None)
def _phi_coeffs(n: int) -> Tuple[int, ...]:
    return tuple(int(c) for c in reversed(cyclotomic_poly(n).all_coeffs()))


def _reduce(poly: List[Fraction], n: int) -> Tuple[Fraction, ...]:
    phi = _phi_coeffs(n)
    m = len(phi) - 1
    poly = list(poly) + [Fraction(0)] * max(0, m - len(poly))
    for i in range(len(poly) - 1, m - 1, -1):
        c = poly[i]
        if c:
            for j in range(m + 1):
                poly[i - m + j] -= c * phi[j]
    return tuple(poly[:m])


@dataclass(frozen=True)
class CycloElem:
    n: int
    coeffs: Tuple[Fraction, ...]

    @staticmethod
    def from_rational(n: int, value) -> "CycloElem":
        return CycloElem(n, _reduce([_to_fraction(value)], n))

    @staticmethod
    def zero(n: int) -> "CycloElem":
        return CycloElem.from_rational(n, 0)

    @staticmethod
    def one(n: int) -> "CycloElem":
        return CycloElem.from_rational(n, 1)

    @staticmethod
    def zeta(n: int, e: int = 1) -> "CycloElem":
        poly = [Fraction(0)] * n
        poly[e % n] = Fraction(1)
        return CycloElem(n, _reduce(poly, n))

    @staticmethod
    def from_exponents(n: int, terms: Dict[int, object]) -> "CycloElem":
        """ Σ c_e ζ_n^e pour un dictionnaire {e: c_e}. """
        poly = [Fraction(0)] * n
        for e, c in terms.items():
            poly[e % n] += _to_fraction(c)
        return CycloElem(n, _reduce(poly, n))

    @staticmethod
    def sqrt_minus_p(p: int) -> "CycloElem":
        """ Somme de Gauss Σ (m/p) ζ_p^m = i√p pour p ≡ 3 (mod 4). """
        terms = {}
        for m in range(1, p):
            terms[m] = 1 if pow(m, (p - 1) // 2, p) == 1 else -1
        return CycloElem.from_exponents(p, terms)

    @staticmethod
    def from_quadint(alpha) -> "CycloElem":
        """ Plongement de O_K = Z[ω] dans Q(ζ_p), ω = (1 + √-p)/2. """
        p = alpha.p
        root = CycloElem.sqrt_minus_p(p)
        omega = (root + 1) * Fraction(1, 2)
        return omega * alpha.b + alpha.a

    def _coerce(self, other) -> "CycloElem":
        if isinstance(other, CycloElem):
            if other.n != self.n:
                raise ValueError(f"Q(ζ_{self.n}) and Q(ζ_{other.n}) elements cannot be combined; lift first")
            return other
        if isinstance(other, (int, Fraction)):
            return CycloElem.from_rational(self.n, other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return CycloElem(self.n, tuple(a + b for a, b in zip(self.coeffs, o.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return CycloElem(self.n, tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return CycloElem(self.n, tuple(a - b for a, b in zip(self.coeffs, o.coeffs)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return CycloElem(self.n, tuple(a * other for a in self.coeffs))
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        prod = [Fraction(0)] * (2 * len(self.coeffs))
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(o.coeffs):
                    if b:
                        prod[i + j] += a * b
        return CycloElem(self.n, _reduce(prod, self.n))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero in Q(ζ_n)")
            return self * (Fraction(1) / _to_fraction(other))
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = CycloElem.one(self.n)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.coeffs[0]

    def inverse(self) -> "CycloElem":
        if self.is_zero():
            raise ZeroDivisionError("zero has no inverse in Q(ζ_n)")
        if len(self.coeffs) == 1:
            return CycloElem(self.n, (Fraction(1) / self.coeffs[0],))
        f = Poly([_to_rational(c) for c in reversed(self.coeffs)], X, domain=QQ)
        modulus = Poly(sympy.cyclotomic_poly(self.n, X), X, domain=QQ)
        inv = invert(f, modulus)
        coeffs = [_to_fraction(c) for c in reversed(inv.all_coeffs())]
        return CycloElem(self.n, _reduce(coeffs, self.n))

    def galois_conjugates(self) -> List["CycloElem"]:
        return [galois_apply(j, self) for j in range(1, self.n + 1) if gcd(j, self.n) == 1]

    def trace(self) -> Fraction:
        total = CycloElem.zero(self.n)
        for c in self.galois_conjugates():
            total = total + c
        return total.rational_value()

    def norm(self) -> Fraction:
        total = CycloElem.one(self.n)
        for c in self.galois_conjugates():
            total = total * c
        return total.rational_value()

    def lift(self, m: int) -> "CycloElem":
        """ Image dans Q(ζ_m) pour n | m, via ζ_n = ζ_m^{m/n}. """
        if m % self.n:
            raise ValueError(f"Q(ζ_{self.n}) is not contained in Q(ζ_{m})")
        step = m // self.n
        return CycloElem.from_exponents(m, {i * step: c for i, c in enumerate(self.coeffs) if c})

    def to_complex(self) -> mp.mpc:
        """ Valeur en ζ_n = e^{2iπ/n}, à la précision courante de mpmath. """
        z = mp.expjpi(mp.mpf(2) / self.n)
        acc = mp.mpc(0)
        for c in reversed(self.coeffs):
            acc = acc * z + mp.mpf(c.numerator) / c.denominator
        return acc

    def __str__(self):
        terms = [f"{c}·ζ^{i}" for i, c in enumerate(self.coeffs) if c]
        return " + ".join(terms) if terms else "0"


def galois_apply(j: int, x: CycloElem) -> CycloElem:
    """ Automorphisme ζ_n ↦ ζ_n^j. """
    if gcd(j, x.n) != 1:
        raise ValueError(f"gcd({j}, {x.n}) != 1: ζ ↦ ζ^{j} is not an automorphism")
    return CycloElem.from_exponents(x.n, {(i * j) % x.n: c for i, c in enumerate(x.coeffs) if c})


@dataclass(frozen=True)
class GroupAlgebraElem:
    """ Élément Σ a_i X^i de F[X]/(X^k - 1), coeffs[i] étant le coefficient de X^i. """
    k: int
    coeffs: Tuple[Fraction, ...]

    @staticmethod
    def from_polynomial(coeffs: Iterable, k: int) -> "GroupAlgebraElem":
        out = [Fraction(0)] * k
        for i, c in enumerate(coeffs):
            out[i % k] += _to_fraction(c)
        return GroupAlgebraElem(k, tuple(out))

    @staticmethod
    def one(k: int) -> "GroupAlgebraElem":
        return GroupAlgebraElem.from_polynomial([1], k)

    @staticmethod
    def zero(k: int) -> "GroupAlgebraElem":
        return GroupAlgebraElem(k, tuple(Fraction(0) for _ in range(k)))

    @staticmethod
    def generator(k: int) -> "GroupAlgebraElem":
        return GroupAlgebraElem.from_polynomial([0, 1], k)

    @staticmethod
    def from_sympy(poly: Poly, k: int) -> "GroupAlgebraElem":
        return GroupAlgebraElem.from_polynomial(reversed(poly.all_coeffs()), k)

    def _check(self, other: "GroupAlgebraElem") -> None:
        if other.k != self.k:
            raise ValueError(f"F[X]/(X^{self.k}-1) and F[X]/(X^{other.k}-1) elements cannot be combined")

    def __add__(self, other):
        self._check(other)
        return GroupAlgebraElem(self.k, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other):
        self._check(other)
        return GroupAlgebraElem(self.k, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return GroupAlgebraElem(self.k, tuple(a * other for a in self.coeffs))
        self._check(other)
        out = [Fraction(0)] * self.k
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b:
                        out[(i + j) % self.k] += a * b
        return GroupAlgebraElem(self.k, tuple(out))

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def to_sympy(self) -> Poly:
        return Poly([_to_rational(c) for c in reversed(self.coeffs)], X, domain=QQ)

    def evaluate(self, z) -> mp.mpc:
        acc = mp.mpc(0)
        for c in reversed(self.coeffs):
            acc = acc * z + mp.mpf(c.numerator) / c.denominator
        return acc

    def vanishing_orders(self) -> List[int]:
        """ Diviseurs e de k tels que Φ_e divise le polynôme (zéros en ζ_k^i d'ordre e). """
        poly = self.to_sympy()
        orders = []
        for e in sympy.divisors(self.k):
            if poly.is_zero or poly.rem(Poly(sympy.cyclotomic_poly(e, X), X, domain=QQ)).is_zero:
                orders.append(int(e))
        return orders

    def circulant(self) -> Matrix:
        """ Matrice de la multiplication par l'élément dans la base 1, X, ..., X^{k-1}. """
        m = sympy.zeros(self.k, self.k)
        for j in range(self.k):
            for i, a in enumerate(self.coeffs):
                if a:
                    m[(i + j) % self.k, j] += _to_rational(a)
        return m


class GaloisShift:
    """ Action τ : ζ_n ↦ ζ_n^s sur Q(ζ_n), d'ordre exact ord_n(s). """

    def __init__(self, n: int, s: int):
        self.n = n
        self.s = s % n
        self.order = multiplicative_order(s, n)

    def power(self, i: int, u: CycloElem) -> CycloElem:
        return galois_apply(pow(self.s, i, self.n), u)

    def combine(self, coeffs: Sequence[Fraction], u: CycloElem) -> CycloElem:
        out = CycloElem.zero(u.n)
        for i, a in enumerate(coeffs):
            if a:
                out = out + self.power(i, u) * a
        return out


class CyclicModule:
    """
    Module M de dimension finie sur Q muni d'un automorphisme τ donné par sa matrice
    (action sur les vecteurs colonnes de coordonnées).
    """

    def __init__(self, tau_matrix: Matrix):
        self.tau = Matrix(tau_matrix)
        self.dim = self.tau.shape[0]
        self.order = self._exact_order()
        self.basis_exponents: Optional[List[int]] = None
        self.p: Optional[int] = None

    def _exact_order(self) -> int:
        power = self.tau
        e = 1
        while power != sympy.eye(self.dim):
            power = power * self.tau
            e += 1
            if e > 10 * self.dim + 10:
                raise ValueError("τ does not have finite order")
        return e

    @staticmethod
    def periods(p: int, s: int) -> "CyclicModule":
        """
        Sous-espace de Q(ζ_p) engendré par les ζ_p^{s^i} : τ permute cycliquement
        cette base (module libre de rang 1 sur Q[<τ>], base normale ζ_p).
        """
        k = multiplicative_order(s, p)
        m = sympy.zeros(k, k)
        for i in range(k):
            m[(i + 1) % k, i] = 1
        module = CyclicModule(m)
        module.p = p
        module.basis_exponents = [pow(s, i, p) for i in range(k)]
        return module

    def power(self, i: int, v: Matrix) -> Matrix:
        return (self.tau ** (i % self.order)) * v

    def matrix_of(self, coeffs: Sequence[Fraction]) -> Matrix:
        out = sympy.zeros(self.dim, self.dim)
        power = sympy.eye(self.dim)
        for a in coeffs:
            if a:
                out += _to_rational(a) * power
            power = power * self.tau
        return out

    def combine(self, coeffs: Sequence[Fraction], v: Matrix) -> Matrix:
        return self.matrix_of(coeffs) * v

    def normal_generator(self) -> Matrix:
        v = sympy.zeros(self.dim, 1)
        v[0, 0] = 1
        return v

    def random_vector(self, rng: np.random.Generator, bound: int = 9) -> Matrix:
        return Matrix([int(x) for x in rng.integers(-bound, bound + 1, size=self.dim)])

    def to_cyclo(self, v: Matrix) -> CycloElem:
        if self.basis_exponents is None:
            raise ValueError("module is not realized inside a cyclotomic field")
        return CycloElem.from_exponents(self.p, {e: _to_fraction(v[i, 0]) for i, e in enumerate(self.basis_exponents)})


def theta_apply(poly: GroupAlgebraElem, tau_action, u):
    """
    Θ(Σ a_i X^i)(u) = Σ a_i τ^i(u).
    """
    if tau_action.order != poly.k:
        raise ValueError(f"τ has order {tau_action.order}, but the group algebra has degree {poly.k}")
    return tau_action.combine(poly.coeffs, u)


def theta_matrix(poly: GroupAlgebraElem, module: CyclicModule) -> Matrix:
    if module.order != poly.k:
        raise ValueError(f"τ has order {module.order}, but the group algebra has degree {poly.k}")
    return module.matrix_of(poly.coeffs)


def theta_char_poly(poly: GroupAlgebraElem) -> Tuple[Poly, int]:
    """
    Polynôme caractéristique (-1)^k ∏ (X - p(ζ_k^i)) et dimension du noyau
    |{ζ ∈ μ_k : p(ζ) = 0}|.
    """
    k = poly.k
    char = poly.circulant().charpoly(X)
    signed = Poly((-1) ** k * char.as_expr(), X, domain=QQ)
    kernel_dim = sum(euler_phi(e) for e in poly.vanishing_orders())
    return signed, kernel_dim


def _spectrum_key(w) -> Tuple[float, float]:
    return round(float(mp.re(w)), SPECTRUM_DIGITS), round(float(mp.im(w)), SPECTRUM_DIGITS)


def theta_eigenvalues(poly: GroupAlgebraElem) -> List[mp.mpc]:
    """ Valeurs p(ζ_k^i), triées par parties réelle puis imaginaire arrondies à SPECTRUM_DIGITS chiffres. """
    z = mp.expjpi(mp.mpf(2) / poly.k)
    values = [poly.evaluate(z ** i) for i in range(poly.k)]
    return sorted(values, key=_spectrum_key)


def matrix_eigenvalues(m: Matrix) -> List[mp.mpc]:
    """ Valeurs propres numériques (mpmath) d'une matrice rationnelle, triées. """
    rows = [[mp.mpf(int(Rational(x).p)) / int(Rational(x).q) for x in m.row(i)] for i in range(m.shape[0])]
    values = mp.eig(mp.matrix(rows), left=False, right=False)
    return sorted((mp.mpc(v) for v in values), key=_spectrum_key)


@dataclass(frozen=True)
class KernelImage:
    quotient: GroupAlgebraElem
    zero_exponents: Tuple[int, ...]
    image_rank: int


def theta_kernel_image(poly: GroupAlgebraElem, module: CyclicModule,
                       zeros: Optional[Iterable[int]] = None,
                       rng: Optional[np.random.Generator] = None,
                       samples: int = 4) -> KernelImage:
    """
    Quotient q = (X^k - 1)/∏_{ζ∈Z}(X - ζ) dont l'image Θ(q)(M) est le noyau de Θ(p) :
    - Z est l'ensemble des zéros de p sur μ_k (ou un sous-ensemble fourni, donné par
      les exposants i de ζ_k^i) ; il doit être stable par Galois sur Q ;
    - l'inclusion image ⊆ noyau est vérifiée sur des vecteurs tirés au hasard.
    """
    k = poly.k
    actual = {i for e in poly.vanishing_orders() for i in range(k) if k // gcd(i, k) == e}
    chosen = set(actual) if zeros is None else {i % k for i in zeros}
    if not chosen <= actual:
        raise ValueError(f"exponents {sorted(chosen - actual)} are not zeros of the polynomial")
    for i in chosen:
        for j in range(1, k):
            if gcd(j, k) == 1 and (i * j) % k not in chosen:
                raise ValueError(f"zero set is not Galois-stable: ζ^{i} is in it but ζ^{(i * j) % k} is not")
    orders = sorted({k // gcd(i, k) for i in chosen})
    divisor = Poly(1, X, domain=QQ)
    for e in orders:
        divisor = divisor * Poly(sympy.cyclotomic_poly(e, X), X, domain=QQ)
    q, r = Poly(X ** k - 1, X, domain=QQ).div(divisor)
    if not r.is_zero:
        raise ValueError("zero set does not divide X^k - 1")
    quotient = GroupAlgebraElem.from_sympy(q, k)
    g_quotient = theta_matrix(quotient, module)
    g_poly = theta_matrix(poly, module)
    rng = rng if rng is not None else np.random.default_rng(0)
    for _ in range(samples):
        v = module.random_vector(rng)
        if any(g_poly * (g_quotient * v)):
            raise ValueError("Θ(q)(v) is not annihilated by Θ(p)")
    return KernelImage(quotient=quotient, zero_exponents=tuple(sorted(chosen)), image_rank=int(g_quotient.rank()))


def gaussian_periods(p: int, g: int, d: int) -> List[CycloElem]:
    """
    Périodes P_i = Σ_{m ∈ g^{2i}<g^{2d}>} ζ_p^m, i = 0..d-1 : base sur K du sous-corps
    de degré d de Q(ζ_p) au-dessus de K.
    """
    k = (p - 1) // 2
    if k % d:
        raise ValueError(f"d = {d} does not divide (p-1)/2 = {k}")
    step = pow(g, 2 * d, p)
    out = []
    for i in range(d):
        start = pow(g, 2 * i, p)
        exps = {}
        cur = start
        for _ in range(k // d):
            exps[cur] = 1
            cur = (cur * step) % p
        out.append(CycloElem.from_exponents(p, exps))
    return out
