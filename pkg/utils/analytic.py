"""
Évaluations analytiques en précision arbitraire (mpmath) :
- η de Dedekind par la série pentagonale, après réduction au domaine fondamental ;
- Δ et j d'un réseau, d'un idéal de O_K (plongement fixé √-p = +i√p) ;
- séries d'Eisenstein E4, E6 et invariants (c4, c6) d'un réseau ;
- Γ et identité de multiplication de Gauss ;
- réseau des périodes d'une courbe réelle par moyenne arithmético-géométrique ;
- reconnaissance exacte (entiers, éléments de O_K, polynômes minimaux).

Toutes les fonctions travaillent dans un contexte mp.workprec(prec + GUARD_BITS) :
la précision de mpmath est globale au processus, ces évaluations restent séquentielles.
"""
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple, TypeVar

import mpmath as mp

from utils.errors import PrecisionError
from utils.quadfield import FieldContext, Ideal, QuadInt, legendre

DEFAULT_PREC = 256
GUARD_BITS = 32
MAX_PREC = 4096

T = TypeVar("T")


def tolerance(prec: int) -> mp.mpf:
    """ Tolérance relative 2^{-prec/2}. """
    return mp.mpf(2) ** (-(prec // 2))


def rounded(value, prec: int):
    """ Arrondi à prec bits, effectué dans un contexte mp.workprec(prec). """
    with mp.workprec(prec):
        if isinstance(value, tuple):
            return tuple(+v for v in value)
        return +value


def with_escalation(compute: Callable[[int], T], prec: int, max_prec: int = MAX_PREC) -> T:
    """
    Relance compute à précision doublée tant qu'il lève PrecisionError.
    """
    current = prec
    while True:
        try:
            return compute(current)
        except PrecisionError:
            if current * 2 > max_prec:
                raise
            current *= 2


def embed(alpha: QuadInt) -> mp.mpc:
    """ a + bω ↦ a + b(1 + i√p)/2. """
    return mp.mpc(mp.mpf(alpha.a) + mp.mpf(alpha.b) / 2, mp.mpf(alpha.b) * mp.sqrt(alpha.p) / 2)


def embed_fraction(alpha: QuadInt, den: int) -> mp.mpc:
    return embed(alpha) / den


def _reduce_tau(tau: mp.mpc) -> Tuple[mp.mpc, mp.mpc]:
    """
    Ramène τ dans le domaine fondamental ; renvoie (τ', f) avec η(τ) = f·η(τ').
    """
    factor = mp.mpc(1)
    for _ in range(10000):
        n = int(mp.nint(mp.re(tau)))
        if n:
            tau = tau - n
            factor *= mp.expjpi(mp.mpf(n) / 12)
        if mp.fabs(tau) < 1 - mp.mpf(2) ** (-mp.mp.prec // 2):
            factor /= mp.sqrt(-1j * tau)
            tau = -1 / tau
        else:
            return tau, factor
    raise PrecisionError("fundamental-domain reduction did not terminate")


def _eta_series(tau: mp.mpc) -> mp.mpc:
    q = mp.expjpi(2 * tau)
    eps = mp.mpf(2) ** (-mp.mp.prec)
    total = mp.mpc(1)
    k = 1
    while True:
        sign = -1 if k % 2 else 1
        t1 = q ** (k * (3 * k - 1) // 2)
        t2 = q ** (k * (3 * k + 1) // 2)
        total += sign * (t1 + t2)
        if mp.fabs(t1) < eps:
            break
        k += 1
    return mp.expjpi(tau / 12) * total


def dedekind_eta(tau, prec: int = DEFAULT_PREC) -> mp.mpc:
    """
    η(τ) = q^{1/24} ∏ (1 - q^n), q = e^{2iπτ}, pour Im(τ) > 0.
    """
    with mp.workprec(prec + GUARD_BITS):
        tau = mp.mpc(tau)
        if mp.im(tau) <= 0:
            raise ValueError(f"dedekind_eta needs Im(τ) > 0, got τ = {tau}")
        reduced, factor = _reduce_tau(tau)
        value = factor * _eta_series(reduced)
    return rounded(value, prec)


@dataclass(frozen=True)
class LatticeBasis:
    """ Réseau Zω1 + Zω2 orienté : Im(ω2/ω1) > 0. """
    omega1: mp.mpc
    omega2: mp.mpc

    def __post_init__(self):
        if self.omega1 == 0:
            raise ValueError("degenerate lattice basis: ω1 = 0")
        if mp.im(self.omega2 / self.omega1) <= 0:
            raise ValueError("lattice basis is degenerate or not oriented (Im(ω2/ω1) <= 0)")

    @staticmethod
    def from_generators(w1, w2) -> "LatticeBasis":
        w1, w2 = mp.mpc(w1), mp.mpc(w2)
        if w1 == 0 or w2 == 0 or mp.im(w2 / w1) == 0:
            raise ValueError("generators are linearly dependent over R")
        if mp.im(w2 / w1) < 0:
            w1, w2 = w2, w1
        return LatticeBasis(w1, w2)

    @property
    def tau(self) -> mp.mpc:
        return self.omega2 / self.omega1

    def scaled(self, c) -> "LatticeBasis":
        return LatticeBasis(self.omega1 * c, self.omega2 * c)

    def conjugate(self) -> "LatticeBasis":
        return LatticeBasis.from_generators(mp.conj(self.omega1), mp.conj(self.omega2))

    def reduced(self) -> "LatticeBasis":
        """ Changement de base entier amenant τ dans le domaine fondamental. """
        w1, w2 = self.omega1, self.omega2
        for _ in range(10000):
            n = int(mp.nint(mp.re(w2 / w1)))
            w2 = w2 - n * w1
            if mp.fabs(w2 / w1) < 1 - mp.mpf(2) ** (-mp.mp.prec // 2):
                w1, w2 = w2, -w1
            else:
                return LatticeBasis(w1, w2)
        raise PrecisionError("lattice reduction did not terminate")

    def contains(self, z, tol) -> bool:
        x, y = real_coordinates(self, z)
        return mp.fabs(x - mp.nint(x)) < tol and mp.fabs(y - mp.nint(y)) < tol


def real_coordinates(basis: LatticeBasis, z) -> Tuple[mp.mpf, mp.mpf]:
    """ (x, y) réels avec z = x·ω1 + y·ω2. """
    a1, a2 = basis.omega1, basis.omega2
    x = mp.im(z * mp.conj(a2)) / mp.im(a1 * mp.conj(a2))
    y = mp.im(mp.conj(a1) * z) / mp.im(mp.conj(a1) * a2)
    return x, y


def ideal_lattice(x: Ideal) -> LatticeBasis:
    n_gen, b_gen = x.basis()
    return LatticeBasis(embed(n_gen), embed(b_gen))


def delta_of_lattice(basis: LatticeBasis, prec: int = DEFAULT_PREC) -> mp.mpc:
    """ Δ(L) = (2π/ω1)^12 η(τ)^24, τ réduit. """
    with mp.workprec(prec + GUARD_BITS):
        red = basis.reduced()
        eta = _eta_series(red.tau)
        value = (2 * mp.pi / red.omega1) ** 12 * eta ** 24
    return rounded(value, prec)


def delta_of_ideal(x: Ideal, prec: int = DEFAULT_PREC) -> mp.mpc:
    with mp.workprec(prec + GUARD_BITS):
        lattice = ideal_lattice(x)
    return delta_of_lattice(lattice, prec)


def _lambert(tau: mp.mpc, power: int) -> mp.mpc:
    q = mp.expjpi(2 * tau)
    eps = mp.mpf(2) ** (-mp.mp.prec)
    total = mp.mpc(0)
    n = 1
    qn = q
    while True:
        term = mp.mpf(n) ** power * qn / (1 - qn)
        total += term
        if mp.fabs(term) < eps:
            break
        n += 1
        qn *= q
    return total


def eisenstein_e4(tau, prec: int = DEFAULT_PREC) -> mp.mpc:
    with mp.workprec(prec + GUARD_BITS):
        value = 1 + 240 * _lambert(mp.mpc(tau), 3)
    return rounded(value, prec)


def eisenstein_e6(tau, prec: int = DEFAULT_PREC) -> mp.mpc:
    with mp.workprec(prec + GUARD_BITS):
        value = 1 - 504 * _lambert(mp.mpc(tau), 5)
    return rounded(value, prec)


def lattice_invariants(basis: LatticeBasis, prec: int = DEFAULT_PREC) -> Tuple[mp.mpc, mp.mpc]:
    """ (c4, c6) = ((2π/ω1)^4 E4(τ), (2π/ω1)^6 E6(τ)), soit g2 = c4/12, g3 = c6/216. """
    with mp.workprec(prec + GUARD_BITS):
        red = basis.reduced()
        scale = 2 * mp.pi / red.omega1
        c4 = scale ** 4 * eisenstein_e4(red.tau, prec)
        c6 = scale ** 6 * eisenstein_e6(red.tau, prec)
    return rounded((c4, c6), prec)


def j_of_tau(tau, prec: int = DEFAULT_PREC) -> mp.mpc:
    """ j = E4³/η²⁴ après réduction. """
    with mp.workprec(prec + GUARD_BITS):
        red = LatticeBasis(mp.mpc(1), mp.mpc(tau)).reduced()
        t = red.tau
        value = eisenstein_e4(t, prec) ** 3 / _eta_series(t) ** 24
    return rounded(value, prec)


def j_of_tau_eisenstein(tau, prec: int = DEFAULT_PREC) -> mp.mpc:
    """ j = 1728 E4³/(E4³ - E6²), seconde évaluation indépendante de η. """
    with mp.workprec(prec + GUARD_BITS):
        red = LatticeBasis(mp.mpc(1), mp.mpc(tau)).reduced()
        e4 = eisenstein_e4(red.tau, prec)
        e6 = eisenstein_e6(red.tau, prec)
        value = 1728 * e4 ** 3 / (e4 ** 3 - e6 ** 2)
    return rounded(value, prec)


def j_invariant(x: Ideal, prec: int = DEFAULT_PREC) -> mp.mpc:
    with mp.workprec(prec + GUARD_BITS):
        lattice = ideal_lattice(x)
        tau = lattice.tau
    return j_of_tau(tau, prec)


def gamma_fn(x, prec: int = DEFAULT_PREC) -> mp.mpf:
    """ Γ(x) pour x rationnel > 0 (mpmath.gamma). """
    x = Fraction(x)
    if x <= 0:
        raise ValueError(f"Γ has a pole or is not considered at x = {x} (need x > 0)")
    with mp.workprec(prec + GUARD_BITS):
        value = mp.gamma(mp.mpf(x.numerator) / x.denominator)
    return rounded(value, prec)


def gauss_multiplication_residual(n: int, prec: int = DEFAULT_PREC) -> mp.mpf:
    """ |∏_{i<n} Γ(i/n) / ((2π)^{(n-1)/2} n^{-1/2}) - 1|. """
    with mp.workprec(prec + GUARD_BITS):
        prod = mp.mpf(1)
        for i in range(1, n):
            prod *= gamma_fn(Fraction(i, n), prec)
        expected = (2 * mp.pi) ** (mp.mpf(n - 1) / 2) / mp.sqrt(n)
        value = mp.fabs(prod / expected - 1)
    return rounded(value, prec)


def agm_real_period(c4, c6, prec: int = DEFAULT_PREC) -> LatticeBasis:
    """
    Réseau Λ avec g2(Λ) = c4/12, g3(Λ) = c6/216 (courbe y² = x³ - 27c4x - 54c6
    à homothétie près), par moyenne arithmético-géométrique :
    - Δ > 0 : trois racines réelles e1 > e2 > e3 ;
    - Δ < 0 : une racine réelle e1, β = √(3e1² - g2/4), α = 3e1.
    """
    with mp.workprec(prec + GUARD_BITS):
        c4, c6 = mp.mpc(c4), mp.mpc(c6)
        tol = tolerance(prec)
        if mp.fabs(mp.im(c4)) > tol * (1 + mp.fabs(c4)) or mp.fabs(mp.im(c6)) > tol * (1 + mp.fabs(c6)):
            raise ValueError("agm_real_period needs real invariants c4, c6")
        g2, g3 = mp.re(c4) / 12, mp.re(c6) / 216
        disc = g2 ** 3 - 27 * g3 ** 2
        if mp.fabs(disc) <= tol * (1 + mp.fabs(g2) ** 3 + 27 * g3 ** 2):
            raise ValueError("singular curve: c4³ - c6² = 0")
        roots = mp.polyroots([4, 0, -g2, -g3], maxsteps=200, extraprec=2 * prec)
        if disc > 0:
            e1, e2, e3 = sorted((mp.re(r) for r in roots), reverse=True)
            w1 = mp.pi / mp.agm(mp.sqrt(e1 - e3), mp.sqrt(e1 - e2))
            w2 = 1j * mp.pi / mp.agm(mp.sqrt(e1 - e3), mp.sqrt(e2 - e3))
        else:
            e1 = min(roots, key=lambda r: mp.fabs(mp.im(r)))
            e1 = mp.re(e1)
            beta = mp.sqrt(3 * e1 ** 2 - g2 / 4)
            alpha = 3 * e1
            w1 = 2 * mp.pi / mp.agm(2 * mp.sqrt(beta), mp.sqrt(2 * beta + alpha))
            w2 = w1 / 2 + 1j * mp.pi / mp.agm(2 * mp.sqrt(beta), mp.sqrt(2 * beta - alpha))
        basis = LatticeBasis.from_generators(w1, w2)
    return basis


@dataclass(frozen=True)
class LatticeComparison:
    equal: bool
    relative_error: mp.mpf
    change_of_basis: Tuple[Tuple[int, int], Tuple[int, int]]


def compare_lattices(a: LatticeBasis, b: LatticeBasis, prec: int = DEFAULT_PREC) -> LatticeComparison:
    """
    Égalité de réseaux : la matrice de passage réelle doit être entière et unimodulaire.
    """
    with mp.workprec(prec + GUARD_BITS):
        rows = [real_coordinates(a, b.omega1), real_coordinates(a, b.omega2)]
        err = mp.mpf(0)
        ints = []
        for x, y in rows:
            nx, ny = mp.nint(x), mp.nint(y)
            err = max(err, mp.fabs(x - nx), mp.fabs(y - ny))
            ints.append((int(nx), int(ny)))
        det = ints[0][0] * ints[1][1] - ints[0][1] * ints[1][0]
        equal = abs(det) == 1 and err < tolerance(prec)
    return LatticeComparison(equal=equal, relative_error=rounded(err, prec), change_of_basis=(ints[0], ints[1]))


def recognize_integer(z, prec: int = DEFAULT_PREC, threshold: Optional[mp.mpf] = None) -> Optional[int]:
    """ Entier n avec |z - n| < seuil·max(1, |z|), sinon None. """
    with mp.workprec(prec + GUARD_BITS):
        z = mp.mpc(z)
        thr = threshold if threshold is not None else tolerance(prec)
        n = mp.nint(mp.re(z))
        if mp.fabs(z - n) < thr * max(mp.mpf(1), mp.fabs(z)):
            return int(n)
    return None


def recognize_quadint(z, p: int, prec: int = DEFAULT_PREC, threshold: Optional[mp.mpf] = None) -> Tuple[Optional[QuadInt], mp.mpf]:
    """
    Élément x + yω de O_K proche de z : y = Im(z)/(√p/2), x = Re(z) - y/2 ;
    renvoie (élément ou None, distance).
    """
    with mp.workprec(prec + GUARD_BITS):
        z = mp.mpc(z)
        thr = threshold if threshold is not None else tolerance(prec)
        y = mp.im(z) / (mp.sqrt(p) / 2)
        x = mp.re(z) - y / 2
        ny, nx = mp.nint(y), mp.nint(x)
        dist = max(mp.fabs(y - ny), mp.fabs(x - nx))
        ok = dist < thr * max(mp.mpf(1), mp.fabs(z))
    return (QuadInt(int(nx), int(ny), p) if ok else None), rounded(dist, prec)


def recognize_minpoly(z, degree: int, prec: int = DEFAULT_PREC, maxcoeff: int = 10 ** 12) -> Optional[List[int]]:
    """ Polynôme minimal entier de degré <= degree par relation entière (mp.findpoly). """
    with mp.workprec(prec + GUARD_BITS):
        z = mp.mpc(z)
        if mp.fabs(mp.im(z)) > tolerance(prec) * max(mp.mpf(1), mp.fabs(z)):
            return None
        coeffs = mp.findpoly(mp.re(z), degree, maxcoeff=maxcoeff)
    if not coeffs:
        return None
    sign = -1 if coeffs[0] < 0 else 1
    return [sign * int(c) for c in coeffs]


def poly_from_roots(roots: Sequence) -> List[mp.mpc]:
    """ Coefficients (degré décroissant) de ∏ (X - r). """
    coeffs = [mp.mpc(1)]
    for r in roots:
        nxt = coeffs + [mp.mpc(0)]
        for i in range(1, len(nxt)):
            nxt[i] -= r * coeffs[i - 1]
        coeffs = nxt
    return coeffs


def hilbert_class_polynomial(ctx: FieldContext, prec: int = DEFAULT_PREC) -> List[int]:
    """ Coefficients entiers (degré décroissant) de ∏ (X - j(rep_i)), montée en précision si besoin. """
    def compute(current: int) -> List[int]:
        with mp.workprec(current + GUARD_BITS):
            js = [j_invariant(rep, current) for rep in ctx.class_reps]
            coeffs = poly_from_roots(js)
            out = []
            for c in coeffs:
                n = recognize_integer(c, current, threshold=mp.mpf(10) ** (-(current // 8)))
                if n is None:
                    raise PrecisionError(f"Hilbert class polynomial coefficient {c} not recognized at {current} bits")
                out.append(n)
        return out
    return with_escalation(compute, prec)


def gamma_character_product(p: int, prec: int = DEFAULT_PREC, sign: int = 1) -> mp.mpf:
    """ ∏_{(m/p) = sign} Γ(m/p), m = 1..p-1. """
    with mp.workprec(prec + GUARD_BITS):
        prod = mp.mpf(1)
        for m in range(1, p):
            if legendre(m, p) == sign:
                prod *= gamma_fn(Fraction(m, p), prec)
    return rounded(prod, prec)


def chowla_selberg_residual(ctx: FieldContext, prec: int = DEFAULT_PREC) -> mp.mpf:
    """
    Écart relatif entre ∏_c N(𝔞_c)^6·|Δ(𝔞_c)| et (2π/p)^{6h}·(∏ Γ(m/p)^{(m/p)})^6.
    """
    p, h = ctx.p, ctx.h
    with mp.workprec(prec + GUARD_BITS):
        lhs = mp.mpf(1)
        for rep in ctx.class_reps:
            lhs *= mp.mpf(rep.norm) ** 6 * mp.fabs(delta_of_ideal(rep, prec))
        ratio = gamma_character_product(p, prec, 1) / gamma_character_product(p, prec, -1)
        rhs = (2 * mp.pi / p) ** (6 * h) * ratio ** 6
        value = mp.fabs(lhs / rhs - 1)
    return rounded(value, prec)
