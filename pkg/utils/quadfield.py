"""
Arithmétique exacte dans K = Q(√-p), p premier, p ≡ 3 (mod 4), p > 3.

- QuadInt : entier a + bω de O_K, ω = (1 + √-p)/2, ω² = ω - (1+p)/4.
- Ideal : idéal entier s·(nZ + (b+ω)Z) en forme normale de Hermite, 0 <= b < n.
- FieldContext : groupe des classes (formes quadratiques réduites), représentants,
  table de multiplication.
"""
from dataclasses import dataclass, field
from functools import lru_cache
from math import gcd, isqrt
from typing import Dict, List, Optional, Tuple


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    i = 3
    while i * i <= n:
        if n % i == 0:
            return False
        i += 2
    return True


def primes_up_to(bound: int) -> List[int]:
    return [n for n in range(2, bound + 1) if is_prime(n)]


def legendre(m: int, p: int) -> int:
    """ Symbole de Legendre (m/p) pour p premier impair ; 0 si p | m. """
    r = pow(m % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


def kronecker_minus_p(p: int, ell: int) -> int:
    """ Symbole de Kronecker (-p/ℓ) : décomposition de ℓ dans K. """
    if ell == 2:
        return 1 if (-p) % 8 == 1 else -1
    return legendre(-p, ell)


def primitive_root(p: int) -> int:
    """ Plus petite racine primitive modulo p. """
    order = p - 1
    factors = [q for q in range(2, order + 1) if order % q == 0 and is_prime(q)]
    for g in range(2, p):
        if all(pow(g, order // q, p) != 1 for q in factors):
            return g
    raise ValueError(f"no primitive root modulo {p}")


def _xgcd(a: int, b: int) -> Tuple[int, int, int]:
    """ Renvoie (g, s, t) avec g = gcd(a, b) >= 0 et s·a + t·b = g. """
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r != 0:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        return -old_r, -old_s, -old_t
    return old_r, old_s, old_t


@dataclass(frozen=True)
class QuadInt:
    a: int
    b: int
    p: int

    @property
    def c(self) -> int:
        return (1 + self.p) // 4

    @staticmethod
    def omega(p: int) -> "QuadInt":
        return QuadInt(0, 1, p)

    @staticmethod
    def sqrt_minus_p(p: int) -> "QuadInt":
        return QuadInt(-1, 2, p)

    def _coerce(self, other) -> "QuadInt":
        if isinstance(other, QuadInt):
            if other.p != self.p:
                raise ValueError(f"elements of Q(√-{self.p}) and Q(√-{other.p}) cannot be combined")
            return other
        if isinstance(other, int):
            return QuadInt(other, 0, self.p)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadInt(self.a + o.a, self.b + o.b, self.p)

    __radd__ = __add__

    def __neg__(self):
        return QuadInt(-self.a, -self.b, self.p)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadInt(self.a - o.a, self.b - o.b, self.p)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        a, b, x, y = self.a, self.b, o.a, o.b
        return QuadInt(a * x - self.c * b * y, a * y + b * x + b * y, self.p)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative powers are not integral")
        result = QuadInt(1, 0, self.p)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def conj(self) -> "QuadInt":
        return QuadInt(self.a + self.b, -self.b, self.p)

    def norm(self) -> int:
        return self.a * self.a + self.a * self.b + self.c * self.b * self.b

    def trace(self) -> int:
        return 2 * self.a + self.b

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def is_rational(self) -> bool:
        return self.b == 0

    def divide_exact(self, n: int) -> "QuadInt":
        if n == 0 or self.a % n or self.b % n:
            raise ValueError(f"{self} is not divisible by {n}")
        return QuadInt(self.a // n, self.b // n, self.p)

    def residue_mod_p(self) -> int:
        """ Entier m avec a + bω ≡ m (mod 𝔭) ; ω ≡ 1/2 ≡ (p+1)/2. """
        return (self.a + self.b * (self.p + 1) // 2) % self.p

    def __str__(self):
        return f"{self.a} + {self.b}ω"


def jacobi_symbol_mod_p(a: QuadInt) -> int:
    """
    Symbole (a/𝔭) = (m/p) où a ≡ m (mod 𝔭).
    """
    m = a.residue_mod_p()
    if m == 0:
        raise ValueError(f"{a} is divisible by 𝔭 = (√-{a.p}); (a/𝔭) is undefined")
    return legendre(m, a.p)


class BinaryQF:
    """ Forme ax² + bxy + cy² de discriminant b² - 4ac < 0. """

    def __init__(self, a: int, b: int, c: int):
        self.a = a
        self.b = b
        self.c = c

    def __repr__(self):
        return f"{self.a}x^2 + {self.b}xy + {self.c}y^2"

    def __eq__(self, other):
        return (self.a, self.b, self.c) == (other.a, other.b, other.c)

    def __hash__(self):
        return hash((self.a, self.b, self.c))

    def discriminant(self) -> int:
        return self.b ** 2 - 4 * self.a * self.c

    def normalize(self) -> "BinaryQF":
        a, b, c = self.a, self.b, self.c
        r = (a - b) // (2 * a)
        return BinaryQF(a, b + 2 * r * a, a * r * r + b * r + c)

    def reduced_form(self) -> "BinaryQF":
        nf = self.normalize()
        a, b, c = nf.a, nf.b, nf.c
        while not (a < c or (a == c and b >= 0)):
            s = (c + b) // (2 * c)
            a, b, c = c, -b + 2 * s * c, c * s * s - b * s + a
        return BinaryQF(a, b, c)


def reduced_forms(p: int) -> List[BinaryQF]:
    """ Formes primitives réduites de discriminant -p, triées par (a, b). """
    forms = []
    a = 1
    while 3 * a * a <= p:
        for b in range(-a + 1, a + 1):
            if b % 2 == 0 or (b * b + p) % (4 * a):
                continue
            c = (b * b + p) // (4 * a)
            if c < a or (c == a and b < 0):
                continue
            if gcd(gcd(a, b), c) != 1:
                continue
            forms.append(BinaryQF(a, b, c))
        a += 1
    return forms


@dataclass(frozen=True)
class Ideal:
    """
    Idéal entier s·(nZ + (b+ω)Z).
    - scale : contenu s (entier rationnel) ;
    - leading, shift : forme normale (n, b) de la partie primitive, 0 <= b < n ;
    - principal_generator : générateur éventuellement connu (ignoré pour l'égalité).
    """
    p: int
    scale: int
    leading: int
    shift: int
    principal_generator: Optional[QuadInt] = field(default=None, compare=False, hash=False, repr=False)

    @staticmethod
    def unit(p: int) -> "Ideal":
        return Ideal(p, 1, 1, 0)

    @property
    def norm(self) -> int:
        return self.scale * self.scale * self.leading

    def is_primitive(self) -> bool:
        return self.scale == 1

    def primitive_part(self) -> "Ideal":
        return Ideal(self.p, 1, self.leading, self.shift)

    def is_coprime_to_p(self) -> bool:
        return self.norm % self.p != 0

    def basis(self) -> Tuple[QuadInt, QuadInt]:
        s = self.scale
        return QuadInt(s * self.leading, 0, self.p), QuadInt(s * self.shift, s, self.p)

    def conjugate(self) -> "Ideal":
        n = self.leading
        return Ideal(self.p, self.scale, n, (-self.shift - 1) % n)

    def form(self) -> BinaryQF:
        n, b = self.leading, self.shift
        c = (1 + self.p) // 4
        return BinaryQF(n, 2 * b + 1, (b * b + b + c) // n)

    def __mul__(self, other: "Ideal") -> "Ideal":
        return ideal_mul(self, other)

    def __str__(self):
        head = "" if self.scale == 1 else f"{self.scale}·"
        return f"{head}({self.leading}, {self.shift}+ω)"


def _ideal_from_generators(p: int, gens: List[QuadInt]) -> Ideal:
    """ Forme de Hermite du Z-module engendré par des éléments de O_K. """
    x0, y0 = 0, 0
    for g in gens:
        d, s, t = _xgcd(y0, g.b)
        x0, y0 = s * x0 + t * g.a, d
    if y0 == 0:
        raise ValueError("generators span a module of rank < 2 (zero ideal?)")
    big_a = 0
    for g in gens:
        big_a = gcd(big_a, g.a - (g.b // y0) * x0)
    if big_a == 0 or big_a % y0 or x0 % y0:
        raise ValueError("generators do not span an O_K-ideal")
    n = big_a // y0
    b = ((x0 % big_a) // y0) % n
    return Ideal(p, y0, n, b)


def ideal_mul(x: Ideal, y: Ideal) -> Ideal:
    if x.p != y.p:
        raise ValueError(f"ideals of Q(√-{x.p}) and Q(√-{y.p}) cannot be multiplied")
    gens = [u * v for u in x.basis() for v in y.basis()]
    out = _ideal_from_generators(x.p, gens)
    if x.principal_generator is not None and y.principal_generator is not None:
        out = Ideal(out.p, out.scale, out.leading, out.shift, x.principal_generator * y.principal_generator)
    return out


def ideal_power(x: Ideal, e: int) -> Ideal:
    result = Ideal.unit(x.p)
    for _ in range(e):
        result = ideal_mul(result, x)
    return result


def principal_ideal(alpha: QuadInt) -> Ideal:
    if alpha.is_zero():
        raise ValueError("the zero element does not generate a nonzero ideal")
    out = _ideal_from_generators(alpha.p, [alpha, alpha * QuadInt.omega(alpha.p)])
    return Ideal(out.p, out.scale, out.leading, out.shift, alpha)


def normalize_generator(alpha: QuadInt) -> QuadInt:
    """
    Choix du signe d'un générateur :
    - (α/𝔭) = +1 si α est premier à 𝔭 ;
    - sinon partie réelle positive, puis coefficient de ω positif.
    """
    if alpha.residue_mod_p() != 0:
        return alpha if jacobi_symbol_mod_p(alpha) == 1 else -alpha
    t = alpha.trace()
    if t < 0 or (t == 0 and alpha.b < 0):
        return -alpha
    return alpha


def is_principal(x: Ideal) -> Optional[QuadInt]:
    """
    Cherche (X, Y) avec nX² + BXY + CY² = 1 pour la forme de la partie primitive ;
    4n·Q = (2nX + BY)² + pY² borne |Y| <= 2√(n/p).
    """
    n, p = x.leading, x.p
    f = x.form()
    y_max = isqrt(4 * n // p) + 1
    for y in range(0, y_max + 1):
        rest = 4 * n - p * y * y
        if rest < 0:
            break
        t = isqrt(rest)
        if t * t != rest:
            continue
        for root in (t, -t):
            num = root - f.b * y
            if num % (2 * n):
                continue
            xx = num // (2 * n)
            gen = QuadInt(x.scale * (xx * n + y * x.shift), x.scale * y, p)
            return normalize_generator(gen)
    return None


def ideals_of_norm(p: int, n: int, coprime: bool = True) -> List[Ideal]:
    """ Idéaux entiers de norme n, triés par (contenu, décalage). """
    if n < 1:
        raise ValueError(f"norm must be >= 1, got {n}")
    if coprime and n % p == 0:
        return []
    c = (1 + p) // 4
    out = []
    s = 1
    while s * s <= n:
        if n % (s * s) == 0:
            m = n // (s * s)
            for b in range(m):
                if (b * b + b + c) % m == 0:
                    out.append(Ideal(p, s, m, b))
        s += 1
    return out


@dataclass(frozen=True, eq=False)
class FieldContext:
    """
    Contexte immuable de K = Q(√-p) :
    - class_reps[0] = O_K, puis un idéal premier de plus petite norme (premier à 2p)
      par classe, les classes inverses recevant les idéaux conjugués ;
    - multiplication_table[i][j] = indice de la classe de rep_i·rep_j.
    """
    p: int
    class_reps: Tuple[Ideal, ...]
    multiplication_table: Tuple[Tuple[int, ...], ...]
    form_index: Dict[BinaryQF, int]
    rep_rank: int = 0

    @property
    def h(self) -> int:
        return len(self.class_reps)

    @property
    def class_number(self) -> int:
        return len(self.class_reps)

    @property
    def discriminant(self) -> int:
        return -self.p

    @property
    def omega(self) -> QuadInt:
        return QuadInt.omega(self.p)

    def unit_ideal(self) -> Ideal:
        return Ideal.unit(self.p)

    def class_of(self, x: Ideal) -> int:
        return self.form_index[x.form().reduced_form()]

    def inverse_class(self, i: int) -> int:
        return self.multiplication_table[i].index(0)

    def compose(self, i: int, j: int) -> int:
        return self.multiplication_table[i][j]

    def class_power(self, i: int, e: int) -> int:
        out = 0
        for _ in range(e % self.h):
            out = self.compose(out, i)
        return out

    def class_order(self, i: int) -> int:
        e, cur = 1, i
        while cur != 0:
            cur = self.compose(cur, i)
            e += 1
        return e

    def generator_class(self) -> Optional[int]:
        """ Plus petit indice de classe engendrant le groupe (None si non cyclique). """
        for i in range(self.h):
            if self.class_order(i) == self.h:
                return i
        return None

    def factor(self, x: Ideal) -> Tuple[int, QuadInt, int]:
        """ x = (β/den)·rep_k ; renvoie (k, β, den). """
        k = self.class_of(x)
        rep = self.class_reps[k]
        beta = is_principal(ideal_mul(x, rep.conjugate()))
        if beta is None:
            raise ValueError(f"class table inconsistent for {x}")
        return k, beta, rep.norm

    def ideals_of_norm(self, n: int, coprime: bool = True) -> List[Ideal]:
        return ideals_of_norm(self.p, n, coprime)


def check_prime(p: int) -> None:
    if not isinstance(p, int) or not is_prime(p):
        raise ValueError(f"p = {p} is not prime")
    if p <= 3:
        raise ValueError(f"p = {p} must be > 3")
    if p % 4 != 3:
        raise ValueError(f"p = {p} is not ≡ 3 (mod 4)")


@lru_cache(maxsize=None)
def make_field(p: int, rep_rank: int = 0) -> FieldContext:
    """
    Construit le contexte de K = Q(√-p) :
    - énumère les formes réduites de discriminant -p (nombre de classes h) ;
    - parcourt les premiers ℓ ∤ 2p décomposés et garde, pour chaque classe non
      triviale, le (rep_rank+1)-ième idéal premier rencontré ;
    - calcule la table de multiplication des classes.
    """
    check_prime(p)
    forms = reduced_forms(p)
    principal = BinaryQF(1, 1, (1 + p) // 4)
    h = len(forms)
    form_index: Dict[BinaryQF, int] = {principal: 0}
    candidates: Dict[int, List[Ideal]] = {0: [Ideal.unit(p)]}
    c = (1 + p) // 4
    ell = 3
    while len(form_index) < h or any(len(v) <= rep_rank for k, v in candidates.items() if k != 0):
        if ell != p and is_prime(ell) and kronecker_minus_p(p, ell) == 1:
            for b in range(ell):
                if (b * b + b + c) % ell:
                    continue
                q = Ideal(p, 1, ell, b)
                key = q.form().reduced_form()
                if key not in form_index:
                    form_index[key] = len(form_index)
                candidates.setdefault(form_index[key], []).append(q)
        ell += 2
    reps = [Ideal.unit(p)] + [candidates[i][rep_rank] for i in range(1, h)]
    for f in forms:
        if f not in form_index:
            raise ValueError(f"reduced form {f} was never reached")
    index_view = dict(form_index)
    table = tuple(
        tuple(index_view[ideal_mul(x, y).form().reduced_form()] for y in reps)
        for x in reps
    )
    return FieldContext(p=p, class_reps=tuple(reps), multiplication_table=table,
                        form_index=index_view, rep_rank=rep_rank)


def sample_ideals(ctx: FieldContext, rng, count: int, bound: int = 200) -> List[Ideal]:
    """ Tirage de count idéaux premiers à 𝔭 de norme <= bound (générateur numpy). """
    pool = [x for n in range(1, bound + 1) for x in ctx.ideals_of_norm(n)]
    return [pool[int(i)] for i in rng.integers(0, len(pool), size=count)]
