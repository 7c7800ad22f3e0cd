"""
Modèle entier de A(p) (h = 1) et comptage de points modulo ℓ.
"""
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, Iterable, List, Tuple

import numpy as np

from utils.quadfield import is_prime

MAX_WORKERS = 8

Model = Tuple[int, int, int, int, int]


def model_invariants(model: Model) -> Tuple[int, int, int]:
    """ (c4, c6, Δ) des a-invariants [a1, a2, a3, a4, a6]. """
    a1, a2, a3, a4, a6 = model
    b2 = a1 * a1 + 4 * a2
    b4 = a1 * a3 + 2 * a4
    b6 = a3 * a3 + 4 * a6
    b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
    c4 = b2 * b2 - 24 * b4
    c6 = -b2 ** 3 + 36 * b2 * b4 - 216 * b6
    disc = -b2 * b2 * b8 - 8 * b4 ** 3 - 27 * b6 * b6 + 9 * b2 * b4 * b6
    return c4, c6, disc


def integral_model(c4: int, c6: int) -> Model:
    """
    Recherche de [a1, a2, a3, a4, a6] entiers d'invariants (c4, c6) exactement :
    - a1, a3 ∈ {0, 1}, a2 ∈ {-1, 0, 1} ;
    - b4 = (b2² - c4)/24, b6 = (-b2³ + 36b2b4 - c6)/216 doivent être entiers.
    """
    for a1 in (0, 1):
        for a2 in (-1, 0, 1):
            b2 = a1 * a1 + 4 * a2
            if (b2 * b2 - c4) % 24:
                continue
            b4 = (b2 * b2 - c4) // 24
            num6 = -b2 ** 3 + 36 * b2 * b4 - c6
            if num6 % 216:
                continue
            b6 = num6 // 216
            for a3 in (0, 1):
                if (b4 - a1 * a3) % 2 or (b6 - a3 * a3) % 4:
                    continue
                model = (a1, a2, a3, (b4 - a1 * a3) // 2, (b6 - a3 * a3) // 4)
                if model_invariants(model)[:2] == (c4, c6):
                    return model
    raise ValueError(f"no integral model with c4 = {c4}, c6 = {c6} in the reduced search range")


def count_points(model: Model, ell: int) -> int:
    """ #E(F_ℓ), point à l'infini compris (grille numpy des couples (x, y)). """
    if not is_prime(ell):
        raise ValueError(f"ℓ = {ell} is not prime")
    a1, a2, a3, a4, a6 = (a % ell for a in model)
    xs, ys = np.meshgrid(np.arange(ell, dtype=np.int64), np.arange(ell, dtype=np.int64), indexing="ij")
    lhs = (ys * ys + a1 * xs * ys + a3 * ys) % ell
    rhs = (xs * xs % ell * xs + a2 * xs * xs + a4 * xs + a6) % ell
    return int(np.count_nonzero(lhs == rhs)) + 1


def frobenius_trace(model: Model, ell: int) -> int:
    """ a_ℓ = ℓ + 1 - #E(F_ℓ), pour ℓ de bonne réduction. """
    if model_invariants(model)[2] % ell == 0:
        raise ValueError(f"ℓ = {ell} divides the discriminant: bad reduction")
    return ell + 1 - count_points(model, ell)


def good_primes(model: Model, bound: int) -> List[int]:
    disc = model_invariants(model)[2]
    return [ell for ell in range(2, bound) if is_prime(ell) and disc % ell]


def a_ell_table(model: Model, primes: Iterable[int]) -> Dict[int, int]:
    """ a_ℓ pour chaque ℓ, calculés en parallèle, dans l'ordre des premiers donnés. """
    primes = list(primes)
    with ThreadPoolExecutor(max_workers=MAX_WORKERS) as executor:
        futures = {ell: executor.submit(frobenius_trace, model, ell) for ell in primes}
        return {ell: future.result() for ell, future in futures.items()}
