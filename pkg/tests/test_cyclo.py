from fractions import Fraction

import mpmath as mp
import pytest
import sympy

from utils.analytic import poly_from_roots
from utils.cyclo import (CycloElem, CyclicModule, GaloisShift, GroupAlgebraElem, X, cyclotomic_poly,
                         euler_phi, galois_apply, gaussian_periods, matrix_eigenvalues, multiplicative_order,
                         theta_apply, theta_char_poly, theta_eigenvalues, theta_kernel_image, theta_matrix)
from utils.quadfield import QuadInt

# (k, p, s) : τ = ζ_p ↦ ζ_p^s est d'ordre k
THETA_CASES = [(3, 7, 2), (5, 11, 3), (11, 23, 2)]


def random_elements(n, rng, count=6):
    size = euler_phi(n)
    return [CycloElem(n, tuple(Fraction(int(c)) for c in rng.integers(-5, 6, size=size))) for _ in range(count)]


def random_group_algebra(k, rng, root_at_one=False):
    coeffs = [int(c) for c in rng.integers(-4, 5, size=k)]
    if not any(coeffs):
        coeffs[0] = 1
    poly = GroupAlgebraElem.from_polynomial(coeffs, k)
    if root_at_one:
        poly = poly * GroupAlgebraElem.from_polynomial([-1, 1], k)
    return poly


# ---------------------------------------------------------
# Corps cyclotomiques
# ---------------------------------------------------------
def test_zeta_relations():
    z = CycloElem.zeta(7)
    assert z ** 7 == CycloElem.one(7)
    total = CycloElem.zero(7)
    for i in range(7):
        total = total + CycloElem.zeta(7, i)
    assert total.is_zero()
    assert z.trace() == -1
    assert z.norm() == 1


def test_gauss_sum_is_sqrt_minus_p():
    for p in (7, 11, 23):
        root = CycloElem.sqrt_minus_p(p)
        assert root * root == CycloElem.from_rational(p, -p)


def test_inverse_and_division(rng):
    for x in random_elements(7, rng):
        if x.is_zero():
            continue
        assert x * x.inverse() == CycloElem.one(7)
        assert (x / x) == CycloElem.one(7)
    with pytest.raises(ZeroDivisionError):
        CycloElem.zero(7).inverse()


def test_from_quadint_is_a_ring_map():
    p = 7
    a, b = QuadInt(3, -2, p), QuadInt(-1, 5, p)
    assert CycloElem.from_quadint(a * b) == CycloElem.from_quadint(a) * CycloElem.from_quadint(b)
    assert CycloElem.from_quadint(a + b) == CycloElem.from_quadint(a) + CycloElem.from_quadint(b)


def test_galois_action_composes(rng):
    for x in random_elements(11, rng, 3):
        assert galois_apply(3, galois_apply(5, x)) == galois_apply(15 % 11, x)
        assert galois_apply(1, x) == x
    with pytest.raises(ValueError):
        galois_apply(11, CycloElem.zeta(11))


def test_lift_and_embedding():
    x = CycloElem.zeta(6) + 2
    lifted = x.lift(42)
    with mp.workprec(128):
        assert mp.fabs(lifted.to_complex() - x.to_complex()) < mp.mpf(2) ** -100
    with pytest.raises(ValueError):
        x.lift(35)


def test_mixing_fields_raises():
    with pytest.raises(ValueError):
        CycloElem.zeta(7) + CycloElem.zeta(11)


def test_gaussian_periods_p7():
    periods = gaussian_periods(7, 3, 1)
    assert periods == [CycloElem.from_quadint(QuadInt(-1, 1, 7))]
    singletons = gaussian_periods(7, 3, 3)
    assert singletons == [CycloElem.zeta(7, 1), CycloElem.zeta(7, 2), CycloElem.zeta(7, 4)]
    with pytest.raises(ValueError):
        gaussian_periods(7, 3, 2)


def test_multiplicative_order():
    assert multiplicative_order(2, 7) == 3
    assert multiplicative_order(3, 7) == 6
    with pytest.raises(ValueError):
        multiplicative_order(2, 8)


# ---------------------------------------------------------
# Algèbre de groupe et opérateur Θ
# ---------------------------------------------------------
def test_group_algebra_wraps_exponents():
    assert GroupAlgebraElem.from_polynomial([0, 0, 0, 1], 3) == GroupAlgebraElem.one(3)
    x = GroupAlgebraElem.generator(3)
    assert x * x * x == GroupAlgebraElem.one(3)
    with pytest.raises(ValueError):
        GroupAlgebraElem.one(3) + GroupAlgebraElem.one(4)


def test_theta_closed_form_p7():
    k = 3
    quotient, remainder = sympy.Poly(X ** k - 1, X).div(cyclotomic_poly(k))
    assert remainder.is_zero
    poly = GroupAlgebraElem.from_sympy(quotient, k)
    tau = GaloisShift(7, 2)
    assert tau.order == 3
    assert theta_apply(poly, tau, CycloElem.zeta(7)) == CycloElem.zeta(7, 2) - CycloElem.zeta(7, 1)


def test_theta_order_mismatch_raises():
    with pytest.raises(ValueError):
        theta_apply(GroupAlgebraElem.one(4), GaloisShift(7, 2), CycloElem.zeta(7))


def test_theta_spectrum_of_x_minus_one():
    poly = GroupAlgebraElem.from_polynomial([-1, 1], 3)
    char, kernel_dim = theta_char_poly(poly)
    assert kernel_dim == 1
    assert char.degree() == 3
    with mp.workprec(128):
        values = theta_eigenvalues(poly)
        assert min(mp.fabs(v) for v in values) < mp.mpf(2) ** -100


def test_spectra_sort_through_numerical_noise():
    with mp.workprec(128):
        rotation = theta_eigenvalues(GroupAlgebraElem.generator(4))
        expected = [mp.mpc(-1, 0), mp.mpc(0, -1), mp.mpc(0, 1), mp.mpc(1, 0)]
        assert max(mp.fabs(a - b) for a, b in zip(rotation, expected)) < mp.mpf(2) ** -100
        quarter_turn = matrix_eigenvalues(sympy.Matrix([[0, -1], [1, 0]]))
        assert [int(mp.nint(mp.im(v))) for v in quarter_turn] == [-1, 1]


@pytest.mark.parametrize("k, p, s", THETA_CASES)
def test_theta_is_a_ring_homomorphism(k, p, s, rng):
    tau = GaloisShift(p, s)
    assert tau.order == k
    u = random_elements(p, rng, count=1)[0]
    for _ in range(3):
        a, b = random_group_algebra(k, rng), random_group_algebra(k, rng)
        assert theta_apply(a * b, tau, u) == theta_apply(a, tau, theta_apply(b, tau, u))
        assert theta_apply(a + b, tau, u) == theta_apply(a, tau, u) + theta_apply(b, tau, u)
    assert theta_apply(GroupAlgebraElem.one(k), tau, u) == u


@pytest.mark.parametrize("root_at_one", [False, True])
@pytest.mark.parametrize("k, p, s", THETA_CASES)
def test_theta_char_poly_is_the_product_over_roots_of_unity(k, p, s, root_at_one, rng):
    poly = random_group_algebra(k, rng, root_at_one)
    char, kernel_dim = theta_char_poly(poly)
    assert char.degree() == k
    with mp.workprec(128):
        values = theta_eigenvalues(poly)
        expected = poly_from_roots(values)
        coeffs = [(-1) ** k * mp.mpf(int(c.p)) / int(c.q) for c in char.all_coeffs()]
        scale = max(mp.mpf(1), max(mp.fabs(c) for c in coeffs))
        assert max(mp.fabs(a - b) for a, b in zip(coeffs, expected)) < mp.mpf(2) ** -80 * scale
        assert kernel_dim == sum(1 for v in values if mp.fabs(v) < mp.mpf(2) ** -80)
    if root_at_one:
        assert kernel_dim >= 1


@pytest.mark.parametrize("k, p, s", THETA_CASES)
def test_theta_spectrum_matches_the_matrix_on_periods(k, p, s, rng):
    module = CyclicModule.periods(p, s)
    assert module.order == k
    for _ in range(2):
        poly = random_group_algebra(k, rng)
        with mp.workprec(128):
            exact = theta_eigenvalues(poly)
            numeric = matrix_eigenvalues(theta_matrix(poly, module))
            assert len(numeric) == k
            assert max(mp.fabs(a - b) for a, b in zip(exact, numeric)) < mp.mpf(2) ** -60

def test_theta_kernel_image(rng):
    module = CyclicModule.periods(7, 2)
    poly = GroupAlgebraElem.from_polynomial([-1, 1], 3)
    result = theta_kernel_image(poly, module, rng=rng)
    assert result.quotient == GroupAlgebraElem.from_polynomial([1, 1, 1], 3)
    assert result.image_rank == 1
    assert result.zero_exponents == (0,)
    with pytest.raises(ValueError):
        theta_kernel_image(poly, module, zeros=[1])
