import mpmath as mp
import pytest

from conftest import TEST_PREC
from directions.cocycle import compute_delta
from directions.qexp import canonical_direction
from gross.gross import (gross_curve, omega_period, period_cross_check, rho_norm_residual, rho_unit,
                         rho_unit_conjugates, rho_unit_via_psi, twisted_curve_invariants)
from gross.point_count import (a_ell_table, count_points, frobenius_trace, good_primes, integral_model,
                               model_invariants)
from utils.analytic import tolerance
from utils.quadfield import make_field

TOL = tolerance(TEST_PREC)
PERIOD_PREC = 128

GROSS_CURVES = {
    7: {"j0": -3375, "m": -15, "n": 27, "c4": 105, "c6": 1323, "model": (1, -1, 0, -2, -1)},
    11: {"j0": -32768, "m": -32, "n": -56, "c4": 352, "c6": -6776, "model": (0, -1, 1, -7, 10)},
    19: {"j0": -884736, "m": -96, "n": -216, "c4": 1824, "c6": -77976, "model": (0, 0, 1, -38, 90)},
}


# ---------------------------------------------------------
# Invariants de A(p)
# ---------------------------------------------------------
@pytest.mark.parametrize("p", sorted(GROSS_CURVES))
def test_gross_invariants(p):
    expected = GROSS_CURVES[p]
    gc = gross_curve(p, TEST_PREC)
    assert gc.is_integral
    for name in ("j0", "m", "n", "c4", "c6"):
        assert gc.recognized[name] == expected[name]
    assert gc.recognized["discriminant"] == -p ** 3
    assert gc.hilbert_polynomial == [1, -expected["j0"]]


@pytest.mark.parametrize("p", [43, 67, 163])
def test_gross_discriminant_large_class_number_one(p):
    gc = gross_curve(p, TEST_PREC)
    assert gc.is_integral
    assert gc.recognized["discriminant"] == -p ** 3
    assert gc.recognized["c4"] == -gc.recognized["m"] * p
    assert gc.recognized["c6"] == gc.recognized["n"] * p * p


def test_gross_curve_p23_is_not_over_q():
    gc = gross_curve(23, TEST_PREC)
    assert not gc.is_integral
    assert len(gc.hilbert_polynomial) == 4
    with mp.workprec(TEST_PREC):
        assert mp.fabs((gc.c4 ** 3 - gc.c6 ** 2) / 1728 + 23 ** 3) < TOL * 23 ** 3


@pytest.mark.parametrize("p", sorted(GROSS_CURVES))
def test_integral_model(p):
    expected = GROSS_CURVES[p]
    model = integral_model(expected["c4"], expected["c6"])
    assert model == expected["model"]
    assert model_invariants(model) == (expected["c4"], expected["c6"], -p ** 3)


def test_integral_model_missing():
    with pytest.raises(ValueError):
        integral_model(1, 1)


def test_twisted_curve_invariants():
    gc = gross_curve(7, TEST_PREC)
    twisted = twisted_curve_invariants(gc, 2)
    with mp.workprec(TEST_PREC):
        assert mp.fabs(twisted.j - gc.j0) < TOL * mp.fabs(gc.j0)
        assert mp.fabs(twisted.discriminant - gc.discriminant * 2 ** 12) < TOL * 2 ** 12 * 343
    with pytest.raises(ValueError):
        twisted_curve_invariants(gc, 0)


# ---------------------------------------------------------
# Comptage de points
# ---------------------------------------------------------
def test_count_points_small_cases():
    model = GROSS_CURVES[7]["model"]
    assert count_points(model, 2) == 2
    assert frobenius_trace(model, 2) == 1
    assert frobenius_trace(model, 3) == 0
    with pytest.raises(ValueError):
        frobenius_trace(model, 7)
    with pytest.raises(ValueError):
        count_points(model, 4)


def test_good_primes_skip_the_level():
    model = GROSS_CURVES[11]["model"]
    primes = good_primes(model, 40)
    assert 11 not in primes
    assert primes[:3] == [2, 3, 5]


@pytest.mark.parametrize("p", sorted(GROSS_CURVES))
def test_point_counts_match_canonical_direction(p):
    model = GROSS_CURVES[p]["model"]
    primes = good_primes(model, 200)
    table = a_ell_table(model, primes)
    assert list(table) == primes
    qe = canonical_direction(compute_delta(make_field(p), TEST_PREC), 200)
    for ell, a in table.items():
        assert qe.coefficient(ell) == a


# ---------------------------------------------------------
# Unité ρ et période Ω
# ---------------------------------------------------------
def test_rho_class_number_one():
    c = compute_delta(make_field(7), TEST_PREC)
    assert rho_unit(c) == 1
    assert rho_norm_residual(c) == 0


def test_rho_p23():
    c = compute_delta(make_field(23), TEST_PREC)
    rho = rho_unit(c)
    assert rho > 0
    assert rho_norm_residual(c) < TOL
    assert len(rho_unit_conjugates(c)) == 3
    with mp.workprec(TEST_PREC):
        assert mp.fabs(rho_unit_via_psi(c) - rho) < TOL * rho


@pytest.mark.parametrize("p, real", [(7, True), (11, False), (19, False), (23, True)])
def test_omega_period(p, real):
    c = compute_delta(make_field(p), PERIOD_PREC)
    pd = omega_period(p, c, PERIOD_PREC)
    assert pd.is_real == real
    assert pd.delta_residual < tolerance(PERIOD_PREC)
    with mp.workprec(PERIOD_PREC):
        if real:
            assert mp.im(pd.omega) == 0 and mp.re(pd.omega) > 0
        else:
            assert mp.re(pd.omega) == 0 and mp.im(pd.omega) > 0


def test_omega_p7_value():
    pd = omega_period(7, compute_delta(make_field(7), PERIOD_PREC), PERIOD_PREC)
    assert abs(float(mp.re(pd.omega)) - 1.9333) < 1e-3


def test_omega_period_preconditions():
    c = compute_delta(make_field(7), PERIOD_PREC)
    with pytest.raises(ValueError):
        omega_period(7, c, 64)
    with pytest.raises(ValueError):
        omega_period(11, c, PERIOD_PREC)


def test_period_cross_check_p7():
    c = compute_delta(make_field(7), PERIOD_PREC)
    check = period_cross_check(gross_curve(7, PERIOD_PREC), omega_period(7, c, PERIOD_PREC), PERIOD_PREC)
    assert check.passed


def test_period_cross_check_needs_curve_over_q():
    c = compute_delta(make_field(23), PERIOD_PREC)
    with pytest.raises(ValueError):
        period_cross_check(gross_curve(23, PERIOD_PREC), omega_period(23, c, PERIOD_PREC), PERIOD_PREC)


@pytest.mark.parametrize("p", sorted(GROSS_CURVES))
def test_period_cross_check_at_256_bits(p):
    c = compute_delta(make_field(p), 256)
    check = period_cross_check(gross_curve(p, 256), omega_period(p, c, 256), 256)
    assert check.passed
    assert check.comparison.relative_error < mp.mpf(10) ** -30


@pytest.mark.parametrize("p", [7, 11, 19, 23, 31])
def test_omega_lattice_discriminant_at_256_bits(p):
    pd = omega_period(p, compute_delta(make_field(p), 256), 256)
    assert pd.delta_residual < mp.mpf(10) ** -30
