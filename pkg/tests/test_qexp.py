import mpmath as mp
import pytest

from conftest import TEST_PREC
from directions.cocycle import TwistedCocycle, TwistWitness, compute_delta, make_modular
from directions.heckechar import character_for_order, quadratic_character
from directions.qexp import (canonical_direction, conjugate_directions, decompose_direction,
                             direction_from_twist, hecke_verify, ideal_table, recognize_coefficients)
from utils.analytic import tolerance
from utils.cyclo import CycloElem, galois_apply
from utils.quadfield import Ideal, make_field

TOL = tolerance(TEST_PREC)

EXPECTED_P7 = (1, 1, 0, -1, 0, 0, 0, -3, -3, 0, 4)


@pytest.fixture(scope="module")
def delta7(field7):
    return compute_delta(field7, TEST_PREC)


@pytest.fixture(scope="module")
def delta23(field23):
    return compute_delta(field23, TEST_PREC)


@pytest.fixture(scope="module")
def twisted7(delta7):
    chi = character_for_order(7, 3)
    w = make_modular(TwistedCocycle(delta7, chi))
    return direction_from_twist(delta7, w, chi, 40), w


def close(a, b):
    with mp.workprec(TEST_PREC):
        return mp.fabs(mp.mpc(a) - mp.mpc(b)) < TOL * max(1, mp.fabs(mp.mpc(b)))


# ---------------------------------------------------------
# Table des idéaux
# ---------------------------------------------------------
def test_ideal_table(field7):
    table = ideal_table(field7, 12)
    assert sorted(table) == list(range(1, 13))
    assert len(table[2]) == 2
    assert table[3] == []
    assert table[7] == []
    assert table[9] == [Ideal(7, 3, 1, 0)]
    with pytest.raises(ValueError):
        ideal_table(field7, 0)


# ---------------------------------------------------------
# Direction canonique
# ---------------------------------------------------------
def test_canonical_direction_p7(delta7):
    qe = canonical_direction(delta7, 11)
    assert qe.coefficients == EXPECTED_P7
    assert qe.level == 49
    assert qe.d == 1
    assert qe.eta == quadratic_character(7)


def test_canonical_is_the_identity_twist(delta7):
    chi = quadratic_character(7)
    w = TwistWitness(u=CycloElem.one(7), trace_value=CycloElem.one(7), branch="identity")
    assert canonical_direction(delta7, 30) == direction_from_twist(delta7, w, chi, 30)


def test_canonical_direction_rejects_empty_range(delta7):
    with pytest.raises(ValueError):
        canonical_direction(delta7, 0)


def test_coefficient_index_is_checked(delta7):
    qe = canonical_direction(delta7, 11)
    assert qe.coefficient(11) == 4
    with pytest.raises(ValueError):
        qe.coefficient(0)
    with pytest.raises(ValueError):
        qe.coefficient(12)


def test_hecke_relations_p7(delta7):
    report = hecke_verify(canonical_direction(delta7, 120))
    assert report.passed
    assert report.series_checked >= 1
    assert report.p_column and report.inert_vanishing


def test_hecke_needs_enough_terms(delta7):
    with pytest.raises(ValueError):
        hecke_verify(canonical_direction(delta7, 10))


def test_canonical_direction_p23(delta23):
    qe = canonical_direction(delta23, 40)
    assert qe.eta is None
    assert close(qe.coefficient(1), 1)
    assert close(qe.coefficient(23), 0)
    assert len(qe.components) == 3
    report = recognize_coefficients(qe, limit=40)
    assert report.failures == 0
    assert report.values[0] == "1"
    assert decompose_direction(qe) < TOL
    assert hecke_verify(qe).passed


# ---------------------------------------------------------
# Directions tordues
# ---------------------------------------------------------
def test_twisted_direction_p7(twisted7):
    qe, w = twisted7
    u = w.u
    assert qe.d == 3
    assert qe.eta is None
    assert qe.coefficient(1) == CycloElem.one(7)
    assert qe.coefficient(2) == galois_apply(4, u) / u
    assert qe.coefficient(3).is_zero()
    assert qe.coefficient(7).is_zero()
    assert qe.provenance["branch"] == "closed_form"


def test_twisted_direction_decomposes(twisted7):
    qe, _ = twisted7
    assert len(qe.components) == 2
    assert decompose_direction(qe) < TOL
    report = hecke_verify(qe)
    assert report.passed
    assert report.series_checked == 2


def test_direction_from_twist_requires_modularity(delta7):
    chi = character_for_order(7, 3)
    w = TwistWitness(u=CycloElem.one(7), trace_value=CycloElem.zero(7), branch="identity")
    with pytest.raises(ValueError):
        direction_from_twist(delta7, w, chi, 20)


# ---------------------------------------------------------
# Autres directions
# ---------------------------------------------------------
def test_conjugation_by_one_is_identity(twisted7):
    qe, _ = twisted7
    assert conjugate_directions(qe, 1) is qe
    with pytest.raises(ValueError):
        conjugate_directions(qe, 0)


def test_conjugation_by_minus_one_negates(twisted7):
    qe, _ = twisted7
    other = conjugate_directions(qe, -1)
    assert other.source is None
    with mp.workprec(TEST_PREC):
        for n in range(1, qe.bound + 1):
            assert close(other.coefficient(n), -qe.coefficient(n).to_complex())


def test_conjugation_by_ideal(twisted7, field7):
    qe, _ = twisted7
    x = field7.ideals_of_norm(2)[0]
    other = conjugate_directions(qe, x)
    assert other.provenance["twist_identity_residual"] < TOL
    assert other.provenance["scalar"] == f"ψ({x})"
    with pytest.raises(ValueError):
        conjugate_directions(other, x)


def test_conjugation_by_scalar_in_wrong_field(twisted7):
    qe, _ = twisted7
    with pytest.raises(ValueError):
        conjugate_directions(qe, CycloElem.zeta(7))


def test_recognition_keeps_exact_values(delta7):
    report = recognize_coefficients(canonical_direction(delta7, 11))
    assert report.values == tuple(str(a) for a in EXPECTED_P7)
    assert report.failures == 0


def test_class_number_one_eigenforms_other_primes():
    for p in (11, 19):
        qe = canonical_direction(compute_delta(make_field(p), TEST_PREC), 60)
        assert qe.coefficient(1) == 1
        assert hecke_verify(qe).passed
