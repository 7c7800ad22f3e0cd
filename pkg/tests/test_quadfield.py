import pytest

from utils.quadfield import (Ideal, QuadInt, check_prime, ideal_mul, ideal_power, ideals_of_norm, is_principal,
                             jacobi_symbol_mod_p, kronecker_minus_p, legendre, make_field,
                             normalize_generator, primitive_root, principal_ideal, reduced_forms,
                             sample_ideals)


# ---------------------------------------------------------
# Entiers et symboles
# ---------------------------------------------------------
def test_legendre_and_kronecker():
    assert legendre(2, 7) == 1
    assert legendre(3, 7) == -1
    assert legendre(14, 7) == 0
    assert kronecker_minus_p(7, 2) == 1
    assert kronecker_minus_p(7, 3) == -1
    assert kronecker_minus_p(23, 3) == 1


@pytest.mark.parametrize("p, g", [(7, 3), (11, 2), (19, 2), (23, 5)])
def test_primitive_root(p, g):
    assert primitive_root(p) == g


def test_quadint_arithmetic():
    p = 7
    omega = QuadInt.omega(p)
    root = QuadInt.sqrt_minus_p(p)
    assert root * root == QuadInt(-p, 0, p)
    assert omega.norm() == 2
    assert omega + omega.conj() == QuadInt(1, 0, p)
    x, y = QuadInt(3, -2, p), QuadInt(-1, 5, p)
    assert (x * y).norm() == x.norm() * y.norm()
    assert (x * y).conj() == x.conj() * y.conj()
    assert x ** 3 == x * x * x


def test_quadint_mixing_fields_raises():
    with pytest.raises(ValueError):
        QuadInt(1, 1, 7) + QuadInt(1, 1, 11)


def test_jacobi_symbol_and_normalization():
    omega = QuadInt.omega(7)
    assert omega.residue_mod_p() == 4
    assert jacobi_symbol_mod_p(omega) == 1
    assert normalize_generator(-omega) == omega
    with pytest.raises(ValueError):
        jacobi_symbol_mod_p(QuadInt.sqrt_minus_p(7))


# ---------------------------------------------------------
# Idéaux
# ---------------------------------------------------------
def test_ideals_of_norm_small_cases():
    assert len(ideals_of_norm(7, 2)) == 2
    assert ideals_of_norm(7, 3) == []
    assert ideals_of_norm(7, 9) == [Ideal(7, 3, 1, 0)]
    assert ideals_of_norm(7, 7) == []
    assert len(ideals_of_norm(7, 7, coprime=False)) == 1
    with pytest.raises(ValueError):
        ideals_of_norm(7, 0)


@pytest.mark.parametrize("p", [7, 23, 47])
def test_conjugate_times_ideal_is_norm(p):
    for n in range(2, 40):
        for x in ideals_of_norm(p, n):
            if x.is_primitive():
                assert ideal_mul(x, x.conjugate()) == Ideal(p, n, 1, 0)
            assert x.conjugate().conjugate() == x


def test_principal_ideal_roundtrip():
    p = 23
    for a in (QuadInt(2, 1, p), QuadInt(5, -3, p), QuadInt(7, 0, p)):
        x = principal_ideal(a)
        assert x.norm == a.norm()
        gen = is_principal(x)
        assert gen is not None
        assert principal_ideal(gen) == x


def test_ideal_mul_multiplies_norms():
    p = 23
    xs = [x for n in (3, 4, 6, 8) for x in ideals_of_norm(p, n)]
    for x in xs:
        for y in xs:
            assert ideal_mul(x, y).norm == x.norm * y.norm


# ---------------------------------------------------------
# Groupe des classes
# ---------------------------------------------------------
@pytest.mark.parametrize("p, h", [(7, 1), (11, 1), (19, 1), (23, 3), (31, 3), (47, 5), (71, 7)])
def test_class_number(p, h):
    assert len(reduced_forms(p)) == h
    assert make_field(p).h == h


def test_field_context_p23(field23):
    ctx = field23
    assert ctx.class_reps[0] == Ideal.unit(23)
    assert all(rep.norm == 3 for rep in ctx.class_reps[1:])
    assert ctx.generator_class() == 1
    assert ctx.class_order(1) == 3
    assert ctx.compose(1, 2) == 0
    for i, rep in enumerate(ctx.class_reps):
        inv = ctx.inverse_class(i)
        assert ctx.class_reps[inv] == rep.conjugate()
    assert is_principal(ideal_power(ctx.class_reps[1], 3)) is not None
    assert is_principal(ctx.class_reps[1]) is None


def test_factor_against_representatives(field23, rng):
    ctx = field23
    for x in sample_ideals(ctx, rng, 25):
        k, beta, den = ctx.factor(x)
        lhs = ideal_mul(principal_ideal(beta), ctx.class_reps[k])
        rhs = ideal_mul(principal_ideal(QuadInt(den, 0, ctx.p)), x)
        assert lhs == rhs
        assert k == ctx.class_of(x)


def test_other_representatives_keep_pairing():
    ctx = make_field(23, rep_rank=1)
    assert ctx.h == 3
    assert ctx.class_reps[1].norm != make_field(23).class_reps[1].norm
    for i, rep in enumerate(ctx.class_reps):
        assert ctx.class_reps[ctx.inverse_class(i)] == rep.conjugate()


def test_sample_ideals_are_coprime(field11, rng):
    xs = sample_ideals(field11, rng, 30)
    assert len(xs) == 30
    assert all(x.is_coprime_to_p() and x.norm <= 200 for x in xs)


@pytest.mark.parametrize("p", [2, 3, 5, 9, 13, 15])
def test_make_field_rejects_bad_primes(p):
    with pytest.raises(ValueError):
        make_field(p)


@pytest.mark.parametrize("p, message", [(9, "not prime"), (3, "> 3"), (13, "mod 4"), (7.0, "not prime")])
def test_check_prime_messages(p, message):
    with pytest.raises(ValueError, match=message):
        check_prime(p)


@pytest.mark.parametrize("p", [7, 11, 163])
def test_check_prime_accepts(p):
    assert check_prime(p) is None
