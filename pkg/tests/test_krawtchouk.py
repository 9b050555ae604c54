from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scheme_algebra.errors import DomainError, RelationError, ShapeError, SingularityError
from scheme_algebra.exactlin import Matrix, is_invertible, mat_mul
from scheme_algebra.krawtchouk import (
    RepTriple,
    Sl2Triple,
    counit_triple,
    hopf_generator_checks,
    intertwiner,
    is_irreducible_tridiagonal,
    k_module,
    k_module_twisted,
    leonard_pair_check,
    one_dimensional_module,
    relation_check,
    sign_flip,
    sl2_relation_check,
    swap_twist,
    tensor_power_sl2,
    tensor_rep,
    tensor_sl2,
    trace_identity_holds,
    u_sl2_module,
    zeta_apply,
    zeta_inverse_apply,
)

OMEGAS = [Fraction(0), Fraction(1, 2), Fraction(-1, 2), Fraction(1), Fraction(-1)] + [
    1 - Fraction(2, q) for q in range(3, 8)
]
INVERTIBLE_OMEGAS = [w for w in OMEGAS if w * w != 1]

omegas = st.fractions(min_value=-3, max_value=3, max_denominator=9)


def test_u_sl2_module_small():
    t = u_sl2_module(2)
    assert t.H == Matrix.diagonal([2, 0, -2])
    assert t.E == Matrix.from_rows([[0, 2, 0], [0, 0, 1], [0, 0, 0]])
    assert t.F == Matrix.from_rows([[0, 0, 0], [1, 0, 0], [0, 2, 0]])
    assert t.n == 2
    with pytest.raises(DomainError):
        u_sl2_module(-1)


def test_sl2_relations_on_tensor_products():
    t = tensor_sl2(u_sl2_module(2), u_sl2_module(3))
    assert t.dim == 12
    assert sl2_relation_check(t).passed
    assert tensor_power_sl2(u_sl2_module(1), 3).dim == 8
    with pytest.raises(DomainError):
        tensor_power_sl2(u_sl2_module(1), 0)


def test_k_module_explicit_entries():
    r = k_module(1, "1/3")
    assert r.A == Matrix.from_rows([["-1/6", "2/3"], ["1/3", "1/6"]])
    assert r.B == Matrix.diagonal(["1/2", "-1/2"])
    assert r.C == mat_mul(r.A, r.B) - mat_mul(r.B, r.A)
    assert r.omega == Fraction(1, 3)


@pytest.mark.parametrize("omega", OMEGAS, ids=str)
def test_relations_hold_for_every_label(omega):
    for n in range(11):
        assert relation_check(k_module(n, omega)).passed
        assert relation_check(k_module_twisted(n, omega)).passed


@given(st.integers(0, 6), omegas)
@settings(max_examples=40, deadline=None)
def test_relations_hold_for_arbitrary_omega(n, omega):
    report = relation_check(k_module(n, omega))
    assert report.passed, report.first_failure
    assert report.checked == 5


@pytest.mark.parametrize("omega", INVERTIBLE_OMEGAS, ids=str)
def test_zeta_round_trip(omega):
    for n in range(11):
        t = u_sl2_module(n)
        image = zeta_apply(t, omega)
        assert image == k_module(n, omega)
        back = zeta_inverse_apply(image)
        assert (back.E, back.F, back.H) == (t.E, t.F, t.H)


@pytest.mark.parametrize("omega", [Fraction(1), Fraction(-1)])
def test_zeta_inverse_needs_omega_squared_not_one(omega):
    with pytest.raises(SingularityError):
        zeta_inverse_apply(k_module(2, omega))


def test_zeta_rejects_non_modules():
    bogus = Sl2Triple(E=Matrix.identity(2), F=Matrix.zeros(2), H=Matrix.zeros(2))
    with pytest.raises(RelationError):
        zeta_apply(bogus, Fraction(1, 3))


def test_swap_twist_gives_the_twisted_module():
    for n in range(6):
        assert swap_twist(k_module(n, Fraction(1, 3))) == k_module_twisted(n, Fraction(1, 3))


def test_sign_flip_changes_omega():
    r = sign_flip(k_module(3, Fraction(2, 5)))
    assert r.omega == Fraction(-2, 5)
    assert relation_check(r).passed


def test_tensor_rep():
    omega = Fraction(1, 3)
    r = tensor_rep(k_module(1, omega), k_module(2, omega))
    assert r.dim == 6
    assert relation_check(r).passed
    with pytest.raises(DomainError):
        tensor_rep(k_module(1, omega), k_module(1, Fraction(1, 2)))


def test_one_dimensional_modules():
    assert relation_check(counit_triple(Fraction(1, 3))).passed
    for omega in (Fraction(1), Fraction(-1)):
        r = one_dimensional_module(Fraction(5, 2), omega)
        assert relation_check(r).passed
        assert trace_identity_holds(r)
    assert relation_check(one_dimensional_module(0, Fraction(1, 2))).passed
    with pytest.raises(DomainError):
        one_dimensional_module(1, Fraction(1, 2))


def test_trace_identity_fails_for_a_non_module():
    r = RepTriple.from_generators(Matrix.diagonal([1]), Matrix.diagonal([1]), Fraction(1, 3))
    assert not trace_identity_holds(r)
    assert not relation_check(r).passed


@pytest.mark.parametrize("n", [0, 1, 2])
def test_hopf_structure(n):
    report = hopf_generator_checks(k_module(n, Fraction(-1, 3)))
    assert report.passed, report.first_failure


@pytest.mark.parametrize("n", range(1, 6))
def test_leonard_pair(n):
    r = k_module(n, Fraction(1, 3))
    assert is_irreducible_tridiagonal(r.A)
    report = leonard_pair_check(r)
    assert report.passed, report.first_failure


def test_leonard_pair_check_needs_omega_squared_not_one():
    with pytest.raises(DomainError):
        leonard_pair_check(k_module(2, Fraction(1)))


def test_intertwiner():
    omega = Fraction(1, 3)
    x = intertwiner(k_module_twisted(3, omega), k_module(3, omega))
    assert x is not None and is_invertible(x)
    assert intertwiner(k_module(2, omega), k_module(2, omega)) is not None
    assert intertwiner(k_module(1, omega), tensor_rep(k_module(0, omega), k_module(1, Fraction(1, 3)))) is not None
    with pytest.raises(ShapeError):
        intertwiner(k_module(2, omega), k_module(3, omega))


def test_intertwiner_none_between_non_isomorphic_modules():
    omega = Fraction(1, 3)
    trivial_pair = RepTriple.from_generators(Matrix.zeros(2), Matrix.zeros(2), omega)
    assert intertwiner(k_module(1, omega), trivial_pair) is None
    assert intertwiner(trivial_pair, k_module(1, omega)) is None


@pytest.mark.parametrize("labels", list(product(range(4), repeat=3)), ids=lambda t: "-".join(map(str, t)))
def test_tensor_rep_is_associative(labels):
    omega = Fraction(1, 3)
    r1, r2, r3 = (k_module(n, omega) for n in labels)
    assert tensor_rep(tensor_rep(r1, r2), r3) == tensor_rep(r1, tensor_rep(r2, r3))


def test_triple_tensor_product_satisfies_relations():
    omega = Fraction(1, 3)
    r = tensor_rep(tensor_rep(k_module(1, omega), k_module(2, omega)), k_module(3, omega))
    assert r.dim == 24
    assert relation_check(r).passed
