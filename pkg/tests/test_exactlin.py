from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scheme_algebra.errors import DomainError, ShapeError, SingularityError
from scheme_algebra.exactlin import (
    KRON_PRODUCT,
    KRON_SUM,
    KronSumOperator,
    Matrix,
    SpanAccumulator,
    commutator,
    echelon_basis,
    format_matrix,
    format_rational,
    hstack,
    inverse,
    is_invertible,
    kernel_basis,
    kron,
    kron_all,
    kron_apply,
    linear_combination,
    mat_mul,
    normalize_leading,
    parse_matrix,
    parse_rational,
    rank,
    rank_of_vectors,
    reduced_row_echelon,
    solve,
    to_fraction,
)

small_fractions = st.fractions(min_value=-4, max_value=4, max_denominator=5)


@st.composite
def matrices(draw, rows=None, cols=None, max_size=4):
    r = rows if rows is not None else draw(st.integers(1, max_size))
    c = cols if cols is not None else draw(st.integers(1, max_size))
    entries = draw(st.lists(small_fractions, min_size=r * c, max_size=r * c))
    return Matrix(r, c, tuple(entries))


@st.composite
def square_pairs(draw, max_size=4):
    n = draw(st.integers(1, max_size))
    return draw(matrices(n, n)), draw(matrices(n, n))


# -- scalars -------------------------------------------------------------------

@pytest.mark.parametrize("text, expected", [
    ("1/3", Fraction(1, 3)),
    ("-2/4", Fraction(-1, 2)),
    ("7", Fraction(7)),
    (" +5 / 10 ", Fraction(1, 2)),
    ("0/9", Fraction(0)),
])
def test_parse_rational(text, expected):
    assert parse_rational(text) == expected


@pytest.mark.parametrize("text", ["1/0", "0.5", "abc", "1/-3", ""])
def test_parse_rational_rejects(text):
    with pytest.raises(DomainError):
        parse_rational(text)


def test_to_fraction_refuses_floats_and_bools():
    with pytest.raises(TypeError):
        to_fraction(0.5)
    with pytest.raises(TypeError):
        to_fraction(True)
    assert to_fraction("3/6") == Fraction(1, 2)
    assert to_fraction(4) == Fraction(4)


def test_format_rational():
    assert format_rational(Fraction(-3, 6)) == "-1/2"
    assert format_rational(Fraction(8, 4)) == "2"


def test_normalize_leading():
    v = (Fraction(0), Fraction(3), Fraction(-6))
    assert normalize_leading(v) == (0, 1, -2)
    assert normalize_leading((Fraction(0), Fraction(0))) == (0, 0)


def test_linear_combination_shape_errors():
    with pytest.raises(ShapeError):
        linear_combination([Fraction(1)], [])
    with pytest.raises(ShapeError):
        linear_combination([], [])
    assert linear_combination([Fraction(2), Fraction(-1)], [(1, 1), (0, 3)]) == (2, -1)


# -- matrices --------------------------------------------------------------------

def test_from_columns_puts_images_in_columns():
    m = Matrix.from_columns([(1, 2), (3, 4), (5, 6)])
    assert m.shape == (2, 3)
    assert m.row(0) == (1, 3, 5)
    assert m.column(2) == (5, 6)
    assert m.apply((0, 0, 1)) == (5, 6)


def test_bad_shapes():
    with pytest.raises(ShapeError):
        Matrix(2, 2, (Fraction(1),))
    with pytest.raises(ShapeError):
        Matrix.from_rows([[1, 2], [3]])
    with pytest.raises(ShapeError):
        mat_mul(Matrix.zeros(2, 3), Matrix.zeros(2, 3))
    with pytest.raises(ShapeError):
        Matrix.identity(2) + Matrix.identity(3)
    with pytest.raises(ShapeError):
        Matrix.zeros(2, 3).trace()


@given(matrices(), st.data())
def test_mat_mul_associative(a, data):
    b = data.draw(matrices(rows=a.cols))
    c = data.draw(matrices(rows=b.cols))
    assert mat_mul(mat_mul(a, b), c) == mat_mul(a, mat_mul(b, c))


@given(matrices())
def test_identity_is_neutral(m):
    assert mat_mul(Matrix.identity(m.rows), m) == m
    assert mat_mul(m, Matrix.identity(m.cols)) == m
    assert m @ Matrix.identity(m.cols) == m


@given(matrices(), st.data())
def test_apply_matches_product_with_column(m, data):
    v = tuple(data.draw(st.lists(small_fractions, min_size=m.cols, max_size=m.cols)))
    assert m.apply(v) == mat_mul(m, Matrix.from_columns([v])).column(0)


@given(square_pairs())
def test_commutator_is_antisymmetric(pair):
    a, b = pair
    assert commutator(a, b) == -commutator(b, a)
    assert commutator(a, a).is_zero()


@given(matrices())
def test_transpose_reverses_products(m):
    n = Matrix.identity(m.rows).scale(Fraction(2, 3)) + Matrix.all_ones(m.rows)
    assert mat_mul(n, m).transpose() == mat_mul(m.transpose(), n.transpose())


def test_shift_and_scale():
    m = Matrix.from_rows([[1, 2], [3, 4]])
    assert m.shift(Fraction(1, 2)) == Matrix.from_rows([["3/2", 2], [3, "9/2"]])
    assert (2 * m) == m + m
    assert m.scale(0).is_zero()
    assert m.trace() == 5


def test_hadamard():
    a = Matrix.from_rows([[1, 2], [0, "1/2"]])
    b = Matrix.from_rows([[3, 0], [5, 4]])
    assert a.hadamard(b) == Matrix.from_rows([[3, 0], [0, 2]])


# -- kernels, ranks and solves ------------------------------------------------------

@given(matrices(max_size=5))
@settings(max_examples=60)
def test_kernel_basis_spans_the_null_space(m):
    basis = kernel_basis(m)
    assert len(basis) == m.cols - rank(m)
    for v in basis:
        assert not any(m.apply(v))
        assert next(x for x in v if x) == 1
    assert rank_of_vectors(basis) == len(basis)


def test_kernel_of_a_known_matrix():
    m = Matrix.from_rows([[1, 2, 3], [2, 4, 6]])
    assert rank(m) == 1
    assert kernel_basis(m) == [(1, Fraction(-1, 2), 0), (1, 0, Fraction(-1, 3))]


def test_rank_with_skipped_columns():
    m = Matrix.from_rows([[0, 1, 2], [0, 2, 4], [0, 0, 1]])
    assert rank(m) == 2
    assert kernel_basis(m) == [(1, 0, 0)]


@given(matrices(max_size=4))
@settings(max_examples=60)
def test_rank_is_transpose_invariant(m):
    assert rank(m) == rank(m.transpose())


@given(st.integers(1, 4).flatmap(lambda n: matrices(n, n)))
@settings(max_examples=60)
def test_inverse_round_trip(m):
    if not is_invertible(m):
        with pytest.raises(SingularityError):
            inverse(m)
        return
    inv = inverse(m)
    assert mat_mul(m, inv) == Matrix.identity(m.rows)
    assert mat_mul(inv, m) == Matrix.identity(m.rows)


@given(matrices(max_size=4), st.data())
@settings(max_examples=60)
def test_solve_consistent_systems(m, data):
    x = data.draw(matrices(rows=m.cols, cols=2))
    b = mat_mul(m, x)
    found = solve(m, b)
    assert found is not None
    assert mat_mul(m, found) == b


def test_solve_inconsistent_system_returns_none():
    m = Matrix.from_rows([[1, 1], [2, 2]])
    b = Matrix.from_rows([[1], [3]])
    assert solve(m, b) is None


def test_solve_sets_free_unknowns_to_zero():
    m = Matrix.from_rows([[1, 1]])
    assert solve(m, Matrix.from_rows([[4]])) == Matrix.from_rows([[4], [0]])


def test_singular_inverse():
    with pytest.raises(SingularityError):
        inverse(Matrix.from_rows([[1, 2], [2, 4]]))


def test_reduced_row_echelon():
    reduced, pivots = reduced_row_echelon(Matrix.from_rows([[2, 4, 2], [1, 3, 0], [3, 7, 2]]))
    assert pivots == [0, 1]
    assert reduced == Matrix.from_rows([[1, 0, 3], [0, 1, -1]])


def test_echelon_basis_is_canonical():
    a = echelon_basis([(1, 1, 0), (0, 1, 1)])
    b = echelon_basis([(1, 2, 1), (2, 3, 1)])
    assert a == b


def test_span_accumulator():
    span = SpanAccumulator(3)
    assert span.add((1, 2, 3))
    assert not span.add((2, 4, 6))
    assert span.add((0, 1, Fraction(1, 2)))
    assert span.contains((1, 3, Fraction(7, 2)))
    assert not span.contains((0, 0, 1))
    assert span.rank == 2
    with pytest.raises(ShapeError):
        span.add((1, 2))


def test_hstack():
    m = hstack(Matrix.identity(2), Matrix.all_ones(2, 1))
    assert m == Matrix.from_rows([[1, 0, 1], [0, 1, 1]])


# -- Kronecker products ----------------------------------------------------------------

def test_kron_leftmost_factor_varies_slowest():
    a = Matrix.from_rows([[1, 2], [3, 4]])
    b = Matrix.from_rows([[0, 1], [1, 0]])
    assert kron(a, b) == Matrix.from_rows([
        [0, 1, 0, 2],
        [1, 0, 2, 0],
        [0, 3, 0, 4],
        [3, 0, 4, 0],
    ])


@given(square_pairs(max_size=2), square_pairs(max_size=2))
@settings(max_examples=30)
def test_kron_mixed_product(ab, cd):
    a, c = ab
    b, d = cd
    assert mat_mul(kron(a, b), kron(c, d)) == kron(mat_mul(a, c), mat_mul(b, d))


@given(square_pairs(max_size=2), matrices(max_size=2), small_fractions)
@settings(max_examples=30)
def test_kron_is_bilinear(pair, c, scalar):
    a, b = pair
    assert kron(a + b, c) == kron(a, c) + kron(b, c)
    assert kron(a.scale(scalar), c) == kron(a, c.scale(scalar))


@given(st.lists(matrices(max_size=3), min_size=1, max_size=3), st.data())
@settings(max_examples=30, deadline=None)
def test_kron_product_operator_agrees_with_kron_all(factors, data):
    op = KronSumOperator(tuple(factors), KRON_PRODUCT)
    v = tuple(data.draw(st.lists(small_fractions, min_size=op.shape[1], max_size=op.shape[1])))
    assert kron_apply(op, v) == kron_all(factors).apply(v)


def test_kron_all_requires_factors():
    with pytest.raises(ShapeError):
        kron_all([])


@pytest.mark.parametrize("mode", [KRON_SUM, KRON_PRODUCT])
def test_kron_operator_matches_materialized_matrix(mode):
    factors = (
        Matrix.from_rows([[0, 1, 1], [1, 0, 1], [1, 1, 0]]),
        Matrix.from_rows([["1/2", 0, 2], [1, -1, 0], [0, "1/3", 1]]),
        Matrix.from_rows([[2, 1, 0], [0, 0, 1], [1, 0, 0]]),
    )
    op = KronSumOperator(factors, mode)
    dense = op.materialize()
    assert dense.shape == op.shape == (27, 27)
    v = tuple(Fraction(i % 5 - 2, 1 + i % 3) for i in range(27))
    assert kron_apply(op, v) == dense.apply(v)


def test_kron_product_with_rectangular_factors():
    factors = (Matrix.from_rows([[1, 2, 3]]), Matrix.from_rows([[1], [-1]]))
    op = KronSumOperator(factors, KRON_PRODUCT)
    assert op.shape == (2, 3)
    v = (Fraction(1), Fraction(1, 2), Fraction(-1))
    assert kron_apply(op, v) == op.materialize().apply(v)


def test_kron_sum_needs_square_factors():
    with pytest.raises(ShapeError):
        KronSumOperator((Matrix.zeros(2, 3),), KRON_SUM)
    with pytest.raises(DomainError):
        KronSumOperator((Matrix.identity(2),), "kron-diff")


def test_kron_operator_falls_back_to_big_integers():
    big = 2 ** 40
    factor = Matrix.from_rows([[big, big], [big, big]])
    op = KronSumOperator((factor, factor), KRON_PRODUCT)
    den, values = op.apply_integral(np.array([big, big, big, big], dtype=np.int64))
    assert den == 1
    assert [int(x) for x in values] == [4 * big ** 3] * 4


# -- text format ---------------------------------------------------------------------

def test_format_matrix_lists_nonzero_entries():
    m = Matrix.from_rows([[0, "1/2"], [-3, 0]])
    assert format_matrix(m) == "2 2\n0 1 1/2\n1 0 -3\n"
    assert parse_matrix(format_matrix(m)) == m


def test_parse_matrix_rejects_bad_text():
    with pytest.raises(DomainError):
        parse_matrix("")
    with pytest.raises(DomainError):
        parse_matrix("2 2\n5 0 1\n")
    with pytest.raises(DomainError):
        parse_matrix("2 2\n0 0\n")
