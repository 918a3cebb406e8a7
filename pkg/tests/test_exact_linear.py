from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cdg_workbench.errors import AmbientMismatch, NotASubspace, ParseError
from cdg_workbench.exact_linear import (
    Matrix,
    PrimeField,
    RationalField,
    Subquotient,
    Subspace,
    kernel_image,
    kernel_rows,
    parse_field,
    quotient_basis,
    rank,
    reduce,
    rref,
    solve,
    sum_intersection,
)

small_matrices = st.integers(1, 4).flatmap(
    lambda rows: st.integers(1, 4).flatmap(
        lambda cols: st.lists(
            st.lists(st.integers(-3, 3), min_size=cols, max_size=cols),
            min_size=rows,
            max_size=rows,
        )
    )
)


# --- Fields ---


def test_parse_field_variants():
    assert parse_field("q") == RationalField()
    assert parse_field("FP:7") == PrimeField(7)
    with pytest.raises(ParseError):
        parse_field("fp:8")
    with pytest.raises(ParseError):
        parse_field("reals")


def test_prime_field_inverse_and_fraction():
    f = PrimeField(7)
    assert f.inv(3) == 5
    assert f.element(Fraction(1, 2)) == 4
    with pytest.raises(ZeroDivisionError):
        f.inv(0)


def test_coefficient_encoding_is_symmetric(fld, qq):
    assert fld.encode(fld.element(-1)) == [-1]
    assert fld.decode([-1]) == fld.element(-1)
    assert qq.encode(Fraction(-3, 4)) == [-3, 4]
    assert qq.decode([6, 8]) == Fraction(3, 4)
    with pytest.raises(ParseError):
        qq.decode([1, 0])


# --- Row reduction ---


def test_rref_pivots_and_rank(qq):
    m = qq.array([[1, 2, 3], [2, 4, 6], [0, 1, 1]])
    res = rref(qq, m)
    assert res.pivots == (0, 1)
    assert res.rank == 2
    assert rank(qq, m) == 2


def test_kernel_rows_annihilate(fld):
    m = fld.array([[1, 1, 0], [0, 1, 1]])
    k = kernel_rows(fld, m)
    assert k.shape == (1, 3)
    assert fld.is_zero(fld.matmul(m, k.T))


@settings(max_examples=40, deadline=None)
@given(small_matrices)
def test_rank_nullity(rows):
    f = PrimeField(101)
    m = f.array(rows)
    assert rank(f, m) + kernel_rows(f, m).shape[0] == m.shape[1]


def test_solve_consistent_and_inconsistent(qq):
    a = qq.array([[1, 0], [0, 1], [1, 1]])
    x = solve(qq, a, qq.array([[2], [3], [5]]))
    assert list(x[:, 0]) == [2, 3]
    with pytest.raises(NotASubspace):
        solve(qq, a, qq.array([[1], [1], [0]]))


# --- Subspaces ---


def test_subspace_equality_is_basis_independent(fld):
    u = Subspace.span(fld, 3, fld.array([[1, 1, 0], [0, 1, 0]]))
    v = Subspace.span(fld, 3, fld.array([[1, 0, 0], [0, 2, 0]]))
    assert u == v
    assert u.dim == 2
    assert u.contains(fld.array([[5, 7, 0]]))
    assert not u.contains(fld.array([[0, 0, 1]]))


def test_sum_and_intersection(qq):
    u = Subspace.span(qq, 3, qq.array([[1, 0, 0], [0, 1, 0]]))
    v = Subspace.span(qq, 3, qq.array([[0, 1, 0], [0, 0, 1]]))
    total, inter = sum_intersection(u, v)
    assert total.dim == 3
    assert inter == Subspace.span(qq, 3, qq.array([[0, 1, 0]]))


def test_ambient_mismatch(qq):
    with pytest.raises(AmbientMismatch):
        sum_intersection(Subspace.full(qq, 2), Subspace.full(qq, 3))


def test_quotient_requires_containment(qq):
    u = Subspace.span(qq, 2, qq.array([[1, 0]]))
    v = Subspace.span(qq, 2, qq.array([[0, 1]]))
    with pytest.raises(NotASubspace):
        quotient_basis(u, v)


def test_image_and_preimage(fld):
    m = fld.array([[0, 1], [0, 0]])
    assert Subspace.image(fld, m) == Subspace.span(fld, 2, fld.array([[1, 0]]))
    line = Subspace.span(fld, 2, fld.array([[1, 0]]))
    assert line.preimage_under(m) == Subspace.full(fld, 2)
    assert Subspace.zero(fld, 2).preimage_under(m) == Subspace.kernel(fld, m)


# --- Subquotients ---


def test_subquotient_coordinates_and_induced(qq):
    upper = Subspace.full(qq, 3)
    lower = Subspace.span(qq, 3, qq.array([[0, 0, 1]]))
    sq = Subquotient.of(upper, lower)
    assert sq.dim == 2
    coords = sq.coordinates(qq.array([[1, 2, 9]]))
    assert qq.equal(sq.lift(coords) - qq.array([[1, 2, 9]]), qq.array([[0, 0, -9]]))
    swap = qq.array([[0, 1, 0], [1, 0, 0], [0, 0, 1]])
    induced = sq.induced(swap, sq)
    assert qq.equal(qq.matmul(induced, induced), qq.eye(2))


def test_sparse_matrix_round_trip(fld):
    dense = fld.array([[0, 3], [1, 0]])
    m = Matrix.from_dense(fld, dense)
    assert len(m.entries) == 2
    assert fld.equal(m.dense(), dense)
    assert Matrix.from_triples(fld, 2, 2, [(0, 1, 1), (0, 1, 2), (1, 0, 1)]) == m
    with pytest.raises(ValueError):
        Matrix(fld, 1, 1, ((0, 0, 0),))


def test_prime_field_matmul_wide_values():
    f = PrimeField(2147483647)
    a = np.full((2, 2), 2147483646, dtype=np.int64)
    assert f.equal(f.matmul(a, a), f.array([[2, 2], [2, 2]]))


def test_sparse_reduce_is_idempotent(fld):
    m = Matrix.from_dense(fld, fld.array([[0, 2, 4], [0, 1, 2], [3, 0, 1]]))
    echelon, pivots, r = reduce(m)
    assert pivots == (0, 1)
    assert r == 2
    again, again_pivots, _ = reduce(echelon)
    assert again == echelon
    assert again_pivots == pivots


def test_sparse_kernel_and_image(fld):
    dense = fld.array([[1, 1, 0], [0, 0, 0]])
    kernel, image = kernel_image(Matrix.from_dense(fld, dense))
    assert kernel.dim == 2
    assert image.dim == 1
    assert fld.is_zero(fld.matmul(dense, kernel.basis.T))
