import numpy as np
import pytest

from cdg_workbench.cdg_algebra import (
    CATALOG,
    AlgebraData,
    catalog_algebra,
    curvature_over_t,
    ground_ring,
    opposite,
    random_algebra,
    truncate,
    validate_algebra,
    witness_curvature_over_t,
)
from cdg_workbench.errors import (
    CurvatureNotDivisible,
    IndexOutOfRange,
    LeibnizFailure,
    ParseError,
    UnitFailure,
    WrongDegree,
)
from cdg_workbench.graded_core import Z, Z2


@pytest.mark.parametrize("name", CATALOG)
@pytest.mark.parametrize("order", [0, 1, 2])
def test_catalog_algebras_validate(fld, name, order):
    a = catalog_algebra(name, fld, order)
    assert validate_algebra(a) is a
    assert a.order == (max(order, 1) if name == "graded-field" else order)


def test_unknown_catalog_name(fld):
    with pytest.raises(ParseError):
        catalog_algebra("octonions", fld, 1)


def test_ground_ring_is_flat(fld):
    r = ground_ring(fld, 2)
    assert r.name == "R_2"
    assert r.dim == 1
    assert not r.is_curved
    t = r.basis_vector("1", 1)
    assert fld.equal(r.multiply(t, t), r.basis_vector("1", 2))
    assert fld.is_zero(r.multiply(t, r.times_t(t)))


def test_triangular_products_and_differential(triangular):
    a = triangular
    e12, e23 = a.basis_vector("e12"), a.basis_vector("e23")
    assert fld_equal(a, a.multiply(e12, e23), a.basis_vector("e13"))
    assert fld_equal(a, a.multiply(e23, e12), a.zero())
    assert fld_equal(a, a.apply_d(a.basis_vector("e11")), a.element([(1, -1, "e12")]))
    assert a.vector_degree(a.basis_vector("e13")) == 2


def fld_equal(a, x, y):
    return a.field.equal(x, y)


def test_triangular_curvature_needs_order_two(fld):
    assert not catalog_algebra("triangular", fld, 1).is_curved
    a = catalog_algebra("triangular", fld, 2)
    assert a.is_curved
    assert fld.equal(a.curvature, a.element([(2, 1, "e13")]))


def test_opposite_is_an_involution(fld):
    a = catalog_algebra("triangular", fld, 2)
    op = validate_algebra(opposite(a))
    assert op.name == "upper-triangular^op"
    assert fld.equal(op.curvature, fld.normalize(-a.curvature))
    assert opposite(op) == a


def test_truncate_drops_high_powers(fld):
    a = catalog_algebra("triangular", fld, 2)
    low = validate_algebra(truncate(a, 1))
    assert low.order == 1
    assert not low.is_curved
    with pytest.raises(IndexOutOfRange):
        truncate(a, 3)


def test_curvature_over_t_and_witness(gf, fld):
    assert curvature_over_t(gf).terms == ((0, 1, "1"),)
    w = witness_curvature_over_t(gf, [(0, 3, "1")])
    assert w[0, 0] == 1
    assert w[1, 0] == 3


def test_witness_rejects_wrong_degree(fld):
    a = catalog_algebra("triangular", fld, 2)
    with pytest.raises(WrongDegree):
        witness_curvature_over_t(a, [(0, 1, "e12")])


def test_missing_unit_products(fld):
    data = AlgebraData(
        fld, Z, 1, [("1", 0), ("x", 0)], "1", {("1", "1"): [(0, 1, "1")]}
    )
    with pytest.raises(UnitFailure):
        validate_algebra(data)


def test_curvature_must_be_divisible_by_t(fld):
    data = AlgebraData(
        fld, Z2, 1, [("1", 0)], "1", {("1", "1"): [(0, 1, "1")]}, curvature=[(0, 1, "1")]
    )
    with pytest.raises(CurvatureNotDivisible):
        validate_algebra(data)


def test_leibniz_failure(fld):
    data = AlgebraData(
        fld,
        Z,
        0,
        [("1", 0), ("y", 1)],
        "1",
        {("1", "1"): [(0, 1, "1")], ("1", "y"): [(0, 1, "y")], ("y", "1"): [(0, 1, "y")]},
        diff={"1": [(0, 1, "y")]},
    )
    with pytest.raises(LeibnizFailure):
        validate_algebra(data)


def test_unknown_basis_name(fld):
    data = AlgebraData(fld, Z, 1, [("1", 0)], "1", {("1", "z"): [(0, 1, "1")]})
    with pytest.raises(ParseError):
        validate_algebra(data)


@pytest.mark.parametrize("seed", range(6))
def test_random_algebra_is_reproducible(fld, seed):
    first = random_algebra(np.random.default_rng(seed), fld, 2)
    second = random_algebra(np.random.default_rng(seed), fld, 2)
    assert first == second
    assert first.grading in (Z, Z2)
