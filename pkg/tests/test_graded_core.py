import numpy as np
import pytest

from cdg_workbench.errors import GradingMismatch, NotAComplex, NotClosed, WrongDegree
from cdg_workbench.graded_core import (
    Z,
    Z2,
    Complex,
    GradedMap,
    GradedSpace,
    cone,
    direct_sum,
    dual,
    is_quasi_iso,
    parse_grading,
    shift,
    short_exact,
    triangle_rank_identity,
)


@pytest.fixture
def interval(fld):
    """0 → k·a --1--> k·b → 0 in degrees 0 and 1."""
    space = GradedSpace(Z, (0, 1), ("a", "b"))
    return Complex(fld, space, fld.array([[0, 0], [1, 0]]))


@pytest.fixture
def point(fld):
    return Complex(fld, GradedSpace(Z, (0,), ("p",)), fld.zeros((1, 1)))


def test_parse_grading():
    assert parse_grading("z") == Z
    assert parse_grading("Z/2Z") == Z2
    with pytest.raises(GradingMismatch):
        parse_grading("Z/3")


def test_periodic_degrees_are_reduced():
    space = GradedSpace(Z2, (0, 3, -1), ("x", "y", "z"))
    assert space.degrees == (0, 1, 1)
    assert space.dims() == {0: 1, 1: 2}


def test_space_shift_and_dual():
    space = GradedSpace(Z, (0, 2), ("x", "y"))
    assert space.shift(1).degrees == (-1, 1)
    assert space.dual().degrees == (0, -2)
    assert space.dual().names == ("x^*", "y^*")
    assert space.dual().dual().names == space.names


def test_graded_map_rejects_inhomogeneous_entries(fld):
    space = GradedSpace(Z, (0, 1), ("a", "b"))
    with pytest.raises(WrongDegree):
        GradedMap(fld, space, space, 0, fld.array([[0, 0], [1, 0]]))


def test_complex_requires_square_zero(fld):
    space = GradedSpace(Z2, (0, 1), ("a", "b"))
    with pytest.raises(NotAComplex):
        Complex(fld, space, fld.array([[0, 1], [1, 0]]))


def test_interval_is_acyclic(interval, point):
    assert interval.is_acyclic()
    assert point.report.dims == {0: 1}
    assert point.report.as_dict() == {"0": 1}


def test_shift_moves_cohomology(point):
    shifted = shift(point, 2)
    assert shifted.report.dims == {-2: 1}


def test_cone_of_identity_is_acyclic(fld, point):
    c = cone(point, point, fld.eye(1))
    assert c.dim == 2
    assert c.is_acyclic()


def test_cone_requires_chain_map(fld, interval, point):
    f = fld.array([[1], [0]])
    with pytest.raises(NotClosed):
        cone(point, interval, f)


def test_zero_map_triangle(fld, point):
    f = fld.zeros((1, 1))
    check = triangle_rank_identity(point, point, f)
    assert check.ok
    assert cone(point, point, f).report.dims == {-1: 1, 0: 1}


def test_quasi_iso_to_zero_from_acyclic(fld, interval):
    zero = Complex.zero(fld, Z)
    assert is_quasi_iso(interval, zero, fld.zeros((0, 2)))


def test_dual_of_sum_keeps_total_cohomology(interval, point):
    total = direct_sum([interval, point])
    assert dual(total).report.total == total.report.total == 1
    assert dual(point).report.dims == {0: 1}


def test_short_exact_sequence_of_spaces(fld):
    a = GradedSpace(Z, (0,), ("a",))
    b = GradedSpace(Z, (0, 0), ("b0", "b1"))
    c = GradedSpace(Z, (0,), ("c",))
    f = GradedMap(fld, a, b, 0, fld.array([[1], [0]]))
    g = GradedMap(fld, b, c, 0, fld.array([[0, 1]]))
    assert short_exact(fld, f, g).exact
    bad = GradedMap(fld, b, c, 0, fld.array([[1, 1]]))
    report = short_exact(fld, f, bad)
    assert not report.exact
    assert report.failing() == [1]


def test_cohomology_representatives_are_cycles(fld):
    space = GradedSpace(Z, (0, 0, 1), ("x", "y", "z"))
    c = Complex(fld, space, fld.array([[0, 0, 0], [0, 0, 0], [1, 1, 0]]))
    assert c.report.dims == {0: 1}
    (rep,) = c.report.representatives[0]
    assert fld.is_zero(fld.matmul(c.differential, np.array(rep, dtype=np.int64)))
