"""Curved dg deformations A_n = A[t]/(t^{n+1}).

An algebra is stored as dense structure tensors over the basis of A:

* ``mult[s, c, a, b]``: coefficient of ``t^s e_c`` in ``e_a e_b``;
* ``diff[s, c, a]``: coefficient of ``t^s e_c`` in ``d(e_a)``;
* ``curvature[s, c]``: coefficient of ``t^s e_c`` in ``c``.

Elements of A_n are coefficient arrays of shape ``(n + 1, dim A)`` indexed by
``(t-power, basis index)``. ``t`` is central of degree 0, so all products and
differentials extend R_n-linearly without signs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .errors import (
    CurvatureNotClosed,
    CurvatureNotDivisible,
    DSquareMismatch,
    IndexOutOfRange,
    LeibnizFailure,
    NotAssociative,
    ParseError,
    UnitFailure,
    WrongDegree,
)
from .exact_linear import Field, solve
from .graded_core import Z, Z2, GradedSpace, GradingGroup
from .logger import get_logger

logger = get_logger(__name__)

Term = Tuple[int, Any, str]


@dataclass
class AlgebraData:
    """Unvalidated algebra description, as read from a document or a recipe."""

    field: Field
    grading: GradingGroup
    order: int
    basis: List[Tuple[str, int]]
    unit: str
    mult: Dict[Tuple[str, str], List[Term]]
    diff: Dict[str, List[Term]] = field(default_factory=dict)
    curvature: List[Term] = field(default_factory=list)
    name: str = ""


@dataclass(frozen=True)
class AlgebraElement:
    """Sparse element of A_n: sorted ``(t-power, coefficient, basis name)`` terms."""

    terms: Tuple[Term, ...]
    degree: Optional[int] = None

    @classmethod
    def from_vector(cls, algebra: "DeformedAlgebra", vec: np.ndarray) -> "AlgebraElement":
        terms = []
        for s in range(vec.shape[0]):
            for j in np.nonzero(vec[s] != 0)[0]:
                terms.append((s, algebra.field.element(vec[s, j]), algebra.names[int(j)]))
        degree = algebra.degrees[algebra.index(terms[0][2])] if terms else None
        return cls(tuple(terms), degree)

    def vector(self, algebra: "DeformedAlgebra") -> np.ndarray:
        return algebra.element(self.terms)

    @property
    def is_zero(self) -> bool:
        return not self.terms


@dataclass(frozen=True, eq=False)
class DeformedAlgebra:
    field: Field
    grading: GradingGroup
    order: int
    names: Tuple[str, ...]
    degrees: Tuple[int, ...]
    unit: str
    mult: np.ndarray
    diff: np.ndarray
    curvature: np.ndarray
    name: str = ""

    def __post_init__(self) -> None:
        for arr in (self.mult, self.diff, self.curvature):
            arr.setflags(write=False)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DeformedAlgebra):
            return NotImplemented
        fld = self.field
        return (
            fld == other.field
            and self.grading == other.grading
            and self.order == other.order
            and self.names == other.names
            and self.degrees == other.degrees
            and self.unit == other.unit
            and fld.equal(self.mult, other.mult)
            and fld.equal(self.diff, other.diff)
            and fld.equal(self.curvature, other.curvature)
        )

    def __hash__(self) -> int:
        return hash((self.field, self.grading, self.order, self.names, self.degrees))

    @property
    def dim(self) -> int:
        return len(self.names)

    @property
    def unit_index(self) -> int:
        return self.names.index(self.unit)

    @property
    def is_curved(self) -> bool:
        return not self.field.is_zero(self.curvature)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise ParseError("unknown algebra basis element", {"name": name}) from None

    def space(self) -> GradedSpace:
        return GradedSpace(self.grading, self.degrees, self.names)

    # element arithmetic

    def zero(self) -> np.ndarray:
        return self.field.zeros((self.order + 1, self.dim))

    def basis_vector(self, name: str, power: int = 0) -> np.ndarray:
        out = self.zero()
        if power <= self.order:
            out[power, self.index(name)] = self.field.element(1)
        return out

    def element(self, terms: Sequence[Term]) -> np.ndarray:
        out = self.zero()
        for s, coeff, name in terms:
            if not 0 <= int(s) <= self.order:
                raise ParseError("t-power out of range", {"power": s, "order": self.order})
            j = self.index(name)
            out[int(s), j] = self.field.element(out[int(s), j] + self.field.element(coeff))
        return out

    def times_t(self, x: np.ndarray, k: int = 1) -> np.ndarray:
        out = self.zero()
        if k <= self.order:
            out[k:] = x[: self.order + 1 - k]
        return out

    def multiply(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        fld, n = self.field, self.order
        out = self.zero()
        for p in range(n + 1):
            for a in np.nonzero(x[p] != 0)[0]:
                for q in range(n + 1 - p):
                    if fld.is_zero(y[q]):
                        continue
                    for s in range(n + 1 - p - q):
                        prod = fld.matmul(self.mult[s, :, int(a), :], y[q])
                        out[p + q + s] = fld.normalize(out[p + q + s] + x[p, a] * prod)
        return out

    def apply_d(self, x: np.ndarray) -> np.ndarray:
        fld, n = self.field, self.order
        out = self.zero()
        for p in range(n + 1):
            if fld.is_zero(x[p]):
                continue
            for s in range(n + 1 - p):
                out[p + s] = fld.normalize(out[p + s] + fld.matmul(self.diff[s], x[p]))
        return out

    def vector_degree(self, x: np.ndarray) -> Optional[int]:
        """Common degree of all terms, or None for zero; raises on mixed degrees."""
        cols = np.nonzero(np.any(x != 0, axis=0))[0]
        degs = {self.degrees[int(j)] for j in cols}
        if len(degs) > 1:
            raise WrongDegree("element is not homogeneous", {"degrees": sorted(degs)})
        return degs.pop() if degs else None

    def describe(self, x: np.ndarray) -> AlgebraElement:
        return AlgebraElement.from_vector(self, x)


def build_algebra(data: AlgebraData) -> DeformedAlgebra:
    """Assemble structure tensors from sparse data without checking axioms."""
    fld, n = data.field, data.order
    if n < 0:
        raise ParseError("deformation order must be nonnegative", {"order": n})
    names = tuple(name for name, _ in data.basis)
    degrees = tuple(data.grading.normalize(d) for _, d in data.basis)
    if len(set(names)) != len(names):
        raise ParseError("duplicate algebra basis names")
    if data.unit not in names:
        raise ParseError("unit is not a basis element", {"unit": data.unit})
    dim = len(names)
    shell = DeformedAlgebra(
        fld,
        data.grading,
        n,
        names,
        degrees,
        data.unit,
        fld.zeros((n + 1, dim, dim, dim)),
        fld.zeros((n + 1, dim, dim)),
        fld.zeros((n + 1, dim)),
        data.name,
    )
    mult = fld.zeros((n + 1, dim, dim, dim))
    for (a, b), terms in data.mult.items():
        ia, ib = shell.index(a), shell.index(b)
        mult[:, :, ia, ib] = fld.normalize(mult[:, :, ia, ib] + shell.element(terms))
    diff = fld.zeros((n + 1, dim, dim))
    for a, terms in data.diff.items():
        ia = shell.index(a)
        diff[:, :, ia] = fld.normalize(diff[:, :, ia] + shell.element(terms))
    curvature = shell.element(data.curvature)
    return DeformedAlgebra(
        fld, data.grading, n, names, degrees, data.unit, mult, diff, curvature, data.name
    )


def _check_homogeneity(a: DeformedAlgebra) -> None:
    g = a.grading
    for s, c, i, j in zip(*np.nonzero(a.mult != 0)):
        if a.degrees[c] != g.add(a.degrees[i], a.degrees[j]):
            raise WrongDegree(
                "product is not homogeneous", {"left": a.names[i], "right": a.names[j]}
            )
    for s, c, i in zip(*np.nonzero(a.diff != 0)):
        if a.degrees[c] != g.add(a.degrees[i], 1):
            raise WrongDegree("differential does not raise degree by one", {"element": a.names[i]})
    for s, c in zip(*np.nonzero(a.curvature != 0)):
        if a.degrees[c] != g.normalize(2):
            raise WrongDegree("curvature is not of degree 2", {"term": a.names[c]})


def validate_algebra(data: "AlgebraData | DeformedAlgebra") -> DeformedAlgebra:
    """Check every cdg deformation axiom over the finite basis."""
    a = build_algebra(data) if isinstance(data, AlgebraData) else data
    fld = a.field
    _check_homogeneity(a)
    basis = [a.basis_vector(name) for name in a.names]
    one = basis[a.unit_index]

    for name, e in zip(a.names, basis):
        if not fld.equal(a.multiply(one, e), e) or not fld.equal(a.multiply(e, one), e):
            raise UnitFailure("unit does not act as identity", {"element": name})

    products = [[a.multiply(x, y) for y in basis] for x in basis]
    for i, x in enumerate(basis):
        for j in range(a.dim):
            for k, z in enumerate(basis):
                left = a.multiply(products[i][j], z)
                right = a.multiply(x, products[j][k])
                if not fld.equal(left, right):
                    raise NotAssociative(
                        "multiplication is not associative",
                        {"triple": (a.names[i], a.names[j], a.names[k])},
                    )

    d_basis = [a.apply_d(e) for e in basis]
    for i, x in enumerate(basis):
        for j, y in enumerate(basis):
            lhs = a.apply_d(products[i][j])
            sign = fld.sign(a.degrees[i])
            rhs = fld.normalize(
                a.multiply(d_basis[i], y) + sign * a.multiply(x, d_basis[j])
            )
            if not fld.equal(lhs, rhs):
                raise LeibnizFailure(
                    "differential is not a graded derivation",
                    {"pair": (a.names[i], a.names[j])},
                )

    if not fld.is_zero(a.curvature[0]):
        raise CurvatureNotDivisible("curvature has a t^0 component")
    if not fld.is_zero(a.apply_d(a.curvature)):
        raise CurvatureNotClosed("d(c) is not zero")

    c = a.curvature
    for i, x in enumerate(basis):
        dd = a.apply_d(d_basis[i])
        bracket = fld.normalize(a.multiply(c, x) - a.multiply(x, c))
        if not fld.equal(dd, bracket):
            raise DSquareMismatch("d^2 differs from [c, -]", {"element": a.names[i]})

    logger.debug(
        "validated algebra %s: dim A=%d order=%d curved=%s",
        a.name or "<anonymous>",
        a.dim,
        a.order,
        a.is_curved,
    )
    return a


def curvature_over_t_vector(a: DeformedAlgebra) -> np.ndarray:
    out = a.zero()
    out[: a.order] = a.curvature[1:]
    return out


def curvature_over_t(a: DeformedAlgebra) -> AlgebraElement:
    """Canonical c/t: every t-power of c lowered by one."""
    return a.describe(curvature_over_t_vector(a))


def witness_curvature_over_t(a: DeformedAlgebra, extra: Sequence[Term]) -> np.ndarray:
    """c/t + t^n x for a degree-2 element x of A; still divides c by t."""
    x = a.element([(0, coeff, name) for _, coeff, name in extra])
    if a.vector_degree(x) not in (None, a.grading.normalize(2)):
        raise WrongDegree("witness correction must have degree 2")
    out = curvature_over_t_vector(a)
    out[a.order] = a.field.normalize(out[a.order] + x[0])
    if not a.field.equal(a.times_t(out), a.curvature):
        raise CurvatureNotDivisible("witness does not divide the curvature")
    return out


def opposite(a: DeformedAlgebra) -> DeformedAlgebra:
    """a∘b = (-1)^{|a||b|} b·a, same differential, curvature -c."""
    fld = a.field
    par = np.array([d % 2 for d in a.degrees], dtype=np.int64)
    signs = fld.array(np.where(np.outer(par, par) % 2 == 1, -1, 1))
    mult = fld.normalize(np.swapaxes(a.mult, 2, 3) * signs[None, None, :, :])
    name = a.name[:-3] if a.name.endswith("^op") else (f"{a.name}^op" if a.name else "")
    return DeformedAlgebra(
        fld,
        a.grading,
        a.order,
        a.names,
        a.degrees,
        a.unit,
        mult,
        np.array(a.diff),
        fld.normalize(-a.curvature),
        name,
    )


def truncate(a: DeformedAlgebra, m: int) -> DeformedAlgebra:
    """A_m = A_n ⊗ R_m: drop every t-power above m."""
    if not 0 <= m <= a.order:
        raise IndexOutOfRange("truncation order out of range", {"m": m, "n": a.order})
    return DeformedAlgebra(
        a.field,
        a.grading,
        m,
        a.names,
        a.degrees,
        a.unit,
        np.array(a.mult[: m + 1]),
        np.array(a.diff[: m + 1]),
        np.array(a.curvature[: m + 1]),
        a.name,
    )


# catalog


def ground_ring(fld: Field, order: int, grading: GradingGroup = Z) -> DeformedAlgebra:
    """A = k, so A_n = R_n with no curvature."""
    data = AlgebraData(fld, grading, order, [("1", 0)], "1", {("1", "1"): [(0, 1, "1")]})
    data.name = f"R_{order}"
    return validate_algebra(data)


def graded_field_model(
    fld: Field, order: int = 1, scale: Any = 1, power: int = 1
) -> DeformedAlgebra:
    """A = k in Z/2 mode with curvature ``scale * t^power``."""
    if not 1 <= power <= order:
        raise IndexOutOfRange("curvature power must lie in 1..n", {"power": power})
    data = AlgebraData(
        fld,
        Z2,
        order,
        [("1", 0)],
        "1",
        {("1", "1"): [(0, 1, "1")]},
        curvature=[(power, scale, "1")],
        name="graded-field",
    )
    return validate_algebra(data)


def truncated_polynomial(
    fld: Field,
    order: int,
    length: int = 2,
    grading: GradingGroup = Z,
    curvature: Sequence[Term] = (),
) -> DeformedAlgebra:
    """k[x]/(x^length), |x| = 0, zero differential; curvature allowed in Z/2 mode."""
    names = ["1"] + [f"x{k}" for k in range(1, length)]

    def label(k: int) -> str:
        return "1" if k == 0 else f"x{k}"

    mult = {
        (label(i), label(j)): [(0, 1, label(i + j))]
        for i in range(length)
        for j in range(length)
        if i + j < length
    }
    data = AlgebraData(
        fld,
        grading,
        order,
        [(nm, 0) for nm in names],
        "1",
        mult,
        curvature=list(curvature),
        name=f"k[x]/(x^{length})",
    )
    return validate_algebra(data)


def dual_numbers_dg(fld: Field, order: int, grading: GradingGroup = Z) -> DeformedAlgebra:
    """Basis {1, x, y}, |x| = 0, |y| = 1, all products of x, y zero, dx = y."""
    data = AlgebraData(
        fld,
        grading,
        order,
        [("1", 0), ("x", 0), ("y", 1)],
        "1",
        {
            ("1", "1"): [(0, 1, "1")],
            ("1", "x"): [(0, 1, "x")],
            ("x", "1"): [(0, 1, "x")],
            ("1", "y"): [(0, 1, "y")],
            ("y", "1"): [(0, 1, "y")],
        },
        diff={"x": [(0, 1, "y")]},
        name="dual-numbers-dg",
    )
    return validate_algebra(data)


_TRIANGULAR_UNITS: Mapping[str, Tuple[int, int]] = {
    "e11": (0, 0),
    "e22": (1, 1),
    "e12": (0, 1),
    "e23": (1, 2),
    "e13": (0, 2),
}


def _triangular_matrix(fld: Field, name: str) -> np.ndarray:
    out = fld.zeros((3, 3))
    if name == "1":
        return fld.eye(3)
    r, c = _TRIANGULAR_UNITS[name]
    out[r, c] = fld.element(1)
    return out


def upper_triangular(
    fld: Field, order: int, scale: Any = 1, grading: GradingGroup = Z
) -> DeformedAlgebra:
    """Upper triangular 3x3 matrices, deg e_ij = j - i, with inner curvature.

    ``β = scale·t·(e12 + e23)`` is odd, ``d = [β, −]`` and ``c = β²``.
    """
    names = ["1", "e11", "e22", "e12", "e23", "e13"]
    degrees = [0, 0, 0, 1, 1, 2]
    mats = [_triangular_matrix(fld, nm) for nm in names]
    flat = np.stack([m.reshape(-1) for m in mats], axis=1)

    def decompose(mat: np.ndarray) -> List[Tuple[str, Any]]:
        coords = solve(fld, flat, mat.reshape(-1, 1))[:, 0]
        return [(names[k], coords[k]) for k in range(len(names)) if coords[k] != 0]

    mult: Dict[Tuple[str, str], List[Term]] = {}
    for a, ma in zip(names, mats):
        for b, mb in zip(names, mats):
            mult[(a, b)] = [(0, v, nm) for nm, v in decompose(fld.matmul(ma, mb))]

    lam = fld.element(scale)
    gamma = fld.normalize(mats[names.index("e12")] + mats[names.index("e23")])
    diff: Dict[str, List[Term]] = {}
    for a, ma, deg in zip(names, mats, degrees):
        bracket = fld.normalize(
            fld.matmul(gamma, ma) - fld.sign(deg) * fld.matmul(ma, gamma)
        )
        diff[a] = [(1, fld.element(lam * v), nm) for nm, v in decompose(bracket)]
    square = fld.matmul(gamma, gamma)
    curvature = [(2, fld.element(lam * lam * v), nm) for nm, v in decompose(square)]
    if order < 2:
        curvature = []
    if order < 1:
        diff = {}
    data = AlgebraData(
        fld,
        grading,
        order,
        list(zip(names, degrees)),
        "1",
        mult,
        diff,
        curvature,
        name="upper-triangular",
    )
    return validate_algebra(data)


CATALOG = ("ground", "graded-field", "polynomial", "dual-numbers", "triangular")


def catalog_algebra(name: str, fld: Field, order: int) -> DeformedAlgebra:
    """Build a catalog algebra with default parameters."""
    if name == "ground":
        return ground_ring(fld, order)
    if name == "graded-field":
        return graded_field_model(fld, max(order, 1))
    if name == "polynomial":
        return truncated_polynomial(fld, order)
    if name == "dual-numbers":
        return dual_numbers_dg(fld, order)
    if name == "triangular":
        return upper_triangular(fld, order)
    raise ParseError("unknown catalog algebra", {"name": name, "known": ", ".join(CATALOG)})


def random_algebra(
    rng: np.random.Generator, fld: Field, order: int, grading: Optional[GradingGroup] = None
) -> DeformedAlgebra:
    """Sample a catalog algebra with random parameters (nonzero scalars)."""
    grading = grading if grading is not None else (Z2 if rng.integers(2) else Z)

    def unit_scalar() -> int:
        return int(rng.integers(1, 7))

    choices = ["ground", "polynomial", "dual-numbers", "triangular"]
    if grading.periodic and order >= 1:
        choices += ["graded-field", "curved-polynomial"]
    pick = choices[int(rng.integers(len(choices)))]
    logger.trace("random_algebra picked %s (order=%d, grading=%s)", pick, order, grading.kind)
    if pick == "ground":
        return ground_ring(fld, order, grading)
    if pick == "polynomial":
        return truncated_polynomial(fld, order, int(rng.integers(2, 4)), grading)
    if pick == "dual-numbers":
        return dual_numbers_dg(fld, order, grading)
    if pick == "triangular":
        return upper_triangular(fld, order, unit_scalar(), grading)
    if pick == "graded-field":
        return graded_field_model(fld, order, unit_scalar(), int(rng.integers(1, order + 1)))
    power = int(rng.integers(1, order + 1))
    return truncated_polynomial(
        fld, order, 2, Z2, curvature=[(power, unit_scalar(), "x1"), (power, 1, "1")]
    )
