"""Curved dg modules over A_n as matrix data.

A module stores its basis as a :class:`GradedSpace`, the t-action ``t``, the
predifferential ``d`` and one action matrix per basis element of A. The full
A_n action is generated through ``t``: ``t^s b`` acts as ``T^s · act(b)``.

Morphisms are Koszul-linear: ``f ∘ act_M(b) = (-1)^{|f||b|} act_N(b) ∘ f`` and
``f T_M = T_N f``; the hom differential is ``D f = d_N f - (-1)^{|f|} f d_M``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .cdg_algebra import DeformedAlgebra, curvature_over_t_vector, opposite
from .errors import (
    AlgebraMismatch,
    CurvatureLawFailure,
    EquivalenceViolation,
    IndexOutOfRange,
    LeibnizFailure,
    NotAssociativeAction,
    NotClosed,
    NotRLinear,
    TNotNilpotent,
    WrongDegree,
)
from .exact_linear import Field, Subquotient, Subspace, kernel_rows, rref
from .graded_core import (
    Complex,
    GradedMap,
    GradedSpace,
    allowed_mask,
    block_diagonal,
    dual,
    shift,
    subquotient_space,
    sum_spaces,
)
from .logger import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True, eq=False)
class QdgModule:
    algebra: DeformedAlgebra
    space: GradedSpace
    t: np.ndarray
    d: np.ndarray
    action: Tuple[np.ndarray, ...]
    name: str = ""

    def __post_init__(self) -> None:
        a = self.algebra
        if self.space.grading != a.grading:
            raise AlgebraMismatch("module grading differs from the algebra grading")
        if len(self.action) != a.dim:
            raise AlgebraMismatch(
                "one action matrix per algebra basis element is required",
                {"expected": a.dim, "given": len(self.action)},
            )
        fld, sp = a.field, self.space
        object.__setattr__(self, "t", _homogeneous(fld, sp, self.t, 0, "t"))
        object.__setattr__(self, "d", _homogeneous(fld, sp, self.d, 1, "d"))
        object.__setattr__(
            self,
            "action",
            tuple(
                _homogeneous(fld, sp, mat, a.degrees[k], a.names[k])
                for k, mat in enumerate(self.action)
            ),
        )

    @classmethod
    def from_action(
        cls,
        algebra: DeformedAlgebra,
        space: GradedSpace,
        t: np.ndarray,
        d: np.ndarray,
        action: Mapping[str, np.ndarray],
        name: str = "",
    ) -> "QdgModule":
        """Unit defaults to the identity, other missing elements to zero."""
        fld = algebra.field
        mats = []
        for b in algebra.names:
            if b in action:
                mats.append(action[b])
            elif b == algebra.unit:
                mats.append(fld.eye(space.dim))
            else:
                mats.append(fld.zeros((space.dim, space.dim)))
        return cls(algebra, space, t, d, tuple(mats), name)

    @classmethod
    def zero(cls, algebra: DeformedAlgebra) -> "CdgModule":
        sp = GradedSpace.empty(algebra.grading)
        empty = algebra.field.zeros((0, 0))
        return CdgModule(algebra, sp, empty, empty, tuple(empty for _ in algebra.names), "0")

    @property
    def field(self) -> Field:
        return self.algebra.field

    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def order(self) -> int:
        return self.algebra.order

    def act(self, name: str) -> np.ndarray:
        return self.action[self.algebra.index(name)]

    @cached_property
    def t_powers(self) -> Tuple[np.ndarray, ...]:
        fld = self.field
        out = [fld.eye(self.dim)]
        for _ in range(self.order + 1):
            out.append(fld.matmul(self.t, out[-1]))
        return tuple(out)

    def t_pow(self, k: int) -> np.ndarray:
        if k >= len(self.t_powers):
            return self.field.zeros((self.dim, self.dim))
        return self.t_powers[k]

    def act_element(self, x: np.ndarray) -> np.ndarray:
        """Operator of an A_n element given as a ``(n + 1, dim A)`` array."""
        fld = self.field
        out = fld.zeros((self.dim, self.dim))
        for s, j in zip(*np.nonzero(x != 0)):
            term = fld.matmul(self.t_pow(int(s)), self.action[int(j)])
            out = fld.normalize(out + x[s, j] * term)
        return out

    @cached_property
    def curvature_operator(self) -> np.ndarray:
        return self.act_element(self.algebra.curvature)

    @cached_property
    def curvature_over_t_operator(self) -> np.ndarray:
        return self.act_element(curvature_over_t_vector(self.algebra))

    def kernel_t(self, i: int) -> Subspace:
        return Subspace.kernel(self.field, self.t_pow(i))

    def image_t(self, i: int) -> Subspace:
        return Subspace.image(self.field, self.t_pow(i))

    def with_name(self, name: str) -> "QdgModule":
        return type(self)(self.algebra, self.space, self.t, self.d, self.action, name)


class CdgModule(QdgModule):
    """A qdg module that passed the curvature law ``d² = c·(−)``."""


def _homogeneous(
    fld: Field, space: GradedSpace, mat: np.ndarray, degree: int, label: str
) -> np.ndarray:
    try:
        return GradedMap(fld, space, space, degree, mat).matrix
    except WrongDegree as exc:
        raise WrongDegree(f"operator {label} is not homogeneous", exc.where) from None


def _column_where(space: GradedSpace, residual: np.ndarray) -> Dict[str, object]:
    r, c = (int(x[0]) for x in np.nonzero(residual != 0))
    return {"basis": space.names[c], "degree": space.degrees[c], "image": space.names[r]}


def validate_module(m: QdgModule, curved: bool = True) -> QdgModule:
    """Check every module axiom; returns a :class:`CdgModule` when ``curved``."""
    a, fld, sp = m.algebra, m.field, m.space
    top = m.t_pow(a.order + 1)
    if not fld.is_zero(top):
        raise TNotNilpotent("t^(n+1) does not act as zero", _column_where(sp, top))

    for k, b in enumerate(a.names):
        comm = fld.normalize(fld.matmul(m.t, m.action[k]) - fld.matmul(m.action[k], m.t))
        if not fld.is_zero(comm):
            raise NotRLinear(
                "t does not commute with the action", {"element": b, **_column_where(sp, comm)}
            )
    dt = fld.normalize(fld.matmul(m.d, m.t) - fld.matmul(m.t, m.d))
    if not fld.is_zero(dt):
        raise NotRLinear("d does not commute with t", _column_where(sp, dt))

    unit = m.action[a.unit_index]
    if not fld.equal(unit, fld.eye(m.dim)):
        raise NotAssociativeAction("unit does not act as identity", {"unit": a.unit})
    basis = [a.basis_vector(b) for b in a.names]
    for i, x in enumerate(basis):
        for j, y in enumerate(basis):
            lhs = fld.matmul(m.action[i], m.action[j])
            rhs = m.act_element(a.multiply(x, y))
            if not fld.equal(lhs, rhs):
                raise NotAssociativeAction(
                    "action does not respect multiplication",
                    {"pair": (a.names[i], a.names[j])},
                )

    for k, x in enumerate(basis):
        lhs = fld.matmul(m.d, m.action[k])
        rhs = fld.normalize(
            m.act_element(a.apply_d(x))
            + fld.sign(a.degrees[k]) * fld.matmul(m.action[k], m.d)
        )
        if not fld.equal(lhs, rhs):
            raise LeibnizFailure(
                "module predifferential violates Leibniz",
                {"element": a.names[k], **_column_where(sp, fld.normalize(lhs - rhs))},
            )

    if curved:
        residual = fld.normalize(fld.matmul(m.d, m.d) - m.curvature_operator)
        if not fld.is_zero(residual):
            raise CurvatureLawFailure("d^2 differs from c·(-)", _column_where(sp, residual))
        out: QdgModule = CdgModule(m.algebra, sp, m.t, m.d, m.action, m.name)
    else:
        out = QdgModule(m.algebra, sp, m.t, m.d, m.action, m.name)
    logger.trace("validated module %s (dim %d, curved=%s)", m.name or "<anonymous>", m.dim, curved)
    return out


def same_algebra(m: QdgModule, n: QdgModule) -> None:
    if m.algebra != n.algebra:
        raise AlgebraMismatch(
            "modules live over different algebras",
            {"left": m.algebra.name or "?", "right": n.algebra.name or "?"},
        )


@dataclass(frozen=True, eq=False)
class Morphism:
    source: QdgModule
    target: QdgModule
    degree: int
    matrix: np.ndarray

    def __post_init__(self) -> None:
        same_algebra(self.source, self.target)
        g = GradedMap(self.field, self.source.space, self.target.space, self.degree, self.matrix)
        object.__setattr__(self, "degree", g.degree)
        object.__setattr__(self, "matrix", g.matrix)
        fld, f = self.field, g.matrix
        if not fld.equal(fld.matmul(f, self.source.t), fld.matmul(self.target.t, f)):
            raise NotRLinear("morphism does not commute with t")
        a = self.source.algebra
        for k, b in enumerate(a.names):
            sign = fld.sign(self.degree * a.degrees[k])
            lhs = fld.matmul(f, self.source.action[k])
            rhs = fld.normalize(sign * fld.matmul(self.target.action[k], f))
            if not fld.equal(lhs, rhs):
                raise NotRLinear("morphism is not A-linear", {"element": b})

    @classmethod
    def identity(cls, m: QdgModule) -> "Morphism":
        return cls(m, m, 0, m.field.eye(m.dim))

    @classmethod
    def zero(cls, source: QdgModule, target: QdgModule, degree: int = 0) -> "Morphism":
        return cls(source, target, degree, source.field.zeros((target.dim, source.dim)))

    @property
    def field(self) -> Field:
        return self.source.field

    def differential(self) -> np.ndarray:
        fld = self.field
        return fld.normalize(
            fld.matmul(self.target.d, self.matrix)
            - fld.sign(self.degree) * fld.matmul(self.matrix, self.source.d)
        )

    def is_closed(self) -> bool:
        return self.field.is_zero(self.differential())

    def require_closed_degree_zero(self) -> None:
        if self.degree != 0:
            raise WrongDegree("a degree-0 morphism is required", {"degree": self.degree})
        if not self.is_closed():
            raise NotClosed("morphism is not closed")

    def compose(self, inner: "Morphism") -> "Morphism":
        return Morphism(
            inner.source,
            self.target,
            self.degree + inner.degree,
            self.field.matmul(self.matrix, inner.matrix),
        )


@dataclass(frozen=True, eq=False)
class HomComplex:
    """hom(source, target) with basis maps stored row-major, flattened."""

    source: QdgModule
    target: QdgModule
    complex: Complex
    maps: np.ndarray
    pivots: Tuple[int, ...]

    @property
    def dim(self) -> int:
        return self.complex.dim

    def map_at(self, k: int) -> np.ndarray:
        return self.maps[k].reshape(self.target.dim, self.source.dim)

    def coordinates(self, f: np.ndarray) -> np.ndarray:
        flat = self.source.field.normalize(np.asarray(f)).reshape(-1)
        coords = flat[list(self.pivots)] if self.pivots else flat[:0]
        if not self.source.field.equal(self.combine(coords).reshape(-1), flat):
            raise NotRLinear("map is not an element of the hom space")
        return coords

    def combine(self, coords: np.ndarray) -> np.ndarray:
        fld = self.source.field
        if self.dim == 0:
            return fld.zeros((self.target.dim, self.source.dim))
        flat = fld.matmul(fld.normalize(np.asarray(coords)).reshape(1, -1), self.maps)
        return flat.reshape(self.target.dim, self.source.dim)

    def morphism(self, coords: np.ndarray, degree: int) -> Morphism:
        return Morphism(self.source, self.target, degree, self.combine(coords))


def _linearity_constraints(m: QdgModule, n: QdgModule, degree: int) -> Tuple[np.ndarray, np.ndarray]:
    """Constraint matrix on the allowed positions of a degree-``degree`` map."""
    fld = m.field
    mask = allowed_mask(m.space, n.space, degree)
    rs, cs = np.nonzero(mask)
    positions = rs * m.dim + cs
    if positions.size == 0:
        return positions, fld.zeros((0, 0))
    a = m.algebra
    blocks = []
    operators = [(m.t, n.t, fld.element(1))]
    for k in range(a.dim):
        if k == a.unit_index:
            continue
        operators.append((m.action[k], n.action[k], fld.sign(degree * a.degrees[k])))
    count = positions.size
    for xm, yn, sign in operators:
        cols = fld.zeros((count, n.dim, m.dim))
        idx = np.arange(count)
        # f ↦ f X_M - sign · Y_N f, one unknown per allowed position
        cols[idx, rs, :] = fld.normalize(cols[idx, rs, :] + xm[cs, :])
        cols[idx, :, cs] = fld.normalize(cols[idx, :, cs] - sign * yn[:, rs].T)
        block = cols.reshape(count, -1).T
        nonzero_rows = np.nonzero(np.any(block != 0, axis=1))[0]
        blocks.append(block[nonzero_rows])
    constraints = np.concatenate(blocks, axis=0) if blocks else fld.zeros((0, count))
    return positions, constraints


def hom_complex(m: QdgModule, n: QdgModule) -> HomComplex:
    """Complex of Koszul-linear maps ``m → n`` with ``D f = d_N f - (-1)^{|f|} f d_M``."""
    same_algebra(m, n)
    fld, g = m.field, m.space.grading
    degrees = sorted({g.normalize(dn - dm) for dn in n.space.degrees for dm in m.space.degrees})
    flat_dim = m.dim * n.dim
    rows: List[np.ndarray] = []
    pivots: List[int] = []
    map_degrees: List[int] = []
    for deg in degrees:
        positions, constraints = _linearity_constraints(m, n, deg)
        if positions.size == 0:
            continue
        kernel = (
            kernel_rows(fld, constraints)
            if constraints.shape[0]
            else fld.eye(positions.size)
        )
        if kernel.shape[0] == 0:
            continue
        echelon = rref(fld, kernel)
        for row, pc in zip(echelon.matrix[: echelon.rank], echelon.pivots):
            full = fld.zeros((flat_dim,))
            full[positions] = row
            rows.append(full)
            pivots.append(int(positions[pc]))
            map_degrees.append(deg)
    maps = np.stack(rows) if rows else fld.zeros((0, flat_dim))
    space = GradedSpace(
        g, tuple(map_degrees), tuple(f"h{deg}.{k}" for k, deg in enumerate(map_degrees))
    )
    diff = fld.zeros((len(rows), len(rows)))
    piv = list(pivots)
    for k, deg in enumerate(map_degrees):
        f = maps[k].reshape(n.dim, m.dim)
        df = fld.normalize(fld.matmul(n.d, f) - fld.sign(deg) * fld.matmul(f, m.d)).reshape(-1)
        coords = df[piv]
        if not fld.equal(fld.matmul(coords.reshape(1, -1), maps).reshape(-1), df):
            raise EquivalenceViolation("hom differential left the space of linear maps")
        diff[:, k] = coords
    cx = Complex(fld, space, diff)
    logger.debug("hom complex %s -> %s: dims %s", m.name, n.name, space.dims())
    return HomComplex(m, n, cx, maps, tuple(pivots))


def postcompose_matrix(src: HomComplex, tgt: HomComplex, g: Morphism) -> np.ndarray:
    """Matrix of ``f ↦ g ∘ f`` from ``src`` to ``tgt`` (g of degree 0)."""
    fld = g.field
    out = fld.zeros((tgt.dim, src.dim))
    for k in range(src.dim):
        out[:, k] = tgt.coordinates(fld.matmul(g.matrix, src.map_at(k)))
    return out


def precompose_matrix(src: HomComplex, tgt: HomComplex, h: Morphism) -> np.ndarray:
    """Matrix of ``f ↦ f ∘ h`` from ``src`` to ``tgt`` (h of degree 0)."""
    fld = h.field
    out = fld.zeros((tgt.dim, src.dim))
    for k in range(src.dim):
        out[:, k] = tgt.coordinates(fld.matmul(src.map_at(k), h.matrix))
    return out


# constructions


def shift_module(m: QdgModule, s: int) -> QdgModule:
    """M[s]: degrees drop by s, d picks up (-1)^s, b acts with (-1)^{s|b|}."""
    fld, a = m.field, m.algebra
    action = tuple(
        fld.normalize(fld.sign(s * a.degrees[k]) * m.action[k]) for k in range(a.dim)
    )
    name = f"{m.name}[{s}]" if m.name and s else m.name
    return type(m)(
        a, m.space.shift(s), m.t, fld.normalize(fld.sign(s) * m.d), action, name
    )


def direct_sum_modules(ms: Sequence[QdgModule], name: str = "") -> QdgModule:
    if not ms:
        raise ValueError("direct sum of no modules")
    for other in ms[1:]:
        same_algebra(ms[0], other)
    fld, a = ms[0].field, ms[0].algebra
    cls = CdgModule if all(isinstance(x, CdgModule) for x in ms) else QdgModule
    return cls(
        a,
        sum_spaces([x.space for x in ms]),
        block_diagonal(fld, [x.t for x in ms]),
        block_diagonal(fld, [x.d for x in ms]),
        tuple(block_diagonal(fld, [x.action[k] for x in ms]) for k in range(a.dim)),
        name or " ⊕ ".join(x.name or "?" for x in ms),
    )


def cone_module(f: Morphism) -> QdgModule:
    """``N ⊕ M[1]`` with ``d(y, x) = (d y + f x, -d x)``."""
    f.require_closed_degree_zero()
    m, n = f.source, f.target
    fld = f.field
    shifted = shift_module(m, 1)
    top = np.concatenate([n.d, f.matrix], axis=1)
    bottom = np.concatenate([fld.zeros((m.dim, n.dim)), shifted.d], axis=1)
    out = QdgModule(
        m.algebra,
        sum_spaces([n.space, shifted.space]),
        block_diagonal(fld, [n.t, m.t]),
        np.concatenate([top, bottom], axis=0),
        tuple(block_diagonal(fld, [n.action[k], shifted.action[k]]) for k in range(m.algebra.dim)),
        f"Cone({m.name or '?'} -> {n.name or '?'})",
    )
    curved = isinstance(m, CdgModule) and isinstance(n, CdgModule)
    return validate_module(out, curved=curved)


def cocone_module(f: Morphism) -> QdgModule:
    """``Cone(f)[-1]``."""
    out = shift_module(cone_module(f), -1)
    return out.with_name(f"coCone({f.source.name or '?'} -> {f.target.name or '?'})")


def cone_inclusion(f: Morphism, cone: QdgModule) -> Morphism:
    """Closed inclusion ``N → Cone(f)``."""
    fld = f.field
    mat = np.concatenate([fld.eye(f.target.dim), fld.zeros((f.source.dim, f.target.dim))], axis=0)
    return Morphism(f.target, cone, 0, mat)


def cocone_projection(f: Morphism, cocone: QdgModule) -> Morphism:
    """Closed projection ``coCone(f) → M`` onto the source summand."""
    fld = f.field
    mat = np.concatenate(
        [fld.zeros((f.source.dim, f.target.dim)), fld.eye(f.source.dim)], axis=1
    )
    return Morphism(cocone, f.source, 0, mat)


@dataclass(frozen=True, eq=False)
class SubquotientModule:
    module: QdgModule
    sq: Subquotient


def subquotient_module(
    m: QdgModule,
    upper: Subspace,
    lower: Subspace,
    algebra: Optional[DeformedAlgebra] = None,
    name: str = "",
) -> SubquotientModule:
    """``upper / lower`` for submodules ``lower ⊆ upper``, over ``algebra`` (default m's)."""
    sq = Subquotient.of(upper, lower)
    a = algebra if algebra is not None else m.algebra
    space = subquotient_space(m.space, sq)
    t = sq.induced(m.t, sq)
    d = sq.induced(m.d, sq)
    action = tuple(sq.induced(mat, sq) for mat in m.action)
    raw = QdgModule(a, space, t, d, action, name)
    out = validate_module(raw, curved=isinstance(m, CdgModule))
    return SubquotientModule(out, sq)


def restricted_complex(
    m: QdgModule, upper: Subspace, lower: Optional[Subspace] = None
) -> Tuple[Complex, Subquotient]:
    """``upper / lower`` with the induced predifferential, which must square to zero."""
    fld = m.field
    sq = Subquotient.of(upper, lower if lower is not None else Subspace.zero(fld, m.dim))
    return Complex(fld, subquotient_space(m.space, sq), sq.induced(m.d, sq)), sq


def regular_quotient(a: DeformedAlgebra, i: int) -> QdgModule:
    """A_i = A_n / t^{i+1} A_n with left multiplication; cdg for i = 0 or uncurved a."""
    if not 0 <= i <= a.order:
        raise IndexOutOfRange("index out of range", {"i": i, "n": a.order})
    fld, dim = a.field, a.dim
    size = (i + 1) * dim
    names = tuple(f"t^{s}·{b}" if s else b for s in range(i + 1) for b in a.names)
    degrees = tuple(a.degrees[j] for _ in range(i + 1) for j in range(dim))
    space = GradedSpace(a.grading, degrees, names)

    def operator(apply) -> np.ndarray:
        out = fld.zeros((size, size))
        for s in range(i + 1):
            for j in range(dim):
                image = apply(a.basis_vector(a.names[j], s))
                out[:, s * dim + j] = image[: i + 1].reshape(-1)
        return out

    t = operator(a.times_t)
    d = operator(a.apply_d)
    action = tuple(
        operator(lambda v, b=b: a.multiply(a.basis_vector(b), v)) for b in a.names
    )
    raw = QdgModule(a, space, t, d, action, f"A_{i}")
    curved = i == 0 or not a.is_curved
    return validate_module(raw, curved=curved)


# duality


def dualize(m: QdgModule) -> QdgModule:
    """M^∨ as a module over the opposite algebra."""
    fld, a = m.field, m.algebra
    op = opposite(a)
    signs = m.space.parity_signs(fld)
    d = fld.normalize(-m.d.T * signs[None, :])
    action = tuple(
        fld.normalize(m.action[k].T * m.space.parity_signs(fld, a.degrees[k])[None, :])
        for k in range(a.dim)
    )
    raw = QdgModule(op, m.space.dual(), np.array(m.t.T), d, action, f"{m.name}^∨" if m.name else "")
    return validate_module(raw, curved=isinstance(m, CdgModule))


def evaluation(m: QdgModule, double_dual: Optional[QdgModule] = None) -> Morphism:
    """The closed map ``M → M^∨∨``, ``e_j ↦ (-1)^{|e_j|} e_j^{**}``."""
    target = double_dual if double_dual is not None else dualize(dualize(m))
    fld = m.field
    mat = fld.zeros((m.dim, m.dim))
    for j, sign in enumerate(m.space.parity_signs(fld)):
        mat[j, j] = sign
    return Morphism(m, target, 0, mat)


# closed-form functors


def _check_index(m: QdgModule, i: int) -> None:
    if not 0 <= i <= m.order:
        raise IndexOutOfRange("index out of range", {"i": i, "n": m.order})


@dataclass(frozen=True, eq=False)
class QTensor:
    """Q_i(M) with the two quotient presentations it is built from."""

    complex: Complex
    first: Subquotient
    second: Subquotient


def q_tensor_data(m: QdgModule, i: int) -> QTensor:
    _check_index(m, i)
    fld = m.field
    full = Subspace.full(fld, m.dim)
    first = Subquotient.of(full, m.image_t(i + 1))
    second = Subquotient.of(full, m.image_t(i))
    space = sum_spaces([subquotient_space(m.space, first), subquotient_space(m.space, second).shift(1)])
    top = np.concatenate([first.induced(m.d, first), second.induced(m.t, first)], axis=1)
    bottom = np.concatenate(
        [
            fld.normalize(-first.induced(m.curvature_over_t_operator, second)),
            fld.normalize(-second.induced(m.d, second)),
        ],
        axis=1,
    )
    cx = Complex(fld, space, np.concatenate([top, bottom], axis=0))
    return QTensor(cx, first, second)


def q_tensor(m: QdgModule, i: int) -> Complex:
    """Q_i(M) = M/t^{i+1}M ⊕ M/t^iM[1], ``d(x, y) = (dx + t y, -dy - (c/t) x)``."""
    return q_tensor_data(m, i).complex


def q_tensor_map(f: Morphism, i: int) -> Tuple[Complex, Complex, np.ndarray]:
    """Q_i(f) as a chain map between Q_i(source) and Q_i(target)."""
    f.require_closed_degree_zero()
    src, tgt = q_tensor_data(f.source, i), q_tensor_data(f.target, i)
    fld = f.field
    mat = block_diagonal(
        fld,
        [
            src.first.induced(f.matrix, tgt.first),
            src.second.induced(f.matrix, tgt.second),
        ],
    )
    return src.complex, tgt.complex, mat


@dataclass(frozen=True, eq=False)
class FHom:
    """F_i(M) ≅ hom(Γ_i, M): pairs (x, y), x ∈ Ker t^{i+1}, y ∈ Ker t^i one degree lower."""

    complex: Complex
    first: Subquotient
    second: Subquotient


def f_hom_data(m: QdgModule, i: int) -> FHom:
    _check_index(m, i)
    fld = m.field
    zero = Subspace.zero(fld, m.dim)
    first = Subquotient.of(m.kernel_t(i + 1), zero)
    second = Subquotient.of(m.kernel_t(i), zero)
    x_space = subquotient_space(m.space, first)
    y_space = subquotient_space(m.space, second).shift(-1)
    x_signs = x_space.parity_signs(fld)
    y_signs = y_space.parity_signs(fld)
    # D(x, y) = (dx - (-1)^p (c/t) y, dy - (-1)^p t x) for a pair of degree p
    xx = first.induced(m.d, first)
    yx = fld.normalize(-first.induced(m.t, second) * x_signs[None, :])
    xy = fld.normalize(-second.induced(m.curvature_over_t_operator, first) * y_signs[None, :])
    yy = second.induced(m.d, second)
    diff = np.concatenate(
        [np.concatenate([xx, xy], axis=1), np.concatenate([yx, yy], axis=1)], axis=0
    )
    return FHom(Complex(fld, sum_spaces([x_space, y_space]), diff), first, second)


def f_hom(m: QdgModule, i: int) -> Complex:
    """F_i(M), the closed form of hom(Γ_i, M)."""
    return f_hom_data(m, i).complex


def m_i(m: QdgModule, i: int) -> Complex:
    """(M)_i = hom(Γ_i, M)[1] = Ker t^{i+1}[1] ⊕ Ker t^i."""
    return shift(f_hom(m, i), 1)


@dataclass(frozen=True, eq=False)
class ComparisonCheck:
    source: Complex
    target: Complex
    matrix: np.ndarray
    chain_map: bool
    isomorphism: bool

    @property
    def ok(self) -> bool:
        return self.chain_map and self.isomorphism


def check_comparison(source: Complex, target: Complex, mat: np.ndarray) -> ComparisonCheck:
    fld = source.field
    try:
        GradedMap(fld, source.space, target.space, 0, mat)
    except WrongDegree:
        return ComparisonCheck(source, target, mat, False, False)
    chain = fld.equal(
        fld.matmul(target.differential, mat), fld.matmul(mat, source.differential)
    )
    iso = mat.shape[0] == mat.shape[1] and Subspace.kernel(fld, mat).dim == 0
    return ComparisonCheck(source, target, mat, chain, iso)


def q_dual_to_f_dual(m: QdgModule, i: int, dual_module: Optional[QdgModule] = None) -> ComparisonCheck:
    """Q_i(M^∨) → F_i(M)^∨, ``(u, v) ↦ [(x, y) ↦ u(x) - v(y)]``."""
    fld = m.field
    mv = dual_module if dual_module is not None else dualize(m)
    q = q_tensor_data(mv, i)
    fh = f_hom_data(m, i)
    xu = fld.matmul(fh.first.reps, q.first.reps.T)
    yv = fld.normalize(-fld.matmul(fh.second.reps, q.second.reps.T))
    mat = block_diagonal(fld, [xu, yv])
    return check_comparison(q.complex, dual(fh.complex), mat)


def f_dual_to_q_dual(m: QdgModule, i: int, dual_module: Optional[QdgModule] = None) -> ComparisonCheck:
    """F_i(M^∨) → Q_i(M)^∨, ``(x', y') ↦ [(u, v) ↦ x'(u) + y'(v)]``."""
    fld = m.field
    mv = dual_module if dual_module is not None else dualize(m)
    fh = f_hom_data(mv, i)
    q = q_tensor_data(m, i)
    ux = fld.matmul(q.first.reps, fh.first.reps.T)
    vy = fld.matmul(q.second.reps, fh.second.reps.T)
    mat = block_diagonal(fld, [ux, vy])
    return check_comparison(fh.complex, dual(q.complex), mat)


def change_algebra(m: QdgModule, algebra: DeformedAlgebra, name: str = "") -> QdgModule:
    """Same matrices over another algebra with the same basis of A (validated)."""
    if algebra.names != m.algebra.names or algebra.degrees != m.algebra.degrees:
        raise AlgebraMismatch("algebras have different bases")
    raw = QdgModule(algebra, m.space, m.t, m.d, m.action, name or m.name)
    return validate_module(raw, curved=isinstance(m, CdgModule))
