"""Graded spaces, homogeneous maps and complexes.

A graded space is a flat basis with a degree label per basis vector; a graded
map is a dense matrix that is only allowed to be nonzero between basis vectors
whose degrees differ by the map's degree. All subspaces built from homogeneous
data by :mod:`exact_linear` stay homogeneous (echelon rows never mix degree
blocks), so degrees of basis vectors are read off their leading coordinate.

Shift convention: a basis vector of degree ``e`` in ``X`` has degree ``e - s``
in ``X[s]``; the differential of ``X[s]`` is ``(-1)^s d_X``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import GradingMismatch, NotAComplex, NotClosed, WrongDegree
from .exact_linear import Field, Subquotient, Subspace, quotient_basis, sum_intersection
from .logger import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class GradingGroup:
    """Degrees in Z or in Z/2; both supply the parity used by Koszul signs."""

    kind: str

    def __post_init__(self) -> None:
        if self.kind not in ("Z", "Z/2"):
            raise GradingMismatch("grading must be 'Z' or 'Z/2'", {"kind": self.kind})

    @property
    def periodic(self) -> bool:
        return self.kind == "Z/2"

    def normalize(self, d: int) -> int:
        return int(d) % 2 if self.periodic else int(d)

    def parity(self, d: int) -> int:
        return int(d) % 2

    def add(self, a: int, b: int) -> int:
        return self.normalize(a + b)

    def shifted(self, d: int, s: int) -> int:
        """Degree in ``X[s]`` of a vector of degree ``d`` in ``X``."""
        return self.normalize(d - s)

    def negate(self, d: int) -> int:
        return self.normalize(-d)


Z = GradingGroup("Z")
Z2 = GradingGroup("Z/2")


def parse_grading(text: str) -> GradingGroup:
    return GradingGroup(text.strip().upper().replace("Z/2Z", "Z/2"))


@dataclass(frozen=True)
class GradedSpace:
    grading: GradingGroup
    degrees: Tuple[int, ...]
    names: Tuple[str, ...]

    def __post_init__(self) -> None:
        if len(self.degrees) != len(self.names):
            raise ValueError("one degree per basis name is required")
        object.__setattr__(
            self, "degrees", tuple(self.grading.normalize(d) for d in self.degrees)
        )
        if len(set(self.names)) != len(self.names):
            raise ValueError("basis names must be unique")

    @classmethod
    def empty(cls, grading: GradingGroup) -> "GradedSpace":
        return cls(grading, (), ())

    @property
    def dim(self) -> int:
        return len(self.degrees)

    def dims(self) -> Dict[int, int]:
        out: Dict[int, int] = {}
        for d in self.degrees:
            out[d] = out.get(d, 0) + 1
        return dict(sorted(out.items()))

    def indices(self, d: int) -> List[int]:
        d = self.grading.normalize(d)
        return [i for i, e in enumerate(self.degrees) if e == d]

    def index(self, name: str) -> int:
        return self.names.index(name)

    def parity_signs(self, field_: Field, power: int = 1) -> np.ndarray:
        """Diagonal entries ``(-1)^(power * deg)`` as a field vector."""
        return field_.array([field_.sign(power * d) for d in self.degrees]).reshape(-1)

    def vector_degree(self, v: np.ndarray) -> int:
        nz = np.nonzero(np.asarray(v) != 0)[0]
        if nz.size == 0:
            raise ValueError("the zero vector has no degree")
        return self.degrees[int(nz[0])]

    def subspace_dims(self, sub: Subspace) -> Dict[int, int]:
        out: Dict[int, int] = {}
        for row in sub.basis:
            d = self.vector_degree(row)
            out[d] = out.get(d, 0) + 1
        return dict(sorted(out.items()))

    def shift(self, s: int) -> "GradedSpace":
        return GradedSpace(
            self.grading, tuple(self.grading.shifted(d, s) for d in self.degrees), self.names
        )

    def dual(self) -> "GradedSpace":
        return GradedSpace(
            self.grading,
            tuple(self.grading.negate(d) for d in self.degrees),
            tuple(_dual_name(n) for n in self.names),
        )

    def same_shape(self, other: "GradedSpace") -> bool:
        return self.grading == other.grading and self.degrees == other.degrees


def _dual_name(name: str) -> str:
    return name[:-2] if name.endswith("^*") else f"{name}^*"


def sum_spaces(spaces: Sequence[GradedSpace]) -> GradedSpace:
    if not spaces:
        raise ValueError("direct sum of no spaces needs an explicit grading")
    grading = spaces[0].grading
    degrees: List[int] = []
    names: List[str] = []
    for k, sp in enumerate(spaces):
        if sp.grading != grading:
            raise GradingMismatch("summands use different gradings")
        degrees.extend(sp.degrees)
        names.extend(f"{k}:{n}" for n in sp.names)
    return GradedSpace(grading, tuple(degrees), tuple(names))


def allowed_mask(source: GradedSpace, target: GradedSpace, degree: int) -> np.ndarray:
    g = source.grading
    src = np.array([g.normalize(d + degree) for d in source.degrees], dtype=np.int64)
    tgt = np.array(target.degrees, dtype=np.int64)
    if src.size == 0 or tgt.size == 0:
        return np.zeros((tgt.size, src.size), dtype=bool)
    return tgt[:, None] == src[None, :]


@dataclass(frozen=True, eq=False)
class GradedMap:
    """Homogeneous linear map; ``matrix`` has shape (target.dim, source.dim)."""

    field: Field
    source: GradedSpace
    target: GradedSpace
    degree: int
    matrix: np.ndarray

    def __post_init__(self) -> None:
        if self.source.grading != self.target.grading:
            raise GradingMismatch("source and target gradings differ")
        object.__setattr__(self, "degree", self.source.grading.normalize(self.degree))
        mat = self.field.normalize(np.asarray(self.matrix)).reshape(
            self.target.dim, self.source.dim
        )
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)
        if mat.size:
            stray = (mat != 0) & ~allowed_mask(self.source, self.target, self.degree)
            if np.any(stray):
                r, c = (int(x[0]) for x in np.nonzero(stray))
                raise WrongDegree(
                    "map is not homogeneous",
                    {
                        "degree": self.degree,
                        "source": self.source.names[c],
                        "target": self.target.names[r],
                    },
                )

    @classmethod
    def zero(
        cls, field_: Field, source: GradedSpace, target: GradedSpace, degree: int = 0
    ) -> "GradedMap":
        return cls(field_, source, target, degree, field_.zeros((target.dim, source.dim)))

    @classmethod
    def identity(cls, field_: Field, space: GradedSpace) -> "GradedMap":
        return cls(field_, space, space, 0, field_.eye(space.dim))

    def block(self, d: int) -> np.ndarray:
        """Component from source degree ``d`` to target degree ``d + degree``."""
        rows = self.target.indices(d + self.degree)
        cols = self.source.indices(d)
        return self.matrix[np.ix_(rows, cols)]

    def compose(self, inner: "GradedMap") -> "GradedMap":
        """``self ∘ inner``."""
        if not inner.target.same_shape(self.source):
            raise GradingMismatch("maps are not composable")
        return GradedMap(
            self.field,
            inner.source,
            self.target,
            self.degree + inner.degree,
            self.field.matmul(self.matrix, inner.matrix),
        )

    def is_zero(self) -> bool:
        return self.field.is_zero(self.matrix)

    def equals(self, other: "GradedMap") -> bool:
        return self.field.equal(self.matrix, other.matrix)


@dataclass(frozen=True)
class ComplexReport:
    """Per-degree cohomology dimensions (nonzero degrees only) and representatives."""

    dims: Dict[int, int]
    representatives: Dict[int, Tuple[Tuple[object, ...], ...]] = field(
        default_factory=dict, compare=False
    )

    @property
    def total(self) -> int:
        return sum(self.dims.values())

    @property
    def is_acyclic(self) -> bool:
        return self.total == 0

    def dim(self, d: int) -> int:
        return self.dims.get(d, 0)

    def as_dict(self) -> Dict[str, int]:
        return {str(d): v for d, v in sorted(self.dims.items())}


@dataclass(frozen=True, eq=False)
class Complex:
    field: Field
    space: GradedSpace
    differential: np.ndarray

    def __post_init__(self) -> None:
        d = GradedMap(self.field, self.space, self.space, 1, self.differential)
        object.__setattr__(self, "differential", d.matrix)
        square = self.field.matmul(d.matrix, d.matrix)
        if not self.field.is_zero(square):
            r, c = (int(x[0]) for x in np.nonzero(square != 0))
            raise NotAComplex(
                "differential does not square to zero",
                {"from": self.space.names[c], "to": self.space.names[r]},
            )

    @classmethod
    def zero(cls, field_: Field, grading: GradingGroup) -> "Complex":
        return cls(field_, GradedSpace.empty(grading), field_.zeros((0, 0)))

    @property
    def grading(self) -> GradingGroup:
        return self.space.grading

    @property
    def dim(self) -> int:
        return self.space.dim

    @cached_property
    def cycles(self) -> Subspace:
        return Subspace.kernel(self.field, self.differential)

    @cached_property
    def boundaries(self) -> Subspace:
        return Subspace.image(self.field, self.differential)

    @cached_property
    def report(self) -> ComplexReport:
        return cohomology(self)

    def is_acyclic(self) -> bool:
        return self.report.is_acyclic

    def subquotient(self, upper: Subspace, lower: Subspace) -> Tuple["Complex", Subquotient]:
        """The complex ``upper / lower`` for d-stable subspaces ``lower ⊆ upper``."""
        sq = Subquotient.of(upper, lower)
        return subquotient_complex(self.field, self.space, self.differential, sq), sq


def subquotient_space(space: GradedSpace, sq: Subquotient) -> GradedSpace:
    degrees = []
    names = []
    for row in sq.reps:
        nz = int(np.nonzero(row != 0)[0][0])
        degrees.append(space.degrees[nz])
        names.append(f"[{space.names[nz]}]")
    return GradedSpace(space.grading, tuple(degrees), tuple(names))


def subquotient_complex(
    field_: Field, space: GradedSpace, differential: np.ndarray, sq: Subquotient
) -> Complex:
    sub_space = subquotient_space(space, sq)
    return Complex(field_, sub_space, sq.induced(differential, sq))


def cohomology(c: Complex) -> ComplexReport:
    """dim H^d = dim Z^d - dim B^d, with echelon cycle representatives."""
    if c.dim == 0:
        return ComplexReport({}, {})
    reps = quotient_basis(c.cycles, c.boundaries)
    dims: Dict[int, int] = {}
    by_degree: Dict[int, List[Tuple[object, ...]]] = {}
    for row in reps:
        d = c.space.vector_degree(row)
        dims[d] = dims.get(d, 0) + 1
        by_degree.setdefault(d, []).append(tuple(row.tolist()))
    logger.trace("cohomology of %d-dim complex: %s", c.dim, dims)
    return ComplexReport(
        dict(sorted(dims.items())), {d: tuple(v) for d, v in sorted(by_degree.items())}
    )


def shift(x: "Complex | GradedSpace", s: int) -> "Complex | GradedSpace":
    if isinstance(x, GradedSpace):
        return x.shift(s)
    sign = x.field.sign(s)
    return Complex(x.field, x.space.shift(s), x.field.normalize(x.differential * sign))


def cone(source: Complex, target: Complex, f: np.ndarray) -> Complex:
    """``target ⊕ source[1]`` with ``d(y, x) = (d y + f x, -d x)``."""
    fld = source.field
    f = GradedMap(fld, source.space, target.space, 0, f).matrix
    lhs = fld.matmul(target.differential, f)
    rhs = fld.matmul(f, source.differential)
    if not fld.equal(lhs, rhs):
        raise NotClosed("cone requires a chain map")
    space = sum_spaces([target.space, source.space.shift(1)])
    top = np.concatenate([target.differential, f], axis=1)
    bottom = np.concatenate(
        [fld.zeros((source.dim, target.dim)), fld.normalize(-source.differential)], axis=1
    )
    return Complex(fld, space, np.concatenate([top, bottom], axis=0))


def block_diagonal(field_: Field, blocks: Sequence[np.ndarray]) -> np.ndarray:
    rows = sum(b.shape[0] for b in blocks)
    cols = sum(b.shape[1] for b in blocks)
    out = field_.zeros((rows, cols))
    r = c = 0
    for b in blocks:
        out[r : r + b.shape[0], c : c + b.shape[1]] = b
        r += b.shape[0]
        c += b.shape[1]
    return out


def direct_sum(xs: Sequence[Complex]) -> Complex:
    if not xs:
        raise ValueError("direct_sum needs at least one complex")
    fld = xs[0].field
    space = sum_spaces([x.space for x in xs])
    return Complex(fld, space, block_diagonal(fld, [x.differential for x in xs]))


def dual(c: Complex) -> Complex:
    """Linear dual: ``(d φ) = -(-1)^{|φ|} φ ∘ d``."""
    fld = c.field
    signs = c.space.parity_signs(fld)
    diff = fld.normalize(-c.differential.T * signs[None, :])
    return Complex(fld, c.space.dual(), diff)


@dataclass(frozen=True)
class ExactnessReport:
    joints: Tuple[Tuple[int, bool, int, int], ...]

    @property
    def exact(self) -> bool:
        return all(ok for _, ok, _, _ in self.joints)

    def failing(self) -> List[int]:
        return [pos for pos, ok, _, _ in self.joints if not ok]


def is_exact(maps: Sequence[GradedMap]) -> ExactnessReport:
    """Check ``ker maps[k+1] = im maps[k]`` at each interior joint."""
    joints = []
    for k in range(len(maps) - 1):
        f, g = maps[k], maps[k + 1]
        if not f.target.same_shape(g.source):
            raise GradingMismatch("sequence is not composable", {"joint": k})
        fld = f.field
        image = Subspace.image(fld, f.matrix)
        kernel = Subspace.kernel(fld, g.matrix)
        joints.append((k, image == kernel, kernel.dim, image.dim))
    return ExactnessReport(tuple(joints))


def short_exact(field_: Field, f: GradedMap, g: GradedMap) -> ExactnessReport:
    """Exactness of ``0 → A → B → C → 0``."""
    zero = GradedSpace.empty(f.source.grading)
    incoming = GradedMap.zero(field_, zero, f.source)
    outgoing = GradedMap.zero(field_, g.target, zero)
    return is_exact([incoming, f, g, outgoing])


def cohomology_map_ranks(source: Complex, target: Complex, f: np.ndarray) -> Dict[int, int]:
    """Rank of H^d(f) per source degree for a chain map ``f`` of degree 0."""
    fld = source.field
    f = GradedMap(fld, source.space, target.space, 0, f).matrix
    if source.dim == 0 or target.dim == 0:
        return {}
    pushed = source.cycles.image_under(f)
    total, _ = sum_intersection(pushed, target.boundaries)
    with_image = target.space.subspace_dims(total)
    bounds = target.space.subspace_dims(target.boundaries)
    ranks = {d: with_image.get(d, 0) - bounds.get(d, 0) for d in with_image}
    return {d: r for d, r in sorted(ranks.items()) if r}


def is_quasi_iso(source: Complex, target: Complex, f: np.ndarray) -> bool:
    ranks = cohomology_map_ranks(source, target, f)
    return ranks == source.report.dims == target.report.dims


@dataclass(frozen=True)
class TriangleCheck:
    ok: bool
    degrees: Tuple[Tuple[int, int, int], ...]


def triangle_rank_identity(
    source: Complex, target: Complex, f: np.ndarray, cone_complex: Optional[Complex] = None
) -> TriangleCheck:
    """dim H^d(cone) = (dim H^d Y - rank H^d f) + (dim H^{d+1} X - rank H^{d+1} f)."""
    c = cone_complex if cone_complex is not None else cone(source, target, f)
    g = source.grading
    ranks = cohomology_map_ranks(source, target, f)
    hx, hy, hc = source.report, target.report, c.report
    degrees = set(hx.dims) | set(hy.dims) | set(hc.dims)
    degrees |= {g.normalize(d - 1) for d in hx.dims}
    rows = []
    ok = True
    for d in sorted(degrees):
        nxt = g.normalize(d + 1)
        expected = (hy.dim(d) - ranks.get(d, 0)) + (hx.dim(nxt) - ranks.get(nxt, 0))
        rows.append((d, hc.dim(d), expected))
        ok = ok and hc.dim(d) == expected
    return TriangleCheck(ok, tuple(rows))
