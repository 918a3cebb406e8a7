"""Exact linear algebra over Q and prime fields.

Everything downstream (cohomology, subquotients, hom spaces) reduces to the
handful of routines here: reduced row echelon form, kernels and images,
subspace sums/intersections/quotients and solving consistent systems.

Prime-field arrays are ``int64`` reduced into ``[0, p)``; rational arrays are
``object`` arrays of :class:`fractions.Fraction`. Pivots are always chosen as
the first nonzero entry in (row, column) order so every basis produced here is
deterministic and, for subspaces, equal subspaces have equal representations.
"""

from __future__ import annotations

import abc
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .errors import AmbientMismatch, NotASubspace, ParseError
from .logger import get_logger

logger = get_logger(__name__)

_INT64_LIMIT = 2**63 - 1


class Field(abc.ABC):
    """An exact base field together with its numpy representation."""

    dtype: Any = object

    @property
    @abc.abstractmethod
    def name(self) -> str: ...

    @abc.abstractmethod
    def element(self, value: Any) -> Any:
        """Coerce an int, Fraction or numpy scalar into a field element."""

    @abc.abstractmethod
    def normalize(self, arr: np.ndarray) -> np.ndarray: ...

    @abc.abstractmethod
    def inv(self, x: Any) -> Any: ...

    @abc.abstractmethod
    def matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray: ...

    @abc.abstractmethod
    def random_array(self, rng: np.random.Generator, shape: Tuple[int, ...]) -> np.ndarray:
        ...

    @abc.abstractmethod
    def encode(self, x: Any) -> List[int]:
        """Serialize one element as ``[numerator]`` or ``[numerator, denominator]``."""

    def decode(self, parts: Sequence[int]) -> Any:
        if len(parts) == 1:
            return self.element(int(parts[0]))
        if len(parts) == 2 and int(parts[1]) != 0:
            return self.element(Fraction(int(parts[0]), int(parts[1])))
        raise ParseError("malformed coefficient", {"value": list(parts)})

    def zeros(self, shape: Tuple[int, ...]) -> np.ndarray:
        return np.zeros(shape, dtype=np.int64)

    def eye(self, n: int) -> np.ndarray:
        out = self.zeros((n, n))
        for i in range(n):
            out[i, i] = self.element(1)
        return out

    def array(self, data: Any) -> np.ndarray:
        raw = np.array(data, dtype=object)
        out = self.zeros(raw.shape)
        for idx, value in np.ndenumerate(raw):
            out[idx] = self.element(value)
        return out

    def sign(self, exponent: int) -> Any:
        """(-1)^exponent as a field element."""
        return self.element(-1 if exponent % 2 else 1)

    def is_zero(self, arr: np.ndarray) -> bool:
        return arr.size == 0 or not bool(np.any(arr != 0))

    def equal(self, a: np.ndarray, b: np.ndarray) -> bool:
        if a.shape != b.shape:
            return False
        return self.is_zero(self.normalize(a - b))


@dataclass(frozen=True)
class PrimeField(Field):
    """GF(p) with ``int64`` storage."""

    p: int

    dtype = np.int64

    def __post_init__(self) -> None:
        if self.p < 2 or not _is_prime(self.p) or self.p >= 2**31:
            raise ParseError("field order must be a prime below 2^31", {"p": self.p})

    @property
    def name(self) -> str:
        return f"fp:{self.p}"

    def element(self, value: Any) -> int:
        if isinstance(value, Fraction):
            return (value.numerator * self.inv(value.denominator % self.p)) % self.p
        return int(value) % self.p

    def normalize(self, arr: np.ndarray) -> np.ndarray:
        return np.asarray(arr, dtype=np.int64) % self.p

    def inv(self, x: Any) -> int:
        x = int(x) % self.p
        if x == 0:
            raise ZeroDivisionError("zero has no inverse")
        return pow(x, self.p - 2, self.p)

    def matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        inner = a.shape[1] if a.ndim == 2 else 1
        if (self.p - 1) ** 2 * max(inner, 1) < _INT64_LIMIT:
            return np.asarray(a @ b, dtype=np.int64) % self.p
        wide = a.astype(object) @ b.astype(object)
        return (wide % self.p).astype(np.int64)

    def random_array(self, rng: np.random.Generator, shape: Tuple[int, ...]) -> np.ndarray:
        return rng.integers(0, self.p, size=shape, dtype=np.int64)

    def encode(self, x: Any) -> List[int]:
        value = int(x) % self.p
        if value > self.p // 2:
            value -= self.p
        return [value]


@dataclass(frozen=True)
class RationalField(Field):
    """Q with ``object`` arrays of :class:`Fraction`."""

    dtype = object

    @property
    def name(self) -> str:
        return "q"

    def element(self, value: Any) -> Fraction:
        if isinstance(value, Fraction):
            return value
        if isinstance(value, (np.integer, int)):
            return Fraction(int(value))
        return Fraction(value)

    def zeros(self, shape: Tuple[int, ...]) -> np.ndarray:
        out = np.empty(shape, dtype=object)
        out.fill(Fraction(0))
        return out

    def normalize(self, arr: np.ndarray) -> np.ndarray:
        arr = np.asarray(arr)
        if arr.dtype != object:
            return self.array(arr)
        return arr

    def inv(self, x: Any) -> Fraction:
        x = self.element(x)
        if x == 0:
            raise ZeroDivisionError("zero has no inverse")
        return 1 / x

    def matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        a = self.normalize(a)
        b = self.normalize(b)
        if a.ndim == 2 and b.ndim == 2 and (a.shape[1] == 0 or a.shape[0] == 0 or b.shape[1] == 0):
            return self.zeros((a.shape[0], b.shape[1]))
        if a.ndim == 2 and b.ndim == 1 and (a.shape[1] == 0 or a.shape[0] == 0):
            return self.zeros((a.shape[0],))
        return np.asarray(a @ b, dtype=object)

    def random_array(self, rng: np.random.Generator, shape: Tuple[int, ...]) -> np.ndarray:
        return self.array(rng.integers(-2, 3, size=shape))

    def encode(self, x: Any) -> List[int]:
        x = self.element(x)
        if x.denominator == 1:
            return [x.numerator]
        return [x.numerator, x.denominator]


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    f = 2
    while f * f <= p:
        if p % f == 0:
            return False
        f += 1
    return True


def parse_field(text: str) -> Field:
    """Parse ``q`` or ``fp:P``."""
    text = text.strip().lower()
    if text in ("q", "qq", "rationals"):
        return RationalField()
    if text.startswith("fp:"):
        try:
            p = int(text[3:])
        except ValueError as exc:
            raise ParseError("field order is not an integer", {"field": text}) from exc
        return PrimeField(p)
    raise ParseError("unknown field; expected 'q' or 'fp:P'", {"field": text})


DEFAULT_FIELD = PrimeField(32003)


@dataclass(frozen=True)
class RowReduceResult:
    matrix: np.ndarray
    pivots: Tuple[int, ...]

    @property
    def rank(self) -> int:
        return len(self.pivots)


def rref(field: Field, matrix: np.ndarray) -> RowReduceResult:
    """Reduced row echelon form with first-nonzero pivoting."""
    a = field.normalize(np.array(matrix, copy=True))
    if a.ndim != 2:
        raise ValueError("rref expects a 2-d array")
    rows, cols = a.shape
    pivots: List[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(a[r:, c] != 0)[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        a[r] = field.normalize(a[r] * field.inv(a[r, c]))
        column = a[:, c].copy()
        column[r] = 0
        others = np.nonzero(column != 0)[0]
        if others.size:
            a[others] = field.normalize(a[others] - np.multiply.outer(column[others], a[r]))
        pivots.append(c)
        r += 1
    return RowReduceResult(a, tuple(pivots))


def rank(field: Field, matrix: np.ndarray) -> int:
    if matrix.size == 0:
        return 0
    return rref(field, matrix).rank


def kernel_rows(field: Field, matrix: np.ndarray) -> np.ndarray:
    """Right kernel of ``matrix`` as rows (one basis vector per row)."""
    rows, cols = matrix.shape
    if rows == 0:
        return field.eye(cols)
    res = rref(field, matrix)
    pivot_set = set(res.pivots)
    free = [j for j in range(cols) if j not in pivot_set]
    out = field.zeros((len(free), cols))
    for k, j in enumerate(free):
        out[k, j] = field.element(1)
        for i, pc in enumerate(res.pivots):
            out[k, pc] = field.element(-res.matrix[i, j])
    return out


def image_rows(field: Field, matrix: np.ndarray) -> np.ndarray:
    """Column space of ``matrix`` as echelon rows."""
    if matrix.size == 0:
        return field.zeros((0, matrix.shape[0]))
    res = rref(field, matrix.T)
    return res.matrix[: res.rank]


def solve(field: Field, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve ``a @ x = b`` for ``a`` of full column rank.

    Raises :class:`NotASubspace` when some column of ``b`` is outside the
    column space of ``a``.
    """
    n, r = a.shape
    m = b.shape[1]
    if r == 0:
        if not field.is_zero(b):
            raise NotASubspace("right-hand side is not in the span", {"rank": 0})
        return field.zeros((0, m))
    res = rref(field, np.concatenate([field.normalize(a), field.normalize(b)], axis=1))
    if tuple(pc for pc in res.pivots if pc < r) != tuple(range(r)):
        raise ValueError("solve requires a matrix of full column rank")
    if any(pc >= r for pc in res.pivots):
        raise NotASubspace("right-hand side is not in the span", {"rank": r})
    return res.matrix[:r, r:]


@dataclass(frozen=True, eq=False)
class Subspace:
    """A subspace of ``field^ambient`` stored as RREF basis rows."""

    field: Field
    ambient: int
    basis: np.ndarray
    pivots: Tuple[int, ...]

    def __post_init__(self) -> None:
        self.basis.setflags(write=False)

    @classmethod
    def span(cls, field: Field, ambient: int, rows: Any) -> "Subspace":
        arr = rows if isinstance(rows, np.ndarray) else np.asarray(rows, dtype=object)
        if ambient == 0 or arr.size == 0:
            return cls.zero(field, ambient)
        res = rref(field, field.normalize(arr.reshape(-1, ambient)))
        return cls(field, ambient, np.array(res.matrix[: res.rank]), res.pivots)

    @classmethod
    def zero(cls, field: Field, ambient: int) -> "Subspace":
        return cls(field, ambient, field.zeros((0, ambient)), ())

    @classmethod
    def full(cls, field: Field, ambient: int) -> "Subspace":
        return cls(field, ambient, field.eye(ambient), tuple(range(ambient)))

    @classmethod
    def kernel(cls, field: Field, matrix: np.ndarray) -> "Subspace":
        return cls.span(field, matrix.shape[1], kernel_rows(field, matrix))

    @classmethod
    def image(cls, field: Field, matrix: np.ndarray) -> "Subspace":
        rows = image_rows(field, matrix)
        return cls(field, matrix.shape[0], np.array(rows), tuple(_leading(rows)))

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def contains(self, vectors: np.ndarray) -> bool:
        vectors = np.asarray(vectors).reshape(-1, self.ambient)
        if vectors.shape[0] == 0:
            return True
        residual = self.residual(vectors)
        return self.field.is_zero(residual)

    def residual(self, vectors: np.ndarray) -> np.ndarray:
        """Reduce rows modulo this subspace (zero exactly on members)."""
        vectors = self.field.normalize(np.asarray(vectors).reshape(-1, self.ambient))
        if self.dim == 0:
            return vectors
        coeff = vectors[:, list(self.pivots)]
        return self.field.normalize(vectors - self.field.matmul(coeff, self.basis))

    def includes(self, other: "Subspace") -> bool:
        _check_ambient(self, other)
        return self.contains(other.basis)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return (
            self.ambient == other.ambient
            and self.pivots == other.pivots
            and self.field.equal(self.basis, other.basis)
        )

    def image_under(self, matrix: np.ndarray) -> "Subspace":
        if self.dim == 0:
            return Subspace.zero(self.field, matrix.shape[0])
        return Subspace.span(
            self.field, matrix.shape[0], self.field.matmul(matrix, self.basis.T).T
        )

    def preimage_under(self, matrix: np.ndarray) -> "Subspace":
        """``{v : matrix @ v in self}``."""
        complement = _annihilator(self)
        if complement.shape[0] == 0:
            return Subspace.full(self.field, matrix.shape[1])
        return Subspace.kernel(self.field, self.field.matmul(complement, matrix))


def _leading(rows: np.ndarray) -> List[int]:
    out = []
    for row in rows:
        nz = np.nonzero(row != 0)[0]
        out.append(int(nz[0]))
    return out


def _annihilator(space: Subspace) -> np.ndarray:
    """Rows spanning the linear forms vanishing on ``space``."""
    if space.dim == 0:
        return space.field.eye(space.ambient)
    return kernel_rows(space.field, space.basis)


def _check_ambient(u: Subspace, v: Subspace) -> None:
    if u.ambient != v.ambient:
        raise AmbientMismatch(
            "subspaces live in different ambient spaces",
            {"left": u.ambient, "right": v.ambient},
        )


def sum_intersection(u: Subspace, v: Subspace) -> Tuple[Subspace, Subspace]:
    """Zassenhaus: one echelon form of [[U, U], [V, 0]] gives U+V and U∩V."""
    _check_ambient(u, v)
    field, n = u.field, u.ambient
    if u.dim == 0 or v.dim == 0:
        total = u if v.dim == 0 else v
        return total, Subspace.zero(field, n)
    top = np.concatenate([u.basis, u.basis], axis=1)
    bottom = np.concatenate([v.basis, field.zeros((v.dim, n))], axis=1)
    res = rref(field, np.concatenate([top, bottom], axis=0))
    reduced = res.matrix[: res.rank]
    left_rank = sum(1 for pc in res.pivots if pc < n)
    total = Subspace(field, n, np.array(reduced[:left_rank, :n]), res.pivots[:left_rank])
    inter_rows = np.array(reduced[left_rank:, n:])
    inter = Subspace(field, n, inter_rows, tuple(pc - n for pc in res.pivots[left_rank:]))
    return total, inter


def quotient_basis(u: Subspace, v: Subspace) -> np.ndarray:
    """Rows in ``u`` whose classes form a basis of ``u / v``."""
    _check_ambient(u, v)
    if not u.includes(v):
        raise NotASubspace("quotient requested but v is not contained in u")
    residual = v.residual(u.basis) if u.dim else u.basis
    if residual.shape[0] == 0:
        return residual
    res = rref(u.field, residual)
    return np.array(res.matrix[: res.rank])


@dataclass(frozen=True, eq=False)
class SubspaceArith:
    sum: Subspace
    intersection: Subspace
    quotient: Optional[np.ndarray]


def subspace_arith(u: Subspace, v: Subspace, with_quotient: bool = True) -> SubspaceArith:
    total, inter = sum_intersection(u, v)
    quotient = quotient_basis(u, v) if with_quotient else None
    logger.trace(
        "subspace_arith: dim u=%d dim v=%d sum=%d cap=%d", u.dim, v.dim, total.dim, inter.dim
    )
    return SubspaceArith(total, inter, quotient)


@dataclass(frozen=True, eq=False)
class Subquotient:
    """``upper / lower`` with a fixed basis of representatives.

    ``reps`` are rows of the ambient space lying in ``upper``; their classes
    are a basis of the quotient.
    """

    upper: Subspace
    lower: Subspace
    reps: np.ndarray

    @classmethod
    def of(cls, upper: Subspace, lower: Subspace) -> "Subquotient":
        return cls(upper, lower, quotient_basis(upper, lower))

    @property
    def field(self) -> Field:
        return self.upper.field

    @property
    def dim(self) -> int:
        return self.reps.shape[0]

    @property
    def ambient(self) -> int:
        return self.upper.ambient

    def coordinates(self, vectors: np.ndarray) -> np.ndarray:
        """Coordinates (one row per vector) of classes of rows in ``upper``."""
        vectors = np.asarray(vectors).reshape(-1, self.ambient)
        if vectors.shape[0] == 0 or self.dim == 0:
            if self.dim == 0 and not self.upper.contains(vectors):
                raise NotASubspace("vector outside the upper subspace")
            return self.field.zeros((vectors.shape[0], self.dim))
        basis = np.concatenate([self.reps, self.lower.basis], axis=0).T
        coords = solve(self.field, basis, vectors.T)
        return np.array(coords[: self.dim].T)

    def induced(self, operator: np.ndarray, target: "Subquotient") -> np.ndarray:
        """Matrix of the map induced by ``operator`` from self to ``target``."""
        field = self.field
        if self.dim == 0:
            return field.zeros((target.dim, 0))
        images = field.matmul(operator, self.reps.T).T
        return target.coordinates(images).T

    def lift(self, coords: np.ndarray) -> np.ndarray:
        """Representatives in the ambient space for coordinate rows."""
        coords = np.asarray(coords).reshape(-1, self.dim)
        if self.dim == 0:
            return self.field.zeros((coords.shape[0], self.ambient))
        return self.field.matmul(coords, self.reps)


@dataclass(frozen=True, eq=False)
class Matrix:
    """Sparse matrix over a field: ``(row, col, value)`` triples, no zeros stored."""

    field: Field
    rows: int
    cols: int
    entries: Tuple[Tuple[int, int, Any], ...]

    def __post_init__(self) -> None:
        for r, c, v in self.entries:
            if not (0 <= r < self.rows and 0 <= c < self.cols):
                raise ValueError(f"entry ({r}, {c}) out of range for {self.rows}x{self.cols}")
            if self.field.element(v) == 0:
                raise ValueError(f"explicit zero stored at ({r}, {c})")

    @classmethod
    def from_dense(cls, field: Field, arr: np.ndarray) -> "Matrix":
        arr = field.normalize(np.asarray(arr))
        rows, cols = arr.shape
        entries = tuple(
            (int(r), int(c), field.element(arr[r, c])) for r, c in zip(*np.nonzero(arr != 0))
        )
        return cls(field, rows, cols, entries)

    @classmethod
    def from_triples(
        cls, field: Field, rows: int, cols: int, triples: Iterable[Tuple[int, int, Any]]
    ) -> "Matrix":
        dense = field.zeros((rows, cols))
        for r, c, v in triples:
            dense[r, c] = field.element(dense[r, c] + field.element(v))
        return cls.from_dense(field, dense)

    def dense(self) -> np.ndarray:
        out = self.field.zeros((self.rows, self.cols))
        for r, c, v in self.entries:
            out[r, c] = self.field.element(v)
        return out

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return (self.rows, self.cols) == (other.rows, other.cols) and self.field.equal(
            self.dense(), other.dense()
        )


def reduce(m: Matrix) -> Tuple[Matrix, Tuple[int, ...], int]:
    """Unique reduced row echelon form of a sparse matrix."""
    res = rref(m.field, m.dense())
    return Matrix.from_dense(m.field, res.matrix), res.pivots, res.rank


def kernel_image(m: Matrix) -> Tuple[Subspace, Subspace]:
    dense = m.dense()
    return Subspace.kernel(m.field, dense), Subspace.image(m.field, dense)
