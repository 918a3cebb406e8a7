"""The t-adic and K-filtrations and the predicates built on them."""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from .cdg_algebra import DeformedAlgebra, truncate
from .cdg_module import (
    ComparisonCheck,
    Morphism,
    QdgModule,
    SubquotientModule,
    change_algebra,
    check_comparison,
    cone_module,
    dualize,
    hom_complex,
    subquotient_module,
)
from .errors import AlgebraMismatch, EquivalenceViolation, IndexOutOfRange
from .exact_linear import Subquotient, Subspace, sum_intersection
from .graded_core import (
    Complex,
    ComplexReport,
    ExactnessReport,
    GradedMap,
    is_quasi_iso,
    short_exact,
    subquotient_space,
)
from .logger import get_logger

logger = get_logger(__name__)

T_ADIC = "t-adic"
K_FILTRATION = "K"


@dataclass(frozen=True, eq=False)
class FiltrationReport:
    kind: str
    pieces: Tuple[SubquotientModule, ...]

    @property
    def complexes(self) -> Tuple[Complex, ...]:
        return tuple(_as_complex(p.module) for p in self.pieces)

    @property
    def reports(self) -> Tuple[ComplexReport, ...]:
        return tuple(c.report for c in self.complexes)

    @property
    def acyclic(self) -> bool:
        return all(r.is_acyclic for r in self.reports)

    def profile(self) -> Tuple[dict, ...]:
        return tuple(r.dims for r in self.reports)


def _as_complex(m: QdgModule) -> Complex:
    return Complex(m.field, m.space, m.d)


def gr_piece(m: QdgModule, kind: str, i: int) -> SubquotientModule:
    """Gr^i as a module over A (t acts as zero)."""
    n = m.order
    if not 0 <= i <= n:
        raise IndexOutOfRange("filtration index out of range", {"i": i, "n": n})
    base = truncate(m.algebra, 0)
    if kind == T_ADIC:
        upper, lower = m.image_t(i), m.image_t(i + 1)
        label = f"Gr_t^{i}"
    elif kind == K_FILTRATION:
        upper, lower = m.kernel_t(i + 1), m.kernel_t(i)
        label = f"Gr_K^{i}"
    else:
        raise ValueError(f"unknown filtration kind {kind!r}")
    return subquotient_module(m, upper, lower, algebra=base, name=f"{label}({m.name})")


def gr(m: QdgModule, kind: str = T_ADIC) -> FiltrationReport:
    pieces = tuple(gr_piece(m, kind, i) for i in range(m.order + 1))
    logger.debug("%s pieces of %s: %s", kind, m.name, [p.module.dim for p in pieces])
    return FiltrationReport(kind, pieces)


def _same_piece(x: QdgModule, y: QdgModule) -> bool:
    if x.space.dims != y.space.dims:
        return False
    return _as_complex(x).report.dims == _as_complex(y).report.dims


@dataclass(frozen=True)
class GrExchange:
    """Index-matched comparisons of Gr(M^∨) with the duals of Gr(M)."""

    t_of_dual: Tuple[bool, ...]
    k_of_dual: Tuple[bool, ...]

    @property
    def ok(self) -> bool:
        return all(self.t_of_dual) and all(self.k_of_dual)

    def mismatches(self) -> List[Tuple[str, int]]:
        out = [(T_ADIC, i) for i, same in enumerate(self.t_of_dual) if not same]
        return out + [(K_FILTRATION, i) for i, same in enumerate(self.k_of_dual) if not same]


def gr_exchange(m: QdgModule) -> GrExchange:
    """Gr_t^i(M^∨) against (Gr_K^i M)^∨ and Gr_K^i(M^∨) against (Gr_t^i M)^∨.

    Pieces are compared by graded dimension and by cohomology.
    """
    dual = dualize(m)
    t_of_dual, k_of_dual = [], []
    for i in range(m.order + 1):
        t_of_dual.append(
            _same_piece(
                gr_piece(dual, T_ADIC, i).module, dualize(gr_piece(m, K_FILTRATION, i).module)
            )
        )
        k_of_dual.append(
            _same_piece(
                gr_piece(dual, K_FILTRATION, i).module, dualize(gr_piece(m, T_ADIC, i).module)
            )
        )
    out = GrExchange(tuple(t_of_dual), tuple(k_of_dual))
    if not out.ok:
        logger.warning(
            "Gr pieces of %s^∨ do not match the dual pieces: %s", m.name, out.mismatches()
        )
    return out


@dataclass(frozen=True, eq=False)
class NAcyclicity:
    answer: bool
    dual_route_answer: bool
    t_adic: FiltrationReport
    k_filtration: FiltrationReport


def is_n_acyclic(m: QdgModule) -> NAcyclicity:
    """Both filtration routes, cross-asserted."""
    t_rep = gr(m, T_ADIC)
    k_rep = gr(m, K_FILTRATION)
    t_answer, k_answer = t_rep.acyclic, k_rep.acyclic
    if t_answer != k_answer:
        raise EquivalenceViolation(
            "t-adic and K-filtration acyclicity disagree",
            {"t_adic": t_answer, "k": k_answer, "module": m.name or "?"},
        )
    logger.info("n-acyclicity of %s: %s", m.name or "<module>", t_answer)
    return NAcyclicity(t_answer, k_answer, t_rep, k_rep)


def gr_map(f: Morphism, i: int) -> Tuple[Complex, Complex, np.ndarray]:
    """Gr_t^i(f) as a chain map."""
    src = gr_piece(f.source, T_ADIC, i)
    tgt = gr_piece(f.target, T_ADIC, i)
    mat = src.sq.induced(f.matrix, tgt.sq)
    return _as_complex(src.module), _as_complex(tgt.module), mat


def is_n_quasi_iso(f: Morphism) -> bool:
    """Cone n-acyclic, cross-checked against Gr_t-level quasi-isomorphisms."""
    f.require_closed_degree_zero()
    by_cone = is_n_acyclic(cone_module(f)).answer
    by_gr = all(is_quasi_iso(*gr_map(f, i)) for i in range(f.source.order + 1))
    if by_cone != by_gr:
        raise EquivalenceViolation(
            "cone and graded routes disagree", {"cone": by_cone, "graded": by_gr}
        )
    return by_cone


def is_rn_free(m: QdgModule) -> bool:
    """dim Ker t = dim Im t^n in every degree."""
    ker = m.space.subspace_dims(m.kernel_t(1))
    img = m.space.subspace_dims(m.image_t(m.order))
    return ker == img


def free_gr_isomorphisms(m: QdgModule) -> List[bool]:
    """For each i, whether t^i: M/tM → Gr_t^i(M) is an isomorphism of complexes."""
    base = gr_piece(m, T_ADIC, 0)
    out = []
    for i in range(m.order + 1):
        piece = gr_piece(m, T_ADIC, i)
        mat = base.sq.induced(m.t_pow(i), piece.sq)
        check = check_comparison(_as_complex(base.module), _as_complex(piece.module), mat)
        out.append(check.ok)
    return out


# exact-sequence identities


@dataclass(frozen=True)
class IdentityReport:
    entries: Tuple[Tuple[str, bool], ...]

    @property
    def ok(self) -> bool:
        return all(passed for _, passed in self.entries)

    def failing(self) -> List[str]:
        return [name for name, passed in self.entries if not passed]


def _sq_map(m: QdgModule, src: Subquotient, tgt: Subquotient, operator: np.ndarray) -> GradedMap:
    fld = m.field
    mat = src.induced(operator, tgt)
    src_space = subquotient_space(m.space, src)
    tgt_space = subquotient_space(m.space, tgt)
    return GradedMap(fld, src_space, tgt_space, 0, mat)


def _exact(m: QdgModule, a: Subquotient, b: Subquotient, c: Subquotient, f_op, g_op) -> ExactnessReport:
    return short_exact(m.field, _sq_map(m, a, b, f_op), _sq_map(m, b, c, g_op))


def structure_identities(m: QdgModule, i: int, j: int) -> IdentityReport:
    """t^iM ∩ Ker t^j = t^i Ker t^{i+j}, plus the two short exact sequences at index i."""
    n = m.order
    if not (0 <= i <= n + 1 and 0 <= j <= n + 1):
        raise IndexOutOfRange("indices out of range", {"i": i, "j": j, "n": n})
    fld = m.field
    eye = fld.eye(m.dim)
    entries = []

    _, cap = sum_intersection(m.image_t(i), m.kernel_t(j))
    entries.append(("intersection", cap == m.kernel_t(i + j).image_under(m.t_pow(i))))

    if i >= 1:
        ker_i, ker_next = m.kernel_t(i), m.kernel_t(i + 1)
        a = Subquotient.of(
            ker_i.image_under(m.t_pow(i - 1)), ker_next.image_under(m.t_pow(i))
        )
        b = Subquotient.of(m.image_t(i - 1), m.image_t(i))
        c = Subquotient.of(m.image_t(i), m.image_t(i + 1))
        entries.append(("t-power sequence", _exact(m, a, b, c, eye, m.t).exact))

        t_ker_next = ker_next.image_under(m.t)
        t_ker = ker_i.image_under(m.t)
        a2 = Subquotient.of(t_ker_next, t_ker)
        b2 = Subquotient.of(ker_i, t_ker)
        c2 = Subquotient.of(ker_i, t_ker_next)
        entries.append(("kernel sequence", _exact(m, a2, b2, c2, eye, eye).exact))

        target = Subquotient.of(ker_next.image_under(m.t_pow(i)), Subspace.zero(fld, m.dim))
        iso = _sq_map(m, a2, target, m.t_pow(i - 1))
        entries.append(
            (
                "kernel sequence isomorphism",
                iso.matrix.shape[0] == iso.matrix.shape[1]
                and Subspace.kernel(fld, iso.matrix).dim == 0,
            )
        )
    report = IdentityReport(tuple(entries))
    if not report.ok:
        logger.warning("structure identities failed for %s: %s", m.name, report.failing())
    return report


# change of order


def forget(m: QdgModule, a: DeformedAlgebra) -> QdgModule:
    """Restrict scalars along A_n → A_m for a module over A_m = truncate(a, m)."""
    if m.order > a.order or truncate(a, m.order) != m.algebra:
        raise AlgebraMismatch("module is not over a truncation of the target algebra")
    return change_algebra(m, a, name=f"ι({m.name})" if m.name else "")


def _check_power(m: QdgModule, i: int) -> None:
    if not 1 <= i <= m.order + 1:
        raise IndexOutOfRange("power out of range", {"i": i, "n": m.order})


def coker_t_pow(m: QdgModule, i: int) -> SubquotientModule:
    """M / t^i M over A_{i-1}."""
    _check_power(m, i)
    full = Subspace.full(m.field, m.dim)
    return subquotient_module(
        m, full, m.image_t(i), truncate(m.algebra, i - 1), f"Coker t^{i}({m.name})"
    )


def ker_t_pow(m: QdgModule, i: int) -> SubquotientModule:
    """Ker t^i over A_{i-1}."""
    _check_power(m, i)
    zero = Subspace.zero(m.field, m.dim)
    return subquotient_module(
        m, m.kernel_t(i), zero, truncate(m.algebra, i - 1), f"Ker t^{i}({m.name})"
    )


def coker_adjunction(m: QdgModule, n_lower: QdgModule, i: int) -> ComparisonCheck:
    """hom(M / t^i M, N) ≅ hom(M, ι N) via precomposition with the projection."""
    coker = coker_t_pow(m, i)
    fld = m.field
    left = hom_complex(coker.module, n_lower)
    right = hom_complex(m, forget(n_lower, m.algebra))
    projection = coker.sq.coordinates(fld.eye(m.dim)).T
    mat = fld.zeros((right.dim, left.dim))
    for k in range(left.dim):
        mat[:, k] = right.coordinates(fld.matmul(left.map_at(k), projection))
    return check_comparison(left.complex, right.complex, mat)


def kernel_adjunction(m: QdgModule, n_lower: QdgModule, i: int) -> ComparisonCheck:
    """hom(ι N, M) ≅ hom(N, Ker t^i M) via postcomposition with the inclusion."""
    ker = ker_t_pow(m, i)
    fld = m.field
    left = hom_complex(n_lower, ker.module)
    right = hom_complex(forget(n_lower, m.algebra), m)
    inclusion = ker.sq.reps.T
    mat = fld.zeros((right.dim, left.dim))
    for k in range(left.dim):
        mat[:, k] = right.coordinates(fld.matmul(inclusion, left.map_at(k)))
    return check_comparison(left.complex, right.complex, mat)


def kernel_acyclicity_ladder(m: QdgModule) -> List[Tuple[int, bool]]:
    """For each i, whether Ker t^i_M is (i-1)-acyclic over A_{i-1}."""
    return [
        (i, is_n_acyclic(ker_t_pow(m, i).module).answer) for i in range(1, m.order + 2)
    ]
