"""Twisted modules, the generators Γ_i and G_n, and semiorthogonal data.

Γ_i is ``A_i ⊕ A_{i-1}[1]`` twisted so that ``d(α, a) = (dα + t a, -da + π(α·c/t))``
where ``A_i = A_n / t^{i+1}`` and ``π`` reduces modulo ``t^i``. Maps out of Γ_i
are determined by the images of ``1 ∈ A_i`` and ``ε = 1 ∈ A_{i-1}[1]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from .cdg_algebra import DeformedAlgebra, curvature_over_t_vector, opposite
from .cdg_module import (
    ComparisonCheck,
    Morphism,
    QdgModule,
    check_comparison,
    cocone_module,
    direct_sum_modules,
    dualize,
    f_hom_data,
    hom_complex,
    m_i,
    regular_quotient,
    restricted_complex,
    shift_module,
    subquotient_module,
    validate_module,
)
from .errors import (
    BlockMismatch,
    EquivalenceViolation,
    IndexOutOfRange,
    NotRLinear,
    OrderNotSupported,
)
from .exact_linear import Subquotient, Subspace
from .filtration import gr, is_n_acyclic
from .graded_core import (
    Complex,
    GradedMap,
    cone,
    is_quasi_iso,
    shift,
    short_exact,
    triangle_rank_identity,
)
from .logger import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True, eq=False)
class TwistSpec:
    """Summands plus an odd twisting matrix on their direct sum."""

    summands: Tuple[QdgModule, ...]
    twisting: np.ndarray

    @cached_property
    def total(self) -> QdgModule:
        return direct_sum_modules(list(self.summands))

    @cached_property
    def residual(self) -> np.ndarray:
        """Maurer-Cartan residual ``(d + F)² - c·``."""
        m = self.total
        fld = m.field
        df = fld.normalize(m.d + self.twisting)
        return fld.normalize(fld.matmul(df, df) - m.curvature_operator)

    @property
    def is_maurer_cartan(self) -> bool:
        return self.total.field.is_zero(self.residual)


def twist(spec: TwistSpec, name: str = "") -> QdgModule:
    """The twisted module; a :class:`CdgModule` exactly when the residual vanishes."""
    m = spec.total
    if spec.twisting.shape != (m.dim, m.dim):
        raise BlockMismatch(
            "twisting matrix does not match the summands",
            {"expected": m.dim, "shape": tuple(spec.twisting.shape)},
        )
    try:
        Morphism(m, m, 1, spec.twisting)
    except NotRLinear as exc:
        raise NotRLinear("twisting matrix is not A-linear of degree 1", exc.where) from None
    fld = m.field
    raw = QdgModule(m.algebra, m.space, m.t, fld.normalize(m.d + spec.twisting), m.action, name)
    curved = spec.is_maurer_cartan
    logger.debug("twist %s: %d summands, Maurer-Cartan=%s", name, len(spec.summands), curved)
    return validate_module(raw, curved=curved)


def _check_index(a: DeformedAlgebra, i: int) -> None:
    if not 0 <= i <= a.order:
        raise IndexOutOfRange("generator index out of range", {"i": i, "n": a.order})


def gamma_spec(a: DeformedAlgebra, i: int, witness: Optional[np.ndarray] = None) -> TwistSpec:
    """X_i = A_i ⊕ A_{i-1}[1] with the twisting γ_i (i ≥ 1)."""
    _check_index(a, i)
    if i == 0:
        raise IndexOutOfRange("Γ_0 = A carries no twisting")
    fld, dim = a.field, a.dim
    c_over_t = witness if witness is not None else curvature_over_t_vector(a)
    top = regular_quotient(a, i)
    bottom = shift_module(regular_quotient(a, i - 1), 1)
    p, q = top.dim, bottom.dim
    twisting = fld.zeros((p + q, p + q))
    for s in range(i):
        for j in range(dim):
            # t·: A_{i-1}[1] → A_i
            twisting[(s + 1) * dim + j, p + s * dim + j] = fld.element(1)
    for s in range(i + 1):
        for j in range(dim):
            # α ↦ π(α·c/t): A_i → A_{i-1}[1]
            image = a.multiply(a.basis_vector(a.names[j], s), c_over_t)
            twisting[p:, s * dim + j] = image[:i].reshape(-1)
    return TwistSpec((top, bottom), twisting)


def gamma(a: DeformedAlgebra, i: int, witness: Optional[np.ndarray] = None) -> QdgModule:
    """Γ_i; Γ_0 = A."""
    _check_index(a, i)
    if i == 0:
        return regular_quotient(a, 0).with_name("Γ_0")
    spec = gamma_spec(a, i, witness)
    if not spec.is_maurer_cartan:
        raise EquivalenceViolation("γ_i fails the Maurer-Cartan equation", {"i": i})
    return twist(spec, name=f"Γ_{i}")


def gamma_unit_indices(a: DeformedAlgebra, i: int) -> Tuple[int, Optional[int]]:
    """Basis positions of 1 ∈ A_i and ε = 1 ∈ A_{i-1}[1] inside Γ_i."""
    unit = a.unit_index
    if i == 0:
        return unit, None
    return unit, (i + 1) * a.dim + unit


def same_module(m: QdgModule, n: QdgModule) -> bool:
    fld = m.field
    return (
        m.algebra == n.algebra
        and m.space.same_shape(n.space)
        and fld.equal(m.t, n.t)
        and fld.equal(m.d, n.d)
        and all(fld.equal(x, y) for x, y in zip(m.action, n.action))
    )


def f_hom_comparison(m: QdgModule, i: int, generator: Optional[QdgModule] = None) -> ComparisonCheck:
    """hom(Γ_i, M) → F_i(M), f ↦ (f(1), f(ε))."""
    a = m.algebra
    g = generator if generator is not None else gamma(a, i)
    hom = hom_complex(g, m)
    fh = f_hom_data(m, i)
    unit, eps = gamma_unit_indices(a, i)
    fld = m.field
    mat = fld.zeros((fh.complex.dim, hom.dim))
    for k in range(hom.dim):
        f = hom.map_at(k)
        parts = [fh.first.coordinates(f[:, unit])[0]]
        if eps is not None:
            parts.append(fh.second.coordinates(f[:, eps])[0])
        mat[:, k] = np.concatenate(parts)
    return check_comparison(hom.complex, fh.complex, mat)


@dataclass(frozen=True, eq=False)
class GnConstruction:
    module: QdgModule
    unit_index: int
    gamma_n: QdgModule


def g_construction(a: DeformedAlgebra) -> GnConstruction:
    """G_n = coCone(Γ_n → Γ_n / t^n Γ_n) with the position of 1_n."""
    n = a.order
    gn = gamma(a, n)
    if n == 0:
        return GnConstruction(gn.with_name("G_0"), a.unit_index, gn)
    fld = a.field
    quotient = subquotient_module(
        gn, Subspace.full(fld, gn.dim), gn.image_t(n), name=f"Γ_{n}/t^{n}Γ_{n}"
    )
    projection = Morphism(gn, quotient.module, 0, quotient.sq.coordinates(fld.eye(gn.dim)).T)
    module = cocone_module(projection).with_name(f"G_{n}")
    return GnConstruction(module, quotient.module.dim + a.unit_index, gn)


def g_module(a: DeformedAlgebra) -> QdgModule:
    return g_construction(a).module


def d_right(a: DeformedAlgebra, i: int) -> QdgModule:
    """D_i: the right-module generator, as a left module over the opposite algebra."""
    return gamma(opposite(a), i).with_name(f"D_{i}")


def gamma_star(a: DeformedAlgebra, i: int) -> QdgModule:
    """Γ_i* = D_i^∨, a left module over ``a``."""
    return dualize(d_right(a, i)).with_name(f"Γ_{i}*")


# triangle


@dataclass(frozen=True, eq=False)
class TriaReport:
    index: int
    total: Complex
    kernel: Complex
    x: Complex
    y: Complex
    z: Complex
    quotient: Complex
    sequences: Dict[str, bool]
    z_acyclic: bool
    quasi_isos: Dict[str, bool]
    rank_identity: bool

    @property
    def ok(self) -> bool:
        return (
            all(self.sequences.values())
            and self.z_acyclic
            and all(self.quasi_isos.values())
            and self.rank_identity
        )


def tria_objects(m: QdgModule, i: Optional[int] = None) -> TriaReport:
    """Ker t[1] → (M)_i → Ker t^i / t Ker t^{i+1} with its comparison objects.

    Inside (M)_i = Ker t^{i+1}[1] ⊕ Ker t^i: X = Ker t^{i+1}[1] ⊕ t Ker t^{i+1},
    Y = (M)_i / Ker t[1], Z = X / Ker t[1] ≅ Cone(t: Ker t^{i+1}/Ker t → t Ker t^{i+1}).
    """
    i = m.order if i is None else i
    if not 1 <= i <= m.order:
        raise IndexOutOfRange("triangle index out of range", {"i": i, "n": m.order})
    fld = m.field
    fh = f_hom_data(m, i)
    total = m_i(m, i)
    px, py = fh.first.dim, fh.second.dim
    dim = px + py

    def embed(x_rows: np.ndarray, y_rows: np.ndarray) -> Subspace:
        rows = []
        if x_rows.shape[0]:
            rows.append(np.concatenate([x_rows, fld.zeros((x_rows.shape[0], py))], axis=1))
        if y_rows.shape[0]:
            rows.append(np.concatenate([fld.zeros((y_rows.shape[0], px)), y_rows], axis=1))
        if not rows:
            return Subspace.zero(fld, dim)
        return Subspace.span(fld, dim, np.concatenate(rows, axis=0))

    empty_x, empty_y = fld.zeros((0, px)), fld.zeros((0, py))
    ker_t = embed(fh.first.coordinates(m.kernel_t(1).basis), empty_y)
    t_ker = m.kernel_t(i + 1).image_under(m.t)
    x_sub = embed(fld.eye(px), fh.second.coordinates(t_ker.basis))
    zero, full = Subspace.zero(fld, dim), Subspace.full(fld, dim)

    pieces: Dict[str, Tuple[Complex, Subquotient]] = {
        "kernel": total.subquotient(ker_t, zero),
        "total": total.subquotient(full, zero),
        "x": total.subquotient(x_sub, zero),
        "y": total.subquotient(full, ker_t),
        "z": total.subquotient(x_sub, ker_t),
        "quotient": total.subquotient(full, x_sub),
    }

    def induced(src: str, tgt: str) -> GradedMap:
        (cs, ss), (ct, st) = pieces[src], pieces[tgt]
        return GradedMap(fld, cs.space, ct.space, 0, ss.induced(fld.eye(dim), st))

    sequences = {
        "kernel→total→y": short_exact(fld, induced("kernel", "total"), induced("total", "y")).exact,
        "x→total→quotient": short_exact(fld, induced("x", "total"), induced("total", "quotient")).exact,
        "kernel→x→z": short_exact(fld, induced("kernel", "x"), induced("x", "z")).exact,
        "z→y→quotient": short_exact(fld, induced("z", "y"), induced("y", "quotient")).exact,
    }
    cx = {name: c for name, (c, _) in pieces.items()}
    quasi_isos = {
        "kernel→x": is_quasi_iso(cx["kernel"], cx["x"], induced("kernel", "x").matrix),
        "y→quotient": is_quasi_iso(cx["y"], cx["quotient"], induced("y", "quotient").matrix),
    }
    rank_ok = _triangle_with_third(
        cx["kernel"], cx["total"], induced("kernel", "total").matrix, cx["quotient"]
    )
    report = TriaReport(
        i,
        cx["total"],
        cx["kernel"],
        cx["x"],
        cx["y"],
        cx["z"],
        cx["quotient"],
        sequences,
        cx["z"].is_acyclic(),
        quasi_isos,
        rank_ok,
    )
    if not report.ok:
        logger.warning("triangle checks failed for %s at i=%d", m.name, i)
    return report


def _triangle_with_third(source: Complex, target: Complex, f: np.ndarray, third: Complex) -> bool:
    """H(third) has the dimensions the long exact sequence of f predicts for its cone."""
    predicted = triangle_rank_identity(source, target, f)
    expected = {d: exp for d, _, exp in predicted.degrees if exp}
    return predicted.ok and expected == third.report.dims


# semiorthogonal decomposition data


def t_power_complex(m: QdgModule, i: int) -> Complex:
    """t^i M with the restricted predifferential (a complex for i ≥ 1)."""
    cx, _ = restricted_complex(m, m.image_t(i))
    return cx


def gr_profile(m: QdgModule) -> Tuple[Dict[int, int], ...]:
    return gr(m).profile()


@dataclass(frozen=True)
class SodMembership:
    profile: Tuple[Dict[int, int], ...]
    components: Tuple[int, ...]
    lower_order: bool
    n_acyclic: bool


def sod_membership(m: QdgModule) -> SodMembership:
    """Members of T_i (only Gr_t^i non-acyclic) and of the image of D(A_{n-1})."""
    report = gr(m)
    acyclic = [r.is_acyclic for r in report.reports]
    components = tuple(
        i
        for i in range(len(acyclic))
        if all(acyclic[j] for j in range(len(acyclic)) if j != i)
    )
    lower = t_power_complex(m, m.order).is_acyclic() if m.order >= 1 else m.dim == 0
    return SodMembership(report.profile(), components, lower, all(acyclic))


@dataclass(frozen=True)
class CompactGenerationCheck:
    hom_side: bool
    filtration_side: bool

    @property
    def agree(self) -> bool:
        return self.hom_side == self.filtration_side


def compact_generation_check(
    m: QdgModule, generators: Optional[Sequence[QdgModule]] = None
) -> CompactGenerationCheck:
    """[∀i: hom(Γ_i, M) acyclic] against n-acyclicity of M."""
    a = m.algebra
    gens = generators if generators is not None else [gamma(a, i) for i in range(a.order + 1)]
    hom_side = all(hom_complex(g, m).complex.is_acyclic() for g in gens)
    return CompactGenerationCheck(hom_side, is_n_acyclic(m).answer)


def corepresentability_check(
    m: QdgModule, gn: Optional[GnConstruction] = None
) -> ComparisonCheck:
    """φ: hom(G_n, M) → t^n M, f ↦ t^n f(1_n), checked to be a quasi-isomorphism."""
    a = m.algebra
    g = gn if gn is not None else g_construction(a)
    fld = m.field
    hom = hom_complex(g.module, m)
    target, sq = restricted_complex(m, m.image_t(a.order))
    tn = m.t_pow(a.order)
    mat = fld.zeros((target.dim, hom.dim))
    for k in range(hom.dim):
        mat[:, k] = sq.coordinates(fld.matmul(tn, hom.map_at(k)[:, g.unit_index]))[0]
    check = check_comparison(hom.complex, target, mat)
    qiso = check.chain_map and is_quasi_iso(hom.complex, target, mat)
    return ComparisonCheck(hom.complex, target, mat, check.chain_map, qiso)


def semiorthogonality_check(gn: QdgModule, lower: QdgModule) -> bool:
    """H(hom(G_n, ι N)) = 0 for a module N killed by t^n."""
    return hom_complex(gn, lower).complex.is_acyclic()


def uncurved_generator_check(m: QdgModule, i: int) -> ComparisonCheck:
    """For uncurved A_n: hom(A_i, M) ≅ Ker t^{i+1}_M via f ↦ f(1)."""
    a = m.algebra
    if a.is_curved:
        raise OrderNotSupported("plain quotient generators need an uncurved algebra")
    gen = regular_quotient(a, i)
    fld = m.field
    hom = hom_complex(gen, m)
    target, sq = restricted_complex(m, m.kernel_t(i + 1))
    mat = fld.zeros((target.dim, hom.dim))
    for k in range(hom.dim):
        mat[:, k] = sq.coordinates(hom.map_at(k)[:, a.unit_index])[0]
    return check_comparison(hom.complex, target, mat)


# gluing


@dataclass(frozen=True, eq=False)
class GluingReport:
    x: Complex
    kernel: Complex
    cone: Complex
    triangle: bool

    @property
    def x_dims(self) -> Dict[int, int]:
        return self.x.report.dims

    @property
    def kernel_dims(self) -> Dict[int, int]:
        return self.kernel.report.dims

    @property
    def cone_dims(self) -> Dict[int, int]:
        return self.cone.report.dims

    @property
    def agree(self) -> bool:
        shifted = shift(self.x, 1).report.dims
        return shifted == self.cone_dims and self.kernel_dims == self.x_dims and self.triangle


def right_multiplication(a: DeformedAlgebra, element: np.ndarray) -> np.ndarray:
    """Matrix of α ↦ α·x on A = A_n / t, for an element x of A_n."""
    fld = a.field
    out = fld.zeros((a.dim, a.dim))
    for j, name in enumerate(a.names):
        out[:, j] = a.multiply(a.basis_vector(name), element)[0]
    return out


def gluing_bimodule(a: DeformedAlgebra) -> GluingReport:
    """X = hom(G_0, G_1) against Ker t_{G_1} and Cone(c/t: A[-1] → A[1])."""
    if a.order != 1:
        raise OrderNotSupported(
            "the gluing comparison is available for n = 1 only", {"n": a.order}
        )
    fld = a.field
    g0 = gamma(a, 0)
    g1 = g_module(a)
    x = hom_complex(g0, g1).complex
    kernel, _ = restricted_complex(g1, g1.kernel_t(1))
    base = Complex(fld, g0.space, g0.d)
    mult = right_multiplication(a, curvature_over_t_vector(a))
    src, tgt = shift(base, -1), shift(base, 1)
    cone_complex = cone(src, tgt, mult)
    triangle = triangle_rank_identity(src, tgt, mult, cone_complex).ok
    report = GluingReport(x, kernel, cone_complex, triangle)
    logger.info("gluing bimodule: H(X)=%s, H(Cone)=%s", report.x_dims, report.cone_dims)
    return report
