"""Staged resolutions and the fibration predicate.

A tower ``⋯ → P_1 → P_0 → M`` is built one surjection at a time: each stage
covers the kernel of the previous one. Totalizations are finite: the
``s``-stage total ``⊕ P_j[j]`` is compared against the ``s + margin`` stage
total, and only degrees of the window on which both agree are reported as
verified. All other window degrees are flagged.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .cdg_algebra import DeformedAlgebra
from .cdg_module import (
    CdgModule,
    HomComplex,
    Morphism,
    QdgModule,
    cone_module,
    direct_sum_modules,
    dualize,
    f_hom_data,
    hom_complex,
    postcompose_matrix,
    q_tensor_map,
    regular_quotient,
    restricted_complex,
    shift_module,
    subquotient_module,
    validate_module,
)
from .derived_functors import lq
from .errors import EquivalenceViolation, IndexOutOfRange, WindowTooWideForStages
from .exact_linear import Subquotient, Subspace, quotient_basis, rank
from .filtration import free_gr_isomorphisms, is_n_acyclic, is_rn_free
from .generators_sod import TwistSpec, d_right, gamma, twist
from .graded_core import (
    Complex,
    ComplexReport,
    GradingGroup,
    block_diagonal,
    cohomology_map_ranks,
    sum_spaces,
)
from .logger import get_logger

logger = get_logger(__name__)

Cover = Callable[[QdgModule], Tuple[QdgModule, np.ndarray]]
ChainMap = Tuple[Complex, Complex, np.ndarray]

DEFAULT_WINDOW = (-4, 4)
DEFAULT_MARGIN = 2


def default_generators(a: DeformedAlgebra) -> List[QdgModule]:
    return [gamma(a, i) for i in range(a.order + 1)]


# the surjection step


@dataclass(frozen=True, eq=False)
class StepResult:
    module: QdgModule
    augmentation: Morphism
    surjective: Optional[bool] = None
    cycles_surjective: Optional[bool] = None

    @property
    def ok(self) -> bool:
        return bool(self.surjective) and bool(self.cycles_surjective)


def _grow(space: Subspace, rows: np.ndarray) -> Subspace:
    if rows.shape[0] == 0:
        return space
    return Subspace.span(space.field, space.ambient, np.concatenate([space.basis, rows]))


class _CoverState:
    """Running images of hom(X, Q) and of its cycles inside hom(X, M), one per generator."""

    def __init__(self, m: QdgModule, gens: Sequence[QdgModule]) -> None:
        fld = m.field
        self.m = m
        self.gens = list(gens)
        self.homs = [hom_complex(x, m) for x in self.gens]
        self.covered = [Subspace.zero(fld, h.dim) for h in self.homs]
        self.covered_cycles = [Subspace.zero(fld, h.dim) for h in self.homs]
        self.summands: List[Tuple[QdgModule, np.ndarray]] = []
        self._sources: Dict[Tuple[str, int, int], Tuple[QdgModule, List[HomComplex]]] = {}

    def _source(self, kind: str, i: int, e: int) -> Tuple[QdgModule, List[HomComplex]]:
        key = (kind, i, e)
        if key not in self._sources:
            x = self.gens[i]
            if kind == "class":
                s = shift_module(x, -e)
            else:
                s = cone_module(Morphism.identity(shift_module(x, -e - 1)))
            self._sources[key] = (s, [hom_complex(y, s) for y in self.gens])
        return self._sources[key]

    def add(self, kind: str, i: int, e: int, c: np.ndarray) -> None:
        s, source_homs = self._source(kind, i, e)
        g = Morphism(s, self.m, 0, c)
        for k, (src, tgt) in enumerate(zip(source_homs, self.homs)):
            if src.dim == 0 or tgt.dim == 0:
                continue
            post = postcompose_matrix(src, tgt, g)
            self.covered[k] = _grow(self.covered[k], post.T)
            self.covered_cycles[k] = _grow(
                self.covered_cycles[k], src.complex.cycles.image_under(post).basis
            )
        self.summands.append((s, c))


def _step_summands(
    m: QdgModule, gens: Sequence[QdgModule]
) -> List[Tuple[QdgModule, np.ndarray]]:
    """Shifted generators for cohomology classes, then cones of identities for the rest.

    A candidate is skipped when the summands chosen so far already hit it.
    """
    fld = m.field
    state = _CoverState(m, gens)
    for i, hom in enumerate(state.homs):
        cx = hom.complex
        if hom.dim == 0:
            continue
        for row in quotient_basis(cx.cycles, cx.boundaries):
            if state.covered_cycles[i].contains(row):
                continue
            state.add("class", i, cx.space.vector_degree(row), hom.combine(row))
    for i, hom in enumerate(state.homs):
        cx = hom.complex
        if hom.dim == 0:
            continue
        complement = Subquotient.of(Subspace.full(fld, hom.dim), cx.cycles)
        for row in complement.reps:
            boundary = fld.matmul(cx.differential, row[:, None])[:, 0]
            if state.covered[i].contains(row) and state.covered_cycles[i].contains(boundary):
                continue
            e = cx.space.vector_degree(row)
            phi = hom.combine(row)
            source = shift_module(state.gens[i], -e - 1)
            # closed maps Cone(id_X') → M are [Dφ | φ] for φ of degree -1 on X'
            d_phi = Morphism(source, m, -1, phi).differential()
            state.add("cone", i, e, np.concatenate([d_phi, phi], axis=1))
    return state.summands


def surjection_step(
    m: QdgModule, gens: Optional[Sequence[QdgModule]] = None, verify: bool = True
) -> StepResult:
    """Q → M with hom(X, Q) → hom(X, M) onto in every degree and onto on cycles."""
    a = m.algebra
    gens = list(gens) if gens is not None else default_generators(a)
    fld = m.field
    pieces = _step_summands(m, gens)
    if pieces:
        q = direct_sum_modules([p for p, _ in pieces], name=f"P({m.name})" if m.name else "")
        mat = np.concatenate([c for _, c in pieces], axis=1)
    else:
        q = CdgModule.zero(a)
        mat = fld.zeros((m.dim, 0))
    augmentation = Morphism(q, m, 0, mat)
    if not augmentation.is_closed():
        raise EquivalenceViolation("surjection step produced a non-closed map")
    logger.debug("surjection step onto %s: %d summands, dim %d", m.name, len(pieces), q.dim)
    if not verify:
        return StepResult(q, augmentation)
    onto = cycles_onto = True
    for x in gens:
        src, tgt = hom_complex(x, q), hom_complex(x, m)
        post = postcompose_matrix(src, tgt, augmentation)
        onto = onto and rank(fld, post) == tgt.dim
        pushed = src.complex.cycles.image_under(post)
        cycles_onto = cycles_onto and pushed.includes(tgt.complex.cycles)
    return StepResult(q, augmentation, onto, cycles_onto)


def generator_cover(gens: Optional[Sequence[QdgModule]] = None) -> Cover:
    def cover(m: QdgModule) -> Tuple[QdgModule, np.ndarray]:
        step = surjection_step(m, gens, verify=False)
        return step.module, step.augmentation.matrix

    return cover


# R_n-free covers


def module_generators(m: QdgModule) -> List[int]:
    """Greedy basis indices generating M as a graded A_n-module."""
    fld = m.field
    operators = [fld.matmul(m.t_pow(s), act) for s in range(m.order + 1) for act in m.action]
    chosen: List[int] = []
    generated = Subspace.zero(fld, m.dim)
    for j in range(m.dim):
        e = fld.zeros((m.dim,))
        e[j] = fld.element(1)
        if generated.contains(e):
            continue
        chosen.append(j)
        rows = [fld.matmul(op, e[:, None])[:, 0] for op in operators]
        generated = Subspace.span(fld, m.dim, np.concatenate([generated.basis, np.stack(rows)]))
    return chosen


def free_graded_module(a: DeformedAlgebra, degrees: Sequence[int]) -> QdgModule:
    """A_n ⊗ V for V with the given basis degrees, as a qdg module."""
    free = regular_quotient(a, a.order)
    if not degrees:
        return CdgModule.zero(a)
    return direct_sum_modules([shift_module(free, -e) for e in degrees])


def g_plus(n: QdgModule) -> QdgModule:
    """G^+(N) = N ⊕ N[-1] with d(x, y) = (c·y, x); the differential of N is discarded."""
    a, fld = n.algebra, n.field
    if n.dim == 0:
        return CdgModule.zero(a)
    zero = fld.zeros((n.dim, n.dim))
    eye = fld.eye(n.dim)
    d = np.block([[zero, n.curvature_operator], [eye, zero]])
    action = []
    for k, b in enumerate(a.names):
        sign = fld.sign(a.degrees[k])
        act = n.action[k]
        act_db = n.act_element(a.apply_d(a.basis_vector(b)))
        action.append(
            np.block(
                [[act, fld.normalize(-sign * act_db)], [zero, fld.normalize(sign * act)]]
            )
        )
    raw = QdgModule(
        a,
        sum_spaces([n.space, n.space.shift(-1)]),
        block_diagonal(fld, [n.t, n.t]),
        fld.normalize(d),
        tuple(action),
        f"G+({n.name})" if n.name else "G+",
    )
    return validate_module(raw, curved=True)


def rnfree_cover(m: QdgModule) -> Tuple[QdgModule, np.ndarray]:
    """G^+(A_n ⊗ V) → M for a generating set V; the source is R_n-free."""
    a, fld = m.algebra, m.field
    picks = module_generators(m)
    degrees = [m.space.degrees[j] for j in picks]
    n = free_graded_module(a, degrees)
    cover = g_plus(n)
    block = a.dim * (a.order + 1)
    p = fld.zeros((m.dim, n.dim))
    for k, (j, e) in enumerate(zip(picks, degrees)):
        v = fld.zeros((m.dim,))
        v[j] = fld.element(1)
        for s in range(a.order + 1):
            for bi in range(a.dim):
                # t^s b ↦ (-1)^{e|b|} t^s b·v
                image = fld.matmul(fld.matmul(m.t_pow(s), m.action[bi]), v[:, None])[:, 0]
                p[:, k * block + s * a.dim + bi] = fld.normalize(
                    fld.sign(e * a.degrees[bi]) * image
                )
    mat = np.concatenate([p, fld.matmul(m.d, p)], axis=1) if n.dim else fld.zeros((m.dim, 0))
    logger.debug("R_n-free cover of %s: %d generators, dim %d", m.name, len(picks), cover.dim)
    return cover, mat


# towers and totalizations


@dataclass(frozen=True, eq=False)
class Tower:
    target: QdgModule
    stages: Tuple[QdgModule, ...]
    boundaries: Tuple[np.ndarray, ...]

    def total(self, count: Optional[int] = None) -> Tuple[QdgModule, Morphism]:
        """⊕_{j<count} P_j[j] twisted by the boundaries, with its augmentation."""
        count = len(self.stages) if count is None else count
        if not 1 <= count <= len(self.stages):
            raise IndexOutOfRange("stage count out of range", {"count": count})
        m = self.target
        fld = m.field
        summands = [shift_module(self.stages[j], j) for j in range(count)]
        offsets = np.cumsum([0] + [p.dim for p in summands])
        size = int(offsets[-1])
        twisting = fld.zeros((size, size))
        for j in range(1, count):
            twisting[offsets[j - 1] : offsets[j], offsets[j] : offsets[j + 1]] = self.boundaries[j]
        spec = TwistSpec(tuple(summands), twisting)
        tot = twist(spec, name=f"Tot_{count}({m.name})" if m.name else f"Tot_{count}")
        aug = fld.zeros((m.dim, tot.dim))
        aug[:, : self.stages[0].dim] = self.boundaries[0]
        augmentation = Morphism(tot, m, 0, aug)
        if not augmentation.is_closed():
            raise EquivalenceViolation("augmentation of the totalization is not closed")
        return tot, augmentation


def build_tower(m: QdgModule, cover: Cover, stages: int) -> Tower:
    """P_0 → M, then P_{j+1} → Ker(P_j → P_{j-1}), for ``stages`` stages."""
    if stages < 1:
        raise IndexOutOfRange("at least one stage is required", {"stages": stages})
    fld, a = m.field, m.algebra
    modules: List[QdgModule] = []
    boundaries: List[np.ndarray] = []
    current, inclusion = m, fld.eye(m.dim)
    for j in range(stages):
        if current.dim == 0:
            p, mat = CdgModule.zero(a), fld.zeros((0, 0))
        else:
            p, mat = cover(current)
        boundary = fld.matmul(inclusion, mat) if mat.size else fld.zeros((inclusion.shape[0], p.dim))
        logger.trace_matrix(f"stage {j} boundary", boundary)
        modules.append(p)
        boundaries.append(boundary)
        if p.dim == 0:
            current, inclusion = CdgModule.zero(a), fld.zeros((0, 0))
            continue
        kernel = subquotient_module(
            p, Subspace.kernel(fld, mat), Subspace.zero(fld, p.dim), name=f"K_{j}"
        )
        current, inclusion = kernel.module, kernel.sq.reps.T
        logger.trace("stage %d: dim %d, kernel dim %d", j, p.dim, current.dim)
    return Tower(m, tuple(modules), tuple(boundaries))


# window bookkeeping


@dataclass(frozen=True)
class WindowReport:
    window: Tuple[int, int]
    margin: int
    stable: Tuple[int, ...]
    unstable: Tuple[int, ...]
    failed: Tuple[int, ...]
    values: Dict[int, Tuple] = field(default_factory=dict, compare=False)

    @property
    def ok(self) -> bool:
        return not self.failed

    @property
    def flagged(self) -> bool:
        return bool(self.unstable)

    def as_dict(self) -> Dict[str, object]:
        return {
            "window": list(self.window),
            "margin": self.margin,
            "stable": list(self.stable),
            "unstable": list(self.unstable),
            "failed": list(self.failed),
        }


def window_degrees(grading: GradingGroup, window: Tuple[int, int]) -> List[int]:
    d0, d1 = window
    if d0 > d1:
        raise IndexOutOfRange("empty degree window", {"d0": d0, "d1": d1})
    return sorted({grading.normalize(d) for d in range(d0, d1 + 1)})


def map_profile(maps: Sequence[ChainMap]) -> Dict[int, Tuple[Tuple[int, int, int], ...]]:
    """Per degree: (dim H source, dim H target, rank H f) for every map."""
    reports = []
    for src, tgt, mat in maps:
        reports.append((src.report, tgt.report, cohomology_map_ranks(src, tgt, mat)))
    degrees = set()
    for hs, ht, ranks in reports:
        degrees |= set(hs.dims) | set(ht.dims)
    return {
        d: tuple((hs.dim(d), ht.dim(d), ranks.get(d, 0)) for hs, ht, ranks in reports)
        for d in degrees
    }


def _is_iso_value(value: Tuple[Tuple[int, int, int], ...]) -> bool:
    return all(s == t == r for s, t, r in value)


def window_report(
    grading: GradingGroup,
    window: Tuple[int, int],
    margin: int,
    short: Dict[int, Tuple],
    long: Dict[int, Tuple],
    empty: Tuple,
    predicate: Callable[[Tuple], bool],
    strict: bool = False,
) -> WindowReport:
    stable, unstable, failed = [], [], []
    values = {}
    for d in window_degrees(grading, window):
        value = short.get(d, empty)
        values[d] = value
        if value != long.get(d, empty):
            unstable.append(d)
        else:
            stable.append(d)
            if not predicate(value):
                failed.append(d)
    if unstable:
        logger.warning("window degrees %s are not stable under %d more stages", unstable, margin)
        if strict:
            raise WindowTooWideForStages(
                "window degrees could still change with more stages",
                {"unstable": unstable, "margin": margin},
            )
    return WindowReport(window, margin, tuple(stable), tuple(unstable), tuple(failed), values)


# projective side


@dataclass(frozen=True, eq=False)
class StagedResolution:
    kind: str
    tower: Tower
    total: QdgModule
    augmentation: Morphism
    window: WindowReport

    @property
    def stages(self) -> Tuple[QdgModule, ...]:
        return self.tower.stages

    @property
    def ok(self) -> bool:
        return self.window.ok

    def as_dict(self) -> Dict[str, object]:
        return {
            "kind": self.kind,
            "stage_dims": [p.dim for p in self.stages],
            "total_dim": self.total.dim,
            "window": self.window.as_dict(),
        }


def _gamma_maps(f: Morphism) -> List[ChainMap]:
    """F_i(f) for i = 0..n, the closed form of hom(Γ_i, f)."""
    out = []
    fld = f.field
    for i in range(f.source.order + 1):
        src, tgt = f_hom_data(f.source, i), f_hom_data(f.target, i)
        mat = block_diagonal(
            fld, [src.first.induced(f.matrix, tgt.first), src.second.induced(f.matrix, tgt.second)]
        )
        out.append((src.complex, tgt.complex, mat))
    return out


def _hom_maps(gens: Sequence[QdgModule], f: Morphism) -> List[ChainMap]:
    out = []
    for x in gens:
        src, tgt = hom_complex(x, f.source), hom_complex(x, f.target)
        out.append((src.complex, tgt.complex, postcompose_matrix(src, tgt, f)))
    return out


def semifree_resolve(
    m: QdgModule,
    stages: int,
    window: Tuple[int, int] = DEFAULT_WINDOW,
    gens: Optional[Sequence[QdgModule]] = None,
    margin: int = DEFAULT_MARGIN,
    strict: bool = False,
) -> StagedResolution:
    """Tot(P_•) → M checked on hom(X, −) for every generator X in the window."""
    tower = build_tower(m, generator_cover(gens), stages + margin)
    short_tot, short_aug = tower.total(stages)
    _, long_aug = tower.total(stages + margin)

    def maps(aug: Morphism) -> List[ChainMap]:
        return _gamma_maps(aug) if gens is None else _hom_maps(gens, aug)

    count = m.order + 1 if gens is None else len(gens)
    report = window_report(
        m.space.grading,
        window,
        margin,
        map_profile(maps(short_aug)),
        map_profile(maps(long_aug)),
        ((0, 0, 0),) * count,
        _is_iso_value,
        strict,
    )
    logger.info(
        "semifree resolution of %s: %d stages, stable %s, failed %s",
        m.name or "<module>",
        stages,
        report.stable,
        report.failed,
    )
    return StagedResolution("semifree", _truncated(tower, stages), short_tot, short_aug, report)


def _truncated(tower: Tower, stages: int) -> Tower:
    return Tower(tower.target, tower.stages[:stages], tower.boundaries[:stages])


def _coaugmentation(m: QdgModule, aug: Morphism) -> Tuple[QdgModule, Morphism]:
    """M → M^∨∨ → Tot^∨ for an augmentation Tot → M^∨."""
    fld = m.field
    dual_total = dualize(aug.source)
    signs = m.space.parity_signs(fld)
    mat = fld.normalize(aug.matrix.T * signs[None, :])
    return dual_total, Morphism(m, dual_total, 0, mat)


def cocell_resolve(
    m: QdgModule,
    stages: int,
    window: Tuple[int, int] = DEFAULT_WINDOW,
    margin: int = DEFAULT_MARGIN,
    strict: bool = False,
) -> StagedResolution:
    """M → I by resolving M^∨ with the right generators D_i and dualizing back.

    Checked on Q_i(M) → Q_i(I) for i = 0..n.
    """
    a = m.algebra
    dual_m = dualize(m)
    gens = [d_right(a, i) for i in range(a.order + 1)]
    tower = build_tower(dual_m, generator_cover(gens), stages + margin)
    short_total, short_coaug = _coaugmentation(m, tower.total(stages)[1])
    _, long_coaug = _coaugmentation(m, tower.total(stages + margin)[1])

    def maps(f: Morphism) -> List[ChainMap]:
        return [q_tensor_map(f, i) for i in range(a.order + 1)]

    report = window_report(
        m.space.grading,
        window,
        margin,
        map_profile(maps(short_coaug)),
        map_profile(maps(long_coaug)),
        ((0, 0, 0),) * (a.order + 1),
        _is_iso_value,
        strict,
    )
    logger.info("cocell resolution of %s: stable %s", m.name or "<module>", report.stable)
    return StagedResolution("cocell", _truncated(tower, stages), short_total, short_coaug, report)


# R_n-free side


@dataclass(frozen=True, eq=False)
class RnFreeResolution:
    resolution: StagedResolution
    free: bool
    gr_free: bool
    horizontal: Tuple[ComplexReport, ...]
    lq_table: Tuple[ComplexReport, ...]
    n_acyclic: bool

    @property
    def matches_lq(self) -> bool:
        return all(h.dims == q.dims for h, q in zip(self.horizontal, self.lq_table))

    @property
    def ok(self) -> bool:
        return self.free and self.gr_free and self.matches_lq and self.resolution.ok

    def as_dict(self) -> Dict[str, object]:
        out = self.resolution.as_dict()
        out.update(
            {
                "rn_free": self.free,
                "gr_free": self.gr_free,
                "horizontal": [r.as_dict() for r in self.horizontal],
                "lq": [r.as_dict() for r in self.lq_table],
                "matches_lq": self.matches_lq,
            }
        )
        return out


def horizontal_homology(tower: Tower, j: int) -> Complex:
    """Homology of Q(F_{j+1}) → Q(F_j) → Q(F_{j-1}) at F_j, with the induced d."""
    if not 0 <= j < len(tower.stages) - 1:
        raise IndexOutOfRange("horizontal position needs the next stage", {"j": j})
    fld = tower.target.field
    quotients = [restricted_complex(p, Subspace.full(fld, p.dim), p.image_t(1)) for p in tower.stages]
    cx, sq = quotients[j]
    if j == 0:
        upper = Subspace.full(fld, cx.dim)
    else:
        upper = Subspace.kernel(fld, sq.induced(tower.boundaries[j], quotients[j - 1][1]))
    incoming = quotients[j + 1][1].induced(tower.boundaries[j + 1], sq)
    lower = Subspace.image(fld, incoming) if incoming.size else Subspace.zero(fld, cx.dim)
    return cx.subquotient(upper, lower)[0]


def _q_profile(tot: QdgModule) -> Dict[int, Tuple[int]]:
    cx, _ = restricted_complex(tot, Subspace.full(tot.field, tot.dim), tot.image_t(1))
    return {d: (v,) for d, v in cx.report.dims.items()}


def rnfree_resolve(
    m: QdgModule,
    stages: int,
    window: Tuple[int, int] = DEFAULT_WINDOW,
    margin: int = DEFAULT_MARGIN,
    strict: bool = False,
) -> RnFreeResolution:
    """M^fr = Tot(⋯ → F_1 → F_0) by R_n-free covers.

    Horizontal homology of Q(F_•) is compared with L^jQ(M); when M is
    n-acyclic, Q(Tot) must be acyclic in the stable window degrees.
    """
    tower = build_tower(m, rnfree_cover, stages + margin)
    short_tot, short_aug = tower.total(stages)
    long_tot, _ = tower.total(stages + margin)
    acyclic = is_n_acyclic(m).answer
    report = window_report(
        m.space.grading,
        window,
        margin,
        _q_profile(short_tot),
        _q_profile(long_tot),
        (0,),
        lambda value: not acyclic or value == (0,),
        strict,
    )
    positions = range(stages + margin - 1)
    horizontal = tuple(horizontal_homology(tower, j).report for j in positions)
    table = tuple(lq(m, j).report for j in positions)
    resolution = StagedResolution("rnfree", _truncated(tower, stages), short_tot, short_aug, report)
    out = RnFreeResolution(
        resolution,
        is_rn_free(short_tot),
        all(free_gr_isomorphisms(short_tot)),
        horizontal,
        table,
        acyclic,
    )
    logger.info("R_n-free resolution of %s: matches L^jQ=%s", m.name or "<module>", out.matches_lq)
    return out


def cofree_resolve(
    m: QdgModule,
    stages: int,
    window: Tuple[int, int] = DEFAULT_WINDOW,
    margin: int = DEFAULT_MARGIN,
    strict: bool = False,
) -> RnFreeResolution:
    """M → (M^∨)^fr∨: the R_n-free resolution of M^∨, dualized."""
    inner = rnfree_resolve(dualize(m), stages, window, margin, strict)
    total, coaug = _coaugmentation(m, inner.resolution.augmentation)
    resolution = StagedResolution(
        "cofree", inner.resolution.tower, total, coaug, inner.resolution.window
    )
    return RnFreeResolution(
        resolution,
        is_rn_free(total),
        all(free_gr_isomorphisms(total)),
        inner.horizontal,
        inner.lq_table,
        inner.n_acyclic,
    )


# model structure


def is_fibration(f: Morphism) -> bool:
    """f(Ker t^i_M) = Ker t^i_N for i = 1..n+1."""
    f.require_closed_degree_zero()
    m, n = f.source, f.target
    for i in range(1, m.order + 2):
        image = m.kernel_t(i).image_under(f.matrix)
        if not image.includes(n.kernel_t(i)):
            logger.debug("not a fibration: Ker t^%d is not hit", i)
            return False
    return True


def lifts_generators(f: Morphism, gens: Optional[Sequence[QdgModule]] = None) -> bool:
    """hom(X, M) → hom(X, N) is onto on cycles for every generator X."""
    f.require_closed_degree_zero()
    gens = list(gens) if gens is not None else default_generators(f.source.algebra)
    for src, tgt, mat in _hom_maps(gens, f):
        if not src.cycles.image_under(mat).includes(tgt.cycles):
            return False
    return True
