import argparse
from typing import Callable, Dict, Optional

from ..cdg_algebra import DeformedAlgebra, catalog_algebra
from ..cdg_module import (
    CdgModule,
    Morphism,
    QdgModule,
    f_dual_to_q_dual,
    hom_complex,
    m_i,
    q_dual_to_f_dual,
)
from ..derived_functors import derived_functor_table, semiderived_member
from ..errors import NotAComplex, ParseError
from ..filtration import (
    K_FILTRATION,
    T_ADIC,
    gr,
    is_n_acyclic,
    is_n_quasi_iso,
    is_rn_free,
)
from ..generators_sod import (
    compact_generation_check,
    corepresentability_check,
    f_hom_comparison,
    g_construction,
    gamma,
    gamma_spec,
    gluing_bimodule,
    semiorthogonality_check,
    sod_membership,
    tria_objects,
)
from ..graded_core import Complex
from ..logger import get_logger
from ..resolutions import (
    DEFAULT_MARGIN,
    StagedResolution,
    cocell_resolve,
    cofree_resolve,
    is_fibration,
    lifts_generators,
    rnfree_resolve,
    semifree_resolve,
)
from ._config import WorkbenchConfig
from ._fuzz import run_fuzz
from ._report import Report
from ._serialization import Parsed, load, serialize

logger = get_logger(__name__)

Command = Callable[[WorkbenchConfig, argparse.Namespace], Report]


def _load(config: WorkbenchConfig, args: argparse.Namespace, attr: str = "path") -> Parsed:
    path = getattr(args, attr, None)
    if not path:
        raise ParseError("an input document is required", {"argument": attr})
    return load(path, config.field)


def _module(config: WorkbenchConfig, args: argparse.Namespace, attr: str = "path") -> QdgModule:
    found = _load(config, args, attr)
    if not isinstance(found, QdgModule):
        raise ParseError("a module document is required", {"argument": attr})
    return found


def _algebra(config: WorkbenchConfig, args: argparse.Namespace) -> DeformedAlgebra:
    if getattr(args, "catalog", None):
        return catalog_algebra(args.catalog, config.field, args.order)
    found = _load(config, args)
    if isinstance(found, QdgModule):
        return found.algebra
    if isinstance(found, DeformedAlgebra):
        return found
    raise ParseError("an algebra or module document is required")


def _index(args: argparse.Namespace, default: int) -> int:
    i = getattr(args, "i", None)
    return default if i is None else i


def _subject(m: QdgModule) -> str:
    return f"{m.name or '<module>'} (dim {m.dim}, n={m.order})"


def _dims(c: Complex) -> Dict[str, int]:
    return c.report.as_dict()


def cmd_validate(config: WorkbenchConfig, args: argparse.Namespace) -> Report:
    found = _load(config, args)
    report = Report("validate", args.path)
    if isinstance(found, DeformedAlgebra):
        report.check("algebra axioms", True, f"dim A = {found.dim}, n = {found.order}")
        report.data.update(kind="algebra", curved=found.is_curved, grading=found.grading.kind)
    elif isinstance(found, QdgModule):
        report.check("module axioms", True, _subject(found))
        report.data.update(
            kind="module", curved=isinstance(found, CdgModule), dims=found.space.dims()
        )
    else:
        report.check("morphism linearity", True, f"degree {found.degree}")
        report.data.update(kind="morphism", closed=found.is_closed())
    return report


def cmd_cohomology(config: WorkbenchConfig, args: argparse.Namespace) -> Report:
    m = _module(config, args)
    report = Report("cohomology", _subject(m))
    fld = m.field
    if fld.is_zero(fld.matmul(m.d, m.d)):
        report.check("d² = 0", True)
        report.data["cohomology"] = _dims(Complex(fld, m.space, m.d))
    else:
        report.flag("d² = 0", "curvature acts nontrivially; reporting Gr_t pieces")
        report.data["gr_t_cohomology"] = [r.as_dict() for r in gr(m, T_ADIC).reports]
    return report


def cmd_gr(config: WorkbenchConfig, args: argparse.Namespace) -> Report:
    m = _module(config, args)
    kind = getattr(args, "kind", None) or T_ADIC
    filt = gr(m, kind)
    report = Report("gr", f"{kind} filtration of {_subject(m)}")
    report.check("piece count", len(filt.pieces) == m.order + 1, f"{len(filt.pieces)} pieces")
    report.data["piece_dims"] = [p.module.space.dims() for p in filt.pieces]
    report.data["cohomology"] = [r.as_dict() for r in filt.reports]
    return report


def cmd_acyclic(config: WorkbenchConfig, args: argparse.Namespace) -> Report:
    m = _module(config, args)
    result = is_n_acyclic(m)
    report = Report("acyclic", _subject(m))
    report.check(
        "filtration routes agree",
        result.answer == result.dual_route_answer,
        f"t-adic={result.answer} K={result.dual_route_answer}",
    )
    report.data["n_acyclic"] = result.answer
    report.data["gr_t"] = [r.as_dict() for r in result.t_adic.reports]
    report.data["gr_k"] = [r.as_dict() for r in result.k_filtration.reports]
    fld = m.field
    if fld.is_zero(fld.matmul(m.d, m.d)):
        report.data["acyclic_as_complex"] = Complex(fld, m.space, m.d).is_acyclic()
    return report


def cmd_hom(config: WorkbenchConfig, args: argparse.Namespace) -> Report:
    m = _module(config, args)
    n = _module(config, args, "target")
    report = Report("hom", f"hom({m.name or '?'}, {n.name or '?'})")
    try:
        hom = hom_complex(m, n)
    except NotAComplex as exc:
        report.check("d² = 0", False, str(exc))
        return report
    report.check("d² = 0", True, f"dim {hom.dim}")
    report.data["dims"] = hom.complex.space.dims()
    report.data["cohomology"] = _dims(hom.complex)
    return report


def cmd_gamma(config: WorkbenchConfig, args: argparse.Namespace) -> Report:
    a = _algebra(config, args)
    i = _index(args, 0)
    g = gamma(a, i)
    report = Report("gamma", f"Γ_{i} over {a.name or 'A'} (n={a.order})")
    if i > 0:
        report.check("Maurer-Cartan", gamma_spec(a, i).is_maurer_cartan)
    report.check("module axioms", isinstance(g, CdgModule), f"dim {g.dim}")
    report.data["dims"] = g.space.dims()
    report.document = serialize(g)
    return report


def cmd_gn(config: WorkbenchConfig, args: argparse.Namespace) -> Report:
    a = _algebra(config, args)
    gn = g_construction(a)
    report = Report("gn", f"G_{a.order} over {a.name or 'A'}")
    report.check("module axioms", isinstance(gn.module, CdgModule), f"dim {gn.module.dim}")
    report.data["dims"] = gn.module.space.dims()
    report.document = serialize(gn.module)
    return report


def cmd_mi(config: WorkbenchConfig, args: argparse.Namespace) -> Report:
    m = _module(config, args)
    i = _index(args, m.order)
    report = Report("mi", f"(M)_{i} of {_subject(m)}")
    report.check("F_i ≅ hom(Γ_i, M)", f_hom_comparison(m, i).ok)
    report.check("Q_i(M^∨) ≅ F_i(M)^∨", q_dual_to_f_dual(m, i).ok)
    report.check("F_i(M^∨) ≅ Q_i(M)^∨", f_dual_to_q_dual(m, i).ok)
    report.data["cohomology"] = _dims(m_i(m, i))
    return report


def cmd_tria(config: WorkbenchConfig, args: argparse.Namespace) -> Report:
    m = _module(config, args)
    tria = tria_objects(m, getattr(args, "i", None))
    report = Report("tria", f"index {tria.index} of {_subject(m)}")
    for name, ok in sorted(tria.sequences.items()):
        report.check(f"exact {name}", ok)
    report.check("Z acyclic", tria.z_acyclic)
    for name, ok in sorted(tria.quasi_isos.items()):
        report.check(f"quasi-isomorphism {name}", ok)
    report.check("cone rank identity", tria.rank_identity)
    report.data["total"] = _dims(tria.total)
    report.data["kernel"] = _dims(tria.kernel)
    report.data["quotient"] = _dims(tria.quotient)
    return report


def _table_report(command: str, config: WorkbenchConfig, args: argparse.Namespace) -> Report:
    m = _module(config, args)
    cutoff = getattr(args, "cutoff", None) or 4
    table = derived_functor_table(m, cutoff)
    report = Report(command, _subject(m))
    report.check("closed form = periodic oracle", table.oracle_agrees)
    report.check("R^iK = L^{i+1}Q", table.shift_agrees)
    report.check("2-periodic above 0", table.periodic)
    if is_rn_free(m):
        report.check(
            "L^iQ vanishes on R_n-free", all(r.is_acyclic for r in table.lq[1:])
        )
    key = "lq" if command == "lq" else "rk"
    report.data[key] = table.as_dict()[key]
    return report


def cmd_lq(config: WorkbenchConfig, args: argparse.Namespace) -> Report:
    return _table_report("lq", config, args)


def cmd_rk(config: WorkbenchConfig, args: argparse.Namespace) -> Report:
    return _table_report("rk", config, args)


def cmd_semider(config: WorkbenchConfig, args: argparse.Namespace) -> Report:
    m = _module(config, args)
    verdict = semiderived_member(m)
    report = Report("semider", _subject(m))
    report.check(
        "semiderived membership",
        True,
        f"member={verdict.member}",
        flagged=verdict.flagged,
    )
    if is_rn_free(m) and m.order <= 1:
        report.check("R_n-free modules are members", verdict.member)
    report.data["member"] = verdict.member
    report.data["pieces"] = [list(p) for p in verdict.pieces]
    return report


def _window_checks(report: Report, res: StagedResolution) -> None:
    w = res.window
    report.check("window", w.ok, f"failed degrees {list(w.failed)}" if w.failed else "")
    if w.flagged:
        report.flag("window stability", f"unstable degrees {list(w.unstable)}")
    report.data["resolution"] = res.as_dict()


def _margin(args: argparse.Namespace) -> int:
    margin = getattr(args, "margin", None)
    return DEFAULT_MARGIN if margin is None else margin


def cmd_resolve(config: WorkbenchConfig, args: argparse.Namespace) -> Report:
    m = _module(config, args)
    res = semifree_resolve(
        m,
        config.stages,
        config.window,
        margin=_margin(args),
        strict=bool(getattr(args, "strict", False)),
    )
    report = Report("resolve", _subject(m))
    report.check("augmentation closed", res.augmentation.is_closed())
    _window_checks(report, res)
    return report


def cmd_cocell(config: WorkbenchConfig, args: argparse.Namespace) -> Report:
    m = _module(config, args)
    res = cocell_resolve(
        m, config.stages, config.window, _margin(args), bool(getattr(args, "strict", False))
    )
    report = Report("cocell", _subject(m))
    report.check("coaugmentation closed", res.augmentation.is_closed())
    _window_checks(report, res)
    return report


def cmd_rnfree(config: WorkbenchConfig, args: argparse.Namespace) -> Report:
    m = _module(config, args)
    strict = bool(getattr(args, "strict", False))
    dual = bool(getattr(args, "cofree", False))
    resolve = cofree_resolve if dual else rnfree_resolve
    res = resolve(m, config.stages, config.window, _margin(args), strict)
    report = Report("rnfree", f"{'cofree' if dual else 'R_n-free'} side of {_subject(m)}")
    report.check("total R_n-free", res.free)
    report.check("Gr_t^i ≅ M/tM", res.gr_free)
    report.check("horizontal homology = L^jQ", res.matches_lq)
    _window_checks(report, res.resolution)
    report.data["resolution"] = res.as_dict()
    return report


def cmd_fibration(config: WorkbenchConfig, args: argparse.Namespace) -> Report:
    found = _load(config, args)
    if not isinstance(found, Morphism):
        raise ParseError("a morphism document is required")
    f = found
    f.require_closed_degree_zero()
    fibration = is_fibration(f)
    quasi_iso = is_n_quasi_iso(f)
    lifts = lifts_generators(f)
    report = Report("fibration", f"{f.source.name or '?'} → {f.target.name or '?'}")
    report.check("closed of degree 0", True)
    if fibration and quasi_iso:
        report.check("acyclic fibration lifts generators", lifts)
    report.data.update(fibration=fibration, n_quasi_iso=quasi_iso, lifts_generators=lifts)
    return report


def cmd_gluing(config: WorkbenchConfig, args: argparse.Namespace) -> Report:
    a = _algebra(config, args)
    glue = gluing_bimodule(a)
    report = Report("gluing", f"{a.name or 'A'} (n={a.order})")
    report.check("X ≅ Ker t on G_1 (dims)", glue.agree)
    report.check("triangle", glue.triangle)
    report.data.update(x=glue.x_dims, kernel=glue.kernel_dims, cone=glue.cone_dims)
    return report


def cmd_profile(config: WorkbenchConfig, args: argparse.Namespace) -> Report:
    m = _module(config, args)
    report = Report("profile", _subject(m))
    acyclic = is_n_acyclic(m)
    sod = sod_membership(m)
    report.check("filtration routes agree", acyclic.answer == acyclic.dual_route_answer)
    report.check("SOD profile consistent", sod.n_acyclic == acyclic.answer)
    report.check("compact generation", compact_generation_check(m).agree)
    if m.order >= 1:
        report.check("corepresentability", corepresentability_check(m).ok)
        gn = g_construction(m.algebra)
        if sod.lower_order:
            report.check("G_n ⊥ module", semiorthogonality_check(gn.module, m))
    verdict = semiderived_member(m)
    report.check("semiderived verdict", True, f"member={verdict.member}", flagged=verdict.flagged)
    report.data.update(
        n_acyclic=acyclic.answer,
        rn_free=is_rn_free(m),
        gr_t=[r.as_dict() for r in acyclic.t_adic.reports],
        gr_k=[r.as_dict() for r in gr(m, K_FILTRATION).reports],
        components=list(sod.components),
        lower_order=sod.lower_order,
        semiderived=verdict.member,
    )
    return report


def cmd_fuzz(config: WorkbenchConfig, args: argparse.Namespace) -> Report:
    return run_fuzz(config)


COMMANDS: Dict[str, Command] = {
    "validate": cmd_validate,
    "cohomology": cmd_cohomology,
    "gr": cmd_gr,
    "acyclic": cmd_acyclic,
    "hom": cmd_hom,
    "gamma": cmd_gamma,
    "gn": cmd_gn,
    "mi": cmd_mi,
    "tria": cmd_tria,
    "lq": cmd_lq,
    "rk": cmd_rk,
    "semider": cmd_semider,
    "resolve": cmd_resolve,
    "cocell": cmd_cocell,
    "rnfree": cmd_rnfree,
    "fibration": cmd_fibration,
    "gluing": cmd_gluing,
    "profile": cmd_profile,
    "fuzz": cmd_fuzz,
}


def run(command: str, config: WorkbenchConfig, args: Optional[argparse.Namespace] = None) -> Report:
    """Dispatches one command; errors propagate to the caller."""
    handler = COMMANDS.get(command)
    if handler is None:
        raise ParseError("unknown command", {"command": command})
    logger.info("running %s", command)
    report = handler(config, args or argparse.Namespace())
    logger.info("%s finished with exit code %d", command, report.exit_code)
    return report
