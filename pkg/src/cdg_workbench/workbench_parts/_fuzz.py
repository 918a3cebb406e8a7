"""Property battery over random (algebra, module) instances.

Each instance is derived from the run seed and its index only, so any single
failure can be replayed. A failing property is shrunk with the recipe
minimizer and the smallest failing module is written as a reproducer.
"""

import os
from dataclasses import dataclass, replace
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from ..cdg_algebra import DeformedAlgebra, random_algebra, witness_curvature_over_t
from ..cdg_module import QdgModule, dualize, f_dual_to_q_dual, hom_complex, q_dual_to_f_dual
from ..derived_functors import derived_functor_table
from ..errors import WorkbenchError
from ..filtration import (
    gr_exchange,
    is_n_acyclic,
    is_rn_free,
    kernel_acyclicity_ladder,
    structure_identities,
)
from ..generators_sod import (
    compact_generation_check,
    corepresentability_check,
    gamma,
    gamma_spec,
    g_module,
    same_module,
    semiorthogonality_check,
    sod_membership,
    tria_objects,
)
from ..logger import get_logger
from ..resolutions import cocell_resolve, rnfree_resolve, semifree_resolve, surjection_step
from ._config import RandomModulePolicy, WorkbenchConfig, child_seed
from ._random_module import Recipe, minimize, random_module
from ._report import Report
from ._serialization import dumps, parse, serialize

logger = get_logger(__name__)

FUZZ_CUTOFF = 3
FUZZ_WINDOW = (-2, 2)
FUZZ_STAGES = 1
FUZZ_MARGIN = 2


@dataclass(frozen=True, eq=False)
class FuzzInstance:
    index: int
    seed: int
    algebra: DeformedAlgebra
    module: QdgModule
    recipe: Recipe
    partner: QdgModule


Property = Callable[[FuzzInstance], bool]


def make_instance(config: WorkbenchConfig, policy: RandomModulePolicy, index: int) -> FuzzInstance:
    seed = child_seed(config.seed, index)
    rng = np.random.default_rng(seed)
    order = int(rng.integers(1, policy.max_order + 1))
    a = random_algebra(rng, config.field, order)
    m, recipe = random_module(a, policy, child_seed(seed, 0))
    partner, _ = random_module(a, replace(policy, max_dim=policy.max_dim // 2), child_seed(seed, 1))
    return FuzzInstance(index, seed, a, m, recipe, partner)


def _hom_d_squared(x: FuzzInstance) -> bool:
    # Complex() rejects d² ≠ 0
    hom_complex(x.module, x.partner)
    hom_complex(x.partner, x.module)
    return True


def _filtration_routes(x: FuzzInstance) -> bool:
    result = is_n_acyclic(x.module)
    return result.answer == result.dual_route_answer


def _structure_identities(x: FuzzInstance) -> bool:
    n = x.algebra.order
    return all(
        structure_identities(x.module, i, j).ok for i in range(n + 2) for j in range(n + 2)
    )


def _kernel_ladder(x: FuzzInstance) -> bool:
    if not is_n_acyclic(x.module).answer:
        return True
    return all(ok for _, ok in kernel_acyclicity_ladder(x.module))


def _gamma_maurer_cartan(x: FuzzInstance) -> bool:
    a = x.algebra
    if not all(gamma_spec(a, i).is_maurer_cartan for i in range(1, a.order + 1)):
        return False
    top = [name for name, deg in zip(a.names, a.degrees) if deg == a.grading.normalize(2)]
    if not top:
        return True
    rng = np.random.default_rng(x.seed)
    witness = witness_curvature_over_t(a, [(0, int(rng.integers(1, 5)), top[0])])
    return all(
        same_module(gamma(a, i, witness), gamma(a, i)) for i in range(1, a.order + 1)
    )


def _compact_generation(x: FuzzInstance) -> bool:
    return compact_generation_check(x.module).agree


def _corepresentability(x: FuzzInstance) -> bool:
    return corepresentability_check(x.module).ok


def _triangle(x: FuzzInstance) -> bool:
    return tria_objects(x.module).ok


def _derived_functors(x: FuzzInstance) -> bool:
    table = derived_functor_table(x.module, FUZZ_CUTOFF)
    if not (table.oracle_agrees and table.shift_agrees):
        return False
    if is_rn_free(x.module):
        return all(r.is_acyclic for r in table.lq[1:])
    return True


def _duality(x: FuzzInstance) -> bool:
    m = x.module
    dual = dualize(m)
    for i in range(m.order + 1):
        if not (q_dual_to_f_dual(m, i, dual).ok and f_dual_to_q_dual(m, i, dual).ok):
            return False
    if not gr_exchange(m).ok:
        return False
    return is_n_acyclic(dual).answer == is_n_acyclic(m).answer


def _sod_membership(x: FuzzInstance) -> bool:
    a = x.algebra
    sod = sod_membership(x.module)
    if sod.n_acyclic != is_n_acyclic(x.module).answer:
        return False
    gn = g_module(a)
    if a.order not in sod_membership(gn).components:
        return False
    if x.recipe.kind != "forget":
        return True
    # t^n kills a forgotten module
    return sod.lower_order and semiorthogonality_check(gn, x.module)


def _round_trip(x: FuzzInstance) -> bool:
    text = dumps(serialize(x.module))
    again = parse(serialize(x.module))
    return dumps(serialize(again)) == text


def _surjection_step(x: FuzzInstance) -> bool:
    return surjection_step(x.module).ok


def _semifree_window(x: FuzzInstance) -> bool:
    res = semifree_resolve(x.module, FUZZ_STAGES, FUZZ_WINDOW, margin=FUZZ_MARGIN)
    if not res.ok:
        return False
    longer = semifree_resolve(x.module, FUZZ_STAGES + FUZZ_MARGIN, FUZZ_WINDOW, margin=1)
    return all(longer.window.values[d] == res.window.values[d] for d in res.window.stable)


def _cocell_window(x: FuzzInstance) -> bool:
    return cocell_resolve(x.module, FUZZ_STAGES, FUZZ_WINDOW, margin=FUZZ_MARGIN).ok


def _rnfree_table(x: FuzzInstance) -> bool:
    out = rnfree_resolve(x.module, FUZZ_STAGES, FUZZ_WINDOW, margin=FUZZ_MARGIN)
    return out.matches_lq and out.ok


PROPERTIES: Tuple[Tuple[str, Property], ...] = (
    ("hom_d_squared", _hom_d_squared),
    ("filtration_routes", _filtration_routes),
    ("structure_identities", _structure_identities),
    ("kernel_ladder", _kernel_ladder),
    ("gamma_maurer_cartan", _gamma_maurer_cartan),
    ("compact_generation", _compact_generation),
    ("corepresentability", _corepresentability),
    ("triangle", _triangle),
    ("derived_functors", _derived_functors),
    ("duality", _duality),
    ("sod_membership", _sod_membership),
    ("round_trip", _round_trip),
    ("surjection_step", _surjection_step),
    ("semifree_window", _semifree_window),
    ("cocell_window", _cocell_window),
    ("rnfree_table", _rnfree_table),
)


def holds(prop: Property, x: FuzzInstance) -> bool:
    try:
        return bool(prop(x))
    except (WorkbenchError, ValueError) as exc:
        logger.error(
            "instance %d raised %s: %s", x.index, type(exc).__name__, exc, exc_info=True
        )
        return False


def write_reproducer(
    directory: str, name: str, x: FuzzInstance, fails: Callable[[QdgModule], bool]
) -> str:
    recipe, module = minimize(x.algebra, x.recipe, fails)
    doc = serialize(module)
    doc["reproducer"] = {
        "property": name,
        "index": x.index,
        "seed": x.seed,
        "recipe": recipe.as_dict(),
        "original": x.recipe.describe(),
    }
    os.makedirs(directory, exist_ok=True)
    path = os.path.join(directory, f"{name}-{x.index}.json")
    with open(path, "w", encoding="utf-8") as f:
        f.write(dumps(doc))
    logger.warning("reproducer for %s written to %s", name, path)
    return path


def run_fuzz(
    config: WorkbenchConfig,
    policy: Optional[RandomModulePolicy] = None,
    reproducer_dir: Optional[str] = None,
) -> Report:
    policy = policy or RandomModulePolicy()
    if reproducer_dir is None:
        reproducer_dir = os.path.join(os.path.dirname(config.out or "") or ".", "reproducers")
    report = Report("fuzz", f"seed={config.seed} count={config.count}")
    passed: Dict[str, int] = {name: 0 for name, _ in PROPERTIES}
    failures: List[Dict[str, object]] = []
    verdicts = {"n_acyclic": 0, "not_n_acyclic": 0, "rn_free": 0, "error": 0}
    for index in range(config.count):
        x = make_instance(config, policy, index)
        logger.debug("instance %d: %s over %s", index, x.recipe.describe(), x.algebra.name)
        try:
            acyclic = is_n_acyclic(x.module).answer
            verdicts["n_acyclic" if acyclic else "not_n_acyclic"] += 1
        except (WorkbenchError, ValueError):
            logger.warning("instance %d: no n-acyclicity verdict", index, exc_info=True)
            verdicts["error"] += 1
        verdicts["rn_free"] += int(is_rn_free(x.module))
        for name, prop in PROPERTIES:
            if holds(prop, x):
                passed[name] += 1
                continue

            def fails(m: QdgModule, prop: Property = prop) -> bool:
                return not holds(prop, replace(x, module=m))

            path = write_reproducer(reproducer_dir, name, x, fails)
            failures.append({"property": name, "index": index, "seed": x.seed, "reproducer": path})
    for name, _ in PROPERTIES:
        report.check(name, passed[name] == config.count, f"{passed[name]}/{config.count}")
    report.data["failures"] = failures
    report.data["verdicts"] = verdicts
    logger.info("fuzz finished: %d instances, %d failures", config.count, len(failures))
    return report
