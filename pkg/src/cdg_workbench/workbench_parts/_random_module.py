"""Random valid modules built from recipes.

A :class:`Recipe` is a small tree: leaves are sums of shifted Γ_i or R_n-free
modules G^+(A_n ⊗ V), inner
nodes forget from a truncation, take cones (of a random closed morphism or of
an identity) or twist a sum by a closed degree-1 map. The tree together with
its per-node seeds reproduces the module exactly, and it is also what the
minimizer shrinks.
"""

from dataclasses import dataclass, replace
from typing import Callable, Iterator, List, Optional, Tuple

import numpy as np

from ..cdg_algebra import DeformedAlgebra, truncate
from ..cdg_module import (
    Morphism,
    QdgModule,
    cone_module,
    direct_sum_modules,
    hom_complex,
    shift_module,
    validate_module,
)
from ..errors import WorkbenchError
from ..exact_linear import kernel_rows
from ..filtration import forget
from ..generators_sod import TwistSpec, gamma, twist
from ..logger import get_logger
from ..resolutions import free_graded_module, g_plus
from ._config import RandomModulePolicy

logger = get_logger(__name__)


@dataclass(frozen=True)
class Recipe:
    kind: str
    summands: Tuple[Tuple[int, int], ...] = ()
    children: Tuple["Recipe", ...] = ()
    order: int = 0
    seed: int = 0

    def describe(self) -> str:
        if self.kind == "gamma_sum":
            parts = [f"Γ_{i}[{s}]" if s else f"Γ_{i}" for i, s in self.summands]
            return " ⊕ ".join(parts)
        if self.kind == "free_sum":
            parts = [f"A_n[{s}]" if s else "A_n" for _, s in self.summands]
            return f"G+({' ⊕ '.join(parts)})"
        inner = ", ".join(c.describe() for c in self.children)
        if self.kind == "forget":
            return f"ι_{self.order}({inner})"
        return f"{self.kind}({inner})"

    def as_dict(self) -> dict:
        return {
            "kind": self.kind,
            "summands": [list(p) for p in self.summands],
            "children": [c.as_dict() for c in self.children],
            "order": self.order,
            "seed": self.seed,
        }


def estimated_dim(a: DeformedAlgebra, recipe: Recipe) -> int:
    if recipe.kind == "gamma_sum":
        return sum(a.dim * (2 * i + 1) for i, _ in recipe.summands)
    if recipe.kind == "free_sum":
        return 2 * a.dim * (a.order + 1) * len(recipe.summands)
    if recipe.kind == "forget":
        return estimated_dim(truncate(a, recipe.order), recipe.children[0])
    if recipe.kind == "cone_identity":
        return 2 * estimated_dim(a, recipe.children[0])
    return sum(estimated_dim(a, c) for c in recipe.children)


def _shift_range(a: DeformedAlgebra) -> Tuple[int, int]:
    return (0, 2) if a.grading.periodic else (-2, 3)


def _leaf(rng: np.random.Generator, a: DeformedAlgebra, policy: RandomModulePolicy, budget: int) -> Recipe:
    lo, hi = _shift_range(a)
    summands: List[Tuple[int, int]] = []
    used = 0
    for _ in range(int(rng.integers(1, policy.max_summands + 1))):
        fitting = [i for i in range(a.order + 1) if used + a.dim * (2 * i + 1) <= budget]
        if not fitting:
            break
        i = fitting[int(rng.integers(len(fitting)))]
        summands.append((i, int(rng.integers(lo, hi))))
        used += a.dim * (2 * i + 1)
    if not summands:
        summands.append((0, 0))
    return Recipe("gamma_sum", tuple(summands))


def _free_leaf(
    rng: np.random.Generator, a: DeformedAlgebra, policy: RandomModulePolicy, budget: int
) -> Optional[Recipe]:
    size = 2 * a.dim * (a.order + 1)
    count = min(int(rng.integers(1, policy.max_summands + 1)), budget // size)
    if count == 0:
        return None
    lo, hi = _shift_range(a)
    return Recipe("free_sum", tuple((1, int(rng.integers(lo, hi))) for _ in range(count)))


def random_recipe(
    rng: np.random.Generator,
    a: DeformedAlgebra,
    policy: RandomModulePolicy,
    budget: Optional[int] = None,
    depth: Optional[int] = None,
) -> Recipe:
    budget = policy.max_dim if budget is None else budget
    depth = policy.max_depth if depth is None else depth
    names, p = policy.probabilities()
    kind = str(rng.choice(names, p=p))
    seed = int(rng.integers(2**31))
    half = budget // 2
    if kind == "free_sum":
        return _free_leaf(rng, a, policy, budget) or _leaf(rng, a, policy, budget)
    if kind == "gamma_sum" or depth == 0 or half < a.dim:
        return _leaf(rng, a, policy, budget)
    if kind == "forget":
        if a.order == 0:
            return _leaf(rng, a, policy, budget)
        lower = int(rng.integers(a.order))
        child = random_recipe(rng, truncate(a, lower), policy, budget, depth - 1)
        return Recipe("forget", children=(child,), order=lower)
    if kind == "cone_identity":
        child = random_recipe(rng, a, policy, half, depth - 1)
        return Recipe("cone_identity", children=(child,))
    left = random_recipe(rng, a, policy, half, depth - 1)
    right = random_recipe(rng, a, policy, budget - estimated_dim(a, left), depth - 1)
    return Recipe(kind, children=(left, right), seed=seed)


def random_closed_map(
    rng: np.random.Generator, source: QdgModule, target: QdgModule, degree: int
) -> Morphism:
    """A random element of the cycles of hom(source, target) in one degree."""
    hom = hom_complex(source, target)
    fld = source.field
    deg = source.space.grading.normalize(degree)
    idx = hom.complex.space.indices(deg)
    coords = fld.zeros((hom.dim,))
    if idx:
        cycles = kernel_rows(fld, hom.complex.differential[:, idx])
        if cycles.shape[0]:
            weights = fld.random_array(rng, (1, cycles.shape[0]))
            coords[idx] = fld.matmul(weights, cycles).reshape(-1)
    return hom.morphism(coords, deg)


def build(a: DeformedAlgebra, recipe: Recipe) -> QdgModule:
    """Builds and re-validates the module a recipe describes."""
    if recipe.kind == "gamma_sum":
        parts = [shift_module(gamma(a, i), s) for i, s in recipe.summands]
        out = parts[0] if len(parts) == 1 else direct_sum_modules(parts)
    elif recipe.kind == "free_sum":
        out = g_plus(free_graded_module(a, [-s for _, s in recipe.summands]))
    elif recipe.kind == "forget":
        out = forget(build(truncate(a, recipe.order), recipe.children[0]), a)
    elif recipe.kind == "cone_identity":
        out = cone_module(Morphism.identity(build(a, recipe.children[0])))
    elif recipe.kind == "cone":
        target, source = (build(a, c) for c in recipe.children)
        f = random_closed_map(np.random.default_rng(recipe.seed), source, target, 0)
        out = cone_module(f)
    elif recipe.kind == "twist":
        top, bottom = (build(a, c) for c in recipe.children)
        g = random_closed_map(np.random.default_rng(recipe.seed), bottom, top, 1)
        fld = a.field
        p, q = top.dim, bottom.dim
        twisting = fld.zeros((p + q, p + q))
        twisting[:p, p:] = g.matrix
        out = twist(TwistSpec((top, bottom), twisting))
    else:
        raise ValueError(f"unknown recipe kind {recipe.kind!r}")
    return validate_module(out.with_name(recipe.describe()))


def random_module(
    a: DeformedAlgebra, policy: RandomModulePolicy, seed: int
) -> Tuple[QdgModule, Recipe]:
    """A valid cdg module over ``a``; the same seed always gives the same module."""
    rng = np.random.default_rng(seed)
    recipe = random_recipe(rng, a, policy)
    m = build(a, recipe)
    logger.debug("random module seed=%d: %s (dim %d)", seed, recipe.describe(), m.dim)
    return m, recipe


def _shrinks(a: DeformedAlgebra, recipe: Recipe) -> Iterator[Recipe]:
    if recipe.kind in ("gamma_sum", "free_sum"):
        if len(recipe.summands) > 1:
            for k in range(len(recipe.summands)):
                yield replace(recipe, summands=recipe.summands[:k] + recipe.summands[k + 1 :])
        for k, (i, s) in enumerate(recipe.summands):
            if recipe.kind == "gamma_sum" and i > 0:
                smaller = recipe.summands[:k] + ((i - 1, s),) + recipe.summands[k + 1 :]
                yield replace(recipe, summands=smaller)
        return
    if recipe.kind != "forget":
        yield from recipe.children
    inner = truncate(a, recipe.order) if recipe.kind == "forget" else a
    for k, child in enumerate(recipe.children):
        for smaller in _shrinks(inner, child):
            children = recipe.children[:k] + (smaller,) + recipe.children[k + 1 :]
            yield replace(recipe, children=children)


def minimize(
    a: DeformedAlgebra, recipe: Recipe, fails: Callable[[QdgModule], bool]
) -> Tuple[Recipe, QdgModule]:
    """Greedy summand deletion keeping ``fails`` true."""
    current, module = recipe, build(a, recipe)
    improved = True
    while improved:
        improved = False
        for candidate in _shrinks(a, current):
            try:
                m = build(a, candidate)
                still = fails(m)
            except WorkbenchError:
                continue
            if still:
                logger.debug("minimized %s -> %s", current.describe(), candidate.describe())
                current, module, improved = candidate, m, True
                break
    return current, module
