import pytest

from cdg_workbench.cdg_module import CdgModule, Morphism, cone_module
from cdg_workbench.errors import IndexOutOfRange, WindowTooWideForStages
from cdg_workbench.generators_sod import gamma
from cdg_workbench.graded_core import Z, Z2
from cdg_workbench.resolutions import (
    DEFAULT_MARGIN,
    DEFAULT_WINDOW,
    build_tower,
    cocell_resolve,
    cofree_resolve,
    g_plus,
    generator_cover,
    is_fibration,
    lifts_generators,
    module_generators,
    rnfree_resolve,
    semifree_resolve,
    surjection_step,
    window_degrees,
    window_report,
)
from cdg_workbench.workbench_cli import load

WINDOW = (-2, 2)


@pytest.fixture
def k_module(config_dir):
    return load(str(config_dir / "modules" / "k.json"))


@pytest.fixture
def r1_free(config_dir):
    return load(str(config_dir / "modules" / "r1_free.json"))


@pytest.fixture
def acyclic_k(k_module):
    return cone_module(Morphism.identity(k_module))


# --- window bookkeeping ---


def test_window_degrees():
    assert window_degrees(Z, (-1, 2)) == [-1, 0, 1, 2]
    assert window_degrees(Z2, (-4, 4)) == [0, 1]
    with pytest.raises(IndexOutOfRange):
        window_degrees(Z, (1, 0))


def test_window_report_sorts_degrees():
    short = {0: ((1, 1, 1),), 1: ((1, 1, 0),), 2: ((1, 0, 0),)}
    long = {0: ((1, 1, 1),), 1: ((1, 1, 0),), 2: ((2, 0, 0),)}
    report = window_report(
        Z, (0, 3), 1, short, long, ((0, 0, 0),), lambda v: all(s == t == r for s, t, r in v)
    )
    assert report.stable == (0, 1, 3)
    assert report.unstable == (2,)
    assert report.failed == (1,)
    assert not report.ok
    assert report.flagged
    assert report.as_dict()["window"] == [0, 3]


def test_window_report_strict(mocker):
    with pytest.raises(WindowTooWideForStages):
        window_report(Z, (0, 0), 1, {0: (1,)}, {0: (2,)}, (0,), mocker.Mock(), strict=True)


# --- projective side ---


def test_surjection_step_onto_k(k_module):
    step = surjection_step(k_module)
    assert step.ok
    # k is Γ_0 itself; the unit class already covers hom(Γ_1, k)
    assert step.module.dim == 1
    assert step.augmentation.is_closed()


def test_surjection_step_onto_zero(k_module):
    step = surjection_step(CdgModule.zero(k_module.algebra))
    assert step.module.dim == 0
    assert step.ok


@pytest.mark.parametrize("i", [0, 1])
def test_surjection_step_onto_generator(k_module, i):
    g = gamma(k_module.algebra, i)
    step = surjection_step(g)
    assert step.ok


def test_surjection_step_onto_n(n_module):
    step = surjection_step(n_module)
    assert step.ok
    assert step.augmentation.is_closed()


def test_repeated_generator_adds_no_summands(n_module):
    a = n_module.algebra
    step = surjection_step(n_module)
    doubled = surjection_step(n_module, [gamma(a, 0), gamma(a, 1), gamma(a, 1)])
    assert doubled.ok
    assert doubled.module.dim == step.module.dim


def test_tower_stage_count(k_module):
    tower = build_tower(k_module, generator_cover(), 2)
    assert len(tower.stages) == 2
    assert [p.dim for p in tower.stages] == [1, 0]
    with pytest.raises(IndexOutOfRange):
        build_tower(k_module, generator_cover(), 0)


def test_semifree_resolution_structure(k_module):
    res = semifree_resolve(k_module, 1, WINDOW, margin=1)
    assert res.kind == "semifree"
    assert len(res.stages) == 1
    assert res.augmentation.is_closed()
    window = res.window
    assert sorted(window.stable + window.unstable) == window_degrees(Z, WINDOW)
    assert res.as_dict()["stage_dims"] == [1]


def test_semifree_resolution_of_n_in_default_window(n_module):
    res = semifree_resolve(n_module, 2, DEFAULT_WINDOW)
    window = res.window
    assert window.margin == DEFAULT_MARGIN
    assert res.ok
    assert window.failed == ()
    assert window.stable
    longer = semifree_resolve(n_module, 2 + DEFAULT_MARGIN, DEFAULT_WINDOW, margin=1)
    for d in window.stable:
        assert longer.window.values[d] == window.values[d]


def test_semifree_resolution_of_acyclic_module(acyclic_k):
    res = semifree_resolve(acyclic_k, 1, WINDOW, margin=1)
    assert res.ok
    assert not res.window.flagged


def test_cocell_resolution_of_acyclic_module(acyclic_k):
    res = cocell_resolve(acyclic_k, 1, WINDOW, margin=1)
    assert res.kind == "cocell"
    assert res.augmentation.source is acyclic_k
    assert res.ok


# --- R_n-free side ---


def test_module_generators(n_module, r1_free):
    assert module_generators(r1_free) == [0]
    assert module_generators(n_module) == [0, 1, 3]


def test_g_plus_doubles_dimension(k_module):
    assert g_plus(k_module).dim == 2
    assert g_plus(k_module).name == "G+(k)"


def test_rnfree_resolution_of_k(k_module):
    out = rnfree_resolve(k_module, 1, WINDOW, margin=1)
    assert out.free
    assert out.gr_free
    assert out.matches_lq
    assert out.ok
    assert not out.n_acyclic
    assert out.as_dict()["kind"] == "rnfree"


def test_cofree_resolution_of_k(k_module):
    out = cofree_resolve(k_module, 1, WINDOW, margin=1)
    assert out.resolution.kind == "cofree"
    assert out.resolution.augmentation.source is k_module
    assert out.matches_lq


# --- fibrations ---


def test_fibration_predicate(config_dir, n_module):
    projection = load(str(config_dir / "modules" / "projection.json"))
    assert not is_fibration(projection)
    assert is_fibration(Morphism.identity(n_module))
    assert not is_fibration(Morphism.zero(n_module, n_module))


def test_identity_lifts_generators(n_module):
    assert lifts_generators(Morphism.identity(n_module))
    assert not lifts_generators(Morphism.zero(n_module, n_module))
