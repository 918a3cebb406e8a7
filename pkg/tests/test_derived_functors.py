import pytest

from cdg_workbench.cdg_algebra import catalog_algebra, truncate
from cdg_workbench.cdg_module import Morphism, cone_module
from cdg_workbench.derived_functors import (
    certified_cone,
    certified_forget,
    certified_g,
    certified_gamma,
    certified_shift,
    certified_sum,
    derived_functor_table,
    derived_hom,
    derived_hom_table,
    lq,
    lq_long_exact_sequence,
    periodic_oracle,
    rk,
    semiderived_member,
)
from cdg_workbench.errors import IndexOutOfRange, NoCertificate
from cdg_workbench.generators_sod import gamma
from cdg_workbench.workbench_cli import load


@pytest.fixture
def r1_free(config_dir):
    return load(str(config_dir / "modules" / "r1_free.json"))


@pytest.fixture
def k_module(config_dir):
    return load(str(config_dir / "modules" / "k.json"))


def test_closed_forms_on_n_example(n_module):
    assert lq(n_module, 0).report.dims == {0: 1}
    assert lq(n_module, 1).report.dims == {0: 1, 2: 1}
    assert lq(n_module, 2).report.dims == {0: 1, 2: 1}
    assert rk(n_module, 0).report.dims == {2: 1}
    with pytest.raises(IndexOutOfRange):
        lq(n_module, -1)


def test_oracle_matches_closed_form(n_module):
    for i in range(4):
        assert periodic_oracle(n_module, i).report.dims == lq(n_module, i).report.dims
    with pytest.raises(IndexOutOfRange):
        periodic_oracle(n_module, 2, depth=2)


def test_table_on_n_example(n_module):
    table = derived_functor_table(n_module, cutoff=4)
    assert len(table.lq) == len(table.rk) == 5
    assert table.oracle_agrees
    assert table.shift_agrees
    assert table.periodic
    doc = table.as_dict()
    assert doc["module"] == "N"
    assert doc["lq"][1] == {"0": 1, "2": 1}


def test_free_module_has_no_higher_reductions(r1_free):
    table = derived_functor_table(r1_free, cutoff=3)
    assert all(r.is_acyclic for r in table.lq[1:])
    assert table.lq[0].dims == {0: 1}


def test_semiderived_membership_at_order_one(n_module, r1_free, periodic_module):
    verdict = semiderived_member(n_module)
    assert not verdict.member
    assert not verdict.flagged
    assert semiderived_member(r1_free).member
    assert semiderived_member(periodic_module).member


def test_semiderived_membership_is_flagged_above_order_one(fld):
    a = catalog_algebra("ground", fld, 2)
    verdict = semiderived_member(gamma(a, 2))
    assert verdict.flagged
    assert [i for i, _ in verdict.pieces] == [1, 2]


def test_long_exact_sequence_of_extension(r1_free, k_module):
    fld = r1_free.field
    # 0 → k →t R_1 → k → 0
    inclusion = Morphism(k_module, r1_free, 0, fld.array([[0], [1]]))
    projection = Morphism(r1_free, k_module, 0, fld.array([[1, 0]]))
    report = lq_long_exact_sequence(inclusion, projection)
    assert report.short_exact
    assert report.exact


def test_long_exact_sequence_needs_short_exactness(r1_free, k_module):
    fld = r1_free.field
    zero = Morphism.zero(k_module, r1_free)
    projection = Morphism(r1_free, k_module, 0, fld.array([[1, 0]]))
    assert not lq_long_exact_sequence(zero, projection).exact


def test_derived_hom_requires_certificate(r1, n_module):
    with pytest.raises(NoCertificate):
        derived_hom(n_module, n_module)
    g0 = certified_gamma(r1, 0)
    assert derived_hom(g0, n_module).report.dims == {2: 1}
    table = derived_hom_table([g0, certified_shift(g0, 1)], n_module)
    assert table[1] == ("Γ_0[1]", {3: 1})


def test_certified_constructions(r1):
    g0, g1 = certified_gamma(r1, 0), certified_gamma(r1, 1)
    total = certified_sum([g0, g1])
    assert total.certificate == "Γ_0 ⊕ Γ_1"
    ident = Morphism.identity(g0.module)
    cone = certified_cone(ident, g0, g0)
    assert cone.module.dim == 2
    with pytest.raises(NoCertificate):
        certified_cone(ident, g1, g0)
    assert cone_module(ident).dim == cone.module.dim


def test_certified_g_and_forget(r1):
    g = certified_g(r1)
    assert g.certificate == "G_1"
    assert g.module.dim == 5
    lifted = certified_forget(certified_gamma(truncate(r1, 0), 0), r1)
    assert lifted.certificate == "ι(Γ_0)"
    assert lifted.module.algebra == r1
