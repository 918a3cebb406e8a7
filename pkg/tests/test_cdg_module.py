import pytest

from cdg_workbench.cdg_module import (
    CdgModule,
    Morphism,
    QdgModule,
    cocone_module,
    cocone_projection,
    cone_inclusion,
    cone_module,
    direct_sum_modules,
    dualize,
    evaluation,
    f_dual_to_q_dual,
    hom_complex,
    m_i,
    postcompose_matrix,
    precompose_matrix,
    q_dual_to_f_dual,
    q_tensor,
    regular_quotient,
    shift_module,
    validate_module,
)
from cdg_workbench.errors import (
    AlgebraMismatch,
    CurvatureLawFailure,
    IndexOutOfRange,
    NotClosed,
    NotRLinear,
    TNotNilpotent,
    WrongDegree,
)
from cdg_workbench.graded_core import Z, Z2, GradedSpace
from cdg_workbench.workbench_cli import load


def _free_rank_one(a, grading):
    """R_1 as a module over itself: e ↦ f under t."""
    fld = a.field
    space = GradedSpace(grading, (0, 0), ("e", "f"))
    t = fld.array([[0, 0], [1, 0]])
    return QdgModule.from_action(a, space, t, fld.zeros((2, 2)), {}, "R")


def test_loaded_module_is_curved(n_module):
    assert isinstance(n_module, CdgModule)
    assert n_module.name == "N"
    assert n_module.space.dims() == {0: 1, 1: 2, 2: 1}


def test_t_must_be_nilpotent(r1):
    fld = r1.field
    space = GradedSpace(Z, (0, 0, 0), ("x", "y", "z"))
    t = fld.array([[0, 0, 0], [1, 0, 0], [0, 1, 0]])
    raw = QdgModule.from_action(r1, space, t, fld.zeros((3, 3)), {})
    with pytest.raises(TNotNilpotent):
        validate_module(raw)


def test_curvature_law(gf):
    raw = _free_rank_one(gf, Z2)
    with pytest.raises(CurvatureLawFailure):
        validate_module(raw)
    qdg = validate_module(raw, curved=False)
    assert not isinstance(qdg, CdgModule)


def test_module_grading_must_match(r1, gf):
    with pytest.raises(AlgebraMismatch):
        _free_rank_one(r1, Z2)
    with pytest.raises(AlgebraMismatch):
        hom_complex(validate_module(_free_rank_one(r1, Z)), regular_quotient(gf, 0))


def test_morphism_checks(n_module):
    fld = n_module.field
    m = n_module
    not_linear = fld.zeros((4, 4))
    not_linear[1, 2] = 1  # f ↦ e
    with pytest.raises(NotRLinear):
        Morphism(m, m, 0, not_linear)
    wrong = fld.zeros((4, 4))
    wrong[1, 0] = 1  # a ↦ e
    with pytest.raises(WrongDegree):
        Morphism(m, m, 0, wrong)
    assert Morphism.identity(m).is_closed()


def test_cone_needs_closed_map(n_module):
    fld = n_module.field
    # projection onto a commutes with t but not with d
    mat = fld.zeros((4, 4))
    mat[0, 0] = 1
    f = Morphism(n_module, n_module, 0, mat)
    with pytest.raises(NotClosed):
        cone_module(f)


def test_hom_identity_is_a_cycle(n_module):
    hom = hom_complex(n_module, n_module)
    fld = n_module.field
    coords = hom.coordinates(fld.eye(n_module.dim))
    assert fld.is_zero(fld.matmul(hom.complex.differential, coords.reshape(-1, 1)))
    assert hom.morphism(coords, 0).is_closed()


def test_hom_from_zero_module(r1, n_module):
    zero = QdgModule.zero(r1)
    assert hom_complex(zero, n_module).dim == 0
    assert hom_complex(n_module, zero).complex.is_acyclic()


def test_shift_and_sum(n_module):
    shifted = shift_module(n_module, 1)
    assert shifted.name == "N[1]"
    assert shifted.space.dims() == {-1: 1, 0: 2, 1: 1}
    assert isinstance(validate_module(shifted), CdgModule)
    total = direct_sum_modules([n_module, shifted])
    assert total.dim == 8
    assert isinstance(total, CdgModule)


def test_cone_and_cocone_of_identity(n_module):
    ident = Morphism.identity(n_module)
    cone = cone_module(ident)
    assert cone.dim == 2 * n_module.dim
    assert isinstance(cone, CdgModule)
    assert cone_inclusion(ident, cone).is_closed()
    assert cocone_module(ident).name == "coCone(N -> N)"


def test_double_dual_evaluation(n_module):
    dual = dualize(n_module)
    assert dual.name == "N^∨"
    assert dual.algebra.name == "R_1^op"
    ev = evaluation(n_module)
    assert ev.is_closed()
    assert ev.target.space.same_shape(n_module.space)


@pytest.mark.parametrize("i", [0, 1])
def test_duality_comparisons(n_module, i):
    assert q_dual_to_f_dual(n_module, i).ok
    assert f_dual_to_q_dual(n_module, i).ok


def test_duality_over_curved_algebra(gf):
    a0 = regular_quotient(gf, 0)
    assert q_dual_to_f_dual(a0, 1).ok
    assert f_dual_to_q_dual(a0, 1).ok


def test_closed_form_functor_dims(n_module):
    # M/tM ⊕ M[1] for i = 0 has dimension 3 + 0
    assert q_tensor(n_module, 0).dim == 3
    assert m_i(n_module, 1).dim == 4 + 3
    with pytest.raises(IndexOutOfRange):
        m_i(n_module, 2)


def test_regular_quotients(gf, r1):
    assert isinstance(regular_quotient(gf, 0), CdgModule)
    top = regular_quotient(r1, 1)
    assert top.dim == 2
    assert isinstance(top, CdgModule)
    with pytest.raises(IndexOutOfRange):
        regular_quotient(r1, 2)


def test_induced_hom_maps(config_dir, n_module):
    fld = n_module.field
    projection = load(str(config_dir / "modules" / "projection.json"))
    src = hom_complex(projection.target, n_module)
    tgt = hom_complex(projection.source, n_module)
    pre = precompose_matrix(src, tgt, projection)
    assert pre.shape == (tgt.dim, src.dim)
    lhs = fld.matmul(tgt.complex.differential, pre)
    rhs = fld.matmul(pre, src.complex.differential)
    assert fld.equal(lhs, rhs)

    end = hom_complex(n_module, n_module)
    ident = postcompose_matrix(end, end, Morphism.identity(n_module))
    assert fld.equal(ident, fld.eye(end.dim))
    zero = postcompose_matrix(end, end, Morphism.zero(n_module, n_module))
    assert fld.is_zero(zero)


def test_cocone_projection_is_closed(n_module):
    f = Morphism.identity(n_module)
    cocone = cocone_module(f)
    p = cocone_projection(f, cocone)
    assert p.degree == 0
    assert p.is_closed()
    assert p.target is n_module
