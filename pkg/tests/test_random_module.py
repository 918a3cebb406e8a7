import pytest

from cdg_workbench.filtration import is_n_acyclic, is_rn_free
from cdg_workbench.generators_sod import same_module
from cdg_workbench.workbench_cli import RandomModulePolicy, Recipe, minimize, random_module
from cdg_workbench.workbench_parts._random_module import build, estimated_dim

LEAF = Recipe("gamma_sum", ((0, 0), (1, 2)))


def test_same_seed_same_module(r1):
    policy = RandomModulePolicy(max_dim=20)
    m1, recipe1 = random_module(r1, policy, 7)
    m2, recipe2 = random_module(r1, policy, 7)
    assert recipe1 == recipe2
    assert same_module(m1, m2)
    assert m1.name == recipe1.describe()


def test_leaf_dimension_matches_estimate(triangular):
    policy = RandomModulePolicy(max_dim=30).with_weights(gamma_sum=1.0)
    for seed in range(3):
        m, recipe = random_module(triangular, policy, seed)
        assert recipe.kind == "gamma_sum"
        assert m.dim == estimated_dim(triangular, recipe)
        assert m.dim <= 30


def test_cone_of_identity_policy_gives_n_acyclic_modules(r1):
    policy = RandomModulePolicy(max_dim=20).with_weights(cone_identity=1.0)
    m, recipe = random_module(r1, policy, 3)
    assert recipe.kind == "cone_identity"
    assert is_n_acyclic(m).answer


def test_free_leaves_are_rn_free(r1):
    policy = RandomModulePolicy(max_dim=16).with_weights(free_sum=1.0)
    for seed in range(3):
        m, recipe = random_module(r1, policy, seed)
        assert recipe.kind == "free_sum"
        assert is_rn_free(m)
        assert m.dim == estimated_dim(r1, recipe)


def test_free_leaf_description_and_shrink(r1):
    recipe = Recipe("free_sum", ((1, 0), (1, 2)))
    assert recipe.describe() == "G+(A_n ⊕ A_n[2])"
    smallest, module = minimize(r1, recipe, lambda m: True)
    assert smallest.summands == ((1, 2),)
    assert module.dim == 4


def test_recipe_description():
    assert LEAF.describe() == "Γ_0 ⊕ Γ_1[2]"
    forgotten = Recipe("forget", children=(Recipe("gamma_sum", ((0, 0),)),), order=0)
    assert forgotten.describe() == "ι_0(Γ_0)"
    assert Recipe("cone", children=(LEAF, LEAF)).describe().startswith("cone(")
    doc = forgotten.as_dict()
    assert doc["order"] == 0
    assert doc["children"][0]["summands"] == [[0, 0]]


def test_build_forget_over_truncation(r1):
    forgotten = Recipe("forget", children=(Recipe("gamma_sum", ((0, 1),)),), order=0)
    m = build(r1, forgotten)
    assert m.algebra == r1
    assert m.dim == estimated_dim(r1, forgotten)


def test_build_rejects_unknown_kind(r1):
    with pytest.raises(ValueError):
        build(r1, Recipe("bogus"))


def test_minimize_shrinks_to_one_generator(r1):
    recipe = Recipe("cone", children=(LEAF, Recipe("gamma_sum", ((1, 0),))), seed=11)
    smallest, module = minimize(r1, recipe, lambda m: True)
    assert smallest.kind == "gamma_sum"
    assert len(smallest.summands) == 1
    assert smallest.summands[0][0] == 0
    assert module.dim == r1.dim


def test_minimize_keeps_failure(r1):
    def too_big(m):
        return m.dim >= 3

    smallest, module = minimize(r1, LEAF, too_big)
    assert too_big(module)
    assert smallest.summands == ((1, 2),)
