import json
import logging
import os
from dataclasses import replace

import pytest

from cdg_workbench.errors import NotClosed
from cdg_workbench.exact_linear import RationalField
from cdg_workbench.workbench_cli import (
    PROPERTIES,
    RandomModulePolicy,
    Recipe,
    WorkbenchConfig,
    run_fuzz,
)
from cdg_workbench.workbench_parts._fuzz import holds, make_instance, write_reproducer
from cdg_workbench.workbench_parts._random_module import build

SMALL = RandomModulePolicy(max_dim=12, max_order=2, max_summands=2, max_depth=1)


def test_instances_are_reproducible():
    config = WorkbenchConfig(seed=4, count=2)
    first = make_instance(config, SMALL, 1)
    again = make_instance(config, SMALL, 1)
    assert first.seed == again.seed
    assert first.recipe == again.recipe
    assert first.algebra == again.algebra


def test_property_names_are_unique():
    names = [name for name, _ in PROPERTIES]
    assert len(names) == len(set(names)) == 16


def test_run_fuzz_reports_every_property(tmp_path):
    config = WorkbenchConfig(seed=1, count=2)
    report = run_fuzz(config, SMALL, str(tmp_path / "repro"))
    assert [a.name for a in report.assertions] == [name for name, _ in PROPERTIES]
    verdicts = report.data["verdicts"]
    assert verdicts["n_acyclic"] + verdicts["not_n_acyclic"] <= 2


def test_equal_seeds_render_identical_reports(tmp_path):
    config = WorkbenchConfig(seed=7, count=2)
    first = run_fuzz(config, SMALL, str(tmp_path / "a")).render("json")
    again = run_fuzz(config, SMALL, str(tmp_path / "a")).render("json")
    assert first == again


def test_zero_instances_pass():
    report = run_fuzz(WorkbenchConfig(count=0), SMALL, "unused")
    assert report.exit_code == 0
    assert report.data["failures"] == []


def test_property_errors_count_as_failures(mocker):
    x = make_instance(WorkbenchConfig(seed=2), SMALL, 0)
    boom = mocker.Mock(side_effect=NotClosed("not a cycle"))
    assert not holds(boom, x)
    assert holds(lambda _: True, x)


def test_value_errors_count_as_failures(mocker, caplog):
    x = make_instance(WorkbenchConfig(seed=2), SMALL, 0)
    boom = mocker.Mock(side_effect=ValueError("direct sum of no modules"))
    with caplog.at_level(logging.ERROR):
        assert not holds(boom, x)
    assert "ValueError" in caplog.text
    assert caplog.records[-1].exc_info is not None


def test_missing_verdicts_are_counted(mocker, tmp_path):
    mocker.patch(
        "cdg_workbench.workbench_parts._fuzz.PROPERTIES", (("always", lambda x: True),)
    )
    mocker.patch(
        "cdg_workbench.workbench_parts._fuzz.is_n_acyclic",
        side_effect=ValueError("rref expects a 2-d array"),
    )
    report = run_fuzz(WorkbenchConfig(seed=5, count=2), SMALL, str(tmp_path))
    verdicts = report.data["verdicts"]
    assert verdicts["error"] == 2
    assert verdicts["n_acyclic"] == verdicts["not_n_acyclic"] == 0
    assert report.exit_code == 0


def test_free_leaves_reach_the_battery(mocker, tmp_path):
    mocker.patch(
        "cdg_workbench.workbench_parts._fuzz.PROPERTIES", (("always", lambda x: True),)
    )
    policy = RandomModulePolicy(max_dim=24, max_order=1).with_weights(free_sum=1.0)
    report = run_fuzz(WorkbenchConfig(seed=3, count=2), policy, str(tmp_path))
    assert report.data["verdicts"]["rn_free"] == 2


def test_sod_membership_on_forgotten_module():
    x = make_instance(WorkbenchConfig(seed=6), SMALL, 0)
    recipe = Recipe("forget", children=(Recipe("gamma_sum", ((0, 0),)),), order=0)
    forgotten = replace(x, recipe=recipe, module=build(x.algebra, recipe))
    sod_membership = dict(PROPERTIES)["sod_membership"]
    assert holds(sod_membership, forgotten)


def test_reproducer_document(tmp_path):
    x = make_instance(WorkbenchConfig(seed=3), SMALL, 0)
    path = write_reproducer(str(tmp_path), "always", x, lambda m: True)
    assert os.path.basename(path) == "always-0.json"
    with open(path, encoding="utf-8") as f:
        doc = json.load(f)
    assert doc["kind"] == "module"
    assert doc["reproducer"]["property"] == "always"
    assert doc["reproducer"]["original"] == x.recipe.describe()


@pytest.mark.integration
@pytest.mark.parametrize("field", [None, RationalField()])
def test_property_battery(tmp_path, field):
    kwargs = {"field": field} if field is not None else {}
    config = WorkbenchConfig(seed=2024, count=40, **kwargs)
    report = run_fuzz(config, RandomModulePolicy(max_dim=24), str(tmp_path))
    assert report.data["failures"] == []
    assert report.exit_code == 0
