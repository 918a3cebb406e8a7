import argparse
import json

import pytest

from cdg_workbench.errors import ParseError
from cdg_workbench.exact_linear import DEFAULT_FIELD, RationalField
from cdg_workbench.workbench_cli import RandomModulePolicy, Report, WorkbenchConfig, parse_window
from cdg_workbench.workbench_parts._config import DEFAULT_WINDOW, RECIPES, child_seed


def test_parse_window():
    assert parse_window("-3:5") == (-3, 5)
    assert parse_window("0:0") == (0, 0)


@pytest.mark.parametrize("text", ["3", "a:b", "4:1", ""])
def test_parse_window_rejects(text):
    with pytest.raises(ParseError):
        parse_window(text)


def test_child_seed_is_deterministic():
    assert child_seed(5, 0) == child_seed(5, 0)
    assert len({child_seed(5, i) for i in range(10)}) == 10
    assert child_seed(5, 1) != child_seed(6, 1)


def test_config_defaults():
    config = WorkbenchConfig()
    assert config.field == DEFAULT_FIELD
    assert config.window == DEFAULT_WINDOW
    assert config.output_format == "human"


@pytest.mark.parametrize(
    "kwargs",
    [{"output_format": "xml"}, {"count": -1}, {"stages": 0}],
)
def test_config_validation(kwargs):
    with pytest.raises(ParseError):
        WorkbenchConfig(**kwargs)


def test_config_from_args():
    args = argparse.Namespace(
        field="q", seed=9, count=4, window="-1:2", stages=2, format="json", out=None
    )
    config = WorkbenchConfig.from_args(args)
    assert config.field == RationalField()
    assert config.window == (-1, 2)
    assert config.seed == 9
    assert config.output_format == "json"


def test_config_from_args_bad_field():
    args = argparse.Namespace(
        field="fp:4", seed=0, count=1, window="0:1", stages=1, format="human", out=None
    )
    with pytest.raises(ParseError):
        WorkbenchConfig.from_args(args)


def test_policy_weights():
    policy = RandomModulePolicy()
    names, p = policy.probabilities()
    assert names == RECIPES
    assert p.sum() == pytest.approx(1.0)
    only = policy.with_weights(twist=2.0)
    names, p = only.probabilities()
    assert names == ("twist",)
    assert list(p) == [1.0]


def test_policy_validation():
    with pytest.raises(ParseError):
        RandomModulePolicy(weights={"shuffle": 1.0})
    with pytest.raises(ParseError):
        RandomModulePolicy().with_weights()


def test_report_statuses():
    report = Report("acyclic", "N")
    assert report.check("complex", True, "d² = 0")
    report.flag("semiderived", "order above one")
    assert report.exit_code == 0
    assert not report.check("n_acyclic", False)
    assert report.failed
    assert report.exit_code == 1
    assert [a["status"] for a in report.as_dict()["assertions"]] == ["pass", "flagged", "fail"]


def test_report_rendering():
    report = Report("gamma", "R_1")
    report.check("maurer_cartan", True, "i=1")
    report.data["dims"] = {0: 1, 2: 3}
    text = report.render()
    assert text.splitlines() == [
        "gamma: R_1",
        "  [PASS] maurer_cartan: i=1",
        '  dims = {"0": 1, "2": 3}',
        "OK",
    ]
    doc = json.loads(report.render("json"))
    assert doc["status"] == "pass"
    assert doc["data"]["dims"] == {"0": 1, "2": 3}


def test_report_prefers_document():
    report = Report("serialize", document={"kind": "algebra"})
    assert json.loads(report.render("json")) == {"kind": "algebra"}
