import json

import pytest

from cdg_workbench.__main__ import EXIT_ASSERTION, EXIT_USAGE, _setup_arg_parser, main
from cdg_workbench.errors import EquivalenceViolation
from cdg_workbench.workbench_cli import Report


@pytest.fixture
def run_main(mocker, tmp_path):
    mock_basic_config = mocker.patch("logging.basicConfig")
    log_file = str(tmp_path / "logs" / "workbench.log")

    def _run(*argv):
        code = main([*argv, "--log-file", log_file])
        mock_basic_config.assert_called()
        return code

    return _run


@pytest.fixture
def module_path(config_dir):
    return str(config_dir / "modules" / "n_example.json")


def test_parser_defaults():
    args = _setup_arg_parser().parse_args(["validate", "x.json"])
    assert args.field == "fp:32003"
    assert args.window == "-4:4"
    assert args.format == "human"
    assert args.log_level == "INFO"


def test_unknown_command_exits():
    with pytest.raises(SystemExit):
        _setup_arg_parser().parse_args(["frobnicate"])


def test_validate_module(run_main, module_path, capsys):
    assert run_main("validate", module_path) == 0
    out = capsys.readouterr().out
    assert "[PASS] module axioms" in out
    assert out.endswith("OK\n")


def test_validate_morphism_as_json(run_main, config_dir, capsys):
    path = str(config_dir / "modules" / "projection.json")
    assert run_main("validate", path, "--format", "json") == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["data"]["kind"] == "morphism"
    assert doc["data"]["closed"] is True


def test_gamma_emits_module_document(run_main, capsys):
    assert run_main("gamma", "--catalog", "graded-field", "--i", "1", "--format", "json") == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["kind"] == "module"
    assert len(doc["basis"]) == 3


def test_acyclic_report(run_main, module_path, capsys):
    assert run_main("acyclic", module_path, "--format", "json") == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["data"]["n_acyclic"] is False
    assert doc["data"]["acyclic_as_complex"] is True


def test_fibration_of_projection(run_main, config_dir, capsys):
    path = str(config_dir / "modules" / "projection.json")
    assert run_main("fibration", path, "--format", "json") == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["data"]["fibration"] is False


def test_report_written_to_file(run_main, module_path, tmp_path, capsys):
    out = tmp_path / "reports" / "lq.json"
    assert run_main("lq", module_path, "--cutoff", "4", "--format", "json", "--out", str(out)) == 0
    assert capsys.readouterr().out == ""
    doc = json.loads(out.read_text(encoding="utf-8"))
    assert doc["command"] == "lq"


@pytest.mark.parametrize(
    "argv",
    [
        ("validate",),
        ("validate", "missing.json"),
        ("acyclic", "x.json", "--window", "5:1"),
        ("gamma", "--catalog", "octonions"),
        ("validate", "x.json", "--field", "fp:9"),
    ],
)
def test_usage_errors(run_main, argv, capsys):
    assert run_main(*argv) == EXIT_USAGE
    assert capsys.readouterr().err.startswith("error: ")


def test_equivalence_violation_exit_code(run_main, module_path, mocker):
    mocker.patch(
        "cdg_workbench.workbench_cli.run", side_effect=EquivalenceViolation("routes disagree")
    )
    assert run_main("acyclic", module_path) == EXIT_ASSERTION


def test_failed_assertion_exit_code(run_main, module_path, mocker):
    report = Report("acyclic")
    report.check("filtration routes agree", False)
    mocker.patch("cdg_workbench.workbench_cli.run", return_value=report)
    assert run_main("acyclic", module_path) == EXIT_ASSERTION


def test_resolve_with_default_window_and_stages(run_main, module_path, capsys):
    assert run_main("resolve", module_path, "--format", "json") == 0
    doc = json.loads(capsys.readouterr().out)
    resolution = doc["data"]["resolution"]
    assert resolution["kind"] == "semifree"
    assert len(resolution["stage_dims"]) == 3
    assert resolution["window"]["window"] == [-4, 4]
    assert resolution["window"]["margin"] == 2
