import json

import pytest

from cdg_workbench.cdg_module import CdgModule, Morphism, QdgModule
from cdg_workbench.errors import ParseError, TNotNilpotent
from cdg_workbench.exact_linear import RationalField
from cdg_workbench.generators_sod import same_module
from cdg_workbench.workbench_cli import canonical, dumps, load, parse, save, serialize


def _module_doc(**overrides):
    doc = {
        "kind": "module",
        "algebra": {"catalog": "ground", "order": 1},
        "basis": [["x", 0], ["y", 0]],
        "t": [[0, 1, 1]],
        "diff": [],
        "name": "R",
    }
    doc.update(overrides)
    return doc


def test_round_trip_of_loaded_module(n_module):
    doc = serialize(n_module)
    again = parse(doc)
    assert same_module(again, n_module)
    assert dumps(serialize(again)) == dumps(doc)
    assert canonical(doc) == dumps(doc)


def test_serialized_module_inlines_algebra(n_module):
    doc = serialize(n_module)
    assert doc["algebra"]["kind"] == "algebra"
    assert doc["algebra"]["name"] == "R_1"
    assert doc["curved"] is True
    assert doc["t"] == [[1, 2, 1]]
    assert doc["diff"] == [[0, 2, 1], [1, 3, 1]]
    assert doc["action"] == {}


def test_kind_is_inferred(fld):
    doc = _module_doc()
    del doc["kind"]
    assert isinstance(parse(doc), CdgModule)
    algebra = parse({"basis": [["1", 0]], "unit": "1", "order": 0, "mult": [["1", "1", [[0, "1", 1]]]]})
    assert algebra.order == 0
    assert algebra.field == fld


def test_rational_coefficients_survive():
    doc = _module_doc(algebra={"catalog": "ground", "order": 1, "field": "q"}, t=[[0, 1, 1, 2]])
    m = parse(doc)
    assert m.field == RationalField()
    assert serialize(m)["t"] == [[0, 1, 1, 2]]


def test_uncurved_flag():
    doc = _module_doc(algebra={"catalog": "graded-field", "order": 1}, curved=False)
    m = parse(doc)
    assert isinstance(m, QdgModule)
    assert not isinstance(m, CdgModule)
    assert serialize(m)["curved"] is False


def test_invalid_module_reports_axiom():
    doc = _module_doc(
        basis=[["x", 0], ["y", 0], ["z", 0]], t=[[0, 1, 1], [1, 2, 1]]
    )
    with pytest.raises(TNotNilpotent):
        parse(doc)


@pytest.mark.parametrize(
    "overrides, location",
    [
        ({"t": [[0, 5, 1]]}, "module.t[0]"),
        ({"diff": [[0, 1]]}, "module.diff[0]"),
        ({"basis": [["x", "zero"]]}, "module.basis[0]"),
        ({"action": {"w": []}}, "module.action"),
    ],
)
def test_parse_errors_carry_location(overrides, location):
    with pytest.raises(ParseError) as excinfo:
        parse(_module_doc(**overrides))
    assert excinfo.value.where["at"] == location


def test_unknown_kind():
    with pytest.raises(ParseError):
        parse({"kind": "bimodule"})
    with pytest.raises(ParseError):
        parse([])


def test_malformed_json_has_line_and_column(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{\n  "kind": "module",\n  oops\n}\n', encoding="utf-8")
    with pytest.raises(ParseError) as excinfo:
        load(str(path))
    assert excinfo.value.where["line"] == 3


def test_missing_file(tmp_path):
    with pytest.raises(ParseError):
        load(str(tmp_path / "nowhere.json"))


def test_save_and_reload(tmp_path, n_module):
    path = tmp_path / "out" / "n.json"
    save(n_module, str(path))
    assert json.loads(path.read_text(encoding="utf-8"))["name"] == "N"
    assert same_module(load(str(path)), n_module)


def test_morphism_document(config_dir):
    f = load(str(config_dir / "modules" / "projection.json"))
    assert isinstance(f, Morphism)
    doc = serialize(f)
    assert doc["matrix"] == [[0, 0, 1]]
    again = parse(doc)
    assert isinstance(again, Morphism)
    assert again.field.equal(again.matrix, f.matrix)
