"""JSON documents for algebras, modules and morphisms.

Coefficients are encoded by the field (``[value]`` for F_p, ``[num]`` or
``[num, den]`` over Q). Sparse matrix entries are ``[from, to, *coeff]`` and
algebra terms are ``[t_power, basis_name, *coeff]``. :func:`serialize` always
emits the canonical form: the algebra is inlined, entries are sorted by
(source degree, source index, target index) and keys are sorted on output.
"""

import json
import os
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from ..cdg_algebra import (
    AlgebraData,
    DeformedAlgebra,
    Term,
    catalog_algebra,
    validate_algebra,
)
from ..cdg_module import CdgModule, Morphism, QdgModule, validate_module
from ..errors import ParseError, WorkbenchError
from ..exact_linear import DEFAULT_FIELD, Field, parse_field
from ..graded_core import GradedSpace, parse_grading
from ..logger import get_logger

logger = get_logger(__name__)

Document = Dict[str, Any]
Parsed = Union[DeformedAlgebra, QdgModule, Morphism]


def _require(doc: Mapping[str, Any], key: str, where: str) -> Any:
    if key not in doc:
        raise ParseError("missing key", {"at": f"{where}.{key}"})
    return doc[key]


def _as_int(value: Any, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError("expected an integer", {"at": where, "value": value})
    return value


def _as_list(value: Any, where: str) -> list:
    if not isinstance(value, list):
        raise ParseError("expected a list", {"at": where})
    return value


def _coefficient(fld: Field, parts: Sequence[Any], where: str) -> Any:
    ints = [_as_int(p, where) for p in parts]
    try:
        return fld.decode(ints)
    except ParseError as exc:
        raise ParseError("malformed coefficient", {"at": where, "value": ints}) from exc


def _basis(raw: Any, where: str) -> List[Tuple[str, int]]:
    out = []
    for k, item in enumerate(_as_list(raw, where)):
        at = f"{where}[{k}]"
        if not isinstance(item, list) or len(item) != 2 or not isinstance(item[0], str):
            raise ParseError("basis items are [name, degree]", {"at": at})
        out.append((item[0], _as_int(item[1], at)))
    return out


def _terms(fld: Field, raw: Any, where: str) -> List[Term]:
    out: List[Term] = []
    for k, item in enumerate(_as_list(raw, where)):
        at = f"{where}[{k}]"
        if not isinstance(item, list) or len(item) < 3 or not isinstance(item[1], str):
            raise ParseError("terms are [t_power, name, *coefficient]", {"at": at})
        out.append((_as_int(item[0], at), _coefficient(fld, item[2:], at), item[1]))
    return out


def _rect(fld: Field, raw: Any, rows: int, cols: int, where: str) -> np.ndarray:
    mat = fld.zeros((rows, cols))
    for k, item in enumerate(_as_list(raw, where)):
        at = f"{where}[{k}]"
        if not isinstance(item, list) or len(item) < 3:
            raise ParseError("entries are [from, to, *coefficient]", {"at": at})
        src, tgt = _as_int(item[0], at), _as_int(item[1], at)
        if not (0 <= src < cols and 0 <= tgt < rows):
            raise ParseError("entry index out of range", {"at": at})
        mat[tgt, src] = _coefficient(fld, item[2:], at)
    return fld.normalize(mat)


def _matrix(fld: Field, raw: Any, dim: int, where: str) -> np.ndarray:
    return _rect(fld, raw, dim, dim, where)


def parse_algebra(doc: Mapping[str, Any], default_field: Field = DEFAULT_FIELD) -> DeformedAlgebra:
    fld = parse_field(doc["field"]) if "field" in doc else default_field
    grading = parse_grading(str(doc.get("grading", "Z")))
    data = AlgebraData(
        field=fld,
        grading=grading,
        order=_as_int(_require(doc, "order", "algebra"), "algebra.order"),
        basis=_basis(_require(doc, "basis", "algebra"), "algebra.basis"),
        unit=str(_require(doc, "unit", "algebra")),
        mult={},
        name=str(doc.get("name", "")),
    )
    for k, item in enumerate(_as_list(doc.get("mult", []), "algebra.mult")):
        at = f"algebra.mult[{k}]"
        if not isinstance(item, list) or len(item) != 3:
            raise ParseError("mult items are [left, right, terms]", {"at": at})
        data.mult[(str(item[0]), str(item[1]))] = _terms(fld, item[2], at)
    for k, item in enumerate(_as_list(doc.get("diff", []), "algebra.diff")):
        at = f"algebra.diff[{k}]"
        if not isinstance(item, list) or len(item) != 2:
            raise ParseError("diff items are [element, terms]", {"at": at})
        data.diff[str(item[0])] = _terms(fld, item[1], at)
    data.curvature = _terms(fld, doc.get("curvature", []), "algebra.curvature")
    return validate_algebra(data)


def _algebra_ref(
    ref: Any, base_dir: Optional[str], default_field: Field
) -> DeformedAlgebra:
    if isinstance(ref, str):
        found = load(_resolve(ref, base_dir), default_field)
        if isinstance(found, QdgModule):
            return found.algebra
        if not isinstance(found, DeformedAlgebra):
            raise ParseError("algebra reference does not name an algebra", {"path": ref})
        return found
    if isinstance(ref, dict) and "catalog" in ref:
        fld = parse_field(ref["field"]) if "field" in ref else default_field
        order = _as_int(_require(ref, "order", "module.algebra"), "module.algebra.order")
        return catalog_algebra(str(ref["catalog"]), fld, order)
    if isinstance(ref, dict):
        return parse_algebra(ref, default_field)
    raise ParseError("algebra must be a path, a catalog reference or a document")


def parse_module(
    doc: Mapping[str, Any],
    base_dir: Optional[str] = None,
    default_field: Field = DEFAULT_FIELD,
) -> QdgModule:
    a = _algebra_ref(_require(doc, "algebra", "module"), base_dir, default_field)
    fld = a.field
    basis = _basis(_require(doc, "basis", "module"), "module.basis")
    space = GradedSpace(a.grading, tuple(d for _, d in basis), tuple(n for n, _ in basis))
    dim = space.dim
    action_doc = doc.get("action", {})
    if not isinstance(action_doc, dict):
        raise ParseError("action must map algebra basis names to entries", {"at": "module.action"})
    unknown = set(action_doc) - set(a.names)
    if unknown:
        raise ParseError(
            "action names are not algebra basis elements",
            {"at": "module.action", "names": ", ".join(sorted(unknown))},
        )
    action = {
        b: _matrix(fld, entries, dim, f"module.action.{b}") for b, entries in action_doc.items()
    }
    raw = QdgModule.from_action(
        a,
        space,
        _matrix(fld, doc.get("t", []), dim, "module.t"),
        _matrix(fld, doc.get("diff", []), dim, "module.diff"),
        action,
        str(doc.get("name", "")),
    )
    return validate_module(raw, curved=bool(doc.get("curved", True)))


def parse_morphism(
    doc: Mapping[str, Any],
    base_dir: Optional[str] = None,
    default_field: Field = DEFAULT_FIELD,
) -> Morphism:
    ends = []
    for key in ("source", "target"):
        ref = _require(doc, key, "morphism")
        if isinstance(ref, str):
            found = load(_resolve(ref, base_dir), default_field)
        else:
            found = parse(ref, base_dir, default_field)
        if not isinstance(found, QdgModule):
            raise ParseError("morphism ends must be modules", {"at": f"morphism.{key}"})
        ends.append(found)
    source, target = ends
    mat = _rect(source.field, doc.get("matrix", []), target.dim, source.dim, "morphism.matrix")
    return Morphism(source, target, _as_int(doc.get("degree", 0), "morphism.degree"), mat)


def parse(
    document: Mapping[str, Any],
    base_dir: Optional[str] = None,
    default_field: Field = DEFAULT_FIELD,
) -> Parsed:
    """Parses and validates an algebra, module or morphism document."""
    if not isinstance(document, dict):
        raise ParseError("a document must be a JSON object")
    kind = document.get("kind")
    if kind is None:
        kind = "module" if "algebra" in document else "algebra"
    if kind == "algebra":
        return parse_algebra(document, default_field)
    if kind == "module":
        return parse_module(document, base_dir, default_field)
    if kind == "morphism":
        return parse_morphism(document, base_dir, default_field)
    raise ParseError("unknown document kind", {"kind": kind})


def _resolve(path: str, base_dir: Optional[str]) -> str:
    if base_dir and not os.path.isabs(path):
        return os.path.join(base_dir, path)
    return path


def read_document(path: str) -> Document:
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except json.JSONDecodeError as exc:
        raise ParseError(
            exc.msg, {"path": path, "line": exc.lineno, "column": exc.colno}
        ) from exc
    except OSError as exc:
        raise ParseError("cannot read document", {"path": path, "reason": exc.strerror}) from exc


def load(path: str, default_field: Field = DEFAULT_FIELD) -> Parsed:
    logger.debug("loading %s", path)
    doc = read_document(path)
    try:
        return parse(doc, os.path.dirname(path), default_field)
    except WorkbenchError as exc:
        logger.error("%s: %s", path, exc)
        raise


def _encode_terms(fld: Field, a: DeformedAlgebra, vec: np.ndarray) -> List[list]:
    return [
        [int(s), a.names[int(c)], *fld.encode(vec[s, c])]
        for s, c in zip(*np.nonzero(vec != 0))
    ]


def serialize_algebra(a: DeformedAlgebra) -> Document:
    fld = a.field
    mult = []
    for i in range(a.dim):
        for j in range(a.dim):
            terms = _encode_terms(fld, a, a.mult[:, :, i, j])
            if terms:
                mult.append([a.names[i], a.names[j], terms])
    diff = []
    for i in range(a.dim):
        terms = _encode_terms(fld, a, a.diff[:, :, i])
        if terms:
            diff.append([a.names[i], terms])
    return {
        "kind": "algebra",
        "name": a.name,
        "field": fld.name,
        "grading": a.grading.kind,
        "order": a.order,
        "basis": [[n, d] for n, d in zip(a.names, a.degrees)],
        "unit": a.unit,
        "mult": mult,
        "diff": diff,
        "curvature": _encode_terms(fld, a, a.curvature),
    }


def _entries(fld: Field, mat: np.ndarray, source_degrees: Sequence[int]) -> List[list]:
    rows, cols = np.nonzero(mat != 0)
    order = sorted(zip(cols, rows), key=lambda e: (source_degrees[e[0]], e[0], e[1]))
    return [[int(c), int(r), *fld.encode(mat[r, c])] for c, r in order]


def serialize_module(m: QdgModule) -> Document:
    fld, a, degs = m.field, m.algebra, m.space.degrees
    action = {}
    for k, b in enumerate(a.names):
        if b == a.unit:
            continue
        entries = _entries(fld, m.action[k], degs)
        if entries:
            action[b] = entries
    return {
        "kind": "module",
        "name": m.name,
        "algebra": serialize_algebra(a),
        "curved": isinstance(m, CdgModule),
        "basis": [[n, d] for n, d in zip(m.space.names, degs)],
        "t": _entries(fld, m.t, degs),
        "diff": _entries(fld, m.d, degs),
        "action": action,
    }


def serialize_morphism(f: Morphism) -> Document:
    return {
        "kind": "morphism",
        "source": serialize_module(f.source),
        "target": serialize_module(f.target),
        "degree": f.degree,
        "matrix": _entries(f.field, f.matrix, f.source.space.degrees),
    }


def serialize(obj: Parsed) -> Document:
    if isinstance(obj, DeformedAlgebra):
        return serialize_algebra(obj)
    if isinstance(obj, QdgModule):
        return serialize_module(obj)
    if isinstance(obj, Morphism):
        return serialize_morphism(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(document: Mapping[str, Any]) -> str:
    """Canonical JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(document, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def canonical(
    document: Mapping[str, Any],
    base_dir: Optional[str] = None,
    default_field: Field = DEFAULT_FIELD,
) -> str:
    return dumps(serialize(parse(document, base_dir, default_field)))


def save(obj: Parsed, path: str) -> None:
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        f.write(dumps(serialize(obj)))
    logger.info("wrote %s", path)
