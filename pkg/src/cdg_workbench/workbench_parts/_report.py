import json
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from ..logger import get_logger

logger = get_logger(__name__)

PASS = "pass"
FAIL = "fail"
FLAGGED = "flagged"


@dataclass(frozen=True)
class Assertion:
    name: str
    status: str
    detail: str = ""


def jsonable(value: Any) -> Any:
    """Plain JSON data with string keys; tuples become lists."""
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if value is None or isinstance(value, (int, float, str)):
        return value
    return str(value)


@dataclass
class Report:
    """Ordered assertions plus command data; rendering is deterministic."""

    command: str
    subject: str = ""
    assertions: List[Assertion] = field(default_factory=list)
    data: Dict[str, Any] = field(default_factory=dict)
    document: Optional[Dict[str, Any]] = None

    def check(self, name: str, ok: bool, detail: str = "", flagged: bool = False) -> bool:
        status = FAIL if not ok else FLAGGED if flagged else PASS
        self.assertions.append(Assertion(name, status, detail))
        if status == FAIL:
            logger.error("%s: assertion %s failed %s", self.command, name, detail)
        elif status == FLAGGED:
            logger.warning("%s: assertion %s flagged %s", self.command, name, detail)
        return ok

    def flag(self, name: str, detail: str = "") -> None:
        self.check(name, True, detail, flagged=True)

    @property
    def failed(self) -> bool:
        return any(a.status == FAIL for a in self.assertions)

    @property
    def exit_code(self) -> int:
        return 1 if self.failed else 0

    def as_dict(self) -> Dict[str, Any]:
        return {
            "command": self.command,
            "subject": self.subject,
            "assertions": [
                {"name": a.name, "status": a.status, "detail": a.detail}
                for a in self.assertions
            ],
            "data": jsonable(self.data),
            "status": FAIL if self.failed else PASS,
        }

    def render(self, output_format: str = "human") -> str:
        if output_format == "json":
            payload = self.document if self.document is not None else self.as_dict()
            return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
        lines = [f"{self.command}: {self.subject}" if self.subject else self.command]
        for a in self.assertions:
            suffix = f": {a.detail}" if a.detail else ""
            lines.append(f"  [{a.status.upper()}] {a.name}{suffix}")
        for key in sorted(self.data):
            lines.append(f"  {key} = {json.dumps(jsonable(self.data[key]), sort_keys=True)}")
        lines.append("FAIL" if self.failed else "OK")
        return "\n".join(lines) + "\n"
