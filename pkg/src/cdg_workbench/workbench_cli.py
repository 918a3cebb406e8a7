"""Compatibility wrapper exposing the command-line surface of the workbench."""
from .workbench_parts._commands import COMMANDS, run
from .workbench_parts._config import RandomModulePolicy, WorkbenchConfig, parse_window
from .workbench_parts._fuzz import PROPERTIES, run_fuzz
from .workbench_parts._random_module import Recipe, minimize, random_module
from .workbench_parts._report import Report
from .workbench_parts._serialization import canonical, dumps, load, parse, save, serialize

__all__ = [
    "COMMANDS",
    "PROPERTIES",
    "RandomModulePolicy",
    "Recipe",
    "Report",
    "WorkbenchConfig",
    "canonical",
    "dumps",
    "load",
    "minimize",
    "parse",
    "parse_window",
    "random_module",
    "run",
    "run_fuzz",
    "save",
    "serialize",
]
