"""Workbench logging: a TRACE level under DEBUG for per-matrix detail."""

import logging
import typing

TRACE_LEVEL = 5
logging.addLevelName(TRACE_LEVEL, "TRACE")


class TraceLogger(logging.Logger):
    """Logger with ``trace`` and a matrix summary helper."""

    def trace(self, msg: str, *args: typing.Any, **kwargs: typing.Any) -> None:
        if self.isEnabledFor(TRACE_LEVEL):
            self._log(TRACE_LEVEL, msg, args, **kwargs)

    def trace_matrix(self, label: str, arr: typing.Any) -> None:
        """Logs shape and nonzero count only; entries are never dumped."""
        if not self.isEnabledFor(TRACE_LEVEL):
            return
        shape = "x".join(str(s) for s in getattr(arr, "shape", ()))
        nonzero = int((arr != 0).sum()) if getattr(arr, "size", 0) else 0
        self._log(TRACE_LEVEL, "%s: %s, %d nonzero", (label, shape or "scalar", nonzero))


logging.setLoggerClass(TraceLogger)


def get_logger(name: str) -> TraceLogger:
    """Typed ``logging.getLogger`` so ``trace`` passes mypy."""
    return typing.cast(TraceLogger, logging.getLogger(name))
