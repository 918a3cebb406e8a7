import logging

import numpy as np

from cdg_workbench.logger import TRACE_LEVEL, get_logger


def test_trace_level_is_registered():
    assert logging.getLevelName(TRACE_LEVEL) == "TRACE"


def test_trace_matrix_summarizes(caplog):
    logger = get_logger("cdg_workbench.tests.trace")
    with caplog.at_level(TRACE_LEVEL, logger="cdg_workbench.tests.trace"):
        logger.trace_matrix("boundary", np.array([[1, 0], [0, 3]]))
        logger.trace("plain %d", 7)
    assert "boundary: 2x2, 2 nonzero" in caplog.messages
    assert "plain 7" in caplog.messages


def test_trace_matrix_is_silent_above_trace(caplog):
    logger = get_logger("cdg_workbench.tests.quiet")
    with caplog.at_level(logging.DEBUG, logger="cdg_workbench.tests.quiet"):
        logger.trace_matrix("boundary", np.zeros((2, 2)))
    assert caplog.messages == []
