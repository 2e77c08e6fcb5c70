import os
import sys
import time
from contextlib import contextmanager

import pytest

sys.path.insert(0, os.path.dirname(__file__))

_CRITERIA = []


@contextmanager
def _criterion(name):
    """Record one acceptance line; failures are recorded and re-raised."""
    start = time.perf_counter()
    info = {}
    try:
        yield info
    except BaseException as e:
        _CRITERIA.append(f"FAIL  {name}  ({type(e).__name__}: {str(e).splitlines()[0] if str(e) else ''})")
        raise
    detail = info.get("detail", "")
    _CRITERIA.append(f"PASS  {name}  [{time.perf_counter() - start:.2f}s] {detail}".rstrip())


@pytest.fixture
def criterion():
    return _criterion


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for line in _CRITERIA:
        terminalreporter.write_line(line)
