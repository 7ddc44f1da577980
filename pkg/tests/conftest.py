import contextlib
import io
import json
from pathlib import Path

import numpy as np
import pytest

from diracsym import cli

CONFIGS = Path(__file__).resolve().parents[1] / "configs"

_acceptance = {}


def pytest_collection_modifyitems(items):
    for item in items:
        title = getattr(item.function, "acceptance_title", None)
        if title:
            _acceptance.setdefault(item.nodeid, (title, None))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if item.nodeid in _acceptance and (rep.when == "call" or rep.failed):
        title, prev = _acceptance[item.nodeid]
        if prev != "FAIL":
            _acceptance[item.nodeid] = (title, "PASS" if rep.passed else "FAIL")


def pytest_terminal_summary(terminalreporter):
    ran = [(t, s) for t, s in _acceptance.values() if s is not None]
    if not ran:
        return
    terminalreporter.section("acceptance")
    for title, status in ran:
        terminalreporter.write_line(f"{status}  {title}")


def acceptance(title):
    def mark(fn):
        fn.acceptance_title = title
        return fn
    return mark


def run_cli(argv):
    """Run the CLI in-process; return (exit code, parsed stdout JSON)."""
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = cli.run([str(a) for a in argv])
    return code, json.loads(buf.getvalue())


def write_json(path, doc):
    Path(path).write_text(json.dumps(doc), encoding="utf-8")
    return path


# ---------------------------------------------------------------------------
# independent Dirac matrices built from Pauli matrices with np.kron


PAULI = np.array([[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]], dtype=complex)
I2 = np.eye(2)
BETA = np.kron(np.diag([1.0, -1.0]), I2).astype(complex)
ALPHA = np.array([np.kron(np.array([[0, 1], [1, 0]]), s) for s in PAULI])
GAMMA5 = np.kron(np.array([[0, 1], [1, 0]]), I2).astype(complex)
SIGMA = np.array([np.kron(I2, s) for s in PAULI])
