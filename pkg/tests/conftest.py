import numpy as np
import pytest

from qinstrument import gallery
from qinstrument.quantum_types import Observable, StateVector, luders_instrument

SQ2 = np.sqrt(2.0)


def ket(*amps):
    return StateVector(np.asarray(amps, dtype=complex))


@pytest.fixture
def sigma_z():
    return gallery.sigma_z_observable()


@pytest.fixture
def luders_z(sigma_z):
    return luders_instrument(sigma_z)


@pytest.fixture
def luders_bit():
    """Computational-order projective qubit measurement (|0><0|, |1><1|)."""
    return luders_instrument(gallery.bit_observable())


@pytest.fixture
def plus():
    return ket(1 / SQ2, 1 / SQ2)


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


# --- acceptance reporting -------------------------------------------------
# Tests marked ``criterion(n, title)`` get one PASS/FAIL line in the terminal
# summary. A test may attach a short measurement via
# ``request.node.user_properties.append(("detail", text))``.

_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when not in ("setup", "call"):
        return
    if rep.when == "setup" and rep.passed:
        return
    detail = dict(item.user_properties).get("detail", "")
    _CRITERIA[mark.args[0]] = (mark.args[1], rep.passed, detail)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        title, ok, detail = _CRITERIA[n]
        line = f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {title}"
        terminalreporter.write_line(line + (f"  [{detail}]" if detail else ""))
    passed = sum(ok for _, ok, _ in _CRITERIA.values())
    terminalreporter.write_line(f"{passed}/{len(_CRITERIA)} criteria passed")
