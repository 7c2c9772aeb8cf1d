import time

import pytest

_RESULTS = []


@pytest.fixture
def criterion():
    """Record a PASS/FAIL line for an acceptance criterion; printed in the terminal summary."""

    class Recorder:
        def __init__(self):
            self.start = time.perf_counter()
            self.label = None
            self.detail = ""

        def __call__(self, label, detail=""):
            self.label, self.detail = label, detail

    rec = Recorder()
    yield rec
    _RESULTS.append(rec)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when == "call" and "criterion" in item.fixturenames:
        item.funcargs["criterion"].passed = report.passed
        item.funcargs["criterion"].elapsed = time.perf_counter() - item.funcargs["criterion"].start


def pytest_terminal_summary(terminalreporter):
    rows = [r for r in _RESULTS if r.label]
    if not rows:
        return
    terminalreporter.section("acceptance criteria")
    for r in rows:
        status = "PASS" if getattr(r, "passed", False) else "FAIL"
        extra = f" ({r.detail})" if r.detail else ""
        terminalreporter.write_line(f"{status}  {r.label}{extra}  [{getattr(r, 'elapsed', 0.0):.2f}s]")
