"""Shared fixtures and the acceptance-criterion reporter.

Tests marked ``@pytest.mark.criterion(n, "title")`` are grouped by ``n``;
the terminal summary prints one PASS/FAIL line per criterion.
"""
import os

import pytest

from kitaev_mpe import kernels

_RESULTS = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number n")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when not in ("setup", "call"):
        return
    if report.when == "setup" and report.passed:
        return
    num, title = marker.args
    entry = _RESULTS.setdefault(num, {"title": title, "passed": True, "details": []})
    entry["passed"] &= report.passed
    entry["details"].extend(v for k, v in item.user_properties if k == "detail")


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_RESULTS):
        entry = _RESULTS[num]
        status = "PASS" if entry["passed"] else "FAIL"
        detail = "; ".join(entry["details"])
        terminalreporter.write_line(f"criterion {num:>2} [{status}] {entry['title']}: {detail}")


BACKENDS = [pytest.param(kernels.python_backend, id="python")]
BACKENDS.append(pytest.param(
    kernels.compiled_backend, id="cython",
    marks=pytest.mark.skipif(kernels.compiled_backend is None, reason="extension not built")))


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


@pytest.fixture
def detail(request):
    """Record a human-readable measurement for the acceptance summary."""
    def add(text):
        request.node.user_properties.append(("detail", text))
    return add


@pytest.fixture(autouse=True)
def _fixed_epoch(monkeypatch):
    monkeypatch.setenv("SOURCE_DATE_EPOCH", os.environ.get("SOURCE_DATE_EPOCH", "0"))
