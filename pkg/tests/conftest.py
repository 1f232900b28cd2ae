import numpy as np
import pytest

from msefield import MacChannel

_CRITERIA: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion check")


@pytest.fixture
def two_user():
    return MacChannel.from_gains([1.0, 1.0], noise_var=1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20261015)


def pytest_runtest_logreport(report):
    marker = getattr(report, "criterion", None)
    if marker is None:
        return
    number, title = marker
    entry = _CRITERIA.setdefault(number, {"title": title, "outcomes": []})
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        entry["outcomes"].append((report.outcome, getattr(report, "note", "")))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is not None:
        report.criterion = tuple(mark.args)
        report.note = getattr(item, "criterion_note", "")


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        entry = _CRITERIA[number]
        outcomes = [o for o, _ in entry["outcomes"]]
        if not outcomes:
            continue
        if all(o == "skipped" for o in outcomes):
            verdict = "SKIP"
        elif all(o in ("passed", "skipped") for o in outcomes):
            verdict = "PASS"
        else:
            verdict = "FAIL"
        notes = "; ".join(n for _, n in entry["outcomes"] if n)
        line = f"criterion {number:>2}: {verdict}  {entry['title']}"
        if notes:
            line += f"  [{notes}]"
        terminalreporter.write_line(line)
