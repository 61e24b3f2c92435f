from pathlib import Path

import pytest

from ciugraph.pipeline import Resources

DATA = Path(__file__).parent / "data"

GOLDEN_SEQUENCE = [3, 15, 9, 20, 12, 1, 2, 6, 7, 23, 22, 1, 2, 18, 8, 17, 6, 5, 2, 21, 1]


@pytest.fixture(scope="session")
def res():
    return Resources.load()


@pytest.fixture(scope="session")
def golden_text():
    return (DATA / "golden.txt").read_text(encoding="utf-8")


# ---------------------------------------------------------------- acceptance report

_RESULTS: list[tuple[int, str, str, str]] = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion reported in the summary")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or report.when != "call":
        return
    number, title = mark.args
    detail = ""
    if report.failed:
        detail = str(call.excinfo.value).splitlines()[0] if call.excinfo else ""
    _RESULTS.append((number, title, "PASS" if report.passed else "FAIL", detail))


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, status, detail in sorted(_RESULTS):
        line = f"[{status}] {number}. {title}"
        terminalreporter.write_line(line + (f" -- {detail}" if detail else ""))
