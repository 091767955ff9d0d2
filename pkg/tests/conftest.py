import re

_ACCEPTANCE = {}
_NAME = re.compile(r"test_acceptance\.py::test_criterion_(\d+)_(\w+?)(?:\[(.+)\])?$")


def pytest_runtest_logreport(report):
    m = _NAME.search(report.nodeid)
    if not m or (report.when != "call" and report.passed):
        return
    number, slug, param = int(m.group(1)), m.group(2), m.group(3)
    label = f"criterion {number:2d} {slug}" + (f" [{param}]" if param else "")
    if report.failed or label not in _ACCEPTANCE:
        _ACCEPTANCE[label] = "FAIL" if report.failed else ("SKIP" if report.skipped else "PASS")


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(_ACCEPTANCE):
        terminalreporter.write_line(f"{_ACCEPTANCE[label]}  {label}")
