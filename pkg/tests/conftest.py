import numpy as np
import pytest

_acceptance = []


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(criterion): exit-criterion check")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    marker = report.user_properties and dict(report.user_properties).get("criterion")
    if marker:
        _acceptance.append((marker, report.nodeid.split("::")[-1], report.outcome))


@pytest.hookimpl(tryfirst=True)
def pytest_runtest_setup(item):
    m = item.get_closest_marker("acceptance")
    if m:
        item.user_properties.append(("criterion", m.args[0]))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    by_criterion = {}
    for criterion, name, outcome in _acceptance:
        by_criterion.setdefault(criterion, []).append((name, outcome))
    for criterion in sorted(by_criterion, key=lambda c: int(c[2:])):
        results = by_criterion[criterion]
        failed = [n for n, o in results if o != "passed"]
        status = "FAIL" if failed else "PASS"
        passed = len(results) - len(failed)
        line = f"{status}  {criterion:<4} {passed}/{len(results)} checks"
        if failed:
            line += "  failing: " + ", ".join(failed)
        terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
