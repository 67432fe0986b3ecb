import pytest

from apgeo.exact_core import IntMatrix, parse_matrix
from apgeo.filtration import build_admissible


@pytest.fixture
def fib() -> IntMatrix:
    return parse_matrix("2,1;1,1")


def a1(p: int):
    return build_admissible("A1", 2, p, (1, 2))


def hyperbolic_matrices(bound: int) -> list[IntMatrix]:
    """Every hyperbolic element of SL(2, Z) with entries in [-bound, bound]."""
    out = []
    span = range(-bound, bound + 1)
    for a in span:
        for b in span:
            for c in span:
                if a == 0:
                    if b * c != -1:
                        continue
                    ds = span
                elif (1 + b * c) % a:
                    continue
                else:
                    ds = [(1 + b * c) // a]
                for d in ds:
                    if abs(d) <= bound and abs(a + d) > 2:
                        out.append(IntMatrix(((a, b), (c, d))))
    return out


_ACCEPTANCE: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        status = "PASS" if report.passed else "FAIL"
        _ACCEPTANCE[number] = (status, f"{title} [{report.duration:.2f}s]")


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        status, text = _ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number}: {status}  {text}")
