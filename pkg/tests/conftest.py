import pytest

from packlab.descartes import generate, root_quadruple_bounded

_ACCEPTANCE = {}


@pytest.fixture(scope="session")
def root():
    return root_quadruple_bounded()


@pytest.fixture(scope="session")
def run_2_16(root):
    return generate(root, 2 ** 16, workers=4)


@pytest.fixture(scope="session")
def run_1e5(root):
    return generate(root, 10 ** 5, workers=4)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if rep.failed:
        _ACCEPTANCE[marker.args[0]] = "FAIL"
    elif rep.when == "call" and rep.passed:
        _ACCEPTANCE.setdefault(marker.args[0], "PASS")


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion n")
    config.addinivalue_line("markers", "slow: takes more than a few seconds")


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    from test_acceptance import TITLES

    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        terminalreporter.write_line(f"criterion {n:2d} {_ACCEPTANCE[n]}: {TITLES[n]}")
