import pytest

from advtree.config import make_config
from advtree.tree import Tree


@pytest.fixture
def tree4():
    """Binary tree over 4 slots: 1=[0,4) 2=[0,2) 3=[2,4) 4..7 = leaves."""
    return Tree(make_config([2, 2]))


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(name): acceptance criterion reported in the summary")
    config._criteria = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.failed):
        detail = dict(item.user_properties).get("detail", "")
        item.config._criteria.append((marker.args[0], rep.passed, detail))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not config._criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in config._criteria:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}  {detail}")
