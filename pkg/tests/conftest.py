import os
from collections import defaultdict

import pytest
from hypothesis import HealthCheck, settings

from boolmeasures.catalog import build

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", deadline=None, max_examples=400,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

CRITERIA = {
    1: "parameter tables",
    2: "relation suite, cube n=4 exhaustive",
    3: "relation suite, S_4 structured + random",
    4: "sensitivity theorems",
    5: "degree-1 classification",
    6: "nonnegative decompositions",
    7: "RSK censuses and Greene invariants",
    8: "derangement matrix t-goodness and Hoffman",
    9: "intersecting families and covering",
    10: "ball reconstruction",
    11: "exact fbs primal = dual",
}

_outcomes: dict[int, list[tuple[str, str]]] = defaultdict(list)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion the test belongs to")


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is not None:
            item.user_properties.append(("criterion", mark.args[0]))


def pytest_runtest_logreport(report):
    crit = dict(report.user_properties).get("criterion")
    if crit is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _outcomes[crit].append((report.nodeid, report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n, title in CRITERIA.items():
        runs = _outcomes.get(n)
        if not runs:
            tr.write_line(f"criterion {n:2d} [{title}]: NOT RUN")
            continue
        failed = [nid.split("::")[-1] for nid, out in runs if out != "passed"]
        status = "PASS" if not failed else "FAIL"
        extra = f" (failing: {', '.join(failed)})" if failed else ""
        tr.write_line(f"criterion {n:2d} [{title}]: {status}{extra}")


@pytest.fixture(scope="session")
def dom():
    cache = {}

    def get(spec):
        if spec not in cache:
            cache[spec] = build(spec)
        return cache[spec]
    return get
