import pytest

from fedload import NetworkStructure


@pytest.fixture
def fixture_a() -> NetworkStructure:
    """Three single-user servers; u1 bridges both rooms.

    Hand-derived loads at unit rate: tx = (a:1, b:1, c:1),
    rx = (a:2, b:1/2, c:1/2); pairwise a->b = 1/2, b->a = 1.
    """
    return NetworkStructure(
        {"a", "b", "c"},
        {"u1": "a", "u2": "b", "u3": "c"},
        {"r1": {"u1", "u2"}, "r2": {"u1", "u3"}},
    )


@pytest.fixture
def fixture_c() -> NetworkStructure:
    """One room, four single-user servers: tx = rx = 3 everywhere at unit rate."""
    servers = [f"h{i}" for i in range(4)]
    users = {f"m{i}": servers[i] for i in range(4)}
    return NetworkStructure(servers, users, {"shared": set(users)})


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when == "call" and item.fspath.basename == "test_acceptance.py":
        status = "PASS" if report.passed else ("SKIP" if report.skipped else "FAIL")
        print(f"\nACCEPTANCE {status}: {item.name}")
