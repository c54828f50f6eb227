"""Shared fixtures: cached GPS codes and a small degree-5 toy family."""

import itertools

import pytest

from gwmmse.codes import GPS_CA, GoldCodeSpec, generate_gold_code


def pytest_terminal_summary(terminalreporter):
    """Echo the acceptance verdict lines even when capture is on."""
    import sys

    mod = sys.modules.get("test_acceptance") or sys.modules.get(
        "tests.test_acceptance"
    )
    lines = getattr(mod, "VERDICTS", None) if mod else None
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def sv1():
    return generate_gold_code(GPS_CA, 1)


@pytest.fixture(scope="session")
def sv2():
    return generate_gold_code(GPS_CA, 2)


@pytest.fixture(scope="session")
def all_gps_codes():
    return {sv: generate_gold_code(GPS_CA, sv) for sv in range(1, 33)}


@pytest.fixture(scope="session")
def toy_family():
    """Degree-5 gold family (period 31): preferred pair x^5+x^2+1 and
    x^5+x^4+x^3+x^2+1, one code per distinct phase-select pair."""
    pairs = list(itertools.combinations(range(1, 6), 2))
    return GoldCodeSpec(
        degree=5,
        g1_taps=(2, 5),
        g2_taps=(2, 3, 4, 5),
        phase_select={k + 1: ij for k, ij in enumerate(pairs)},
    )
