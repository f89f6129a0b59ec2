import pytest
from hypothesis import HealthCheck, settings

from qmark.fourier import coefficient_table
from qmark.measure import moments
from qmark.numerics import DEFAULT

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def ctx():
    return DEFAULT


@pytest.fixture(scope="session")
def moment_table(ctx):
    return moments(260, ctx)


@pytest.fixture(scope="session")
def coeffs(ctx, moment_table):
    """d_1..d_10000 through the default pipeline."""
    return coefficient_table(10000, ctx, table=moment_table)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
