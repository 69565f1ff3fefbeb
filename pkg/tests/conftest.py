import pytest

from painleve_tz import EquationForm, IntegratorConfig, estimate_blowup, integrate

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def minus100():
    return integrate(EquationForm.PIMINUS, IntegratorConfig(t_max=100.0))


@pytest.fixture(scope="session")
def minus100_fine():
    return integrate(EquationForm.PIMINUS, IntegratorConfig(t_max=100.0).scaled(0.1))


@pytest.fixture(scope="session")
def minus100_half():
    return integrate(EquationForm.PIMINUS, IntegratorConfig(t_max=100.0).scaled(0.5))


@pytest.fixture(scope="session")
def minus500():
    return integrate(EquationForm.PIMINUS, IntegratorConfig(t_max=500.0))


@pytest.fixture(scope="session")
def plus():
    return integrate(EquationForm.PIPLUS, IntegratorConfig(t_max=10.0))


@pytest.fixture(scope="session")
def blowup_default():
    return estimate_blowup(width_tol=1e-2)
