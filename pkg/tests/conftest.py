import pytest

from panelscatter.params import derive_params
from panelscatter.pipeline import solve
from panelscatter.presets import figure_preset

# lines printed by test_acceptance.py, repeated in the terminal summary
ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def fig3():
    return solve(figure_preset(3).inputs)


@pytest.fixture(scope="session")
def fig9():
    return solve(figure_preset(9).inputs)


@pytest.fixture(scope="session", params=[3, 9], ids=["fig3", "fig9"])
def solved(request, fig3, fig9):
    return fig3 if request.param == 3 else fig9


@pytest.fixture(scope="session")
def params3():
    return derive_params(figure_preset(3).inputs)


@pytest.fixture(scope="session")
def params9():
    return derive_params(figure_preset(9).inputs)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        # the criterion label sits in a fixed column
        for line in sorted(ACCEPTANCE_LINES, key=lambda ln: ln[7:10]):
            terminalreporter.write_line(line)
