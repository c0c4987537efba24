import pathlib

import pytest

from lexgp import Constraint, LexGPProblem, Posynomial

REPO_ROOT = pathlib.Path(__file__).resolve().parent.parent
EXAMPLE_FILE = REPO_ROOT / "examples" / "paper.json"

# one "criterion k: PASS/FAIL" line per acceptance criterion, echoed in
# the terminal summary so they survive output capture
ACCEPTANCE_VERDICTS: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_VERDICTS:
            terminalreporter.write_line(line)


def two_priority_problem() -> LexGPProblem:
    """The worked two-priority design fixture used throughout the suite.

    Minimize x1^-1 x2^-1 x3^-2 first, then x1^-1 x2^-3 x3^-5 + x1^-1 x2^-1,
    subject to x1 x2 x3^2 + x2 x3 <= 10 and x1 x3 <= 2.
    """
    g10 = Posynomial.from_data([1.0], [(-1.0, -1.0, -2.0)])
    g20 = Posynomial.from_data([1.0, 1.0],
                               [(-1.0, -3.0, -5.0), (-1.0, -1.0, 0.0)])
    c1 = Constraint(lhs=Posynomial.from_data([1.0, 1.0],
                                             [(1.0, 1.0, 2.0),
                                              (0.0, 1.0, 1.0)]),
                    bound=10.0)
    c2 = Constraint(lhs=Posynomial.from_data([1.0], [(1.0, 0.0, 1.0)]),
                    bound=2.0)
    return LexGPProblem(variable_names=("x1", "x2", "x3"),
                        objectives=(g10, g20), constraints=(c1, c2))


@pytest.fixture(scope="session")
def paper_problem() -> LexGPProblem:
    return two_priority_problem()


@pytest.fixture(scope="session")
def example_path() -> pathlib.Path:
    assert EXAMPLE_FILE.is_file()
    return EXAMPLE_FILE
