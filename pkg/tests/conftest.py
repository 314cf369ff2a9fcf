import pytest

from lazyastar.domains import TilePuzzle
from lazyastar.verify import goal_distance_table


@pytest.fixture(scope="session")
def unit8():
    return TilePuzzle(3, 3, "unit")


@pytest.fixture(scope="session")
def tile8():
    return TilePuzzle(3, 3, "tile")


@pytest.fixture(scope="session")
def unit8_dist(unit8):
    return goal_distance_table(unit8)


@pytest.fixture(scope="session")
def tile8_dist(tile8):
    return goal_distance_table(tile8)


class GraphSpace:
    """Explicit weighted digraph for hand-traced cases."""

    def __init__(self, edges, start, goals, bidirectional=False):
        self.edges = edges
        self.initial_state = start
        self.goals = set(goals)
        self.bidirectional = bidirectional

    def successors(self, state):
        return [(t, c, self.bidirectional) for t, c in self.edges.get(state, [])]

    def is_goal(self, state):
        return state in self.goals


# criterion number -> "PASS ..." / "FAIL ..." line, filled by test_acceptance
RESULTS: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
