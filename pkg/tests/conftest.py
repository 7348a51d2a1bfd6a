import pytest

from medburn import Belief, rat, validate_game
from medburn.geometry import Polytope, ValuePiece, direct_structure


@pytest.fixture(scope="session")
def salesman():
    """Binary quality game: price 5, feedback 10 or 0, unit commission."""
    return validate_game(
        ["H", "L"], ["buy", "pass"], [[5, -5], [0, 0]], [1, 0], ["1/4", "3/4"]
    )


@pytest.fixture(scope="session")
def influencer():
    """Three prices, three buyer values, seller revenue vs price-cutting sender."""
    return validate_game(
        ["v1", "v2", "v3"],
        ["p1", "p2", "p3"],
        [[1, 1, 1], [0, 2, 2], [0, 0, 3]],
        [3, 2, 1],
        ["1/3", "1/3", "1/3"],
    )


@pytest.fixture(scope="session")
def three_actions():
    """Two types, three actions, middle action as a hedge; prior 1/5 on H."""
    return validate_game(
        ["H", "L"], ["a1", "a2", "a3"], [[-4, 1], [0, 0], [1, -2]], [0, "1/4", 1], ["1/5", "4/5"]
    )


@pytest.fixture(scope="session")
def abstract_structure():
    """Direct value structure: an apex type worth 7/3 and a three-level face."""
    P = Polytope.on_simplex
    pieces = [
        ValuePiece(P(3, [((1, 0, 0), "=", 1)]), rat("7/3"), rat("7/3"), label="apex"),
        ValuePiece(
            P(3, [((1, 0, 0), "=", 0), ((0, 1, 0), "<=", "1/2")]), rat(2), rat(2), label="low"
        ),
        ValuePiece(
            P(3, [((1, 0, 0), "=", 0), ((0, 1, 0), ">=", "1/2"), ((0, 1, 0), "<=", "3/4")]),
            rat(3),
            rat(3),
            label="mid",
        ),
        ValuePiece(
            P(3, [((1, 0, 0), "=", 0), ((0, 1, 0), ">=", "3/4")]), rat(1), rat(1), label="high"
        ),
        ValuePiece(P(3, []), rat(0), rat(0), label="floor"),
    ]
    return direct_structure(pieces, Belief(["1/2", "1/6", "1/3"]))


@pytest.fixture(scope="session")
def single_action():
    return validate_game(["H", "L"], ["go"], [[1, 2]], [7], ["1/3", "2/3"])
