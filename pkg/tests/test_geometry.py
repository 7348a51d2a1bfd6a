import pytest

from medburn import Belief, rat, validate_game
from medburn.geometry import (
    best_responses,
    compile_pieces,
    is_generic,
    value_interval,
)
from medburn.oracle import grid_beliefs


def test_best_responses_salesman(salesman):
    assert best_responses(salesman, Belief(["3/10", "7/10"])) == (1,)  # pass
    assert best_responses(salesman, Belief(["1/2", "1/2"])) == (0, 1)  # tied
    assert best_responses(salesman, Belief(["4/5", "1/5"])) == (0,)


def test_best_responses_three_actions(three_actions):
    assert best_responses(three_actions, Belief(["1/5", "4/5"])) == (0, 1)


def test_value_interval(salesman, three_actions):
    assert value_interval(three_actions, Belief(["2/3", "1/3"])) == (rat(1, 4), rat(1))
    assert value_interval(salesman, Belief(["4/5", "1/5"])) == (rat(1), rat(1))
    assert value_interval(salesman, Belief(["1/2", "1/2"])) == (rat(0), rat(1))


def test_compile_pieces_salesman(salesman):
    s = compile_pieces(salesman)
    labels = [p.label for p in s.pieces]
    assert labels == ["{buy}", "{pass}", "{buy,pass}"]
    buy, pas, tie = s.pieces
    assert (buy.vmin, buy.vmax) == (rat(1), rat(1))
    assert (pas.vmin, pas.vmax) == (rat(0), rat(0))
    assert (tie.vmin, tie.vmax) == (rat(0), rat(1))
    # region extents on the 1-d slice
    assert pas.region.contains(Belief([0, 1]))
    assert pas.region.contains(Belief(["1/2", "1/2"]))
    assert not pas.region.contains(Belief(["3/5", "2/5"]))
    assert buy.region.contains(Belief(["1/2", "1/2"]))
    assert not buy.region.contains(Belief(["2/5", "3/5"]))
    assert tie.region.contains(Belief(["1/2", "1/2"]))
    assert not tie.region.contains(Belief(["1/4", "3/4"]))


def test_compile_pieces_influencer_tie_region(influencer):
    s = compile_pieces(influencer)
    tie = next(p for p in s.pieces if p.actions == (0, 1))
    assert tie.region.contains(Belief(["1/2", "1/4", "1/4"]))
    assert (tie.vmin, tie.vmax) == (rat(2), rat(3))


def test_compile_pieces_single_action(single_action):
    s = compile_pieces(single_action)
    assert len(s.pieces) == 1
    assert s.pieces[0].region.contains(Belief([1, 0]))
    assert s.pieces[0].region.contains(Belief(["1/3", "2/3"]))


def test_compile_guard_on_action_count():
    n = 13
    game = validate_game(
        ["H", "L"],
        [f"a{i}" for i in range(n)],
        [[i, -i] for i in range(n)],
        list(range(n)),
        ["1/2", "1/2"],
    )
    with pytest.raises(ValueError):
        compile_pieces(game)


@pytest.mark.parametrize("fixture", ["salesman", "three_actions", "influencer"])
def test_generic_fixtures(fixture, request):
    game = request.getfixturevalue(fixture)
    report = is_generic(game)
    assert report.generic
    assert report.failing is None
    # every witness really is a unique best response with the right support
    for support, action, witness in report.witnesses:
        assert witness.support() == support
        assert best_responses(game, witness) == (action,)


def test_duplicate_action_rows_break_genericity():
    game = validate_game(
        ["H", "L"],
        ["a1", "a2"],
        [[2, -1], [2, -1]],  # identical receiver payoffs, different sender values
        [0, 1],
        ["1/2", "1/2"],
    )
    report = is_generic(game)
    assert not report.generic
    assert report.failing is not None


def test_interval_matches_brute_force_on_grid(salesman, three_actions):
    for game in (salesman, three_actions):
        structure = compile_pieces(game)
        for mu in grid_beliefs(2, 64):
            ro = best_responses(game, mu)
            expected = (min(game.v[a] for a in ro), max(game.v[a] for a in ro))
            assert value_interval(game, mu) == expected
            assert structure.interval_at(mu) == expected


def test_piece_coverage_on_grid(influencer):
    structure = compile_pieces(influencer)
    by_tie_set = {p.actions: p for p in structure.pieces}
    for mu in grid_beliefs(3, 64):
        tie = best_responses(influencer, mu)
        assert tie in by_tie_set
        assert by_tie_set[tie].region.contains(mu)


def test_tie_sets_hold_throughout_their_regions(influencer, three_actions):
    for game, dim, n in ((influencer, 3, 32), (three_actions, 2, 64)):
        structure = compile_pieces(game)
        for mu in grid_beliefs(dim, n):
            ro = set(best_responses(game, mu))
            for idx in structure.pieces_at(mu):
                assert set(structure.pieces[idx].actions) <= ro


def test_subset_value_consistency(influencer):
    structure = compile_pieces(influencer)
    for mu in grid_beliefs(3, 32):
        lo, hi = structure.interval_at(mu)
        for idx in structure.pieces_at(mu):
            piece = structure.pieces[idx]
            assert lo <= piece.vmin <= hi
            assert lo <= piece.vmax <= hi
