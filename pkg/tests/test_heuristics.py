import random

import pytest

from lazyastar import EvaluationStrategy, Variant, solve
from lazyastar.domains import generate_instances, goal_tiles
from lazyastar.heuristics import (
    LookaheadConfig,
    axis_heuristic,
    delta_x,
    delta_y,
    lookahead,
    lookahead_eval,
    manhattan,
    timed_wrapper,
    wmd,
    zero_heuristic,
)
from lazyastar.strategies import CostModel


def test_wmd_goal_is_zero():
    assert wmd(goal_tiles(3, 3), "tile") == 0
    assert wmd(goal_tiles(4, 4)) == 0


def test_wmd_single_tile_displaced():
    # tiles 3 and 5 trade places, each two columns off; weighting only tile 5
    # isolates its share
    tiles = list(goal_tiles(3, 3))
    tiles[3], tiles[5] = 5, 3
    tiles = tuple(tiles)
    weights = [0] * 9
    weights[5] = 5
    assert wmd(tiles, weights) == 10
    assert wmd(tiles, "tile") == 5 * 2 + 3 * 2


def test_delta_axes():
    assert delta_x(goal_tiles(3, 3)) == delta_y(goal_tiles(3, 3)) == 0
    tiles = list(goal_tiles(3, 3))
    tiles[0], tiles[1] = tiles[1], tiles[0]  # tile 1 one column left, same row
    assert delta_x(tiles) == 1 and delta_y(tiles) == 0
    tiles = list(goal_tiles(3, 3))
    tiles[0], tiles[3] = tiles[3], tiles[0]  # tile 3 one row up
    assert delta_x(tiles) == 0 and delta_y(tiles) == 1


def test_axis_split_sums_to_manhattan(unit8):
    md, dx, dy = manhattan(unit8), axis_heuristic(unit8, "x"), axis_heuristic(unit8, "y")
    for s in generate_instances(1, 50, 40):
        assert dx(s.tiles) + dy(s.tiles) == md(s.tiles) == wmd(s.tiles)


def test_table_heuristics_match_direct(tile8):
    h = manhattan(tile8)
    assert h.label == "wmd" and h.consistent
    for s in generate_instances(2, 50, 40):
        assert h(s.tiles) == wmd(s.tiles, "tile")


def test_manhattan_consistent_exhaustive_sample(unit8, tile8):
    rng = random.Random(0)
    for puzzle in (unit8, tile8):
        h = manhattan(puzzle)
        for s in generate_instances(rng.randrange(1000), 200, 30):
            for t, c, _ in puzzle.successors(s.tiles):
                assert abs(h(s.tiles) - h(t)) <= c


def test_lookahead_goal_is_zero(tile8):
    for d in (0, 3, 7):
        assert lookahead_eval(tile8.goal, tile8, LookaheadConfig(d, manhattan(tile8))) == 0


@pytest.mark.parametrize("d", [0, 2, 4, 6])
def test_lookahead_between_base_and_oracle(d, tile8, tile8_dist):
    base = manhattan(tile8)
    cfg = LookaheadConfig(d, base)
    states = random.Random(d).sample(sorted(tile8_dist), 200)
    for s in states:
        v = lookahead_eval(s, tile8, cfg)
        assert base(s) <= v <= tile8_dist[s]


def test_lookahead_monotone_in_bound(tile8):
    base = manhattan(tile8)
    for s in generate_instances(4, 40, 30):
        vals = [lookahead_eval(s.tiles, tile8, LookaheadConfig(d, base)) for d in range(0, 10, 2)]
        assert vals == sorted(vals)


def test_lookahead_heuristic_metadata(tile8):
    h = lookahead(tile8, 4)
    assert h.label == "la4" and not h.consistent and "wmd" in h.dominates
    with pytest.raises(ValueError):
        LookaheadConfig(-1, zero_heuristic())


def test_timed_wrapper_zero_delay_is_identity(unit8):
    h = manhattan(unit8)
    assert timed_wrapper(h, 0) == h


def test_timed_wrapper_feeds_measured_cost(unit8):
    h1 = manhattan(unit8)
    h2 = timed_wrapper(manhattan(unit8), 0.01)
    assert h2(unit8.goal) == 0 and h2.consistent and h2.label == h1.label
    space = unit8.with_start(generate_instances(5, 1, 20)[0])
    cost = CostModel(mode="measured")
    res = solve(space, h1, h2, EvaluationStrategy(Variant.MAX, cost_model=cost))
    per_h2 = res.h2_time / res.counters.h2_evals
    per_h1 = res.h1_time / res.counters.h1_evals
    assert 0.01 <= per_h2 < 0.01 + 0.005
    assert per_h1 < 0.005
    with pytest.raises(ValueError):
        timed_wrapper(h1, -1)
