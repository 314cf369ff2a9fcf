"""Admissible heuristics for the tile domains.

A :class:`Heuristic` is a callable on raw search states carrying the
metadata the search needs: whether it is consistent (required for heuristic
bypassing) and which other heuristics it is known to dominate.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Callable, Hashable, Sequence

from .domains import TILE_NUMBER, TilePuzzle, neighbor_table


@dataclass(frozen=True)
class Heuristic:
    fn: Callable[[Hashable], int]
    label: str
    consistent: bool = False
    dominates: frozenset[str] = frozenset()
    synthetic_delay: float = 0.0  # seconds charged per call in measured cost mode

    def __call__(self, state) -> int:
        return self.fn(state)

    evaluate = __call__


def timed_wrapper(h: Heuristic, synthetic_delay: float) -> Heuristic:
    """Same values and flags; each call is charged ``synthetic_delay`` extra
    seconds by a measured cost model.  No sleeping happens."""
    if synthetic_delay < 0:
        raise ValueError("delay must be >= 0")
    return replace(h, synthetic_delay=h.synthetic_delay + synthetic_delay)


def zero_heuristic() -> Heuristic:
    return Heuristic(lambda s: 0, "zero", consistent=True)


# ---------------------------------------------------------------------------
# Manhattan family


@lru_cache(maxsize=None)
def _coords(width: int, height: int) -> tuple[tuple[int, int], ...]:
    return tuple(divmod(cell, width)[::-1] for cell in range(width * height))


def _tile_weights(n: int, weights) -> tuple[int, ...]:
    if weights is None or weights == "unit":
        return (0,) + (1,) * (n - 1)
    if weights == TILE_NUMBER:
        return tuple(range(n))
    w = tuple(weights)
    if len(w) != n:
        raise ValueError(f"need {n} weights (index 0 is the blank)")
    return w


def wmd(state: Sequence[int], weights=None, width: int | None = None, height: int | None = None) -> int:
    """Weighted Manhattan distance to the blank-first goal.

    ``weights`` is ``None``/``"unit"`` (classic MD), ``"tile"`` (weight equals
    the tile number) or an explicit per-tile sequence.
    """
    n = len(state)
    if width is None:
        width = height = int(round(n ** 0.5))
    height = width if height is None else height
    xy = _coords(width, height)
    w = _tile_weights(n, weights)
    total = 0
    for cell, tile in enumerate(state):
        if tile:
            (x, y), (gx, gy) = xy[cell], xy[tile]
            total += w[tile] * (abs(x - gx) + abs(y - gy))
    return total


def _axis_distance(state, axis: int, width: int | None, height: int | None) -> int:
    n = len(state)
    if width is None:
        width = height = int(round(n ** 0.5))
    height = width if height is None else height
    xy = _coords(width, height)
    return sum(abs(xy[cell][axis] - xy[tile][axis]) for cell, tile in enumerate(state) if tile)


def delta_x(state, width: int | None = None, height: int | None = None) -> int:
    """Column-only component of unit Manhattan distance."""
    return _axis_distance(state, 0, width, height)


def delta_y(state, width: int | None = None, height: int | None = None) -> int:
    """Row-only component of unit Manhattan distance."""
    return _axis_distance(state, 1, width, height)


def manhattan(puzzle: TilePuzzle, weighted: bool | None = None) -> Heuristic:
    """MD (unit) or WMD (tile-number weights) bound to a puzzle's geometry."""
    if weighted is None:
        weighted = puzzle.weights == TILE_NUMBER
    n = puzzle.width * puzzle.height
    xy = _coords(puzzle.width, puzzle.height)
    w = _tile_weights(n, TILE_NUMBER if weighted else None)
    # per (cell, tile) cost lookup keeps the hot loop to one index per tile
    table = [[w[t] * (abs(xy[c][0] - xy[t][0]) + abs(xy[c][1] - xy[t][1])) for t in range(n)]
             for c in range(n)]

    def fn(state):
        return sum(table[c][t] for c, t in enumerate(state))

    label = "wmd" if weighted else "md"
    # unit MD is consistent under either cost model since tile costs are >= 1
    return Heuristic(fn, label, consistent=True, dominates=frozenset({"dx", "dy"}) if not weighted else frozenset({"dx", "dy", "md"}))


def axis_heuristic(puzzle: TilePuzzle, axis: str) -> Heuristic:
    if axis not in ("x", "y"):
        raise ValueError("axis must be 'x' or 'y'")
    idx = 0 if axis == "x" else 1
    n = puzzle.width * puzzle.height
    xy = _coords(puzzle.width, puzzle.height)
    table = [[abs(xy[c][idx] - xy[t][idx]) if t else 0 for t in range(n)] for c in range(n)]

    def fn(state):
        return sum(table[c][t] for c, t in enumerate(state))

    return Heuristic(fn, "d" + axis, consistent=True)


# ---------------------------------------------------------------------------
# Bounded lookahead


@dataclass(frozen=True)
class LookaheadConfig:
    depth_bound: int
    base: Heuristic

    def __post_init__(self):
        if self.depth_bound < 0:
            raise ValueError("lookahead bound must be >= 0")


def lookahead_eval(state, space, config: LookaheadConfig) -> int:
    """Cost-bounded DFS below ``state``.

    A node is a frontier leaf when its relative cost plus base value exceeds
    ``base(state) + d``, or when it is a goal.  Returns the smallest
    ``cost + base`` over frontier leaves.  Only the move straight back to the
    previous state is pruned.
    """
    if space.is_goal(state):
        return 0
    base = config.base
    h0 = base(state)
    bound = h0 + config.depth_bound
    best = None

    stack = [(state, None, 0, iter(space.successors(state)))]
    while stack:
        node, parent, cost, kids = stack[-1]
        nxt = next(kids, None)
        if nxt is None:
            stack.pop()
            continue
        child, c, _ = nxt
        if child == parent:
            continue
        g = cost + c
        if space.is_goal(child):
            f = g
            if best is None or f < best:
                best = f
            continue
        f = g + base(child)
        if f > bound:
            if best is None or f < best:
                best = f
            continue
        stack.append((child, node, g, iter(space.successors(child))))
    return h0 if best is None else best


def lookahead(space, depth_bound: int, base: Heuristic | None = None) -> Heuristic:
    if base is None:
        base = manhattan(space)
    cfg = LookaheadConfig(depth_bound, base)
    return Heuristic(lambda s: lookahead_eval(s, space, cfg), f"la{depth_bound}",
                     consistent=False, dominates=frozenset({base.label}))
