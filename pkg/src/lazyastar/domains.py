"""Benchmark state spaces: sliding-tile puzzles and a synthetic tree."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Hashable, Iterable, Protocol, Sequence

UNIT = "unit"
TILE_NUMBER = "tile"
WEIGHT_MODES = (UNIT, TILE_NUMBER)


class StateSpace(Protocol):
    """What the search loop needs from a domain.

    ``successors`` yields ``(state, cost, bidirectional)`` triples.  A space
    may also define ``branching_factor(state)``; the rational decision rule
    uses it when present instead of generating the children.
    """

    initial_state: Hashable

    def successors(self, state) -> list[tuple[Hashable, int, bool]]: ...

    def is_goal(self, state) -> bool: ...


class ParseError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


# ---------------------------------------------------------------------------
# Sliding tiles


def goal_tiles(width: int, height: int) -> tuple[int, ...]:
    """Blank in the top-left cell, tiles in reading order."""
    return tuple(range(width * height))


def count_inversions(tiles: Sequence[int]) -> int:
    seq = [t for t in tiles if t != 0]
    inv = 0
    for i, a in enumerate(seq):
        for b in seq[i + 1:]:
            if a > b:
                inv += 1
    return inv


def is_solvable(tiles: Sequence[int], width: int, height: int) -> bool:
    """Parity test relative to the blank-first goal."""
    inv = count_inversions(tiles)
    if width % 2 == 1:
        return inv % 2 == 0
    blank_row = tiles.index(0) // width
    # goal has 0 inversions and blank in row 0
    return (inv + blank_row) % 2 == 0


@dataclass(frozen=True)
class TileState:
    width: int
    height: int
    tiles: tuple[int, ...]

    def __post_init__(self):
        n = self.width * self.height
        if len(self.tiles) != n:
            raise ValueError(f"expected {n} tiles, got {len(self.tiles)}")
        if sorted(self.tiles) != list(range(n)):
            raise ValueError(f"not a permutation of 0..{n - 1}: {self.tiles}")

    @property
    def solvable(self) -> bool:
        return is_solvable(self.tiles, self.width, self.height)

    @property
    def blank(self) -> int:
        return self.tiles.index(0)

    def format(self) -> str:
        return " ".join(map(str, self.tiles))

    def pretty(self) -> str:
        w = len(str(self.width * self.height - 1))
        rows = []
        for r in range(self.height):
            row = self.tiles[r * self.width:(r + 1) * self.width]
            rows.append(" ".join(str(t).rjust(w) if t else ".".rjust(w) for t in row))
        return "\n".join(rows)


@lru_cache(maxsize=None)
def neighbor_table(width: int, height: int) -> tuple[tuple[int, ...], ...]:
    """For every cell, the cells the blank can move to."""
    table = []
    for cell in range(width * height):
        r, c = divmod(cell, width)
        adj = []
        if r > 0:
            adj.append(cell - width)
        if c > 0:
            adj.append(cell - 1)
        if c < width - 1:
            adj.append(cell + 1)
        if r < height - 1:
            adj.append(cell + width)
        table.append(tuple(adj))
    return tuple(table)


class TilePuzzle:
    """Sliding-tile puzzle as a state space over plain tile tuples.

    In ``tile`` weight mode moving tile *t* costs *t*; in ``unit`` mode every
    move costs 1.  All moves are reversible at equal cost.
    """

    def __init__(self, width: int, height: int | None = None, weights: str = UNIT,
                 start: Sequence[int] | TileState | None = None):
        height = width if height is None else height
        if weights not in WEIGHT_MODES:
            raise ValueError(f"unknown weight mode {weights!r}")
        self.width = width
        self.height = height
        self.weights = weights
        self.goal = goal_tiles(width, height)
        self._adj = neighbor_table(width, height)
        if start is None:
            start = self.goal
        elif isinstance(start, TileState):
            if (start.width, start.height) != (width, height):
                raise ValueError("start state has different board dimensions")
            start = start.tiles
        self.initial_state = tuple(start)
        TileState(width, height, self.initial_state)  # validates

    def with_start(self, start) -> "TilePuzzle":
        return TilePuzzle(self.width, self.height, self.weights, start)

    def move_cost(self, tile: int) -> int:
        return tile if self.weights == TILE_NUMBER else 1

    def successors(self, state):
        blank = state.index(0)
        out = []
        for cell in self._adj[blank]:
            tile = state[cell]
            s = list(state)
            s[blank], s[cell] = tile, 0
            out.append((tuple(s), self.move_cost(tile), True))
        return out

    def branching_factor(self, state) -> int:
        return len(self._adj[state.index(0)])

    def is_goal(self, state) -> bool:
        return state == self.goal

    def __repr__(self):
        return f"TilePuzzle({self.width}x{self.height}, weights={self.weights!r})"


def successors(state: TileState, weight_mode: str = UNIT) -> list[tuple[TileState, int, bool]]:
    """Blank moves from ``state`` as ``TileState`` values."""
    space = TilePuzzle(state.width, state.height, weight_mode)
    return [(TileState(state.width, state.height, s), c, b)
            for s, c, b in space.successors(state.tiles)]


def _infer_dims(ntok: int) -> tuple[int, int, bool]:
    for n, has_index in ((ntok, False), (ntok - 1, True)):
        side = int(round(n ** 0.5))
        if side >= 2 and side * side == n:
            return side, side, has_index
    raise ValueError(f"cannot infer a square board from {ntok} numbers")


def parse_instances(text: str, width: int | None = None, height: int | None = None,
                    allow_unsolvable: bool = True) -> list[TileState]:
    """Parse one instance per line; blank lines and ``#`` comments are skipped.

    A line holds ``w*h`` integers, optionally preceded by an instance index
    (detected by token count).  Without explicit dimensions a square board is
    inferred from the first instance line.
    """
    out: list[TileState] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            nums = [int(tok) for tok in line.split()]
        except ValueError as exc:
            raise ParseError(f"non-integer token ({exc})", lineno) from None
        if width is None:
            try:
                width, height, _ = _infer_dims(len(nums))
            except ValueError as exc:
                raise ParseError(str(exc), lineno) from None
        h = width if height is None else height
        n = width * h
        if len(nums) == n + 1:
            nums = nums[1:]
        elif len(nums) != n:
            raise ParseError(f"expected {n} tiles (or {n + 1} with index), got {len(nums)}", lineno)
        if len(set(nums)) != n:
            raise ParseError("duplicate tiles", lineno)
        if sorted(nums) != list(range(n)):
            raise ParseError(f"not a permutation of 0..{n - 1}", lineno)
        state = TileState(width, h, tuple(nums))
        if not allow_unsolvable and not state.solvable:
            raise ParseError("unsolvable permutation", lineno)
        out.append(state)
    return out


def format_instances(states: Iterable[TileState], header: str | None = None) -> str:
    lines = [f"# {header}"] if header else []
    lines += [s.format() for s in states]
    return "\n".join(lines) + "\n"


def random_instance(seed: int, walk_length: int, width: int = 3, height: int | None = None) -> TileState:
    """Scramble the goal with ``walk_length`` random blank moves.

    The walk never immediately undoes its previous move, so it stays solvable
    and the unit-cost distance is at most ``walk_length``.
    """
    if walk_length < 0:
        raise ValueError("walk_length must be >= 0")
    height = width if height is None else height
    rng = random.Random(seed)
    adj = neighbor_table(width, height)
    tiles = list(goal_tiles(width, height))
    blank, prev = 0, -1
    for _ in range(walk_length):
        choices = [c for c in adj[blank] if c != prev]
        cell = rng.choice(choices)
        tiles[blank], tiles[cell] = tiles[cell], 0
        prev, blank = blank, cell
    return TileState(width, height, tuple(tiles))


def generate_instances(seed: int, count: int, walk_length: int, width: int = 3,
                       height: int | None = None) -> list[TileState]:
    rng = random.Random(seed)
    return [random_instance(rng.randrange(2**31), walk_length, width, height)
            for _ in range(count)]


# ---------------------------------------------------------------------------
# Synthetic tree


@dataclass(frozen=True)
class SyntheticTree:
    """Parameterized implicit tree with admissible noisy heuristics.

    Nodes are tuples of child indices from the root.  Leaves at depth
    ``depth`` are goals with probability ``goal_rate``; one seeded leaf is
    always a goal.  ``h1``/``h2`` are the true remaining cost scaled by a
    per-node factor drawn from ``h1_range``/``h2_range`` (both inside [0, 1])
    and floored, so they never overestimate.
    """

    branching: int = 2
    depth: int = 5
    seed: int = 0
    max_edge_cost: int = 1
    goal_rate: float = 0.0
    h1_range: tuple[float, float] = (0.0, 0.5)
    h2_range: tuple[float, float] = (0.5, 1.0)
    t1: float = 1.0
    t2: float = 10.0

    def __post_init__(self):
        if self.branching < 1 or self.depth < 1:
            raise ValueError("need branching >= 1 and depth >= 1")
        for lo, hi in (self.h1_range, self.h2_range):
            if not 0.0 <= lo <= hi <= 1.0:
                raise ValueError("heuristic ranges must lie inside [0, 1]")


def _draw(seed: int, node: tuple, tag: str) -> random.Random:
    return random.Random(f"{seed}/{tag}/{','.join(map(str, node))}")


class SyntheticTreeSpace:
    """State space over a :class:`SyntheticTree` with ground-truth labels."""

    def __init__(self, tree: SyntheticTree):
        self.tree = tree
        self.initial_state: tuple = ()
        rng = random.Random(tree.seed)
        self._forced_goal = tuple(rng.randrange(tree.branching) for _ in range(tree.depth))
        self.true_distance = lru_cache(maxsize=None)(self._true_distance)
        self._h = {}

    def edge_cost(self, child: tuple) -> int:
        if self.tree.max_edge_cost <= 1:
            return 1
        return _draw(self.tree.seed, child, "c").randint(1, self.tree.max_edge_cost)

    def is_goal(self, state) -> bool:
        if len(state) != self.tree.depth:
            return False
        if state == self._forced_goal:
            return True
        return self.tree.goal_rate > 0 and _draw(self.tree.seed, state, "g").random() < self.tree.goal_rate

    def successors(self, state):
        if len(state) >= self.tree.depth:
            return []
        kids = [state + (i,) for i in range(self.tree.branching)]
        return [(k, self.edge_cost(k), False) for k in kids]

    def branching_factor(self, state) -> int:
        return 0 if len(state) >= self.tree.depth else self.tree.branching

    def _true_distance(self, state) -> float:
        if self.is_goal(state):
            return 0
        best = float("inf")
        for child, cost, _ in self.successors(state):
            best = min(best, cost + self.true_distance(child))
        return best

    @property
    def optimal_cost(self) -> int:
        return self.true_distance(self.initial_state)

    def _noisy(self, state, which: int) -> int:
        key = (state, which)
        if key not in self._h:
            d = self.true_distance(state)
            lo, hi = self.tree.h1_range if which == 1 else self.tree.h2_range
            if d == float("inf"):
                # any value is admissible below a dead subtree
                d = self.tree.depth * self.tree.max_edge_cost
            factor = _draw(self.tree.seed, state, f"h{which}").uniform(lo, hi)
            self._h[key] = int(d * factor)
        return self._h[key]

    def h1(self, state) -> int:
        return self._noisy(state, 1)

    def h2(self, state) -> int:
        return self._noisy(state, 2)

    def h2_helpful(self, state, g: int) -> bool:
        """Ground truth: h2 alone would push this node above the optimal cost."""
        return g + self.h2(state) > self.optimal_cost


def synth_tree_space(tree: SyntheticTree) -> SyntheticTreeSpace:
    return SyntheticTreeSpace(tree)
