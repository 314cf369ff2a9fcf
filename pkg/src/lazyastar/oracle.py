"""Ground truth for tests: heuristic-free optimal costs and result comparison.

Nothing here imports the search loop.  The uniform-cost solver keeps its own
bucket queue so a bug in the heap-based OPEN list cannot hide behind it.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field


class CapExceeded(RuntimeError):
    pass


class CostMismatch(AssertionError):
    pass


class _BucketQueue:
    """Monotone integer priority queue (Dial's buckets)."""

    def __init__(self):
        self._buckets: dict[int, list] = {}
        self._cur = 0
        self._n = 0

    def push(self, prio: int, item) -> None:
        self._buckets.setdefault(prio, []).append(item)
        self._n += 1
        if prio < self._cur:
            self._cur = prio

    def pop(self):
        while True:
            bucket = self._buckets.get(self._cur)
            if bucket:
                self._n -= 1
                return self._cur, bucket.pop()
            self._buckets.pop(self._cur, None)
            self._cur += 1

    def __len__(self):
        return self._n


def uniform_cost_optimal(space, cap: int | None = None) -> int | None:
    """Exact optimal cost from ``space.initial_state``; ``None`` if no goal is
    reachable.  ``cap`` bounds the number of expansions."""
    dist = {space.initial_state: 0}
    done = set()
    queue = _BucketQueue()
    queue.push(0, space.initial_state)
    expansions = 0
    while len(queue):
        d, s = queue.pop()
        if s in done or dist[s] != d:
            continue
        if space.is_goal(s):
            return d
        done.add(s)
        expansions += 1
        if cap is not None and expansions > cap:
            raise CapExceeded(f"more than {cap} expansions")
        for t, c, _ in space.successors(s):
            nd = d + c
            if nd < dist.get(t, nd + 1):
                dist[t] = nd
                queue.push(nd, t)
    return None


def distances_from(source, successors, cap: int | None = None) -> dict:
    """Single-source costs to every reachable state.

    With bidirectional equal-cost edges (the tile puzzles) running this from
    the goal yields every state's distance to the goal.
    """
    dist = {source: 0}
    done = set()
    queue = _BucketQueue()
    queue.push(0, source)
    while len(queue):
        d, s = queue.pop()
        if s in done or dist[s] != d:
            continue
        done.add(s)
        if cap is not None and len(done) > cap:
            raise CapExceeded(f"more than {cap} states")
        for t, c, _ in successors(s):
            nd = d + c
            if nd < dist.get(t, nd + 1):
                dist[t] = nd
                queue.push(nd, t)
    return dist


def bidirectional_bfs_distance(start, goal, neighbors) -> int | None:
    """Unit-cost distance by meeting-in-the-middle BFS."""
    if start == goal:
        return 0
    front = {start: 0}, {goal: 0}
    queues = deque([start]), deque([goal])
    while queues[0] and queues[1]:
        side = 0 if len(queues[0]) <= len(queues[1]) else 1
        seen, other = front[side], front[1 - side]
        q = queues[side]
        best = None
        for _ in range(len(q)):
            s = q.popleft()
            for t in neighbors(s):
                if t in seen:
                    continue
                seen[t] = seen[s] + 1
                if t in other:
                    total = seen[t] + other[t]
                    best = total if best is None else min(best, total)
                q.append(t)
        if best is not None:
            return best
    return None


@dataclass
class ExpansionReport:
    cost: int
    passed: bool
    only_a: set = field(default_factory=set)
    only_b: set = field(default_factory=set)
    ties_a: set = field(default_factory=set)
    ties_b: set = field(default_factory=set)

    def __bool__(self):
        return self.passed


def expanded_below(result, c_star: int) -> set:
    return {s for s, f in result.expanded.items() if f < c_star}


def compare_expansion_sets(result_a, result_b, c_star: int | None = None) -> ExpansionReport:
    """PASS iff both searches expanded the same states with f below C*.

    States expanded at exactly f = C* depend on tie-breaking and are only
    reported.
    """
    if result_a.cost != result_b.cost:
        raise CostMismatch(f"costs differ: {result_a.cost} vs {result_b.cost}")
    if c_star is None:
        c_star = result_a.cost
    elif c_star != result_a.cost:
        raise CostMismatch(f"results cost {result_a.cost}, expected {c_star}")
    below_a, below_b = expanded_below(result_a, c_star), expanded_below(result_b, c_star)
    ties_a = {s for s, f in result_a.expanded.items() if f == c_star}
    ties_b = {s for s, f in result_b.expanded.items() if f == c_star}
    return ExpansionReport(c_star, below_a == below_b, below_a - below_b, below_b - below_a,
                           ties_a, ties_b)


def traces_equal(result_a, result_b) -> bool:
    return result_a.trace is not None and result_a.trace == result_b.trace


def path_cost(space, path) -> int:
    """Sum of edge costs along a state path; raises if a step is not an edge."""
    total = 0
    for a, b in zip(path, path[1:]):
        for t, c, _ in space.successors(a):
            if t == b:
                total += c
                break
        else:
            raise ValueError(f"{b} is not a successor of {a}")
    return total
