"""Best-first search loop shared by every evaluation strategy."""

from __future__ import annotations

import heapq
import itertools
import time
from dataclasses import dataclass, field, fields
from enum import Enum
from typing import Hashable, Optional

from .heuristics import Heuristic
from .strategies import (
    Decision,
    DecisionInput,
    EnhancementOptions,
    EvaluationStrategy,
    HbpAction,
    HbpBounds,
    OpenAction,
    ReemergeAction,
    Variant,
    hbp_apply_lazy,
    hbp_bounds,
    hbp_max_skip,
    lazy_reemerge,
    ob_check,
)


class SearchError(Exception):
    def __init__(self, message: str, counters: "Counters | None" = None):
        super().__init__(message)
        self.counters = counters


class NoSolution(SearchError):
    pass


class ResourceLimit(SearchError):
    pass


class Phase(str, Enum):
    AWAITING_H2 = "awaiting_h2"
    FULL = "fully_evaluated"
    BYPASSED = "bypassed_h2"


# class labels used at termination; EG = expanded after a rational bypass
ER, SR, SG, EG, GOAL = "ER", "SR", "SG", "EG", "Goal"


@dataclass(eq=False)
class SearchNode:
    state: Hashable
    g: int
    seq: int
    parent: Optional["SearchNode"] = None
    h1: Optional[int] = None
    h2: Optional[int] = None
    b1: Optional[HbpBounds] = None
    b2: Optional[HbpBounds] = None
    phase: Phase = Phase.AWAITING_H2
    open_cycles: int = 0
    in_open: bool = False
    closed: bool = False
    expansions: int = 0
    expand_f: Optional[int] = None
    expand_g: Optional[int] = None
    h2_expanded_once: bool = False
    _entry: int = -1

    @property
    def h2_lower(self) -> Optional[int]:
        return None if self.b2 is None else self.b2.lower

    @property
    def h(self) -> int:
        best = 0
        for v in (self.h1, self.h2):
            if v is not None and v > best:
                best = v
        for b in (self.b1, self.b2):
            if b is not None and b.lower > best:
                best = b.lower
        return best

    @property
    def f(self) -> int:
        return self.g + self.h

    def interval(self, which: int) -> Optional[HbpBounds]:
        v = self.h1 if which == 1 else self.h2
        if v is not None:
            return HbpBounds(v, v)
        return self.b1 if which == 1 else self.b2


@dataclass(frozen=True)
class TieBreakRule:
    """Order among equal f: by h (``asc``/``desc``/``None``), then g
    (``desc``/``asc``/``None``), then node creation order (``fifo``/``lifo``).

    The last component uses the sequence number a node receives when first
    generated, so it is unique per node and the order is total.
    """

    h: Optional[str] = "asc"
    g: Optional[str] = "desc"
    order: str = "fifo"

    def key(self, node: SearchNode) -> tuple:
        h = node.h
        k = [node.g + h]
        if self.h == "asc":
            k.append(h)
        elif self.h == "desc":
            k.append(-h)
        if self.g == "desc":
            k.append(-node.g)
        elif self.g == "asc":
            k.append(node.g)
        k.append(node.seq if self.order == "fifo" else -node.seq)
        return tuple(k)


DEFAULT_TIE = TieBreakRule()


class OpenList:
    """Binary heap with decrease-key by re-push and stale-entry skipping.

    ``pushes`` counts insertions of nodes not already in OPEN; re-keying a
    node that is in OPEN is not an insertion.  ``pushes - pops == len(self)``.
    """

    def __init__(self, tie: TieBreakRule = DEFAULT_TIE):
        self.tie = tie
        self._heap: list = []
        self._counter = itertools.count()
        self._size = 0
        self.pushes = 0
        self.pops = 0

    def __len__(self) -> int:
        return self._size

    def __bool__(self) -> bool:
        return self._size > 0

    def push(self, node: SearchNode) -> None:
        entry = next(self._counter)
        node._entry = entry
        if not node.in_open:
            node.in_open = True
            node.open_cycles += 1
            self._size += 1
            self.pushes += 1
        heapq.heappush(self._heap, (self.tie.key(node), entry, node))

    def _drop_stale(self) -> None:
        heap = self._heap
        while heap:
            _, entry, node = heap[0]
            if node.in_open and node._entry == entry:
                return
            heapq.heappop(heap)

    def pop(self) -> SearchNode:
        self._drop_stale()
        if not self._heap:
            raise IndexError("pop from empty OPEN")
        _, _, node = heapq.heappop(self._heap)
        node.in_open = False
        self._size -= 1
        self.pops += 1
        return node

    def peek(self) -> Optional[SearchNode]:
        self._drop_stale()
        return self._heap[0][2] if self._heap else None

    def best_f(self) -> Optional[int]:
        self._drop_stale()
        return self._heap[0][0][0] if self._heap else None

    def nodes(self) -> list[SearchNode]:
        return [node for _, entry, node in self._heap if node.in_open and node._entry == entry]


@dataclass
class Counters:
    generated: int = 0
    expanded: int = 0
    reopened: int = 0
    h1_evals: int = 0
    h2_evals: int = 0
    good1: int = 0
    good2: int = 0
    bad: int = 0
    ob_hits: int = 0
    hbp1_skips: int = 0
    hbp2_delays: int = 0
    open_pushes: int = 0
    open_pops: int = 0
    er: int = 0
    sr: int = 0
    sg: int = 0
    eg: int = 0
    goals: int = 0

    def as_dict(self) -> dict[str, int]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass
class SearchResult:
    path: list
    cost: int
    counters: Counters
    node_classes: dict = field(repr=False)
    expanded: dict = field(repr=False)  # state -> f at (last) expansion
    expanded_g: dict = field(default_factory=dict, repr=False)  # state -> g at (last) expansion
    open_size: int = 0
    trace: Optional[list] = field(default=None, repr=False)
    h1_time: float = 0.0
    h2_time: float = 0.0


class TraceEvent(str, Enum):
    POP = "Pop"
    EVAL_H1 = "EvalH1"
    EVAL_H2 = "EvalH2"
    EXPAND = "Expand"
    REINSERT = "Reinsert"
    BYPASS = "Bypass"


def classify_nodes(nodes, is_goal) -> tuple[dict, dict[str, int]]:
    """Class of every generated node once the goal has been found.

    Goal states are their own class.  Nodes ever expanded are ER (or EG when
    h2 was bypassed); nodes still waiting for h2 are SG, the rest SR.
    """
    classes = {}
    counts = {ER: 0, SR: 0, SG: 0, EG: 0, GOAL: 0}
    for node in nodes:
        if is_goal(node.state):
            c = GOAL
        elif node.expansions:
            c = EG if node.phase is Phase.BYPASSED else ER
        elif node.phase is Phase.AWAITING_H2:
            c = SG
        else:
            c = SR
        classes[node.state] = c
        counts[c] += 1
    return classes, counts


class _Run:
    def __init__(self, space, h1: Optional[Heuristic], h2: Optional[Heuristic],
                 strategy: EvaluationStrategy, options: EnhancementOptions,
                 tie: TieBreakRule, max_expansions: Optional[int], max_generated: Optional[int],
                 trace: bool):
        self.space = space
        self.h1 = h1
        self.h2 = h2
        self.strategy = strategy
        self.variant = strategy.variant
        self.cost = strategy.cost_model.fresh()
        self.ph = strategy.ph.fresh()
        self.ob = options.open_bypass and strategy.lazy
        self.hbp = (options.heuristic_bypass and self.variant in (Variant.MAX, Variant.LAZY, Variant.RATIONAL)
                    and h1 is not None and h2 is not None and h1.consistent and h2.consistent)
        self.open = OpenList(tie)
        self.nodes: dict = {}
        self.c = Counters()
        self.max_expansions = max_expansions
        self.max_generated = max_generated
        self.trace = [] if trace else None
        self._seq = itertools.count()
        self._time = [0.0, 0.0]
        self._branching = getattr(space, "branching_factor", None)

    # -- bookkeeping -------------------------------------------------------

    def event(self, kind: TraceEvent, node: SearchNode) -> None:
        if self.trace is not None:
            self.trace.append((kind.value, node.state, node.f))

    def new_node(self, state, g, parent) -> SearchNode:
        node = SearchNode(state, g, next(self._seq), parent)
        self.nodes[state] = node
        self.c.generated += 1
        if self.max_generated is not None and self.c.generated > self.max_generated:
            raise ResourceLimit(f"generated more than {self.max_generated} nodes", self.snapshot())
        return node

    def eval_h(self, which: int, node: SearchNode) -> int:
        h = self.h1 if which == 1 else self.h2
        t0 = time.perf_counter()
        v = h(node.state)
        dt = time.perf_counter() - t0 + h.synthetic_delay
        self._time[which - 1] += dt
        self.cost.observe(which, dt)
        if which == 1:
            node.h1 = v
            self.c.h1_evals += 1
            self.event(TraceEvent.EVAL_H1, node)
        else:
            node.h2 = v
            self.c.h2_evals += 1
            self.ph.observe_h2()
            self.event(TraceEvent.EVAL_H2, node)
        return v

    def snapshot(self) -> Counters:
        c = Counters(**self.c.as_dict())
        c.open_pushes, c.open_pops = self.open.pushes, self.open.pops
        return c

    # -- heuristic evaluation at generation --------------------------------

    def evaluate_start(self, node: SearchNode) -> None:
        if self.space.is_goal(node.state):
            node.h1 = node.h2 = 0
        else:
            if self.h1 is not None and self.variant is not Variant.H2:
                self.eval_h(1, node)
            if self.h2 is not None and self.variant is not Variant.H1:
                self.eval_h(2, node)
        node.phase = Phase.FULL

    def evaluate_child(self, node: SearchNode, parent: SearchNode, cost: int, bidirectional: bool) -> None:
        if self.space.is_goal(node.state):
            # admissible heuristics are 0 at goals; no evaluation needed
            node.h1 = node.h2 = 0
            node.phase = Phase.FULL
            return
        v = self.variant
        if v is Variant.H1:
            self.eval_h(1, node)
            node.phase = Phase.FULL
            return
        if v is Variant.H2:
            self.eval_h(2, node)
            node.phase = Phase.FULL
            return

        b1 = b2 = None
        if self.hbp and bidirectional:
            b1 = hbp_bounds(parent.interval(1), cost)
            b2 = hbp_bounds(parent.interval(2), cost)

        if v is Variant.MAX:
            skip = hbp_max_skip(b1, b2)
            if skip == 1:
                node.b1 = b1
                self.c.hbp1_skips += 1
                self.eval_h(2, node)
            elif skip == 2:
                node.b2 = b2
                self.c.hbp2_delays += 1
                self.eval_h(1, node)
            else:
                h2 = self.eval_h(2, node)
                if b1 is not None and b1.upper <= h2:
                    node.b1 = b1
                    self.c.hbp1_skips += 1
                else:
                    self.eval_h(1, node)
            node.phase = Phase.FULL
            return

        # lazy variants
        if hbp_apply_lazy(b1, b2) is HbpAction.SKIP_H1:
            node.b1 = b1
            node.b2 = b2
            self.c.hbp1_skips += 1
            node.phase = Phase.AWAITING_H2
            return
        h1 = self.eval_h(1, node)
        if b2 is not None and b2.upper <= h1:
            # h2 can never exceed h1 here
            node.b2 = b2
            self.c.hbp2_delays += 1
            node.phase = Phase.FULL
            return
        node.phase = Phase.AWAITING_H2

    # -- main loop ---------------------------------------------------------

    def finish(self, goal: SearchNode) -> SearchResult:
        path = []
        n = goal
        while n is not None:
            path.append(n.state)
            n = n.parent
        path.reverse()
        c = self.snapshot()
        classes, counts = classify_nodes(self.nodes.values(), self.space.is_goal)
        c.er, c.sr, c.sg, c.eg, c.goals = counts[ER], counts[SR], counts[SG], counts[EG], counts[GOAL]
        c.bad = sum(1 for n in self.nodes.values() if n.open_cycles >= 2)
        c.good1 = c.sg if self.strategy.lazy else 0
        done = [n for n in self.nodes.values() if n.expansions]
        return SearchResult(path, goal.g, c, classes, {n.state: n.expand_f for n in done},
                            {n.state: n.expand_g for n in done}, len(self.open), self.trace,
                            self._time[0], self._time[1])

    def expand(self, node: SearchNode) -> None:
        node.closed = True
        node.expansions += 1
        node.expand_f = node.f
        node.expand_g = node.g
        self.c.expanded += 1
        if node.h2 is not None and not node.h2_expanded_once:
            node.h2_expanded_once = True
            self.ph.observe_expanded()
        self.event(TraceEvent.EXPAND, node)
        if self.max_expansions is not None and self.c.expanded > self.max_expansions:
            raise ResourceLimit(f"expanded more than {self.max_expansions} nodes", self.snapshot())

        for state, cost, bidirectional in self.space.successors(node.state):
            g = node.g + cost
            child = self.nodes.get(state)
            if child is None:
                child = self.new_node(state, g, node)
                self.evaluate_child(child, node, cost, bidirectional)
                if (self.ob and child.phase is Phase.AWAITING_H2
                        and ob_check(child.f, self.open.best_f()) is OpenAction.BYPASS_OPEN):
                    # would be popped next anyway: compute h2 now, save one OPEN cycle
                    self.c.ob_hits += 1
                    self.eval_h(2, child)
                    child.phase = Phase.FULL
                self.open.push(child)
            elif g < child.g:
                child.g = g
                child.parent = node
                if child.in_open:
                    self.open.push(child)
                elif child.closed:
                    child.closed = False
                    self.c.reopened += 1
                    self.open.push(child)

    def run(self) -> SearchResult:
        start = self.new_node(self.space.initial_state, 0, None)
        self.evaluate_start(start)
        self.open.push(start)
        lazy = self.strategy.lazy
        while self.open:
            node = self.open.pop()
            self.event(TraceEvent.POP, node)
            if self.space.is_goal(node.state):
                return self.finish(node)
            if lazy and node.phase is Phase.AWAITING_H2:
                inp = None
                if self.variant is Variant.RATIONAL:
                    b = (self._branching(node.state) if self._branching is not None
                         else len(self.space.successors(node.state)))
                    # N_o counts the node just popped
                    inp = DecisionInput(b, len(self.open) + 1)
                action, decision = lazy_reemerge(True, self.strategy, inp, self.ph.estimate)
                if decision is Decision.BYPASS:
                    node.phase = Phase.BYPASSED
                    self.c.good2 += 1
                    self.event(TraceEvent.BYPASS, node)
                if action is ReemergeAction.EVALUATE_H2:
                    self.eval_h(2, node)
                    node.phase = Phase.FULL
                    if self.ob and ob_check(node.f, self.open.best_f()) is OpenAction.BYPASS_OPEN:
                        self.c.ob_hits += 1
                    else:
                        self.open.push(node)
                        self.event(TraceEvent.REINSERT, node)
                        continue
            self.expand(node)
        raise NoSolution("OPEN exhausted without reaching a goal", self.snapshot())


def solve(space, h1: Optional[Heuristic], h2: Optional[Heuristic] = None,
          strategy: EvaluationStrategy | None = None, options: EnhancementOptions | None = None,
          tie: TieBreakRule = DEFAULT_TIE, max_expansions: Optional[int] = None,
          max_generated: Optional[int] = None, trace: bool = False) -> SearchResult:
    """Optimal best-first search of ``space`` combining ``h1`` and ``h2``.

    Raises :class:`NoSolution` when OPEN runs dry and :class:`ResourceLimit`
    when a cap is exceeded; both carry the counters collected so far.
    """
    strategy = strategy or EvaluationStrategy()
    options = options or EnhancementOptions()
    if strategy.variant is not Variant.H1 and h2 is None:
        raise ValueError(f"strategy {strategy.name} needs h2")
    if strategy.variant is not Variant.H2 and h1 is None:
        raise ValueError(f"strategy {strategy.name} needs h1")
    run = _Run(space, h1, h2, strategy, options, tie, max_expansions, max_generated, trace)
    return run.run()
