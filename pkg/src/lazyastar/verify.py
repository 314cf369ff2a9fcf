"""Oracle-backed equivalence checks shared by the ``verify`` command and tests."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable

from .domains import TilePuzzle, TileState, generate_instances
from .heuristics import Heuristic
from .oracle import compare_expansion_sets, distances_from, expanded_below, traces_equal
from .search import SearchResult, solve
from .strategies import Decision, EnhancementOptions, EvaluationStrategy, Rule, Variant, always

ALL_RULES = (Rule.GENERAL, Rule.LOG_OPEN, Rule.RATIO)


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}" + (f"  ({self.detail})" if self.detail else "")


def strategy_matrix(cost_model=None, hbp_ok: bool = True):
    """Every (strategy, options) combination worth checking.

    OPEN bypassing only matters for the lazy variants, heuristic bypassing
    only for the two-heuristic ones.
    """
    from .strategies import CostModel

    cost_model = cost_model or CostModel(t1=1, t2=10, t_o=0.1, t_c=0.1, tau=0.5)
    combos = [(EvaluationStrategy(Variant.H1, cost_model=cost_model), EnhancementOptions()),
              (EvaluationStrategy(Variant.H2, cost_model=cost_model), EnhancementOptions())]
    hbps = (False, True) if hbp_ok else (False,)
    for hbp in hbps:
        combos.append((EvaluationStrategy(Variant.MAX, cost_model=cost_model), EnhancementOptions(False, hbp)))
    lazies = [EvaluationStrategy(Variant.LAZY, cost_model=cost_model)]
    lazies += [EvaluationStrategy(Variant.RATIONAL, rule=r, cost_model=cost_model) for r in ALL_RULES]
    for s in lazies:
        for ob in (False, True):
            for hbp in hbps:
                combos.append((s, EnhancementOptions(ob, hbp)))
    return combos


def combo_name(strategy: EvaluationStrategy, options: EnhancementOptions) -> str:
    name = strategy.name
    if options.open_bypass:
        name += "+ob"
    if options.heuristic_bypass:
        name += "+hbp"
    return name


def goal_distance_table(puzzle: TilePuzzle) -> dict:
    """Oracle distance to the goal for every state of a (small) puzzle."""
    return distances_from(puzzle.goal, puzzle.successors)


def check_optimality(puzzle: TilePuzzle, instances: Iterable[TileState], h1: Heuristic, h2: Heuristic,
                     oracle: Callable[[TilePuzzle], int]) -> list[str]:
    """Failures (as messages) of any strategy that misses the oracle cost."""
    hbp_ok = h1.consistent and h2.consistent
    failures = []
    combos = strategy_matrix(hbp_ok=hbp_ok)
    for i, state in enumerate(instances):
        space = puzzle.with_start(state)
        want = oracle(space)
        for strategy, options in combos:
            got = solve(space, h1, h2, strategy, options).cost
            if got != want:
                failures.append(f"instance {i} {combo_name(strategy, options)}: {got} != {want}")
    return failures


def check_lazy_max(space, h1, h2) -> tuple[bool, bool, SearchResult, SearchResult]:
    """(expansion sets agree below C*, h2 counter identity holds)."""
    lazy = solve(space, h1, h2, EvaluationStrategy(Variant.LAZY))
    mx = solve(space, h1, h2, EvaluationStrategy(Variant.MAX))
    sets_ok = compare_expansion_sets(lazy, mx).passed
    identity = lazy.counters.h2_evals == mx.counters.h2_evals - lazy.counters.sg
    return sets_ok, identity, lazy, mx


def check_degeneracy(space, h1, h2) -> tuple[bool, bool]:
    """(forced-Compute trace equals Lazy, forced-Bypass expands like A* with h1)."""
    lazy = solve(space, h1, h2, EvaluationStrategy(Variant.LAZY), trace=True)
    comp = solve(space, h1, h2, EvaluationStrategy(Variant.RATIONAL, decision_override=always(Decision.COMPUTE)),
                 trace=True)
    byp = solve(space, h1, h2, EvaluationStrategy(Variant.RATIONAL, decision_override=always(Decision.BYPASS)))
    a1 = solve(space, h1, None, EvaluationStrategy(Variant.H1))
    return traces_equal(lazy, comp), byp.cost == a1.cost and f1_below(byp, h1, a1.cost) == f1_below(a1, h1, a1.cost)


def f1_below(result: SearchResult, h1: Heuristic, c_star: int) -> set:
    """Expanded states with g + h1 below C*.  The start node carries h2 as
    well, so the stored key is not comparable with an h1-only run there."""
    return {s for s, g in result.expanded_g.items() if g + h1(s) < c_star}


def check_ob_neutral(space, h1, h2) -> bool:
    ok = True
    for variant in (Variant.LAZY,):
        plain = solve(space, h1, h2, EvaluationStrategy(variant))
        ob = solve(space, h1, h2, EvaluationStrategy(variant), EnhancementOptions(open_bypass=True))
        ok &= compare_expansion_sets(plain, ob).passed
    return ok


def run_suite(puzzle: TilePuzzle, h1: Heuristic, h2: Heuristic, count: int = 20, seed: int = 1,
              walk: int = 30) -> list[CheckResult]:
    instances = generate_instances(seed, count, walk, puzzle.width, puzzle.height)
    table = goal_distance_table(puzzle) if puzzle.width * puzzle.height <= 9 else None

    def oracle(space):
        if table is not None:
            return table[space.initial_state]
        from .oracle import uniform_cost_optimal
        return uniform_cost_optimal(space)

    results = []
    fails = check_optimality(puzzle, instances, h1, h2, oracle)
    results.append(CheckResult("optimality vs uniform-cost oracle", not fails, "; ".join(fails[:3])))

    sets_bad, ident_bad, comp_bad, byp_bad, ob_bad = [], [], [], [], []
    for i, state in enumerate(instances):
        space = puzzle.with_start(state)
        sets_ok, ident_ok, _, _ = check_lazy_max(space, h1, h2)
        if not sets_ok:
            sets_bad.append(i)
        if not ident_ok:
            ident_bad.append(i)
        comp_ok, byp_ok = check_degeneracy(space, h1, h2)
        if not comp_ok:
            comp_bad.append(i)
        if not byp_ok:
            byp_bad.append(i)
        if not check_ob_neutral(space, h1, h2):
            ob_bad.append(i)
    results += [
        CheckResult("lazy/max expansion sets below C*", not sets_bad, f"instances {sets_bad}" if sets_bad else ""),
        CheckResult("h2_evals(lazy) = h2_evals(max) - sg(lazy)", not ident_bad,
                    f"instances {ident_bad}" if ident_bad else ""),
        CheckResult("rational forced-compute trace = lazy trace", not comp_bad, f"instances {comp_bad}" if comp_bad else ""),
        CheckResult("rational forced-bypass expands like A* with h1", not byp_bad,
                    f"instances {byp_bad}" if byp_bad else ""),
        CheckResult("open bypassing keeps expansion set below C*", not ob_bad, f"instances {ob_bad}" if ob_bad else ""),
    ]
    return results
