"""Acceptance suite: one test per criterion, each recording a PASS/FAIL line.

Run under pytest (lines appear in the terminal summary) or directly with
``python3 tests/test_acceptance.py``.
"""

import csv
import io
import math
import random
import sys
import time
from fractions import Fraction
from functools import lru_cache

import pytest

from conftest import RESULTS
from lazyastar import EnhancementOptions, EvaluationStrategy, Variant, solve
from lazyastar.bench import ExperimentConfig, make_heuristic, run_experiment
from lazyastar.domains import TilePuzzle, generate_instances
from lazyastar.heuristics import LookaheadConfig, lookahead, lookahead_eval, manhattan
from lazyastar.oracle import expanded_below, uniform_cost_optimal
from lazyastar.strategies import (
    CostModel,
    Decision,
    DecisionInput,
    PhEstimator,
    Rule,
    hbp_bounds,
    predicted_overhead,
    prefer_compute_by_regret,
    prefer_compute_rearranged,
    rational_decide,
    update_ph,
)
from lazyastar.verify import check_degeneracy, check_lazy_max, check_optimality, goal_distance_table, strategy_matrix


# -- shared instance sets -----------------------------------------------------

@lru_cache(maxsize=None)
def puzzle(width, weights):
    return TilePuzzle(width, width, weights)


@lru_cache(maxsize=None)
def distances(weights):
    return goal_distance_table(puzzle(3, weights))


@lru_cache(maxsize=None)
def groups():
    """(label, puzzle, instances, h1, h2, oracle) for every optimality group."""
    unit, tile, fifteen = puzzle(3, "unit"), puzzle(3, "tile"), puzzle(4, "unit")
    unit_d, tile_d = distances("unit"), distances("tile")
    return (
        ("8-puzzle unit md/pdb", unit, generate_instances(101, 100, 40),
         manhattan(unit), make_heuristic("pdb", unit), lambda sp: unit_d[sp.initial_state]),
        ("8-puzzle weighted wmd/la2", tile, generate_instances(202, 100, 40),
         manhattan(tile), lookahead(tile, 2), lambda sp: tile_d[sp.initial_state]),
        ("15-puzzle unit md/pdb3", fifteen, generate_instances(303, 20, 14, 4),
         manhattan(fifteen), make_heuristic("pdb:1-2-3/4-5-6/7-8-9/10-11-12/13-14-15", fifteen),
         uniform_cost_optimal),
    )


def record(n, ok, detail):
    line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS[n] = line
    print(line)
    return ok


# -- criteria -------------------------------------------------------------------

def criterion_1():
    t0 = time.perf_counter()
    failures, runs, total = [], 0, 0
    for label, pz, instances, h1, h2, oracle in groups():
        fails = check_optimality(pz, instances, h1, h2, oracle)
        failures += [f"{label}: {f}" for f in fails]
        runs += len(instances) * len(strategy_matrix(hbp_ok=h1.consistent and h2.consistent))
        total += len(instances)
    elapsed = time.perf_counter() - t0
    ok = not failures and elapsed < 120
    return ok, f"optimality: {runs} runs on {total} instances, {len(failures)} mismatches, {elapsed:.1f}s" + (
        f"; first: {failures[0]}" if failures else "")


def criterion_2():
    bad_sets, bad_ident, n = [], [], 0
    for label, pz, instances, h1, h2, _ in groups():
        for i, s in enumerate(instances):
            sets_ok, ident_ok, _, _ = check_lazy_max(pz.with_start(s), h1, h2)
            n += 1
            if not sets_ok:
                bad_sets.append((label, i))
            if not ident_ok:
                bad_ident.append((label, i))
    ok = not bad_sets and not bad_ident
    return ok, (f"lazy = max below C*: {n - len(bad_sets)}/{n} sets equal, "
                f"h2 identity holds on {n - len(bad_ident)}/{n}")


def criterion_3():
    bad_comp, bad_byp, n = [], [], 0
    for label, pz, instances, h1, h2, _ in groups():
        for i, s in enumerate(instances):
            comp_ok, byp_ok = check_degeneracy(pz.with_start(s), h1, h2)
            n += 1
            if not comp_ok:
                bad_comp.append((label, i))
            if not byp_ok:
                bad_byp.append((label, i))
    ok = not bad_comp and not bad_byp
    return ok, (f"degeneracy: forced compute trace-identical {n - len(bad_comp)}/{n}, "
                f"forced bypass = A*(h1) {n - len(bad_byp)}/{n}")


def criterion_4():
    rng = random.Random(4)
    disagree_exact = disagree_float = 0
    for _ in range(10_000):
        td = Fraction(rng.randint(0, 10**6), rng.randint(1, 1000))
        te = Fraction(rng.randint(0, 10**6), rng.randint(1, 1000))
        ph = Fraction(rng.randint(0, 1000), 1000)
        b = rng.randint(1, 12)
        disagree_exact += prefer_compute_by_regret(td, te, ph, b) != prefer_compute_rearranged(td, te, ph, b)
        td, te, ph = rng.uniform(0, 100), rng.uniform(0, 100), rng.random()
        disagree_float += prefer_compute_by_regret(td, te, ph, b) != prefer_compute_rearranged(td, te, ph, b)
    not_compute = 0
    for _ in range(1000):
        cost = CostModel(t1=rng.uniform(0, 100), t2=rng.uniform(0, 1e4), t_o=rng.uniform(0, 10),
                         t_c=rng.uniform(0, 10), tau=rng.uniform(0, 5))
        b = rng.randint(1, 12)
        ph = rng.uniform(1 / b, 1)
        inp = DecisionInput(b, rng.randint(1, 10**6))
        not_compute += sum(rational_decide(inp, cost, ph, r) is not Decision.COMPUTE for r in Rule)
    ok = disagree_exact == disagree_float == not_compute == 0
    return ok, (f"decision algebra: regret forms disagree on {disagree_exact} exact / {disagree_float} float "
                f"of 10000 tuples; ph*b >= 1 not Compute in {not_compute} of 3000 decisions")


def criterion_5():
    examples = [update_ph(PhEstimator(1000, 0.5, 0, 0)), update_ph(PhEstimator(1000, 0.5, 0, 1000)),
                update_ph(PhEstimator(1000, 0.5, 1000, 1000))]
    rng = random.Random(5)
    out_of_range = 0
    for _ in range(10_000):
        est = PhEstimator(k=rng.choice([0, 1, 10, 1000]), p_init=rng.random())
        for _ in range(rng.randint(0, 60)):
            if est.A == 0 or rng.random() < 0.5:
                est.observe_h2()
            else:
                est.observe_expanded()
            out_of_range += not 0.0 <= est.estimate <= 1.0
    ok = examples == [0.5, 0.25, 0.75] and out_of_range == 0
    return ok, f"ph estimator: examples {examples}, {out_of_range} out-of-range estimates over 10000 streams"


def criterion_6():
    unit = puzzle(3, "unit")
    hs = [make_heuristic("dx", unit), make_heuristic("dy", unit), manhattan(unit)]
    pairs = violations = 0
    for s in distances("unit"):
        vals = [h(s) for h in hs]
        for t, c, bidi in unit.successors(s):
            pairs += 1
            for h, v in zip(hs, vals):
                violations += not hbp_bounds(v, c, bidi, h.consistent).contains(h(t))
    dx, dy = hs[0], hs[1]
    d = distances("unit")
    skips = wrong = 0
    configs = [(Variant.MAX, EnhancementOptions(False, True)), (Variant.LAZY, EnhancementOptions(False, True)),
               (Variant.LAZY, EnhancementOptions(True, True))]
    for s in generate_instances(606, 50, 30):
        for v, opts in configs:
            res = solve(unit.with_start(s), dx, dy, EvaluationStrategy(v), opts)
            skips += res.counters.hbp1_skips
            wrong += res.cost != d[s.tiles]
    ok = violations == 0 and skips > 0 and wrong == 0
    return ok, (f"HBP: {violations} bound violations over {pairs} neighbour pairs x 3 heuristics; "
                f"dx/dy hbp1_skips = {skips}, {wrong} non-optimal of 150 runs")


def good1_fraction(pz, h1, h2, instances, opts):
    good = generated = 0
    for s in instances:
        c = solve(pz.with_start(s), h1, h2, EvaluationStrategy(Variant.LAZY), opts).counters
        good += c.good1
        generated += c.generated
    return good / generated


def criterion_7():
    unit = puzzle(3, "unit")
    full = make_heuristic("pdb:1-2-3-4-5-6-7-8", unit)
    md, dx, dy = manhattan(unit), make_heuristic("dx", unit), make_heuristic("dy", unit)
    instances = generate_instances(707, 30, 60)
    parts, ok = [], True
    # the lazy rows of the comparison run with OPEN bypassing on, with and without HBP
    for opts, name in ((EnhancementOptions(True, False), "lazy+ob"), (EnhancementOptions(True, True), "lazy+ob+hbp")):
        pdb_frac = good1_fraction(unit, md, full, instances, opts)
        axis_frac = good1_fraction(unit, dx, dy, instances, opts)
        ok &= pdb_frac < axis_frac
        parts.append(f"{name} {pdb_frac:.3f} < {axis_frac:.3f}")
    return ok, "good1 fraction, full PDB vs dx/dy: " + ", ".join(parts)


def criterion_8():
    tile = puzzle(3, "tile")
    d = distances("tile")
    base = manhattan(tile)
    sample = random.Random(8).sample(sorted(d), 500)
    bound_violations = 0
    for depth in (0, 2, 4, 6):
        cfg = LookaheadConfig(depth, base)
        for s in sample:
            v = lookahead_eval(s, tile, cfg)
            bound_violations += not base(s) <= v <= d[s]
    increases = wrong = 0
    totals = [0, 0, 0, 0]
    for s in generate_instances(808, 20, 40):
        space = tile.with_start(s)
        counts = []
        for k, depth in enumerate((0, 2, 4, 6)):
            res = solve(space, lookahead(space, depth, base), None, EvaluationStrategy(Variant.H1))
            wrong += res.cost != d[s.tiles]
            counts.append(len(expanded_below(res, res.cost)))
            totals[k] += res.counters.expanded
        increases += any(a < b for a, b in zip(counts, counts[1:]))
    ok = bound_violations == 0 and increases == 0 and wrong == 0
    return ok, (f"lookahead: {bound_violations} bound violations on 2000 evaluations; expansions by d=0,2,4,6 "
                f"{totals}, {increases}/20 instances non-monotone below C*")


def criterion_9():
    import sympy

    t1, t2, to = sympy.symbols("t1 t2 t_o", positive=True)
    table = {
        ("max", "ER"): t1 + t2 + 2 * to, ("max", "SR"): t1 + t2 + to, ("max", "SG"): t1 + t2 + to,
        ("lazy", "ER"): t1 + t2 + 4 * to, ("lazy", "SR"): t1 + t2 + 3 * to, ("lazy", "SG"): t1 + to,
    }
    wrong = [k for k, want in table.items()
             if sympy.simplify(predicted_overhead(k[1], k[0], t1=t1, t2=t2, t_o=to) - want) != 0]
    return not wrong, f"overhead model: {6 - len(wrong)}/6 cells match symbolically"


BENCH_CONFIG = """
[domain]
width = 3
weights = tile
[instances]
seed = 10
count = 8
walk = 40
[heuristics]
h1 = wmd
h2 = la:2
[search]
strategies = max, lazy, lazy+ob, rlazy-general, rlazy-logopen+ob, rlazy-ratio
cost_model = fixed:t1=1,t2=8.36,to=0.1,tc=0.1,tau=0.05
"""


def criterion_10(tmp_dir):
    texts = []
    for i in range(2):
        out = tmp_dir / f"run{i}.csv"
        run_experiment(ExperimentConfig.from_text(BENCH_CONFIG + f"[output]\npath = {out}\n"))
        rows = list(csv.DictReader(io.StringIO(out.read_text())))
        for r in rows:
            del r["wall_ms"]
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        texts.append(buf.getvalue().encode())
    ok = texts[0] == texts[1]
    return ok, f"determinism: two bench runs {'byte-identical' if ok else 'differ'} minus wall_ms ({len(texts[0])} bytes)"


# -- pytest entry points ---------------------------------------------------------

@pytest.mark.parametrize("n", range(1, 10))
def test_criterion(n):
    ok, detail = globals()[f"criterion_{n}"]()
    assert record(n, ok, detail), detail


def test_criterion_10(tmp_path):
    ok, detail = criterion_10(tmp_path)
    assert record(10, ok, detail), detail


if __name__ == "__main__":
    import tempfile
    from pathlib import Path

    results = []
    for n in range(1, 11):
        if n == 10:
            with tempfile.TemporaryDirectory() as d:
                ok, detail = criterion_10(Path(d))
        else:
            ok, detail = globals()[f"criterion_{n}"]()
        results.append(record(n, ok, detail))
    sys.exit(0 if all(results) else 1)
