"""Command-line entry point: ``lazyastar {solve,bench,pdb-build,verify}``.

Exit codes: 0 all OK, 1 an instance or check failed, 2 configuration error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .bench import (
    ConfigError,
    ExperimentConfig,
    StrategySpec,
    build_strategy,
    check_heuristic_spec,
    emit_markdown,
    make_heuristic,
    model_time,
)
from .domains import ParseError, TilePuzzle, TileState, parse_instances, random_instance
from .pdb import PdbTooLarge, parse_partition, pdb_build, write_pdb
from .search import NoSolution, ResourceLimit, solve
from .strategies import Rule

OK, FAILED, CONFIG_ERROR = 0, 1, 2


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="INI experiment config")
    p.add_argument("--strategy", help="e.g. max, lazy+ob, rlazy-ratio+ob+hbp")
    p.add_argument("--rule", choices=[r.value for r in Rule])
    p.add_argument("--lookahead", type=int, help="use the bounded-lookahead h2 with this bound")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="output path")
    p.add_argument("--cost-model", help="fixed:t1=..,t2=..,to=..,tc=..,tau=..")
    p.add_argument("--width", type=int, help="board width (square unless --height)")
    p.add_argument("--height", type=int)
    p.add_argument("--weights", choices=["unit", "tile"])
    p.add_argument("--h1", help="h1 spec (md, wmd, dx, dy, la:D, pdb[:partition], pdbfile:paths)")
    p.add_argument("--h2", help="h2 spec")


def _config(args) -> ExperimentConfig:
    cfg = ExperimentConfig.from_file(args.config) if args.config else ExperimentConfig()
    if args.strategy:
        cfg.strategies = [s.strip() for s in args.strategy.split(",")]
    if args.rule:
        cfg.rule = args.rule
    if args.h1:
        cfg.h1 = args.h1
    if args.h2:
        cfg.h2 = args.h2
    if args.lookahead is not None:
        cfg.h2 = f"la:{args.lookahead}"
    if args.seed is not None:
        cfg.seed = args.seed
    if args.out:
        cfg.out = args.out
    if args.cost_model:
        cfg.cost_model = args.cost_model
    if args.width:
        cfg.width = args.width
    if args.height:
        cfg.height = args.height
    if args.weights:
        cfg.weights = args.weights
    return cfg


def cmd_solve(args) -> int:
    cfg = _config(args)
    if len(cfg.strategies) != 1:
        cfg.strategies = cfg.strategies[-1:]
    specs = cfg.strategy_specs()
    cfg.cost()
    height = cfg.height or cfg.width
    if args.instance:
        try:
            [state] = parse_instances(args.instance, cfg.width, height)
        except ValueError as exc:
            raise ConfigError(f"instance: {exc}") from None
    else:
        state = random_instance(cfg.seed, args.walk, cfg.width, height)
    puzzle = TilePuzzle(cfg.width, height, cfg.weights, state)
    for spec in (cfg.h1, cfg.h2):
        check_heuristic_spec(spec)
    h1 = make_heuristic(cfg.h1, puzzle, cfg.h1_delay)
    h2 = make_heuristic(cfg.h2, puzzle, cfg.h2_delay)
    strategy, options = build_strategy(specs[0], cfg)
    print(f"instance: {state.format()}")
    print(f"strategy: {specs[0].name}  h1={cfg.h1}  h2={cfg.h2}  weights={cfg.weights}")
    try:
        result = solve(puzzle, h1, h2, strategy, options, cfg.tie_rule(),
                       args.max_expansions, cfg.max_generated)
    except (NoSolution, ResourceLimit) as exc:
        print(f"status: {type(exc).__name__}: {exc}")
        if exc.counters is not None:
            for k, v in exc.counters.as_dict().items():
                print(f"{k}: {v}")
        return FAILED
    print("status: OK")
    print(f"cost: {result.cost}")
    print(f"length: {len(result.path) - 1}")
    c = result.counters
    for k, v in c.as_dict().items():
        print(f"{k}: {v}")
    print(f"model_time: {model_time(c, strategy.cost_model):.6g}")
    if args.show_path:
        for s in result.path:
            print(TileState(cfg.width, height, s).pretty())
            print()
    return OK


def cmd_bench(args) -> int:
    from .bench import run_experiment

    cfg = _config(args)
    if args.count is not None:
        cfg.count = args.count
    if args.walk is not None:
        cfg.walk = args.walk
    if args.jobs is not None:
        cfg.jobs = args.jobs
    out = run_experiment(cfg)
    if args.markdown:
        print(emit_markdown(out.csv_text), end="")
    else:
        print(out.csv_text, end="")
    print()
    cols = ["strategy", "solved", "sum_generated", "sum_h2_evals", "sum_good1", "sum_good2",
            "good1_fraction", "rel_model_time", "rel_wall_time"]
    print("# summary")
    print(",".join(cols))
    for agg in out.summary:
        print(",".join(str(agg[c]) for c in cols))
    return FAILED if out.failed else OK


def cmd_pdb_build(args) -> int:
    width = args.width or 3
    puzzle = TilePuzzle(width, args.height, args.weights or "unit")
    try:
        patterns = parse_partition(args.pattern)
    except ValueError as exc:
        raise ConfigError(f"pattern: {exc}") from None
    if not args.out:
        raise ConfigError("--out is required")
    out = Path(args.out)
    for i, pattern in enumerate(patterns):
        try:
            pdb = pdb_build(pattern, puzzle, memory_cap=args.memory_cap)
        except (ValueError, PdbTooLarge) as exc:
            raise ConfigError(str(exc)) from None
        path = out if len(patterns) == 1 else out.with_name(f"{out.stem}.{i}{out.suffix}")
        write_pdb(pdb, path)
        print(f"wrote {path}: pattern {'-'.join(map(str, pattern))}, {pdb.table.size} entries, "
              f"{pdb.entry_width} byte(s) each")
    return OK


def cmd_verify(args) -> int:
    from .verify import run_suite

    cfg = _config(args)
    puzzle = cfg.puzzle()
    h1 = make_heuristic(cfg.h1, puzzle)
    h2 = make_heuristic(cfg.h2, puzzle)
    results = run_suite(puzzle, h1, h2, count=args.count, seed=cfg.seed, walk=args.walk)
    for r in results:
        print(r.line())
    return OK if all(r.passed for r in results) else FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lazyastar", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve one instance and print counters")
    _add_common(p)
    p.add_argument("--instance", help="tile list, blank = 0")
    p.add_argument("--walk", type=int, default=30, help="random-walk length when no --instance")
    p.add_argument("--max-expansions", type=int)
    p.add_argument("--show-path", action="store_true")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("bench", help="config-driven sweep, CSV output")
    _add_common(p)
    p.add_argument("--count", type=int)
    p.add_argument("--walk", type=int)
    p.add_argument("--jobs", type=int)
    p.add_argument("--markdown", action="store_true", help="print a markdown table instead of CSV")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("pdb-build", help="build pattern database file(s)")
    p.add_argument("--pattern", required=True, help="e.g. 1-2-3-4 or 1-2-3-4/5-6-7-8")
    p.add_argument("--width", type=int)
    p.add_argument("--height", type=int)
    p.add_argument("--weights", choices=["unit", "tile"])
    p.add_argument("--memory-cap", type=int, default=512 * 2**20)
    p.add_argument("--out")
    p.set_defaults(func=cmd_pdb_build)

    p = sub.add_parser("verify", help="oracle and equivalence checks")
    _add_common(p)
    p.add_argument("--count", type=int, default=20)
    p.add_argument("--walk", type=int, default=30)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return CONFIG_ERROR


if __name__ == "__main__":
    sys.exit(main())
