"""Config-driven experiment runner: one CSV row per (instance, strategy).

Config files are INI-style (``[section]`` headers, ``key = value`` lines)::

    [domain]
    width = 3
    weights = tile            ; unit | tile

    [instances]
    seed = 1                  ; generated instances ...
    count = 20
    walk = 30
    ; file = korf100.txt      ; ... or read from a file

    [heuristics]
    h1 = wmd                  ; md wmd dx dy zero la:D pdb pdb:1-2-3-4/5-6-7-8 pdbfile:a.pdb,b.pdb
    h2 = la:4
    h1_delay = 0              ; synthetic seconds charged per call (measured mode)
    h2_delay = 0

    [search]
    strategies = max, lazy, lazy+ob, rlazy-general
    rule = general            ; default rule for bare "rlazy"
    cost_model = fixed:t1=1,t2=10,to=0.1,tc=0,tau=0
    ph_k = 1000
    ph_init = 0.5
    ph_adaptive = true
    tie = h=asc,g=desc,order=fifo
    max_expansions =
    max_generated =

    [output]
    path = results.csv
    baseline = max
    jobs = 1
"""

from __future__ import annotations

import configparser
import csv
import io
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from functools import lru_cache
from pathlib import Path
from typing import Optional, Sequence

from .domains import TILE_NUMBER, UNIT, TilePuzzle, TileState, generate_instances, parse_instances
from .heuristics import Heuristic, axis_heuristic, lookahead, manhattan, timed_wrapper, zero_heuristic
from .pdb import build_group, parse_partition, pdb_build, pdb_heuristic, read_pdb
from .search import NoSolution, ResourceLimit, TieBreakRule, solve
from .strategies import CostModel, EnhancementOptions, EvaluationStrategy, PhEstimator, Rule, Variant

CSV_COLUMNS = [
    "instance", "strategy", "rule", "status", "cost", "generated", "expanded",
    "h1_evals", "h2_evals", "good1", "good2", "bad", "ob_hits", "hbp1", "hbp2",
    "er", "sr", "sg", "model_time", "wall_ms",
]
# good-node and h2 counters first, then the bypass counters
MARKDOWN_COLUMNS = [
    "instance", "strategy", "rule", "status", "cost", "generated", "good1", "good2",
    "h2_evals", "hbp1", "hbp2", "ob_hits", "bad", "expanded", "h1_evals", "er", "sr", "sg",
    "model_time", "wall_ms",
]
SUM_COLUMNS = ["cost", "generated", "expanded", "h1_evals", "h2_evals", "good1", "good2",
               "bad", "ob_hits", "hbp1", "hbp2", "er", "sr", "sg"]


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class StrategySpec:
    variant: Variant
    rule: Optional[Rule] = None
    open_bypass: bool = False
    heuristic_bypass: bool = False

    @property
    def name(self) -> str:
        base = self.variant.value
        if self.variant is Variant.RATIONAL and self.rule is not None:
            base += f"-{self.rule.value}"
        if self.open_bypass:
            base += "+ob"
        if self.heuristic_bypass:
            base += "+hbp"
        return base

    @classmethod
    def parse(cls, text: str, default_rule: Rule = Rule.GENERAL) -> "StrategySpec":
        parts = text.strip().lower().split("+")
        head, flags = parts[0], set(parts[1:])
        unknown = flags - {"ob", "hbp"}
        if unknown:
            raise ConfigError(f"unknown strategy flag(s) {sorted(unknown)} in {text!r}")
        name, _, rule = head.partition("-")
        aliases = {"a*": "h1", "astar": "h1", "lazyastar": "lazy", "rational": "rlazy", "a*max": "max"}
        name = aliases.get(name, name)
        try:
            variant = Variant(name)
        except ValueError:
            raise ConfigError(f"unknown strategy {text!r}") from None
        r = None
        if variant is Variant.RATIONAL:
            try:
                r = Rule(rule) if rule else Rule(default_rule)
            except ValueError:
                raise ConfigError(f"unknown rule in {text!r}") from None
        elif rule:
            raise ConfigError(f"only rlazy takes a rule: {text!r}")
        return cls(variant, r, "ob" in flags, "hbp" in flags)


@dataclass
class ExperimentConfig:
    width: int = 3
    height: Optional[int] = None
    weights: str = UNIT
    instance_file: Optional[str] = None
    seed: int = 1
    count: int = 10
    walk: int = 30
    h1: str = "md"
    h2: str = "pdb"
    h1_delay: float = 0.0
    h2_delay: float = 0.0
    strategies: list = field(default_factory=lambda: ["max", "lazy"])
    rule: str = "general"
    cost_model: str = "fixed:t1=1,t2=10,to=0.1,tc=0,tau=0"
    ph_k: float = 1000
    ph_init: float = 0.5
    ph_adaptive: bool = True
    tie: str = "h=asc,g=desc,order=fifo"
    max_expansions: Optional[int] = None
    max_generated: Optional[int] = None
    out: Optional[str] = None
    baseline: Optional[str] = None
    jobs: int = 1

    # -- parsing -------------------------------------------------------------

    @classmethod
    def from_text(cls, text: str) -> "ExperimentConfig":
        parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
        try:
            parser.read_string(text)
        except configparser.Error as exc:
            raise ConfigError(str(exc)) from None
        cfg = cls()
        known = {
            "domain": {"width", "height", "weights"},
            "instances": {"file", "seed", "count", "walk"},
            "heuristics": {"h1", "h2", "h1_delay", "h2_delay", "lookahead"},
            "search": {"strategies", "rule", "cost_model", "ph_k", "ph_init", "ph_adaptive",
                       "tie", "max_expansions", "max_generated"},
            "output": {"path", "baseline", "jobs"},
        }
        for section in parser.sections():
            if section not in known:
                raise ConfigError(f"unknown section [{section}]")
            for key, value in parser[section].items():
                if key not in known[section]:
                    raise ConfigError(f"unknown key {key!r} in [{section}]")
                value = value.strip()
                try:
                    cfg._set(section, key, value)
                except ValueError as exc:
                    raise ConfigError(f"[{section}] {key}: {exc}") from None
        return cfg

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
        cfg = cls.from_text(text)
        if cfg.instance_file and not Path(cfg.instance_file).is_absolute():
            cfg.instance_file = str(Path(path).parent / cfg.instance_file)
        return cfg

    def _set(self, section: str, key: str, value: str) -> None:
        def opt_int(v):
            return int(v) if v else None

        if section == "domain":
            if key == "weights":
                self.weights = value
            else:
                setattr(self, key, opt_int(value))
        elif section == "instances":
            if key == "file":
                self.instance_file = value or None
            else:
                setattr(self, key, int(value))
        elif section == "heuristics":
            if key == "lookahead":
                if value:
                    self.h2 = f"la:{int(value)}"
            elif key.endswith("_delay"):
                setattr(self, key, float(value))
            else:
                setattr(self, key, value)
        elif section == "search":
            if key == "strategies":
                self.strategies = [s.strip() for s in value.split(",") if s.strip()]
            elif key in ("ph_k", "ph_init"):
                setattr(self, key, float(value))
            elif key == "ph_adaptive":
                self.ph_adaptive = value.lower() in ("1", "true", "yes", "on")
            elif key in ("max_expansions", "max_generated"):
                setattr(self, key, opt_int(value))
            else:
                setattr(self, key, value)
        elif section == "output":
            if key == "path":
                self.out = value or None
            elif key == "jobs":
                self.jobs = int(value)
            else:
                self.baseline = value or None

    # -- resolved pieces -------------------------------------------------------

    def strategy_specs(self) -> list[StrategySpec]:
        try:
            default_rule = Rule(self.rule)
        except ValueError:
            raise ConfigError(f"unknown rule {self.rule!r}") from None
        return [StrategySpec.parse(s, default_rule) for s in self.strategies]

    def cost(self) -> CostModel:
        try:
            return CostModel.parse(self.cost_model)
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"cost model: {exc}") from None

    def tie_rule(self) -> TieBreakRule:
        return parse_tie(self.tie)

    def puzzle(self) -> TilePuzzle:
        return TilePuzzle(self.width, self.height, self.weights)

    def instances(self) -> list[TileState]:
        h = self.height or self.width
        if self.instance_file:
            try:
                text = Path(self.instance_file).read_text()
            except OSError as exc:
                raise ConfigError(f"cannot read instances: {exc}") from None
            return parse_instances(text, self.width, h)
        return generate_instances(self.seed, self.count, self.walk, self.width, h)

    def validate(self) -> tuple[list[StrategySpec], list[TileState]]:
        """Resolve every reference before any search runs."""
        if self.weights not in (UNIT, TILE_NUMBER):
            raise ConfigError(f"unknown weights {self.weights!r}")
        if self.width < 2 or (self.height is not None and self.height < 2):
            raise ConfigError("board must be at least 2x2")
        specs = self.strategy_specs()
        if not specs:
            raise ConfigError("no strategies configured")
        names = [s.name for s in specs]
        if len(set(names)) != len(names):
            raise ConfigError(f"duplicate strategies: {names}")
        if self.baseline is not None and StrategySpec.parse(self.baseline, Rule(self.rule)).name not in names:
            raise ConfigError(f"baseline {self.baseline!r} is not among the strategies")
        self.cost()
        self.tie_rule()
        for spec in (self.h1, self.h2):
            check_heuristic_spec(spec)
        if self.h1_delay < 0 or self.h2_delay < 0:
            raise ConfigError("delays must be >= 0")
        if not 0 <= self.ph_init <= 1 or self.ph_k < 0:
            raise ConfigError("ph_init must be in [0, 1] and ph_k >= 0")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")
        try:
            instances = self.instances()
        except ValueError as exc:
            raise ConfigError(f"instances: {exc}") from None
        if not instances:
            raise ConfigError("instance list is empty")
        return specs, instances


def parse_tie(text: str) -> TieBreakRule:
    values = {"h": "asc", "g": "desc", "order": "fifo"}
    for item in filter(None, (s.strip() for s in text.split(","))):
        key, _, val = item.partition("=")
        key, val = key.strip(), val.strip().lower()
        if key not in values:
            raise ConfigError(f"bad tie-break entry {item!r}")
        values[key] = val
    if values["h"] not in ("asc", "desc", "none") or values["g"] not in ("asc", "desc", "none") \
            or values["order"] not in ("fifo", "lifo"):
        raise ConfigError(f"bad tie-break rule {text!r}")
    return TieBreakRule(None if values["h"] == "none" else values["h"],
                        None if values["g"] == "none" else values["g"], values["order"])


# ---------------------------------------------------------------------------
# Heuristic specs


def check_heuristic_spec(spec: str) -> None:
    kind, _, arg = spec.partition(":")
    if kind in ("md", "wmd", "dx", "dy", "zero") and not arg:
        return
    if kind == "la":
        try:
            if int(arg) >= 0:
                return
        except ValueError:
            pass
    if kind == "pdb":
        if not arg:
            return
        try:
            parse_partition(arg)
            return
        except ValueError:
            pass
    if kind == "pdbfile" and arg:
        missing = [p for p in arg.split(",") if not Path(p).exists()]
        if missing:
            raise ConfigError(f"PDB file(s) not found: {missing}")
        return
    raise ConfigError(f"bad heuristic spec {spec!r}")


@lru_cache(maxsize=16)
def _pdb_group(width: int, height: int, weights: str, partition: Optional[str]):
    puzzle = TilePuzzle(width, height, weights)
    return build_group(puzzle, parse_partition(partition) if partition else None)


def make_heuristic(spec: str, puzzle: TilePuzzle, delay: float = 0.0) -> Heuristic:
    kind, _, arg = spec.partition(":")
    if kind == "md":
        h = manhattan(puzzle, weighted=False)
    elif kind == "wmd":
        h = manhattan(puzzle, weighted=True)
    elif kind in ("dx", "dy"):
        h = axis_heuristic(puzzle, kind[1])
    elif kind == "zero":
        h = zero_heuristic()
    elif kind == "la":
        h = lookahead(puzzle, int(arg))
    elif kind == "pdb":
        h = pdb_heuristic(_pdb_group(puzzle.width, puzzle.height, puzzle.weights, arg or None), spec)
    elif kind == "pdbfile":
        h = pdb_heuristic([read_pdb(p) for p in arg.split(",")], spec)
    else:
        raise ConfigError(f"bad heuristic spec {spec!r}")
    return timed_wrapper(h, delay) if delay else h


# ---------------------------------------------------------------------------
# Running


def model_time(counters, cost: CostModel) -> float:
    """Abstract run time from counters and fixed cost constants."""
    return (cost.t1 * counters.h1_evals + cost.t2 * counters.h2_evals
            + cost.t_o * (counters.open_pushes + counters.open_pops) + cost.t_c * counters.expanded)


def build_strategy(spec: StrategySpec, cfg: ExperimentConfig) -> tuple[EvaluationStrategy, EnhancementOptions]:
    strategy = EvaluationStrategy(
        spec.variant, spec.rule or Rule(cfg.rule), cfg.cost(),
        PhEstimator(cfg.ph_k, cfg.ph_init, adaptive=cfg.ph_adaptive),
    )
    return strategy, EnhancementOptions(spec.open_bypass, spec.heuristic_bypass)


def run_one(cfg: ExperimentConfig, index: int, state: TileState, spec: StrategySpec,
            h1: Heuristic, h2: Heuristic) -> dict:
    puzzle = cfg.puzzle().with_start(state)
    strategy, options = build_strategy(spec, cfg)
    row = {k: "" for k in CSV_COLUMNS}
    row.update(instance=index, strategy=spec.name,
               rule=spec.rule.value if spec.rule else "", status="OK")
    t0 = time.perf_counter()
    try:
        result = solve(puzzle, h1, h2, strategy, options, cfg.tie_rule(),
                       cfg.max_expansions, cfg.max_generated)
        counters, cost = result.counters, result.cost
    except NoSolution as exc:
        row["status"], counters, cost = "NO_SOLUTION", exc.counters, ""
    except ResourceLimit as exc:
        row["status"], counters, cost = "RESOURCE_LIMIT", exc.counters, ""
    wall = (time.perf_counter() - t0) * 1000
    row.update(
        cost=cost, generated=counters.generated, expanded=counters.expanded,
        h1_evals=counters.h1_evals, h2_evals=counters.h2_evals, good1=counters.good1,
        good2=counters.good2, bad=counters.bad, ob_hits=counters.ob_hits,
        hbp1=counters.hbp1_skips, hbp2=counters.hbp2_delays, er=counters.er, sr=counters.sr,
        sg=counters.sg, model_time=f"{model_time(counters, strategy.cost_model):.6g}",
        wall_ms=f"{wall:.3f}",
    )
    return row


def _run_instance(args) -> list[dict]:
    cfg, index, state, specs = args
    puzzle = cfg.puzzle()
    h1 = make_heuristic(cfg.h1, puzzle, cfg.h1_delay)
    h2 = make_heuristic(cfg.h2, puzzle, cfg.h2_delay)
    rows = []
    for spec in specs:
        try:
            rows.append(run_one(cfg, index, state, spec, h1, h2))
        except Exception as exc:  # recorded, the sweep continues
            row = {k: "" for k in CSV_COLUMNS}
            row.update(instance=index, strategy=spec.name, status=f"ERROR:{type(exc).__name__}")
            rows.append(row)
    return rows


def rows_to_csv(rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for r in rows:
        writer.writerow(r)
    return buf.getvalue()


def _geomean(xs):
    xs = [x for x in xs if x > 0]
    if not xs:
        return float("nan")
    return math.exp(sum(math.log(x) for x in xs) / len(xs))


def summarize(rows: Sequence[dict], baseline: Optional[str]) -> list[dict]:
    """Per-strategy sums, per-instance means and geometric-mean times
    relative to ``baseline`` (first strategy when ``None``)."""
    order = list(dict.fromkeys(r["strategy"] for r in rows))
    if baseline is None:
        baseline = order[0]
    base = {r["instance"]: r for r in rows if r["strategy"] == baseline and r["status"] == "OK"}
    out = []
    for name in order:
        mine = [r for r in rows if r["strategy"] == name]
        ok = [r for r in mine if r["status"] == "OK"]
        agg = {"strategy": name, "instances": len(mine), "solved": len(ok)}
        for col in SUM_COLUMNS:
            total = sum(int(r[col]) for r in ok if r[col] != "")
            agg[f"sum_{col}"] = total
            agg[f"mean_{col}"] = round(total / len(ok), 3) if ok else ""
        pairs = [(r, base[r["instance"]]) for r in ok if r["instance"] in base]
        if name == baseline:
            agg["rel_model_time"] = 1.0
            agg["rel_wall_time"] = 1.0
        else:
            agg["rel_model_time"] = round(_geomean(
                [float(r["model_time"]) / float(b["model_time"]) for r, b in pairs
                 if float(b["model_time"]) > 0]), 6)
            agg["rel_wall_time"] = round(_geomean(
                [float(r["wall_ms"]) / float(b["wall_ms"]) for r, b in pairs
                 if float(b["wall_ms"]) > 0]), 6)
        agg["good1_fraction"] = round(agg["sum_good1"] / agg["sum_generated"], 6) if agg["sum_generated"] else 0.0
        out.append(agg)
    return out


@dataclass
class ExperimentOutput:
    rows: list
    summary: list
    csv_text: str

    @property
    def failed(self) -> bool:
        return any(r["status"] != "OK" for r in self.rows)


def run_experiment(cfg: ExperimentConfig) -> ExperimentOutput:
    specs, instances = cfg.validate()
    jobs = [(cfg, i, state, specs) for i, state in enumerate(instances)]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(cfg.jobs) as pool:
            chunks = list(pool.map(_run_instance, jobs))
    else:
        chunks = [_run_instance(j) for j in jobs]
    rows = [r for chunk in chunks for r in chunk]
    baseline = None
    if cfg.baseline:
        baseline = StrategySpec.parse(cfg.baseline, Rule(cfg.rule)).name
    summary = summarize(rows, baseline)
    text = rows_to_csv(rows)
    if cfg.out:
        out = Path(cfg.out)
        out.write_text(text)
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(summary[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows(summary)
        out.with_name(out.stem + ".summary.csv").write_text(buf.getvalue())
    return ExperimentOutput(rows, summary, text)


# ---------------------------------------------------------------------------
# Markdown


def emit_markdown(csv_text: str, columns: Sequence[str] = MARKDOWN_COLUMNS) -> str:
    rows = list(csv.DictReader(io.StringIO(csv_text)))
    if rows:
        columns = [c for c in columns if c in rows[0]]
    widths = {c: max([len(c)] + [len(r[c]) for r in rows]) for c in columns}
    numeric = {c: all(_is_number(r[c]) for r in rows if r[c] != "") for c in columns}

    def cell(c, v):
        return v.rjust(widths[c]) if numeric[c] else v.ljust(widths[c])

    lines = ["| " + " | ".join(c.ljust(widths[c]) for c in columns) + " |",
             "|" + "|".join(("-" * (widths[c] + 1) + ":") if numeric[c] else "-" * (widths[c] + 2)
                            for c in columns) + "|"]
    for r in rows:
        lines.append("| " + " | ".join(cell(c, r[c]) for c in columns) + " |")
    return "\n".join(lines) + "\n"


def parse_markdown(text: str) -> list[dict]:
    lines = [l.strip() for l in text.strip().splitlines() if l.strip()]
    header = [c.strip() for c in lines[0].strip("|").split("|")]
    out = []
    for line in lines[2:]:
        out.append(dict(zip(header, (c.strip() for c in line.strip("|").split("|")))))
    return out


def _is_number(s: str) -> bool:
    try:
        float(s)
        return True
    except ValueError:
        return False
