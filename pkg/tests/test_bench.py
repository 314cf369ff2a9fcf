import csv
import io
from pathlib import Path

import pytest

from lazyastar.bench import (
    CSV_COLUMNS,
    ConfigError,
    ExperimentConfig,
    StrategySpec,
    emit_markdown,
    make_heuristic,
    parse_markdown,
    run_experiment,
)
from lazyastar.strategies import Rule, Variant

CONFIGS = Path(__file__).resolve().parent.parent / "configs"

LAZY_MAX = """
[domain]
width = 3
weights = tile
[instances]
seed = 5
count = 20
walk = 30
[heuristics]
h1 = wmd
h2 = pdb
[search]
strategies = lazy, max
"""


def rows_by(out):
    return {(int(r["instance"]), r["strategy"]): r for r in out.rows}


def test_lazy_max_rows_consistent():
    out = run_experiment(ExperimentConfig.from_text(LAZY_MAX))
    assert not out.failed
    rows = rows_by(out)
    for i in range(20):
        lazy, mx = rows[i, "lazy"], rows[i, "max"]
        assert lazy["cost"] == mx["cost"]
        assert lazy["h2_evals"] == mx["h2_evals"] - lazy["sg"]
        assert int(lazy["good1"]) == int(lazy["sg"])


def test_summary_and_files(tmp_path):
    out_path = tmp_path / "r.csv"
    cfg = ExperimentConfig.from_text(LAZY_MAX + f"[output]\npath = {out_path}\nbaseline = max\n")
    out = run_experiment(cfg)
    text = out_path.read_text()
    assert text == out.csv_text
    assert next(csv.reader(io.StringIO(text))) == CSV_COLUMNS
    summary = {s["strategy"]: s for s in out.summary}
    assert summary["max"]["rel_model_time"] == 1.0
    assert summary["lazy"]["rel_model_time"] < 1.0  # t2 = 10 t1 and lazy saves h2 calls
    assert summary["lazy"]["sum_h2_evals"] == summary["max"]["sum_h2_evals"] - summary["lazy"]["sum_sg"]
    assert (tmp_path / "r.summary.csv").exists()


def test_empty_instance_list_rejected(tmp_path):
    inst = tmp_path / "none.txt"
    inst.write_text("# nothing here\n")
    out_path = tmp_path / "out.csv"
    text = LAZY_MAX.replace("seed = 5", f"file = {inst}") + f"[output]\npath = {out_path}\n"
    with pytest.raises(ConfigError, match="empty"):
        run_experiment(ExperimentConfig.from_text(text))
    assert not out_path.exists()


@pytest.mark.parametrize("bad", [
    "[bogus]\nx = 1\n",
    "[search]\nunknown_key = 1\n",
    "[search]\nstrategies = lazy, warp\n",
    "[search]\nstrategies = max+xyz\n",
    "[search]\nstrategies = lazy, lazy\n",
    "[search]\ncost_model = fixed:t9=1\n",
    "[search]\ntie = h=sideways\n",
    "[heuristics]\nh2 = magic\n",
    "[domain]\nweights = heavy\n",
    "[output]\njobs = 0\n",
    "[output]\nbaseline = h2\n",
    "[instances]\ncount = many\n",
    "no section header\n",
])
def test_config_errors(bad):
    with pytest.raises(ConfigError):
        ExperimentConfig.from_text(bad).validate()


def test_strategy_spec_parse():
    s = StrategySpec.parse("rlazy-ratio+ob+hbp")
    assert (s.variant, s.rule, s.open_bypass, s.heuristic_bypass) == (Variant.RATIONAL, Rule.RATIO, True, True)
    assert s.name == "rlazy-ratio+ob+hbp"
    assert StrategySpec.parse("rlazy", Rule.LOG_OPEN).rule is Rule.LOG_OPEN
    with pytest.raises(ConfigError):
        StrategySpec.parse("lazy-ratio")


def test_example_configs_validate():
    for path in CONFIGS.glob("*.ini"):
        specs, instances = ExperimentConfig.from_file(path).validate()
        assert specs and instances


def test_instance_file_relative_to_config(tmp_path):
    (tmp_path / "inst.txt").write_text("1 0 2 3 4 5 6 7 8\n")
    (tmp_path / "c.ini").write_text("[instances]\nfile = inst.txt\n[heuristics]\nh2 = md\n")
    out = run_experiment(ExperimentConfig.from_file(tmp_path / "c.ini"))
    assert [r["cost"] for r in out.rows] == [1, 1]


def test_resource_limit_row():
    cfg = ExperimentConfig.from_text(LAZY_MAX + "max_expansions = 3\n")
    out = run_experiment(cfg)
    assert out.failed
    assert {r["status"] for r in out.rows} <= {"OK", "RESOURCE_LIMIT"}
    assert "RESOURCE_LIMIT" in {r["status"] for r in out.rows}


def test_parallel_matches_serial():
    serial = run_experiment(ExperimentConfig.from_text(LAZY_MAX))
    cfg = ExperimentConfig.from_text(LAZY_MAX)
    cfg.jobs = 2
    parallel = run_experiment(cfg)
    strip = lambda rows: [{k: v for k, v in r.items() if k != "wall_ms"} for r in rows]
    assert strip(serial.rows) == strip(parallel.rows)


def test_markdown_single_row():
    text = ",".join(CSV_COLUMNS) + "\n" + ",".join(str(i) for i in range(len(CSV_COLUMNS))) + "\n"
    md = emit_markdown(text)
    assert len(md.strip().splitlines()) == 3
    [row] = parse_markdown(md)
    assert row["generated"] == str(CSV_COLUMNS.index("generated"))


def test_markdown_roundtrip():
    out = run_experiment(ExperimentConfig.from_text(LAZY_MAX))
    rows = parse_markdown(emit_markdown(out.csv_text))
    assert len(rows) == len(out.rows)
    for got, want in zip(rows, csv.DictReader(io.StringIO(out.csv_text))):
        assert all(got[k] == want[k] for k in got)


def test_heuristic_specs(unit8, tmp_path):
    from lazyastar.pdb import pdb_build, write_pdb

    paths = []
    for i, pattern in enumerate([(1, 2, 3, 4), (5, 6, 7, 8)]):
        paths.append(tmp_path / f"g{i}.pdb")
        write_pdb(pdb_build(pattern, unit8), paths[-1])
    from_file = make_heuristic("pdbfile:" + ",".join(map(str, paths)), unit8)
    built = make_heuristic("pdb", unit8)
    for s in [(8, 7, 6, 5, 4, 3, 2, 1, 0), (1, 0, 2, 3, 4, 5, 6, 7, 8)]:
        assert from_file(s) == built(s)
    assert make_heuristic("zero", unit8)(unit8.goal) == 0
    assert make_heuristic("la:3", unit8).label == "la3"
    assert make_heuristic("md", unit8, delay=0.5).synthetic_delay == 0.5
    with pytest.raises(ConfigError):
        make_heuristic("nope", unit8)
