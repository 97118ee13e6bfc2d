import csv
import io
import json

import pytest

from sramf import verify as V
from sramf.cli import BENCH_COLUMNS, bench_csv, main
from sramf.fixtures import nonsubmodular_example
from sramf.model import dump_instance, load_instance
from sramf.sharegraph import build_graph


@pytest.fixture
def fixture_file(tmp_path):
    inst, g = nonsubmodular_example()
    path = tmp_path / "fig.json"
    dump_instance(inst, path, g.edges)
    return str(path)


def _gen(tmp_path, name="inst.json", seed=7, **kw):
    path = tmp_path / name
    args = {"--na": 4, "--nb": 2, "--k": 2, "--scenarios": 2, "--demand": 6, "--seed": seed}
    args.update(kw)
    argv = ["gen"] + [str(x) for kv in args.items() for x in kv] + ["-o", str(path)]
    assert main(argv) == 0
    return str(path)


def test_gen_writes_file(tmp_path):
    path = _gen(tmp_path)
    inst, _ = load_instance(path)
    assert len(inst.augmented) == 4 and inst.N == 2


def test_gen_default_seed_is_noted(tmp_path, capsys, monkeypatch):
    monkeypatch.delenv("SRAMF_SEED", raising=False)
    assert main(["gen", "-o", str(tmp_path / "a.json")]) == 0
    assert "seed" in capsys.readouterr().err


def test_env_seed_overrides_default(tmp_path, monkeypatch):
    monkeypatch.setenv("SRAMF_SEED", "5")
    main(["gen", "-o", str(tmp_path / "a.json")])
    main(["gen", "--seed", "5", "-o", str(tmp_path / "b.json")])
    assert (tmp_path / "a.json").read_text() == (tmp_path / "b.json").read_text()


def test_gen_budget_above_augmented_is_config_error(tmp_path):
    assert main(["gen", "--k", "9", "--na", "6", "--seed", "1", "-o", str(tmp_path / "x.json")]) == 2


def test_solve_exact_on_fixture(fixture_file, capsys):
    assert main(["solve", fixture_file, "--alg", "exact", "--k", "3"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["integral_value"] == 3.0 and out["selection"] == ["s1", "s2", "s3"]


def test_solve_is_deterministic(tmp_path):
    path = _gen(tmp_path)
    outs = []
    for name in ("a", "b"):
        target = tmp_path / f"{name}.json"
        assert main(["solve", path, "--alg", "lslpr", "--seed", "3", "-o", str(target)]) == 0
        d = json.loads(target.read_text())
        d.pop("runtime_ms")
        outs.append(d)
    assert outs[0] == outs[1]


def test_partition_without_budgets_is_config_error(tmp_path):
    assert main(["solve", _gen(tmp_path), "--alg", "mmo-partition"]) == 2


def test_exact_over_cap_is_size_error(tmp_path):
    assert main(["solve", _gen(tmp_path), "--alg", "exact", "--exact-cap", "1"]) == 3


def test_greedy_fixed_with_explicit_selection(fixture_file, capsys):
    assert main(["solve", fixture_file, "--alg", "greedy-fixed", "--select", "s2", "s3"]) == 0
    assert json.loads(capsys.readouterr().out)["integral_value"] == 2.0


def test_solve_appends_csv(tmp_path, fixture_file):
    out = tmp_path / "rows.csv"
    for _ in range(2):
        main(["solve", fixture_file, "--alg", "mmo", "--csv", str(out), "-o", str(tmp_path / "r.json")])
    assert len(out.read_text().splitlines()) == 3


def test_bench_rows_and_gap_cross_check(tmp_path):
    paths = [_gen(tmp_path, f"i{s}.json", seed=s) for s in range(3)]
    text = bench_csv(paths, ["lslpr", "mmo"], exact_cap=10_000)
    rows = list(csv.DictReader(io.StringIO(text)))
    assert text.splitlines()[0].split(",") == BENCH_COLUMNS
    assert len(rows) == 6
    for row in rows:
        inst, _ = load_instance(row["instance"])
        g = build_graph(inst)
        rep = V.optimality_gap(inst, g, float(row["value"]), max_edges=10_000)
        assert float(row["OPT"]) == pytest.approx(rep.opt, rel=1e-8)
        assert float(row["gap"]) == pytest.approx(rep.gap, abs=1e-8)


def test_bench_parallel_keeps_order(tmp_path):
    paths = [_gen(tmp_path, f"i{s}.json", seed=s) for s in range(4)]
    strip = lambda t: [r[:11] + r[12:] for r in csv.reader(io.StringIO(t))]
    serial = bench_csv(paths, ["mmo"], exact_cap=10_000)
    parallel = bench_csv(paths, ["mmo"], jobs=2, exact_cap=10_000)
    assert strip(serial) == strip(parallel)


def test_bench_records_errors_and_continues(tmp_path):
    good = _gen(tmp_path)
    text = bench_csv([str(tmp_path / "missing.json"), good], ["mmo"], exact_cap=10_000)
    rows = list(csv.DictReader(io.StringIO(text)))
    assert rows[0]["error"] and not rows[1]["error"]


def test_bench_command_writes_file(tmp_path):
    _gen(tmp_path, "g1.json")
    out = tmp_path / "b.csv"
    assert main(["bench", str(tmp_path / "g*.json"), "--algs", "mmo", "--no-gap", "-o", str(out)]) == 0
    assert len(out.read_text().splitlines()) == 2


def test_verify_fixture_passes(fixture_file):
    assert main(["verify", fixture_file]) == 0


def test_verify_names_capacity_failure(tmp_path, fixture_file, capsys):
    bad = tmp_path / "bad.jsonl"
    bad.write_text(json.dumps({"scenario": 0, "vehicle": "s2", "requests": ["d1", "d2", "d3"], "value": 3.0}) + "\n")
    assert main(["verify", fixture_file, "--graph", str(bad)]) == 1
    assert "capacity" in capsys.readouterr().err


def test_verify_sweep(capsys):
    assert main(["verify", "--sweep", "5"]) == 0
    assert json.loads(capsys.readouterr().out)["instances"] == 5


def test_verify_needs_input():
    assert main(["verify"]) == 2
