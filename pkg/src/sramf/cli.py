"""Command-line entry point: ``sramf {gen,solve,bench,verify}``.

Exit codes: 0 ok, 1 verification failure, 2 configuration error, 3 size cap.
"""

from __future__ import annotations

import argparse
import csv
import glob
import io
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor

from . import verify as V
from .generator import GenConfig, gen_instance
from .lslpr import LSOptions, run_lslpr
from .mmo import MMOOptions, PartitionError, run_mmo, run_mmo_partition
from .model import InstanceError, dump_instance, load_instance, validate_instance
from .packing import EXACT_EDGE_CAP, Evaluator, PackingSizeError, exact_packing, greedy_value
from .sharegraph import (BRUTE_FORCE_CAP, GraphSizeError, ShareabilityGraph, brute_force_graph, build_graph,
                         check_graph, read_graph_jsonl)

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_SIZE = 0, 1, 2, 3
ALGORITHMS = ("lslpr", "mmo", "mmo-partition", "exact", "greedy-fixed")
BENCH_COLUMNS = ["instance", "alg", "n_A", "n_B", "K", "p", "N", "edge_count", "value", "OPT", "gap",
                 "runtime_ms", "iterations", "error"]


class ConfigError(ValueError):
    pass


def _default_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("SRAMF_SEED")
    seed = int(env) if env else 0
    print(f"note: no --seed given, using {seed}", file=sys.stderr)
    return seed


def _fmt(x) -> str:
    if x is None or x == "":
        return ""
    if isinstance(x, float):
        return f"{x:.9g}"
    return str(x)


# --------------------------------------------------------------------------
# shared pipeline

def load_problem(path, graph_path=None, k=None):
    """Instance plus its graph: an explicit JSONL file, embedded edges, or a fresh build."""
    inst, edges = load_instance(path)
    if k is not None:
        inst = inst.with_budget(k)
    problems = validate_instance(inst)
    if problems:
        raise ConfigError("; ".join(problems))
    if graph_path:
        graph = read_graph_jsonl(inst, graph_path)
    elif edges is not None:
        graph = ShareabilityGraph(inst, edges)
    else:
        graph = build_graph(inst)
    return inst, graph


def solve(inst, graph, alg: str, seed: int = 0, select=None, exact_cap: int = EXACT_EDGE_CAP,
          selection_cap: int = V.SELECTION_CAP) -> dict:
    """Run one algorithm; returns selection ids, assignments and summary numbers."""
    if alg not in ALGORITHMS:
        raise ConfigError(f"unknown algorithm {alg!r}")
    ev = Evaluator(graph, exact_cap)
    t0 = time.perf_counter()
    if alg == "lslpr":
        res = run_lslpr(inst, graph, LSOptions(seed=seed), evaluator=ev)
        sel, parts, iters = res.selection, res.assignments, res.report["iterations"]
    elif alg == "mmo":
        res = run_mmo(inst, graph, MMOOptions())
        sel, parts, iters = res.selection, res.assignments, res.report["iterations"]
    elif alg == "mmo-partition":
        try:
            res = run_mmo_partition(inst, graph, MMOOptions())
        except PartitionError as exc:
            raise ConfigError(str(exc)) from exc
        sel, parts, iters = res.selection, res.assignments, res.report["iterations"]
    elif alg == "exact":
        partition = inst.partition_budgets is not None
        sel, _ = V.best_selection(inst, ev, "vstar", partition, selection_cap)
        parts = [exact_packing(graph, sel, l, exact_cap) for l in range(graph.N)]
        iters = V.count_selections(inst, partition)
    else:
        if select:
            try:
                sel = frozenset(inst.vehicle_index(s) for s in select)
            except KeyError as exc:
                raise ConfigError(f"unknown vehicle {exc}") from None
        else:
            sel = frozenset(inst.augmented[:inst.K])
        parts, _ = greedy_value(graph, sel)
        iters = 0
    runtime_ms = (time.perf_counter() - t0) * 1000.0
    integral = math.fsum(a.value for a in parts) / graph.N if graph.N else 0.0
    assignments = []
    for a in parts:
        sc = inst.scenarios[a.scenario]
        assignments.append({
            "scenario": a.scenario,
            "value": a.value,
            "trips": [{"vehicle": inst.vehicles[graph.edges[i].vehicle].id,
                       "requests": [sc.requests[j].id for j in graph.edges[i].requests],
                       "value": graph.edges[i].value} for i in a.edges],
        })
    return {
        "algorithm": alg,
        "selection": [inst.vehicles[i].id for i in sorted(sel)],
        "assignments": assignments,
        "vhat": ev.vhat(sel),
        "integral_value": integral,
        "iterations": iters,
        "runtime_ms": runtime_ms,
    }


# --------------------------------------------------------------------------
# commands

def cmd_gen(args) -> int:
    seed = _default_seed(args)
    cfg = GenConfig(n_A=args.na, n_B=args.nb, K=args.k, N=args.scenarios, demand=args.demand,
                    demand_mode=args.demand_mode, cap_A=(args.cap_a[0], args.cap_a[1]),
                    cap_B=(args.cap_b[0], args.cap_b[1]), grid_size=args.grid, partitions=args.partitions)
    errs = cfg.check()
    if errs:
        print("error: " + "; ".join(errs), file=sys.stderr)
        return EXIT_CONFIG
    inst = gen_instance(cfg, seed)
    dump_instance(inst, args.output)
    return EXIT_OK


def cmd_solve(args) -> int:
    seed = args.seed if args.seed is not None else int(os.environ.get("SRAMF_SEED") or 0)
    inst, graph = load_problem(args.instance, args.graph, args.k)
    out = solve(inst, graph, args.alg, seed, args.select, args.exact_cap, args.selection_cap)
    text = json.dumps(out, indent=1)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    if args.csv:
        new = not os.path.exists(args.csv) or os.path.getsize(args.csv) == 0
        with open(args.csv, "a", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            if new:
                w.writerow(["instance", "alg", "value", "vhat", "runtime_ms", "iterations"])
            w.writerow([args.instance, args.alg, _fmt(out["integral_value"]), _fmt(out["vhat"]),
                        _fmt(out["runtime_ms"]), out["iterations"]])
    return EXIT_OK


def _bench_one(job) -> list[list[str]]:
    path, algs, gap, seed, exact_cap, selection_cap = job
    rows = []
    try:
        inst, graph = load_problem(path)
    except Exception as exc:  # noqa: BLE001 - recorded in the error column
        return [[path, a] + [""] * 11 + [f"{type(exc).__name__}: {exc}"] for a in algs]
    shape = [len(inst.augmented), len(inst.basis), inst.K, inst.p, inst.N, len(graph)]
    ev = Evaluator(graph, exact_cap)
    optima: dict[bool, tuple] = {}

    def optimum(partition):
        # the partition variant is compared against the quota-constrained optimum
        if partition not in optima:
            try:
                optima[partition] = (V.best_selection(inst, ev, "vstar", partition, selection_cap)[1], "")
            except (V.CapExceeded, PackingSizeError) as exc:
                optima[partition] = (None, f"OPT: {exc}")
        return optima[partition]

    for a in algs:
        opt, opt_err = optimum(a == "mmo-partition" and inst.partition_budgets is not None) if gap else (None, "")
        try:
            out = solve(inst, graph, a, seed, None, exact_cap, selection_cap)
            value = out["integral_value"]
            g = V.gap_value(opt, value) if opt is not None else None
            rows.append([path, a] + [_fmt(x) for x in shape]
                        + [_fmt(value), _fmt(opt), _fmt(g), _fmt(out["runtime_ms"]), str(out["iterations"]), opt_err])
        except Exception as exc:  # noqa: BLE001
            rows.append([path, a] + [_fmt(x) for x in shape] + [""] * 5 + [f"{type(exc).__name__}: {exc}"])
    return rows


def bench_csv(paths, algs, gap=True, seed=0, jobs=1, exact_cap=EXACT_EDGE_CAP,
              selection_cap=V.SELECTION_CAP) -> str:
    jobs_in = [(p, tuple(algs), gap, seed, exact_cap, selection_cap) for p in paths]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_bench_one, jobs_in))
    else:
        results = [_bench_one(j) for j in jobs_in]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(BENCH_COLUMNS)
    for rows in results:
        w.writerows(rows)
    return buf.getvalue()


def cmd_bench(args) -> int:
    paths = []
    for pattern in args.instances:
        hits = sorted(glob.glob(pattern))
        paths.extend(hits if hits else [pattern])
    algs = [a.strip() for a in args.algs.split(",") if a.strip()]
    bad = [a for a in algs if a not in ALGORITHMS]
    if bad:
        raise ConfigError(f"unknown algorithm(s) {bad}")
    seed = args.seed if args.seed is not None else int(os.environ.get("SRAMF_SEED") or 0)
    text = bench_csv(paths, algs, not args.no_gap, seed, args.jobs, args.exact_cap, args.selection_cap)
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def verify_problem(inst, graph, explicit_graph: bool, exact_cap=EXACT_EDGE_CAP) -> dict[str, str]:
    """Run the invariant suite; returns check name -> failure message (empty when ok)."""
    fails: dict[str, str] = {}
    for name, msg in check_graph(graph, reroute=not explicit_graph):
        fails.setdefault(name, msg)
    if fails:
        return fails
    if not explicit_graph and all(len(s.requests) <= BRUTE_FORCE_CAP for s in inst.scenarios):
        if brute_force_graph(inst).edge_set().keys() != graph.edge_set().keys():
            fails["lattice-equivalence"] = "level-wise graph differs from exhaustive graph"
    everything = frozenset(inst.augmented)
    rep = V.check_sandwich(graph, everything, exact_cap)
    for name, ok in rep["checks"].items():
        if not ok:
            fails[f"sandwich:{name}"] = json.dumps({k: rep[k] for k in ("vstar", "vhat", "greedy", "p")})
    if inst.K >= 1:
        res = run_mmo(inst, graph)
        worst = max([s["max_residual"] for s in res.report["steps"]] + [res.state.residual()])
        if worst > 1e-9:
            fails["dual-feasibility"] = f"covering shortfall {worst:.3g}"
    first = frozenset(inst.augmented[:inst.K])
    for m in V.demand_mappings(graph, first, everything):
        if m.residual > 1e-9:
            fails["delta-mapping"] = f"demand {m.demand}: residual {m.residual:.3g}"
            break
    return fails


def cmd_verify(args) -> int:
    fails: dict[str, str] = {}
    checked = 0
    if args.sweep:
        cfg = GenConfig(n_A=5, n_B=2, K=2, N=2, demand=6)
        base = args.seed if args.seed is not None else 0
        for s in range(base, base + args.sweep):
            inst = gen_instance(cfg, s)
            for name, msg in verify_problem(inst, build_graph(inst), False, args.exact_cap).items():
                fails.setdefault(name, f"seed {s}: {msg}")
            checked += 1
    if args.instance:
        inst, graph = load_problem(args.instance, args.graph)
        explicit = bool(args.graph) or load_instance(args.instance)[1] is not None
        fails.update(verify_problem(inst, graph, explicit, args.exact_cap))
        checked += 1
    if not checked:
        raise ConfigError("give an instance file or --sweep N")
    print(json.dumps({"instances": checked, "passed": not fails, "failures": fails}, indent=1))
    for name, msg in fails.items():
        print(f"FAIL {name}: {msg}", file=sys.stderr)
    return EXIT_FAIL if fails else EXIT_OK


# --------------------------------------------------------------------------

def _pair(text):
    parts = [int(t) for t in text.split(",")]
    if len(parts) == 1:
        parts = parts * 2
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("expected LO[,HI]")
    return parts


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sramf", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a synthetic instance")
    g.add_argument("--na", type=int, default=6)
    g.add_argument("--nb", type=int, default=4)
    g.add_argument("--k", type=int, default=2)
    g.add_argument("--scenarios", type=int, default=3)
    g.add_argument("--demand", type=int, default=8)
    g.add_argument("--demand-mode", choices=("fixed", "poisson"), default="fixed")
    g.add_argument("--cap-a", type=_pair, default=[2, 3], help="LO[,HI]")
    g.add_argument("--cap-b", type=_pair, default=[2, 2], help="LO[,HI]")
    g.add_argument("--grid", type=int, default=10)
    g.add_argument("--partitions", type=int, default=0)
    g.add_argument("--seed", type=int)
    g.add_argument("-o", "--output", required=True)
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="select vehicles and assign requests")
    s.add_argument("instance")
    s.add_argument("--alg", choices=ALGORITHMS, default="lslpr")
    s.add_argument("--k", type=int)
    s.add_argument("--graph", help="hyperedge list (JSONL) to use instead of building one")
    s.add_argument("--select", nargs="+", metavar="ID", help="vehicle ids for greedy-fixed")
    s.add_argument("--seed", type=int)
    s.add_argument("--exact-cap", type=int, default=EXACT_EDGE_CAP)
    s.add_argument("--selection-cap", type=int, default=V.SELECTION_CAP)
    s.add_argument("--csv", help="append a summary row to this CSV file")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_solve)

    b = sub.add_parser("bench", help="run algorithms over instance files into a CSV table")
    b.add_argument("instances", nargs="+", help="files or glob patterns")
    b.add_argument("--algs", default="lslpr,mmo")
    b.add_argument("--no-gap", action="store_true", help="skip the enumerated optimum")
    b.add_argument("--jobs", type=int, default=1)
    b.add_argument("--seed", type=int)
    b.add_argument("--exact-cap", type=int, default=EXACT_EDGE_CAP)
    b.add_argument("--selection-cap", type=int, default=V.SELECTION_CAP)
    b.add_argument("-o", "--output")
    b.set_defaults(func=cmd_bench)

    v = sub.add_parser("verify", help="check solver invariants on an instance")
    v.add_argument("instance", nargs="?")
    v.add_argument("--graph")
    v.add_argument("--sweep", type=int, default=0, metavar="N", help="also check N generated seeds")
    v.add_argument("--seed", type=int)
    v.add_argument("--exact-cap", type=int, default=EXACT_EDGE_CAP)
    v.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, InstanceError, PartitionError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (V.CapExceeded, PackingSizeError, GraphSizeError) as exc:
        print(f"size error: {exc}", file=sys.stderr)
        return EXIT_SIZE


if __name__ == "__main__":
    sys.exit(main())
