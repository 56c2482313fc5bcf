"""Command-line interface.

Four subcommands: ``allocate`` prices a single ride under one rule, ``bench``
runs the benchmark harness and writes report files plus figures, ``verify``
runs the oracle-equivalence suites, and ``gen`` emits synthetic graph files.

Exit codes: 0 success, 1 validation problems, 2 capacity (instance too large
for the exponential paths).  Paths may come from flags or, for the common
ones, environment variables; flags win.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace
from pathlib import Path
from typing import Mapping

import numpy as np

from .cost_model import (
    GIVEN_ORDER,
    NON_PRIORITIZED,
    OPTIMAL_ORDER,
    PRIORITIZED,
    RideInstance,
)
from .errors import CapacityError, FairshareError, ValidationError
from .eval_harness import ExperimentConfig, run_experiment
from .exact_shapley import Allocation
from .report import render_figures, summary_table, write_report_csv, write_report_json
from .road_graph import (
    LAST_MILE,
    MODES,
    ROUTING_GAME,
    DistanceMatrix,
    build_distance_matrix,
    dump_graph,
    read_graph,
)
from .rules import RULE_IDS, rule_function
from .synthetic import FAMILIES, family_graph
from .verify import run_all

ENV_INSTANCE = "FAIRSHARE_INSTANCE"
ENV_BENCH_CONFIG = "FAIRSHARE_BENCH_CONFIG"
ENV_BENCH_OUT = "FAIRSHARE_BENCH_OUT"


def _required_path(flag_value: str | None, env_name: str, what: str) -> Path:
    value = flag_value or os.environ.get(env_name)
    if not value:
        raise ValidationError(f"no {what} given: pass the flag or set {env_name}")
    return Path(value)


def load_instance_file(path: Path, mode_override: str | None = None) -> RideInstance:
    """Parse a ride-instance JSON file into a RideInstance.

    The file either references a graph (``graph`` + ``depot`` +
    ``destinations``) or inlines the real distance core ``delta`` as an
    (n+1) x (n+1) matrix over depot + destinations in drop-off order.  The
    optional ``mode`` field picks the dummy column; ``mode_override`` wins
    over it.
    """
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ValidationError(f"instance file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ValidationError(f"invalid instance JSON in {path}: {exc}") from None
    if not isinstance(data, Mapping):
        raise ValidationError(f"instance file {path} must hold a JSON object")
    has_graph = "graph" in data
    has_delta = "delta" in data
    if has_graph == has_delta:
        raise ValidationError("instance file needs exactly one of 'graph' or 'delta'")
    mode = mode_override or data.get("mode", LAST_MILE)
    if mode not in MODES:
        raise ValidationError(f"unknown mode {mode!r}; expected one of {MODES}")
    price = float(data.get("price_per_km", 1.0))
    if has_delta:
        core = np.asarray(data["delta"], dtype=float)
        matrix = DistanceMatrix.from_points(core, mode)
    else:
        missing = {"depot", "destinations"} - set(data)
        if missing:
            raise ValidationError(f"instance file missing keys: {sorted(missing)}")
        graph_path = Path(data["graph"])
        if not graph_path.is_absolute():
            graph_path = path.parent / graph_path
        g = read_graph(graph_path)
        destinations = list(data["destinations"])
        if not destinations:
            raise ValidationError("destinations must not be empty")
        matrix = build_distance_matrix(g, int(data["depot"]), destinations, mode)
    return RideInstance(matrix, price)


def _print_allocation(alloc: Allocation, as_json: bool) -> None:
    for flag in alloc.flags:
        print(f"warning: {flag}", file=sys.stderr)
    if as_json:
        print(alloc.to_json())
        return
    print(f"rule        {alloc.rule}")
    print(f"cost model  {alloc.cost_model}")
    print(f"passengers  {alloc.n}")
    for i, payment in enumerate(alloc.payments, start=1):
        print(f"  u_{i:<4} {payment:>12.2f}")
    print(f"  {'total':<5} {alloc.total:>12.2f}")


def cmd_allocate(args: argparse.Namespace) -> int:
    if args.rule not in RULE_IDS:
        raise ValidationError(f"unknown rule {args.rule!r}; expected one of {RULE_IDS}")
    path = _required_path(args.instance, ENV_INSTANCE, "instance file")
    override = ROUTING_GAME if (args.routing_game or args.rule == "shapo-routing") else None
    inst = load_instance_file(path, override)
    cost_model = args.cost_model
    if inst.matrix.mode == ROUTING_GAME:
        cost_model = f"routing-game-{cost_model}"
    alloc = rule_function(args.rule, cost_model, args.grand_coalition)(inst)
    _print_allocation(alloc, args.json)
    return 0


def cmd_bench(args: argparse.Namespace) -> int:
    config_path = _required_path(args.config, ENV_BENCH_CONFIG, "benchmark config")
    out_dir = _required_path(args.out, ENV_BENCH_OUT, "output directory")
    cfg = ExperimentConfig.from_json_file(config_path)
    if cfg.graph_source.split(":")[0] not in FAMILIES and not Path(cfg.graph_source).is_absolute():
        # graph files named in a config resolve against the config's directory
        cfg = replace(cfg, graph_source=str(config_path.parent / cfg.graph_source))
    report = run_experiment(cfg)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = [
        write_report_csv(report, out_dir / "report.csv"),
        write_report_json(report, out_dir / "report.json"),
    ]
    if not args.no_figures:
        written.extend(render_figures(report, out_dir))
    print(summary_table(report))
    for path in written:
        print(f"wrote {path}")
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    if args.n_max < 1:
        raise ValidationError(f"--n-max must be >= 1, got {args.n_max}")
    if args.trials < 0:
        raise ValidationError(f"--trials must be >= 0, got {args.trials}")
    results = run_all(args.n_max, args.trials, args.seed)
    total_checks = sum(r.checks for r in results)
    worst = max((r.max_deviation for r in results), default=0.0)
    ok = True
    for r in results:
        status = "pass" if r.passed else "FAIL"
        print(f"{status}  {r.name:<34} checks={r.checks:<8} max_deviation={r.max_deviation:.3e}")
        for f in r.failures[:10]:
            print(f"      failing: seed={f.seed} n={f.n} i={f.i} deviation={f.deviation:.3e}")
            ok = False
        if len(r.failures) > 10:
            print(f"      ... {len(r.failures) - 10} more failures")
    if total_checks == 0:
        print("warning: 0 checks run; pass is vacuous", file=sys.stderr)
    print(f"overall max deviation: {worst:.3e} over {total_checks} checks")
    return 0 if ok else 1


def cmd_gen(args: argparse.Namespace) -> int:
    if args.family not in FAMILIES:
        raise ValidationError(f"unknown family {args.family!r}; expected one of {FAMILIES}")
    if args.size < 1:
        raise ValidationError(f"--size must be >= 1, got {args.size}")
    spec = f"{args.family}:{args.size}"
    if args.family == "euclidean":
        spec += f":{args.seed}"
    g = family_graph(spec)
    out = Path(args.out)
    if out.parent and not out.parent.exists():
        out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(dump_graph(g), encoding="utf-8")
    print(f"wrote {out} ({g.vertex_count} vertices, {g.edge_count} edges)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fairshare", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("allocate", help="price a single ride under one allocation rule")
    p.add_argument("--instance", help=f"ride instance JSON (env {ENV_INSTANCE})")
    p.add_argument("--rule", required=True, help=f"one of {', '.join(RULE_IDS)}")
    p.add_argument("--routing-game", action="store_true", help="include the return leg to the depot")
    p.add_argument("--cost-model", choices=(PRIORITIZED, NON_PRIORITIZED), default=PRIORITIZED,
                   help="coalition cost model for the exact rule (default: prioritized)")
    p.add_argument("--grand-coalition", choices=(GIVEN_ORDER, OPTIMAL_ORDER), default=GIVEN_ORDER,
                   help="grand-coalition costing for the non-prioritized exact rule")
    p.add_argument("--json", action="store_true", help="print the allocation as JSON at full precision")
    p.set_defaults(func=cmd_allocate)

    p = sub.add_parser("bench", help="run the benchmark harness and write report files")
    p.add_argument("--config", help=f"experiment config JSON (env {ENV_BENCH_CONFIG})")
    p.add_argument("--out", help=f"output directory (env {ENV_BENCH_OUT})")
    p.add_argument("--no-figures", action="store_true", help="skip PNG figures, write only CSV/JSON")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("verify", help="run oracle-equivalence suites")
    p.add_argument("--n-max", type=int, default=8)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("gen", help="generate a synthetic graph file")
    p.add_argument("--family", required=True, help=f"one of {', '.join(FAMILIES)}")
    p.add_argument("--size", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FairshareError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
