"""Command line interface.

Subcommands: inspect, solve, experiment, transience.  A single JSON config
file drives everything; flags override individual keys.  Exit codes:
0 success, 1 usage/config error, 2 structural validation failure,
3 resource budget exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

import jsonschema

from . import __version__
from .configschema import CONFIG_SCHEMA
from .errors import (
    DomainError,
    PreconditionError,
    ResourceBudgetError,
    SpecError,
    StructuralError,
)
from .generators import from_config
from .graph import reach_set, validate_region
from .montecarlo import (
    ExperimentConfig,
    atomic_write_text,
    report_json_text,
    run_full_experiment,
    samples_csv_text,
    summary_csv_text,
)
from .partitions import check_delta_transient
from .values import field_from_config, solve_value

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_STRUCTURAL = 2
EXIT_BUDGET = 3


def load_config(path: str | None, args: argparse.Namespace) -> dict:
    cfg: dict = {}
    if path:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    # flag-only graph selection for quick inspection runs
    if getattr(args, "family", None):
        block: dict = {"family": args.family}
        if args.family == "dary":
            block["d"] = args.d if args.d is not None else 2
        cfg["graph"] = block
    if "graph" not in cfg:
        raise SpecError("no graph given: pass --config or --family")
    jsonschema.validate(cfg, CONFIG_SCHEMA)
    return cfg


def _run_block(cfg: dict) -> dict:
    return dict(cfg.get("run", {}))


def _bounds_block(cfg: dict) -> dict:
    return dict(cfg.get("bounds", {}))


def _threads(args, run: dict) -> int:
    if getattr(args, "threads", None):
        return args.threads
    if run.get("threads"):
        return int(run["threads"])
    env = os.environ.get("DIRGAME_THREADS")
    return int(env) if env else 1


def _outdir(args, cfg: dict) -> str:
    out = getattr(args, "out", None) or cfg.get("output", {}).get("dir", ".")
    os.makedirs(out, exist_ok=True)
    return out


def _prefix(cfg: dict) -> str:
    return cfg.get("output", {}).get("prefix", "dirgame")


def cmd_inspect(args) -> int:
    cfg = load_config(args.config, args)
    g = from_config(cfg["graph"])
    depth = args.depth if args.depth is not None else int(_run_block(cfg).get("depth", 6))
    budget = int(_run_block(cfg).get("budget", 10**7))
    rs = reach_set(g, g.initial, depth, budget=budget)
    print(f"family: {g.family}  kind: {g.kind}  max out-degree: {g.max_out_degree}")
    print("level counts:", ",".join(str(c) for c in rs.counts))
    print("total reachable:", rs.total)
    degs = [len(g.neighbor_fn(v)) for level in rs.members[: max(depth, 1)] for v in level]
    if degs:
        print(f"observed out-degree: min {min(degs)} max {max(degs)}")
    report = validate_region(g, g.initial, depth, budget=budget)
    if report.ok:
        print(f"validation: pass (depth {depth}, {report.explored} vertices)")
        return EXIT_OK
    for v in report.violations:
        print(f"validation: FAIL [{v.kind}] {v.message}")
    return EXIT_STRUCTURAL


def cmd_solve(args) -> int:
    cfg = load_config(args.config, args)
    run = _run_block(cfg)
    n = args.n if args.n is not None else run.get("n")
    if n is None:
        raise SpecError("no horizon given: set run.n or pass --n")
    if n < 1:
        raise DomainError("n must be >= 1")
    seed = args.seed if args.seed is not None else int(run.get("master_seed", 0))
    g = from_config(cfg["graph"])
    fld = field_from_config(cfg.get("payoffs", {"kind": "bernoulli"}), seed)
    sol = solve_value(g, fld, g.initial, n, budget=int(run.get("budget", 10**7)))
    print(f"V_{n} = {sol.value:.12g}")
    out = _outdir(args, cfg)
    path = os.path.join(out, f"{_prefix(cfg)}-solution.json")
    atomic_write_text(path, json.dumps(sol.to_json_dict(), sort_keys=True, indent=2) + "\n")
    if args.strategies:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["vertex", "stage", "chosen_index", "player"])
        for row in sol.strategy_rows():
            w.writerow(row)
        atomic_write_text(os.path.join(out, f"{_prefix(cfg)}-strategies.csv"), buf.getvalue())
    return EXIT_OK


def experiment_config(cfg: dict, threads: int, seed_override: int | None) -> ExperimentConfig:
    run = _run_block(cfg)
    bounds = _bounds_block(cfg)
    n_list = run.get("n_list") or ([run["n"]] if "n" in run else None)
    if not n_list:
        raise SpecError("run.n_list (or run.n) is required for experiments")
    return ExperimentConfig(
        graph=cfg["graph"],
        payoffs=cfg.get("payoffs", {"kind": "bernoulli", "p": 0.5}),
        n_list=[int(x) for x in n_list],
        samples=int(run.get("samples", 100)),
        master_seed=seed_override if seed_override is not None else int(run.get("master_seed", 0)),
        t_grid=[float(t) for t in bounds.get("t_grid", [0.1, 0.2, 0.3, 0.4])],
        delta=float(bounds.get("delta", 0.25)),
        threads=threads,
        solver=run.get("solver", "auto"),
        budget=int(run.get("budget", 10**7)),
        record_timings=bool(run.get("record_timings", False)),
        epsilon_scale=float(bounds.get("epsilon_scale", 4.0)),
    )


def cmd_experiment(args) -> int:
    cfg = load_config(args.config, args)
    config = experiment_config(cfg, _threads(args, _run_block(cfg)), args.seed)
    result, stats_list, checks_by_n = run_full_experiment(config)
    out = _outdir(args, cfg)
    prefix = _prefix(cfg)
    atomic_write_text(os.path.join(out, f"{prefix}-samples.csv"), samples_csv_text(result.records))
    atomic_write_text(
        os.path.join(out, f"{prefix}-summary.csv"),
        summary_csv_text(stats_list, checks_by_n, config.t_grid),
    )
    atomic_write_text(
        os.path.join(out, f"{prefix}-report.json"),
        report_json_text(config, result, stats_list, checks_by_n),
    )
    print(f"wrote {prefix}-samples.csv, {prefix}-summary.csv, {prefix}-report.json in {out}")
    if result.partial:
        print(f"experiment aborted early: {result.aborted_reason}")
        return EXIT_BUDGET
    return EXIT_OK


def cmd_transience(args) -> int:
    cfg = load_config(args.config, args)
    bounds = _bounds_block(cfg)
    delta = args.delta if args.delta is not None else float(bounds.get("delta", 0.25))
    rng = bounds.get("transience_range", [10, 200, 10])
    lo, hi = int(rng[0]), int(rng[1])
    step = int(rng[2]) if len(rng) > 2 else max(1, (hi - lo) // 20)
    n_range = list(range(lo, hi + 1, step))
    if n_range[-1] != hi:
        n_range.append(hi)
    g = from_config(cfg["graph"])
    if g.adapted_hint is None:
        raise SpecError(f"family {g.family!r} ships no canonical adapted partition")
    budget = int(_run_block(cfg).get("budget", 10**7))
    report = check_delta_transient(
        g,
        g.adapted_hint,
        delta,
        n_range,
        epsilon_scale=float(bounds.get("epsilon_scale", 4.0)),
        budget=budget,
    )
    out = _outdir(args, cfg)
    path = os.path.join(out, f"{_prefix(cfg)}-transience.json")
    atomic_write_text(path, json.dumps(report.to_json_dict(), sort_keys=True, indent=2) + "\n")
    print(f"delta={delta:g} verdict: {report.verdict} (wrote {path})")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dirgame", description=__doc__)
    p.add_argument("--version", action="version", version=f"dirgame {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--out", help="output directory (overrides output.dir)")
    common.add_argument("--seed", type=int, help="override the master seed")

    sp = sub.add_parser("inspect", parents=[common], help="reach sets, degrees, validation")
    sp.add_argument("--family", help="graph family for config-free runs")
    sp.add_argument("--d", type=int, help="branching for --family dary")
    sp.add_argument("--depth", type=int, help="exploration depth")
    sp.set_defaults(fn=cmd_inspect)

    sp = sub.add_parser("solve", parents=[common], help="exact value of one instance")
    sp.add_argument("--n", type=int, help="horizon (overrides run.n)")
    sp.add_argument("--strategies", action="store_true", help="also export optimal strategies CSV")
    sp.set_defaults(fn=cmd_solve)

    sp = sub.add_parser("experiment", parents=[common], help="Monte Carlo experiment")
    sp.add_argument("--threads", type=int, help="worker count (or DIRGAME_THREADS)")
    sp.set_defaults(fn=cmd_experiment)

    sp = sub.add_parser("transience", parents=[common], help="delta-transience diagnostic")
    sp.add_argument("--delta", type=float, help="delta in (0, 1/2)")
    sp.set_defaults(fn=cmd_transience)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        code = args.fn(args)
    except (jsonschema.ValidationError, json.JSONDecodeError) as exc:
        print(f"config error: {getattr(exc, 'message', exc)}", file=sys.stderr)
        code = EXIT_USAGE
    except (SpecError, DomainError, PreconditionError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        code = EXIT_USAGE
    except StructuralError as exc:
        print(f"structural error: {exc}", file=sys.stderr)
        code = EXIT_STRUCTURAL
    except ResourceBudgetError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        code = EXIT_BUDGET
    return code


if __name__ == "__main__":
    sys.exit(main())
