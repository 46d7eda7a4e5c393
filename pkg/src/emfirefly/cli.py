"""Command line entry point: ``emfirefly run|sweep|gso-bench``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .config import PROTOCOLS, defaulted_keys, parse_config, render
from .errors import ConfigError, SweepError
from .gso import bench_config, bimodal_gaussian, count_near, run_gso
from .protocol import run_simulation
from .scenarios import SCENARIO_BASE, SCENARIOS, run_sweep, write_run

log = logging.getLogger("emfirefly")


def _csv_list(kind):
    def parse(text):
        try:
            return [kind(x) for x in text.split(",") if x.strip()]
        except ValueError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from exc

    return parse


def _read_document(path):
    if path is None:
        return {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}", field="config") from exc
    try:
        doc = json.loads(text) if text.strip() else {}
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}", field="config") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object", field="config")
    return doc


def cmd_run(args) -> int:
    doc = _read_document(args.config)
    if args.seed is not None:
        doc["rng_seed"] = args.seed
    if args.protocol is not None:
        doc["protocol"] = args.protocol
    if args.rounds is not None:
        doc["horizon_rounds"] = args.rounds
        doc.pop("duration_s", None)
    cfg = parse_config(doc)
    defaults = defaulted_keys(doc)
    log.info("defaults applied: %s", ", ".join(defaults))
    result = run_simulation(cfg)
    if args.out:
        stem = f"run_{cfg.protocol}_seed-{cfg.rng_seed}"
        for p in write_run(result, args.out, stem, defaults):
            log.info("wrote %s", p)
    print(json.dumps(result.summary(), sort_keys=True))
    return 0


def cmd_sweep(args) -> int:
    doc = {**render(SCENARIO_BASE), **_read_document(args.config)}
    if args.rounds is not None:
        doc["horizon_rounds"] = args.rounds
        doc["duration_s"] = None
    base = parse_config(doc)
    seeds = args.seeds if args.seeds else [args.seed if args.seed is not None else 0]
    kwargs = {"seeds": seeds, "protocols": args.protocols or ("em-firefly", "random-ch"), "base": base}
    for p in kwargs["protocols"]:
        if p not in PROTOCOLS:
            raise ConfigError(f"unknown protocol {p!r}", field="protocol")
    builder = SCENARIOS[args.scenario]
    spec = builder(args.values, **kwargs) if args.values else builder(**kwargs)
    log.info("scenario %d: %d runs", spec.scenario, len(spec))
    agg = run_sweep(spec, args.out, jobs=args.jobs)
    print(json.dumps({"aggregate": str(agg), "runs": len(spec)}))
    return 0


def cmd_gso_bench(args) -> int:
    peaks = ((2.0, 0.0), (-2.0, 0.0))
    seeds = range(args.seed, args.seed + args.runs)
    rows = []
    for seed in seeds:
        result = run_gso(bimodal_gaussian, bench_config(seed, max_iterations=args.iterations, swarm_size=args.worms))
        counts = [count_near(result.positions, p, args.tol) for p in peaks]
        rows.append({"seed": seed, "near_peaks": counts, "both": all(c >= args.min_worms for c in counts)})
        if args.out:
            out = Path(args.out)
            out.mkdir(parents=True, exist_ok=True)
            result.trace.to_csv(out / f"gso_trace_seed-{seed}.csv")
    report = {"runs": rows, "passing": sum(r["both"] for r in rows), "total": len(rows)}
    if args.out:
        (Path(args.out) / "gso_bench.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    print(json.dumps(report, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="emfirefly", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="simulate one configuration")
    run.add_argument("--config", help="JSON config file")
    run.add_argument("--seed", type=int)
    run.add_argument("--out", help="directory for the per-round CSV and JSON summary")
    run.add_argument("--protocol", choices=PROTOCOLS)
    run.add_argument("--rounds", type=int)
    run.set_defaults(func=cmd_run)

    sweep = sub.add_parser("sweep", help="run a scenario sweep")
    sweep.add_argument("--scenario", type=int, choices=sorted(SCENARIOS), required=True)
    sweep.add_argument("--config", help="JSON overrides for the scenario base config")
    sweep.add_argument("--seed", type=int)
    sweep.add_argument("--seeds", type=_csv_list(int), help="comma-separated seeds")
    sweep.add_argument("--values", type=_csv_list(float), help="comma-separated sweep values")
    sweep.add_argument("--protocols", type=_csv_list(str))
    sweep.add_argument("--protocol", dest="protocols", type=lambda s: [s], help="compare a single protocol")
    sweep.add_argument("--rounds", type=int)
    sweep.add_argument("--jobs", type=int, default=1)
    sweep.add_argument("--out", required=True)
    sweep.set_defaults(func=cmd_sweep)

    bench = sub.add_parser("gso-bench", help="glowworm kernel on a two-peak objective")
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--runs", type=int, default=20)
    bench.add_argument("--worms", type=int, default=100)
    bench.add_argument("--iterations", type=int, default=200)
    bench.add_argument("--tol", type=float, default=0.1)
    bench.add_argument("--min-worms", type=int, default=10)
    bench.add_argument("--out")
    bench.set_defaults(func=cmd_gso_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(json.dumps(exc.to_dict()), file=sys.stderr)
        return 2
    except SweepError as exc:
        print(json.dumps({"error": "sweep", "message": str(exc), "written": exc.manifest}), file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
