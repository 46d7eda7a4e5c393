"""The three evaluation scenarios, seeded sweeps and result files."""
from __future__ import annotations

import csv
import io
import json
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from . import __version__
from .config import SimulationConfig, config_hash, render
from .errors import ConfigError, SweepError
from .protocol import IDLE, SimulationResult, run_simulation

ROUND_COLUMNS = ["round", "protocol", "alive", "deaths", "total_residual_j", "max_relative_load", "ch_ids"]
AGGREGATE_COLUMNS = [
    "scenario",
    "variable",
    "value",
    "protocol",
    "runs",
    "fnd_mean",
    "fnd_std",
    "hnd_mean",
    "hnd_std",
    "lnd_mean",
    "lnd_std",
    "final_max_relative_load_mean",
    "final_max_relative_load_std",
]
DEFAULT_PROTOCOLS = ("em-firefly", "random-ch")

# Scenario geometry and energy come from the evaluation set-up (circle of
# radius 20 m, 200 J per node). The traffic load and horizon are ours: with a
# single packet per round nobody dies within 180 rounds on 200 J.
SCENARIO_BASE = SimulationConfig(
    node_count=500,
    area_radius=20.0,
    initial_energy=200.0,
    packets_per_round=2000,
    horizon_rounds=180,
)

SCENARIO_VARIABLES = {1: "node_count", 2: "area_radius", 3: "initial_energy"}


@dataclass(frozen=True)
class SweepSpec:
    scenario: int
    variable: str
    values: Tuple
    seeds: Tuple[int, ...] = (0,)
    protocols: Tuple[str, ...] = DEFAULT_PROTOCOLS
    base: SimulationConfig = SCENARIO_BASE

    def __post_init__(self):
        if not self.values:
            raise ConfigError("sweep needs at least one value", field="values")
        if len(self.seeds) < 1:
            raise ConfigError("sweep needs at least one seed", field="seeds")
        if not self.protocols:
            raise ConfigError("sweep needs at least one protocol", field="protocols")

    def configs(self) -> Iterable[Tuple[object, int, str, SimulationConfig]]:
        """Every (value, seed, protocol) run, in a fixed order."""
        for value in self.values:
            for seed in self.seeds:
                for protocol in self.protocols:
                    cfg = self.base.replace(**{self.variable: value, "rng_seed": seed, "protocol": protocol})
                    yield value, seed, protocol, cfg

    def __len__(self):
        return len(self.values) * len(self.seeds) * len(self.protocols)


def _tuple(xs) -> tuple:
    return tuple(xs) if xs is not None else ()


def scenario_1(node_counts=(500, 1000, 2000, 4000), seeds=(0,), protocols=DEFAULT_PROTOCOLS, base=SCENARIO_BASE) -> SweepSpec:
    """Vary the node count inside a fixed 20 m circle at 200 J per node."""
    return SweepSpec(1, "node_count", tuple(int(n) for n in node_counts), _tuple(seeds), _tuple(protocols), base)


def scenario_2(radii=(5.0, 10.0, 20.0, 40.0), seeds=(0,), protocols=DEFAULT_PROTOCOLS, base=SCENARIO_BASE) -> SweepSpec:
    """Vary the deployment radius; the same seed rescales the same layout."""
    radii = tuple(float(r) for r in radii)
    if any(r <= 0 for r in radii):
        raise ConfigError("radii must be positive", field="values")
    return SweepSpec(2, "area_radius", radii, _tuple(seeds), _tuple(protocols), base)


def scenario_3(energies=(50.0, 100.0, 200.0, 400.0), seeds=(0,), protocols=DEFAULT_PROTOCOLS, base=SCENARIO_BASE) -> SweepSpec:
    energies = tuple(float(e) for e in energies)
    if any(e <= 0 for e in energies):
        raise ConfigError("energies must be positive", field="values")
    return SweepSpec(3, "initial_energy", energies, _tuple(seeds), _tuple(protocols), base)


SCENARIOS = {1: scenario_1, 2: scenario_2, 3: scenario_3}


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def header_line(cfg: SimulationConfig) -> str:
    return f"# emfirefly {__version__} seed={cfg.rng_seed} config_hash={config_hash(cfg)}\n"


def rounds_csv(result: SimulationResult) -> str:
    buf = io.StringIO()
    buf.write(header_line(result.config))
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(ROUND_COLUMNS)
    for rec in result.records:
        heads = ";".join("-" if h == IDLE else str(h) for h in rec.heads)
        w.writerow(
            [rec.round, rec.protocol, rec.alive, rec.deaths, _fmt(rec.total_residual), _fmt(rec.max_relative_load), heads]
        )
    return buf.getvalue()


def summary_json(result: SimulationResult, defaults: Optional[Sequence[str]] = None) -> str:
    doc = {
        "tool": "emfirefly",
        "version": __version__,
        "seed": result.config.rng_seed,
        "config_hash": config_hash(result.config),
        "config": render(result.config),
        "defaults_applied": list(defaults) if defaults is not None else [],
        "summary": result.summary(),
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def write_run(result: SimulationResult, out_dir, stem: str, defaults=None) -> List[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / f"{stem}.csv"
    json_path = out_dir / f"{stem}.json"
    csv_path.write_text(rounds_csv(result))
    json_path.write_text(summary_json(result, defaults))
    return [csv_path, json_path]


def run_stem(spec: SweepSpec, value, seed: int, protocol: str) -> str:
    return f"s{spec.scenario}_{spec.variable}-{_fmt(value)}_seed-{seed}_{protocol}"


def _execute(job) -> Tuple[dict, List[str]]:
    cfg, run_dir, stem = job
    result = run_simulation(cfg)
    try:
        paths = write_run(result, run_dir, stem)
    except OSError as exc:
        raise SweepError(f"cannot write {stem}: {exc}") from exc
    return result.summary(), [str(p) for p in paths]


def _stats(values: List[float]) -> Tuple[Optional[float], Optional[float]]:
    values = [v for v in values if v is not None]
    if not values:
        return None, None
    return statistics.fmean(values), statistics.pstdev(values)


def aggregate_rows(spec: SweepSpec, summaries: Dict[Tuple, dict]) -> List[list]:
    rows = []
    for value in spec.values:
        for protocol in spec.protocols:
            runs = [summaries[(value, seed, protocol)] for seed in spec.seeds]
            row = [spec.scenario, spec.variable, _fmt(value), protocol, len(runs)]
            for key in ("fnd", "hnd", "lnd"):
                row += [_fmt(v) for v in _stats([float(r["lifetime"][key]) for r in runs])]
            row += [_fmt(v) for v in _stats([r["final_max_relative_load"] for r in runs])]
            rows.append(row)
    return rows


def run_sweep(spec: SweepSpec, out, jobs: int = 1) -> Path:
    """Run every (value, seed, protocol) combination and write the results.

    Per-run CSV/JSON files go to ``out/runs``; ``out/aggregate.csv`` is written
    last. On a write failure a ``manifest.json`` listing the files already
    written is left behind and :class:`SweepError` is raised.
    """
    out = Path(out)
    run_dir = out / "runs"
    written: List[str] = []
    try:
        run_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise SweepError(f"cannot create output directory {run_dir}: {exc}") from exc

    keys, jobs_list = [], []
    for value, seed, protocol, cfg in spec.configs():
        keys.append((value, seed, protocol))
        jobs_list.append((cfg, str(run_dir), run_stem(spec, value, seed, protocol)))

    summaries: Dict[Tuple, dict] = {}
    try:
        if jobs > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                outputs = list(pool.map(_execute, jobs_list))
            written = [p for _, paths in outputs for p in paths]
        else:
            outputs = []
            for job in jobs_list:
                outputs.append(_execute(job))
                written.extend(outputs[-1][1])
        for key, (summary, _) in zip(keys, outputs):
            summaries[key] = summary

        agg = io.StringIO()
        agg.write(f"# emfirefly {__version__} scenario={spec.scenario} seeds={list(spec.seeds)} "
                  f"base_config_hash={config_hash(spec.base)}\n")
        w = csv.writer(agg, lineterminator="\n")
        w.writerow(AGGREGATE_COLUMNS)
        w.writerows(aggregate_rows(spec, summaries))
        agg_path = out / "aggregate.csv"
        agg_path.write_text(agg.getvalue())
    except (SweepError, OSError) as exc:
        _write_manifest(out, written, str(exc))
        if isinstance(exc, SweepError):
            exc.manifest = written
            raise
        raise SweepError(str(exc), manifest=written) from exc
    return agg_path


def _write_manifest(out: Path, written: List[str], error: str) -> None:
    try:
        (out / "manifest.json").write_text(json.dumps({"complete": False, "error": error, "written": written}, indent=2) + "\n")
    except OSError:
        pass


def read_aggregate(path) -> List[dict]:
    with open(path) as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    return list(csv.DictReader(lines))


def read_rounds(path) -> List[dict]:
    with open(path) as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    return list(csv.DictReader(lines))
