"""Glowworm swarm optimisation.

Each worm carries a luciferin level that tracks the objective at its
position, moves a fixed step towards a brighter neighbour picked with
probability proportional to the brightness gap, and adapts its decision
radius towards a target neighbour count.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from typing import Callable, List, Optional, Sequence

import numpy as np

from .errors import ConfigError


@dataclass
class Glowworm:
    position: np.ndarray
    luciferin: float
    decision_radius: float


@dataclass(frozen=True)
class GsoConfig:
    decay: float = 0.4
    luciferin_gain: float = 0.6
    step_size: float = 0.03
    sensing_radius: float = 3.0
    range_gain: float = 0.08
    target_neighbors: int = 5
    initial_range: float = 3.0
    initial_luciferin: float = 5.0
    swarm_size: int = 100
    max_iterations: int = 200
    lower: Sequence[float] = (-3.0, -3.0)
    upper: Sequence[float] = (3.0, 3.0)
    rng_seed: int = 0

    def __post_init__(self):
        if not 0 <= self.decay < 1:
            raise ConfigError("decay must lie in [0, 1)", field="decay")
        if not 0 < self.initial_range <= self.sensing_radius:
            raise ConfigError("need 0 < initial_range <= sensing_radius", field="initial_range")
        if self.luciferin_gain <= 0 or self.step_size <= 0:
            raise ConfigError("luciferin_gain and step_size must be positive")
        if len(self.lower) != len(self.upper) or any(lo > hi for lo, hi in zip(self.lower, self.upper)):
            raise ConfigError("search box bounds are inconsistent", field="lower")

    @property
    def dim(self) -> int:
        return len(self.lower)


def update_luciferin(worm: Glowworm, fitness_value: float, cfg) -> float:
    return (1.0 - cfg.decay) * worm.luciferin + cfg.luciferin_gain * fitness_value


def brighter_neighbors(i: int, swarm: Sequence[Glowworm]) -> List[int]:
    me = swarm[i]
    out = []
    for j, other in enumerate(swarm):
        if j == i:
            continue
        d = float(np.linalg.norm(np.asarray(other.position) - np.asarray(me.position)))
        if d < me.decision_radius and other.luciferin > me.luciferin:
            out.append(j)
    return out


def move_probabilities(i: int, neighbors: Sequence[int], swarm: Sequence[Glowworm]) -> Optional[np.ndarray]:
    """Selection probabilities over ``neighbors``; None means stay put."""
    if len(neighbors) == 0:
        return None
    gaps = np.array([swarm[j].luciferin - swarm[i].luciferin for j in neighbors], dtype=float)
    return gaps / gaps.sum()


def step_position(position, target, step_size: float) -> np.ndarray:
    """Move ``step_size`` along the unit vector towards ``target``."""
    position = np.asarray(position, dtype=float)
    delta = np.asarray(target, dtype=float) - position
    norm = float(np.linalg.norm(delta))
    if norm == 0.0:
        return position.copy()
    return position + step_size * delta / norm


def update_decision_range(worm: Glowworm, neighbor_count: int, cfg) -> float:
    r = worm.decision_radius + cfg.range_gain * (cfg.target_neighbors - neighbor_count)
    return min(cfg.sensing_radius, max(0.0, r))


def sample_index(probs: np.ndarray, u: float) -> int:
    """Inverse-CDF draw over ``probs`` with a uniform ``u`` in [0, 1)."""
    cdf = np.cumsum(probs)
    k = int(np.searchsorted(cdf, u * cdf[-1], side="right"))
    return min(k, len(probs) - 1)


@dataclass
class GsoTrace:
    best_luciferin: List[float] = field(default_factory=list)
    mean_luciferin: List[float] = field(default_factory=list)
    mean_decision_radius: List[float] = field(default_factory=list)

    def rows(self):
        for k, row in enumerate(zip(self.best_luciferin, self.mean_luciferin, self.mean_decision_radius)):
            yield (k + 1, *row)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["iteration", "best_luciferin", "mean_luciferin", "mean_decision_radius"])
            for it, best, mean, radius in self.rows():
                w.writerow([it, repr(best), repr(mean), repr(radius)])


@dataclass
class GsoResult:
    swarm: List[Glowworm]
    trace: GsoTrace

    @property
    def positions(self) -> np.ndarray:
        return np.array([w.position for w in self.swarm])


def init_swarm(cfg: GsoConfig, rng: np.random.Generator) -> List[Glowworm]:
    lo = np.asarray(cfg.lower, dtype=float)
    hi = np.asarray(cfg.upper, dtype=float)
    pos = rng.uniform(lo, hi, size=(cfg.swarm_size, cfg.dim))
    return [Glowworm(p, float(cfg.initial_luciferin), float(cfg.initial_range)) for p in pos]


def run_gso(objective: Callable[[np.ndarray], float], cfg: GsoConfig) -> GsoResult:
    """Run ``cfg.max_iterations`` synchronous GSO iterations.

    Every iteration updates all luciferin levels, then moves every worm using
    the same snapshot of positions and brightness, then adapts the decision
    radii. Worms are clamped to the search box.
    """
    if cfg.swarm_size < 2:
        raise ConfigError("swarm_size must be >= 2", field="swarm_size")
    rng = np.random.default_rng(cfg.rng_seed)
    swarm = init_swarm(cfg, rng)
    lo = np.asarray(cfg.lower, dtype=float)
    hi = np.asarray(cfg.upper, dtype=float)
    trace = GsoTrace()
    n = cfg.swarm_size

    for _ in range(cfg.max_iterations):
        for w in swarm:
            w.luciferin = update_luciferin(w, float(objective(w.position)), cfg)

        pos = np.array([w.position for w in swarm])
        luc = np.array([w.luciferin for w in swarm])
        radii = np.array([w.decision_radius for w in swarm])
        diff = pos[:, None, :] - pos[None, :, :]
        dist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
        mask = (dist < radii[:, None]) & (luc[None, :] > luc[:, None])
        np.fill_diagonal(mask, False)
        draws = rng.random(n)

        new_pos = pos.copy()
        for i in range(n):
            nbrs = np.flatnonzero(mask[i])
            if len(nbrs) == 0:
                continue
            gaps = luc[nbrs] - luc[i]
            j = nbrs[sample_index(gaps / gaps.sum(), draws[i])]
            new_pos[i] = np.clip(step_position(pos[i], pos[j], cfg.step_size), lo, hi)

        counts = mask.sum(axis=1)
        for i, w in enumerate(swarm):
            w.position = new_pos[i]
            w.decision_radius = update_decision_range(w, int(counts[i]), cfg)

        trace.best_luciferin.append(float(luc.max()))
        trace.mean_luciferin.append(float(luc.mean()))
        trace.mean_decision_radius.append(float(np.mean([w.decision_radius for w in swarm])))

    return GsoResult(swarm=swarm, trace=trace)


def bimodal_gaussian(x, peaks=((2.0, 0.0), (-2.0, 0.0)), width: float = 1.0) -> float:
    """Sum of equal Gaussian bumps; ``width`` is the standard deviation."""
    xs = [float(v) for v in x]
    scale = 2.0 * width * width
    total = 0.0
    for p in peaks:
        total += math.exp(-sum((a - b) ** 2 for a, b in zip(xs, p)) / scale)
    return total


def count_near(positions: np.ndarray, point, tol: float) -> int:
    return int(np.sum(np.linalg.norm(positions - np.asarray(point), axis=1) <= tol))


def bench_config(seed: int, **overrides) -> GsoConfig:
    return replace(GsoConfig(rng_seed=seed), **overrides)
