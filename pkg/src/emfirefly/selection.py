"""Firefly-based cluster-head election.

The sink ranks sector members by an energy-weighted attraction score, keeps
the best three in a queue, and elects the queue member with the highest
weighted fitness over normalised energy, SINR, distance and hop count.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Mapping, NamedTuple, Sequence

import numpy as np

from .errors import ConfigError, NoCandidatesError
from .geometry import pairwise_distances


@dataclass(frozen=True)
class AttractionParams:
    beta0: float = 1.0
    light_gamma: float = 1e-3
    alpha: float = 0.5
    queue_size: int = 3

    def __post_init__(self):
        if not self.beta0 > 0:
            raise ConfigError("attraction.beta0 must be > 0", field="attraction.beta0")
        if self.light_gamma < 0:
            raise ConfigError("attraction.light_gamma must be >= 0", field="attraction.light_gamma")
        if not 0 <= self.alpha <= 1:
            raise ConfigError("attraction.alpha must lie in [0, 1]", field="attraction.alpha")
        if self.queue_size < 1:
            raise ConfigError("attraction.queue_size must be >= 1", field="attraction.queue_size")


@dataclass(frozen=True)
class FitnessWeights:
    w1: float = 0.4  # residual energy
    w2: float = 0.2  # SINR
    w3: float = 0.2  # distance to sink
    w4: float = 0.2  # hop count

    def __post_init__(self):
        ws = self.as_tuple()
        if any(not 0 <= w <= 1 for w in ws):
            raise ConfigError(f"fitness weights must lie in [0, 1], got {ws}", field="weights")
        if abs(sum(ws) - 1.0) > 1e-9:
            raise ConfigError(f"fitness weights must sum to 1 (w1+w2+w3+w4=1), got sum {sum(ws)!r}", field="weights")

    def as_tuple(self):
        return (self.w1, self.w2, self.w3, self.w4)


class NodeFeatures(NamedTuple):
    residual_energy: float
    sinr: float
    distance: float
    hops: int


class Normalized(NamedTuple):
    energy: np.ndarray
    sinr: np.ndarray
    distance: np.ndarray
    hops: np.ndarray
    degenerate: frozenset


def attraction(r, params: AttractionParams):
    return params.beta0 * np.exp(-params.light_gamma * np.square(r))


def attraction_scores(positions: np.ndarray, residual: np.ndarray, light_gamma: float) -> np.ndarray:
    """Residual energy discounted by mean distance to the other members."""
    positions = np.asarray(positions, dtype=float).reshape(-1, 2)
    residual = np.asarray(residual, dtype=float)
    n = len(residual)
    if n == 1:
        return residual.copy()
    mean_d = pairwise_distances(positions).sum(axis=1) / (n - 1)
    return residual * np.exp(-light_gamma * mean_d**2)


def node_attraction_score(candidate: int, ids: Sequence[int], positions, residual, params: AttractionParams) -> float:
    ids = list(ids)
    scores = attraction_scores(np.asarray(positions, dtype=float), np.asarray(residual, dtype=float), params.light_gamma)
    return float(scores[ids.index(candidate)])


def firefly_step(x_i, x_j, params: AttractionParams, rng: np.random.Generator) -> np.ndarray:
    """Displacement of firefly ``i`` towards a brighter ``j`` plus uniform jitter."""
    x_i = np.asarray(x_i, dtype=float)
    x_j = np.asarray(x_j, dtype=float)
    r2 = float(np.sum((x_j - x_i) ** 2))
    pull = params.beta0 * math.exp(-params.light_gamma * r2) * (x_j - x_i)
    return pull + params.alpha * (rng.random(x_i.shape) - 0.5)


def top_k_queue(scores: Mapping[int, float], k: int) -> List[int]:
    if not scores:
        raise NoCandidatesError("no scored nodes in cluster")
    ranked = sorted(scores, key=lambda i: (-scores[i], i))
    return ranked[:k]


def _share(values: np.ndarray, name: str, degenerate: set) -> np.ndarray:
    total = values.sum()
    if total > 0:
        return values / total
    degenerate.add(name)
    return np.full(len(values), 1.0 / len(values))


def normalize_features(features: Sequence[NodeFeatures]) -> Normalized:
    """Each feature as a share of its cluster-wide sum.

    A family whose sum is zero falls back to the uniform share 1/n and is
    reported in ``degenerate``.
    """
    if len(features) == 0:
        raise NoCandidatesError("empty cluster")
    arr = np.asarray(features, dtype=float).reshape(-1, 4)
    bad: set = set()
    return Normalized(
        _share(arr[:, 0], "energy", bad),
        _share(arr[:, 1], "sinr", bad),
        _share(arr[:, 2], "distance", bad),
        _share(arr[:, 3], "hops", bad),
        frozenset(bad),
    )


def fitness(e, s, r, h, weights: FitnessWeights):
    w1, w2, w3, w4 = weights.as_tuple()
    return w1 * e + w2 * s + w3 * (1.0 - r) + w4 * (1.0 - h)


@dataclass
class Election:
    head: int
    queue: List[int]
    scores: Dict[int, float]
    fitness: Dict[int, float]


def elect(ids, positions, features: Sequence[NodeFeatures], weights: FitnessWeights, params: AttractionParams) -> Election:
    """Run one election over a cluster of alive, sink-reachable members.

    Features are normalised over the whole cluster; only the attraction
    queue competes on fitness. Ties go to the lower id.
    """
    ids = [int(i) for i in ids]
    if not ids:
        raise NoCandidatesError("no reachable alive node in cluster")
    if len(ids) == 1:
        return Election(ids[0], ids[:], {ids[0]: float(features[0][0])}, {ids[0]: 1.0})
    feats = np.asarray(features, dtype=float).reshape(-1, 4)
    raw = attraction_scores(positions, feats[:, 0], params.light_gamma)
    scores = dict(zip(ids, raw.tolist()))
    queue = top_k_queue(scores, params.queue_size)
    norm = normalize_features(feats)
    f_all = fitness(norm.energy, norm.sinr, norm.distance, norm.hops, weights)
    pos_of = {nid: k for k, nid in enumerate(ids)}
    fit = {nid: float(f_all[pos_of[nid]]) for nid in queue}
    head = min(queue, key=lambda i: (-fit[i], i))
    return Election(head, queue, scores, fit)


def elect_cluster_head(ids, positions, features, weights: FitnessWeights, params: AttractionParams) -> int:
    return elect(ids, positions, features, weights, params).head
