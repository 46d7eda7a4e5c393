"""Planar geometry: distances, the six-sector split and hop counts."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial.distance import cdist

from .errors import ConfigError, OutOfRegionError

TWO_PI = 2.0 * math.pi
# Slack for points sitting on the enclosing circle after float round-off.
_RADIUS_EPS = 1e-9


class Point2D(NamedTuple):
    x: float
    y: float


def euclidean_distance(a, b) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


def pairwise_distances(points: np.ndarray) -> np.ndarray:
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    return cdist(points, points)


def distances_to(points: np.ndarray, target) -> np.ndarray:
    return np.hypot(points[:, 0] - target[0], points[:, 1] - target[1])


@dataclass(frozen=True)
class SectorPlan:
    center: Point2D
    radius: float
    sector_count: int
    sinks: Tuple[Point2D, ...]

    @property
    def wedge(self) -> float:
        return TWO_PI / self.sector_count


def sector_sink(center, radius: float, sector: int, sector_count: int) -> Point2D:
    """Sink on the wedge bisector, half way out to the circle."""
    theta = (sector + 0.5) * TWO_PI / sector_count
    return Point2D(center[0] + 0.5 * radius * math.cos(theta), center[1] + 0.5 * radius * math.sin(theta))


def build_sector_plan(node_positions: Sequence, center=(0.0, 0.0), sector_count: int = 6) -> SectorPlan:
    if len(node_positions) == 0:
        raise ConfigError("cannot build a sector plan without nodes", field="node_count")
    if sector_count < 1:
        raise ConfigError("sector_count must be >= 1", field="sector_count")
    pts = np.asarray(node_positions, dtype=float).reshape(-1, 2)
    center = Point2D(float(center[0]), float(center[1]))
    radius = float(distances_to(pts, center).max())
    sinks = tuple(sector_sink(center, radius, s, sector_count) for s in range(sector_count))
    return SectorPlan(center=center, radius=radius, sector_count=sector_count, sinks=sinks)


def _angles(plan: SectorPlan, pts: np.ndarray) -> np.ndarray:
    dx = pts[:, 0] - plan.center[0]
    dy = pts[:, 1] - plan.center[1]
    theta = np.arctan2(dy, dx)
    theta = np.where(theta < 0, theta + TWO_PI, theta)
    # atan2(0, 0) is 0, so the center itself lands in sector 0
    return np.where(theta >= TWO_PI, 0.0, theta)


def assign_sectors(plan: SectorPlan, points) -> np.ndarray:
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    d = distances_to(pts, plan.center)
    if np.any(d > plan.radius * (1 + _RADIUS_EPS) + _RADIUS_EPS):
        raise OutOfRegionError("point lies outside the enclosing circle")
    theta = _angles(plan, pts)
    # wedges are (k*w, (k+1)*w]; a point on a boundary joins the lower index
    # and angle 0 belongs to sector 0
    idx = np.ceil(plan.sector_count * theta / TWO_PI).astype(int) - 1
    return np.clip(idx, 0, plan.sector_count - 1)


def assign_sector(plan: SectorPlan, p) -> int:
    return int(assign_sectors(plan, [p])[0])


def hop_counts(positions: np.ndarray, target, tx_range: float) -> np.ndarray:
    """BFS hop count from every node to ``target``; -1 marks unreachable.

    Nodes within ``tx_range`` of the target are one hop away; otherwise a path
    must relay through other nodes in ``positions`` with each link no longer
    than ``tx_range``.
    """
    pts = np.asarray(positions, dtype=float).reshape(-1, 2)
    n = len(pts)
    hops = np.full(n, -1, dtype=int)
    if n == 0:
        return hops
    frontier = distances_to(pts, target) <= tx_range
    hops[frontier] = 1
    if frontier.all() or not frontier.any():
        return hops
    adj = pairwise_distances(pts) <= tx_range
    level = 1
    while frontier.any():
        level += 1
        reached = adj[frontier].any(axis=0) & (hops < 0)
        hops[reached] = level
        frontier = reached
    return hops


def hop_count(source, target, alive_positions: Mapping, tx_range: float) -> Optional[int]:
    """Hop count for one node keyed ``source`` in ``alive_positions``.

    Returns None when the target cannot be reached.
    """
    ids = list(alive_positions)
    if source not in alive_positions:
        raise KeyError(source)
    hops = hop_counts(np.array([alive_positions[i] for i in ids], dtype=float), target, tx_range)
    h = int(hops[ids.index(source)])
    return None if h < 0 else h
