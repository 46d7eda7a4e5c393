"""Node state and first-order radio energy accounting.

Transmit cost is ``e_elec*bits + eps_amp*bits*d**2``, receive cost is
``e_elec*bits``. Sensing and processing energy are not modelled.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from .errors import ConfigError, DeadNodeError


@dataclass(frozen=True)
class RadioModel:
    e_elec: float = 50e-9  # J/bit
    eps_amp: float = 100e-12  # J/bit/m^2
    packet_bits: int = 4000
    hello_bits: int = 200

    def __post_init__(self):
        for name in ("e_elec", "eps_amp", "packet_bits", "hello_bits"):
            value = getattr(self, name)
            if not value > 0:
                raise ConfigError(f"radio.{name} must be > 0, got {value!r}", field=f"radio.{name}")

    @property
    def death_threshold(self) -> float:
        """Energy of one HELLO transmission at zero distance."""
        return self.e_elec * self.hello_bits


def tx_energy(bits, distance, radio: RadioModel):
    """Transmit cost. Works elementwise on numpy arrays."""
    return radio.e_elec * bits + radio.eps_amp * bits * np.square(distance)


def rx_energy(bits, radio: RadioModel):
    return radio.e_elec * bits


@dataclass
class NodeState:
    id: int
    position: Tuple[float, float]
    initial_energy: float
    consumed_energy: float = 0.0
    alive: bool = True
    sector: Optional[int] = None
    cumulative_tx_cost: float = 0.0

    @property
    def residual(self) -> float:
        return residual_energy(self)


def residual_energy(node: NodeState) -> float:
    """Remaining energy: initial minus cumulative consumption, floored at 0."""
    return max(node.initial_energy - node.consumed_energy, 0.0)


def _charge(node: NodeState, cost: float, radio: RadioModel, transmit: bool) -> float:
    if not node.alive:
        raise DeadNodeError(f"node {node.id} is dead")
    spent = min(cost, residual_energy(node))
    node.consumed_energy += spent
    if transmit:
        node.cumulative_tx_cost += spent
    if residual_energy(node) <= radio.death_threshold:
        node.alive = False
    return spent


def consume_tx(node: NodeState, bits: int, distance: float, radio: RadioModel) -> float:
    """Charge a transmission of ``bits`` over ``distance`` metres.

    Returns the energy actually drawn, which is the model cost unless the
    battery runs out first (consumption never exceeds the initial energy).
    """
    if distance < 0:
        raise ValueError("distance must be non-negative")
    if bits == 0 and node.alive:
        return 0.0
    return _charge(node, float(tx_energy(bits, distance, radio)), radio, transmit=True)


def consume_rx(node: NodeState, bits: int, radio: RadioModel) -> float:
    if bits == 0 and node.alive:
        return 0.0
    return _charge(node, float(rx_energy(bits, radio)), radio, transmit=False)


@dataclass
class EnergyLedger:
    """Vectorised energy state for a whole network (one slot per node)."""

    initial: np.ndarray
    radio: RadioModel
    consumed: np.ndarray = field(init=False)
    tx_cost: np.ndarray = field(init=False)
    alive: np.ndarray = field(init=False)

    def __post_init__(self):
        self.initial = np.asarray(self.initial, dtype=float)
        n = len(self.initial)
        self.consumed = np.zeros(n)
        self.tx_cost = np.zeros(n)
        self.alive = self.initial > self.radio.death_threshold

    @property
    def residual(self) -> np.ndarray:
        return np.maximum(self.initial - self.consumed, 0.0)

    def charge(self, idx, cost, transmit: bool) -> np.ndarray:
        """Draw ``cost`` from nodes ``idx``; dead nodes are skipped.

        ``idx`` must not contain duplicates. Returns the energy actually drawn
        per entry of ``idx``.
        """
        idx = np.asarray(idx, dtype=np.intp)
        cost = np.broadcast_to(np.asarray(cost, dtype=float), idx.shape)
        live = self.alive[idx]
        spent = np.where(live, np.minimum(cost, self.residual[idx]), 0.0)
        self.consumed[idx] += spent
        if transmit:
            self.tx_cost[idx] += spent
        dead = self.residual[idx] <= self.radio.death_threshold
        self.alive[idx] &= ~dead
        return spent

    def node(self, i: int, position=(0.0, 0.0), sector=None) -> NodeState:
        return NodeState(
            id=int(i),
            position=tuple(position),
            initial_energy=float(self.initial[i]),
            consumed_energy=float(self.consumed[i]),
            alive=bool(self.alive[i]),
            sector=sector,
            cumulative_tx_cost=float(self.tx_cost[i]),
        )
