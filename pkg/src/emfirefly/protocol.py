"""Round-based EM-FIREFLY simulation engine and lifetime metrics.

One round, per sector: the sink broadcasts HELLO and every member answers,
the sink elects a cluster head and announces it, members send their data
packets to the head, and the head forwards one aggregated packet per frame to
the sink. Energy is drawn from the network ledger at every step.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .channel import sinr_at
from .config import SimulationConfig
from .energy import EnergyLedger, rx_energy, tx_energy
from .errors import ConfigError, NoCandidatesError
from .geometry import SectorPlan, assign_sectors, build_sector_plan, distances_to, hop_counts
from .selection import NodeFeatures, elect

log = logging.getLogger(__name__)

IDLE = -1


@dataclass
class ClusterInfoTable:
    """What a sink knows about its sector after the HELLO exchange."""

    sector: int
    ids: np.ndarray
    residual_energy: np.ndarray
    distance_to_sink: np.ndarray
    hop_count: np.ndarray  # -1 = unreachable
    sinr: np.ndarray

    def __len__(self):
        return len(self.ids)

    @property
    def reachable(self) -> np.ndarray:
        return self.hop_count >= 1

    def rows(self) -> Dict[int, dict]:
        return {
            int(i): {
                "residual_energy": float(e),
                "distance_to_sink": float(d),
                "hop_count": None if h < 0 else int(h),
                "sinr": float(s),
            }
            for i, e, d, h, s in zip(self.ids, self.residual_energy, self.distance_to_sink, self.hop_count, self.sinr)
        }


class Network:
    """Static geometry plus the mutable energy ledger of one run."""

    def __init__(self, positions, plan: SectorPlan, cfg: SimulationConfig):
        self.positions = np.asarray(positions, dtype=float).reshape(-1, 2)
        self.plan = plan
        self.cfg = cfg
        self.sectors = assign_sectors(plan, self.positions)
        self.ledger = EnergyLedger(np.full(len(self.positions), cfg.initial_energy), cfg.radio)
        self.sinks = np.array(plan.sinks, dtype=float)
        self.dist_to_sink = distances_to(self.positions, (0.0, 0.0))
        for s in range(plan.sector_count):
            m = self.sectors == s
            self.dist_to_sink[m] = distances_to(self.positions[m], plan.sinks[s])

    @classmethod
    def from_positions(cls, positions, cfg: SimulationConfig) -> "Network":
        plan = build_sector_plan(np.asarray(positions, dtype=float).reshape(-1, 2), cfg.center, cfg.sector_count)
        return cls(positions, plan, cfg)

    def __len__(self):
        return len(self.positions)

    @property
    def alive(self) -> np.ndarray:
        return self.ledger.alive

    def members(self, sector: int) -> np.ndarray:
        return np.flatnonzero((self.sectors == sector) & self.ledger.alive)

    def node(self, i: int):
        return self.ledger.node(i, tuple(self.positions[i]), int(self.sectors[i]))


def deploy(cfg: SimulationConfig, rng: np.random.Generator) -> np.ndarray:
    """Uniform random positions in the configured disk or square."""
    n = cfg.node_count
    cx, cy = cfg.center
    if cfg.area_radius is not None:
        r = cfg.area_radius * np.sqrt(rng.random(n))
        theta = 2 * np.pi * rng.random(n)
        return np.column_stack([cx + r * np.cos(theta), cy + r * np.sin(theta)])
    half = cfg.area_side / 2.0
    return np.column_stack([cx + rng.uniform(-half, half, n), cy + rng.uniform(-half, half, n)])


def hello_exchange(net: Network, sector: int) -> ClusterInfoTable:
    """Charge the HELLO broadcast and replies, then tabulate the survivors."""
    radio = net.cfg.radio
    sink = net.plan.sinks[sector]
    members = net.members(sector)
    if len(members):
        net.ledger.charge(members, rx_energy(radio.hello_bits, radio), transmit=False)
        members = members[net.ledger.alive[members]]
        net.ledger.charge(members, tx_energy(radio.hello_bits, net.dist_to_sink[members], radio), transmit=True)
        members = members[net.ledger.alive[members]]
    pos = net.positions[members]
    return ClusterInfoTable(
        sector=sector,
        ids=members,
        residual_energy=net.ledger.residual[members],
        distance_to_sink=net.dist_to_sink[members],
        hop_count=hop_counts(pos, sink, net.cfg.tx_range),
        sinr=sinr_at(pos, sink, net.cfg.channel),
    )


@dataclass
class SectorOutcome:
    head: int = IDLE
    queue: Tuple[int, ...] = ()
    delivered: bool = False
    dropped: int = 0


def choose_head(table: ClusterInfoTable, net: Network, protocol: str, rng: np.random.Generator) -> SectorOutcome:
    ok = table.reachable
    ids = table.ids[ok]
    if len(ids) == 0:
        raise NoCandidatesError(f"sector {table.sector} has no reachable alive node")
    if protocol == "em-firefly":
        feats = [
            NodeFeatures(e, s, d, h)
            for e, s, d, h in zip(
                table.residual_energy[ok], table.sinr[ok], table.distance_to_sink[ok], table.hop_count[ok]
            )
        ]
        res = elect(ids, net.positions[ids], feats, net.cfg.weights, net.cfg.attraction)
        return SectorOutcome(head=res.head, queue=tuple(res.queue))
    if protocol == "random-ch":
        return SectorOutcome(head=int(ids[rng.integers(len(ids))]))
    if protocol == "max-energy-ch":
        energy = table.residual_energy[ok]
        # ids are ascending, so argmax picks the lowest id on ties
        return SectorOutcome(head=int(ids[int(np.argmax(energy))]))
    raise ConfigError(f"unknown protocol {protocol!r}", field="protocol")


def collect_data(net: Network, table: ClusterInfoTable, outcome: SectorOutcome) -> None:
    """Announcement, member uplink, and the head's aggregated sink transfer."""
    cfg = net.cfg
    radio = cfg.radio
    frames = cfg.packets_per_round
    ledger = net.ledger
    head = outcome.head

    listeners = table.ids[ledger.alive[table.ids]]
    ledger.charge(listeners, rx_energy(radio.hello_bits, radio), transmit=False)

    senders = table.ids[(table.ids != head) & ledger.alive[table.ids]]
    if len(senders):
        d = np.hypot(*(net.positions[senders] - net.positions[head]).T)
        ledger.charge(senders, frames * tx_energy(radio.packet_bits, d, radio), transmit=True)
    accepted = min(len(senders), cfg.buffer_size)
    outcome.dropped = frames * (len(senders) - accepted)
    if not ledger.alive[head]:
        return
    if accepted:
        ledger.charge([head], frames * accepted * rx_energy(radio.packet_bits, radio), transmit=False)
    if not ledger.alive[head]:
        return
    cost = frames * tx_energy(radio.packet_bits, net.dist_to_sink[head], radio)
    spent = ledger.charge([head], cost, transmit=True)[0]
    outcome.delivered = bool(spent >= cost * (1 - 1e-12))


@dataclass
class RoundRecord:
    round: int
    protocol: str
    heads: Tuple[int, ...]
    queues: Tuple[Tuple[int, ...], ...]
    tx_cost: np.ndarray = field(repr=False)
    deaths: int
    alive: int
    max_relative_load: Optional[float]
    total_residual: float
    total_consumed: float
    delivered: bool
    dropped: int = 0

    @property
    def terminal(self) -> bool:
        return all(h == IDLE for h in self.heads)


def max_relative_load(net: Network, tx_cost: Optional[np.ndarray] = None) -> Optional[float]:
    """Largest transmit-cost-to-residual ratio among alive nodes.

    Uses cumulative transmit cost unless ``tx_cost`` is given. None when every
    node is dead.
    """
    alive = net.ledger.alive
    if not alive.any():
        return None
    num = net.ledger.tx_cost if tx_cost is None else tx_cost
    return float(np.max(num[alive] / net.ledger.residual[alive]))


def run_round(net: Network, round_index: int, protocol: str, rng: np.random.Generator) -> RoundRecord:
    ledger = net.ledger
    alive_before = int(ledger.alive.sum())
    tx_before = ledger.tx_cost.copy()
    heads: List[int] = []
    queues: List[Tuple[int, ...]] = []
    delivered = False
    dropped = 0
    for s in range(net.plan.sector_count):
        if len(net.members(s)) == 0:
            heads.append(IDLE)
            queues.append(())
            continue
        table = hello_exchange(net, s)
        try:
            outcome = choose_head(table, net, protocol, rng)
        except NoCandidatesError:
            heads.append(IDLE)
            queues.append(())
            continue
        collect_data(net, table, outcome)
        heads.append(outcome.head)
        queues.append(outcome.queue)
        delivered |= outcome.delivered
        dropped += outcome.dropped

    round_tx = ledger.tx_cost - tx_before
    alive_now = int(ledger.alive.sum())
    load = max_relative_load(net, round_tx if net.cfg.load_mode == "round" else None)
    return RoundRecord(
        round=round_index,
        protocol=protocol,
        heads=tuple(heads),
        queues=tuple(queues),
        tx_cost=round_tx,
        deaths=alive_before - alive_now,
        alive=alive_now,
        max_relative_load=load,
        total_residual=float(ledger.residual.sum()),
        total_consumed=float(ledger.consumed.sum()),
        delivered=delivered,
        dropped=dropped,
    )


@dataclass
class LifetimeReport:
    fnd: int
    hnd: int
    lnd: int
    fnd_censored: bool
    hnd_censored: bool
    lnd_censored: bool

    def as_dict(self):
        return dict(self.__dict__)


def network_lifetime(records: Sequence[RoundRecord], node_count: int) -> LifetimeReport:
    """First/half/last node-dead lifetimes in rounds.

    FND and HND are the last round before the first death and before half the
    nodes are dead. LND is the last round in which some head reached its sink.
    A value is censored when the event did not happen within the records.
    """
    last = records[-1].round if records else 0
    fnd = hnd = None
    dead = 0
    for rec in records:
        dead += rec.deaths
        if fnd is None and dead > 0:
            fnd = rec.round - 1
        if hnd is None and 2 * dead >= node_count:
            hnd = rec.round - 1
    delivering = [rec.round for rec in records if rec.delivered]
    lnd = delivering[-1] if delivering else 0
    still_up = bool(records) and records[-1].alive > 0 and records[-1].delivered
    return LifetimeReport(
        fnd=last if fnd is None else fnd,
        hnd=last if hnd is None else hnd,
        lnd=lnd,
        fnd_censored=fnd is None,
        hnd_censored=hnd is None,
        lnd_censored=still_up,
    )


@dataclass
class SimulationResult:
    config: SimulationConfig
    records: List[RoundRecord]
    lifetime: LifetimeReport
    network: Network

    @property
    def final_max_relative_load(self) -> Optional[float]:
        for rec in reversed(self.records):
            if rec.max_relative_load is not None:
                return rec.max_relative_load
        return None

    def summary(self) -> dict:
        return {
            "protocol": self.config.protocol,
            "rng_seed": self.config.rng_seed,
            "node_count": self.config.node_count,
            "rounds_executed": len(self.records),
            "horizon_rounds": self.config.rounds,
            "lifetime": self.lifetime.as_dict(),
            "final_max_relative_load": self.final_max_relative_load,
            "final_alive": self.records[-1].alive if self.records else len(self.network),
            "circle_radius": self.network.plan.radius,
        }


def streams(seed: int):
    """Independent generators for deployment and head selection."""
    deploy_ss, policy_ss = np.random.SeedSequence(seed).spawn(2)
    return np.random.default_rng(deploy_ss), np.random.default_rng(policy_ss)


def build_network(cfg: SimulationConfig) -> Tuple[Network, np.random.Generator]:
    deploy_rng, policy_rng = streams(cfg.rng_seed)
    return Network.from_positions(deploy(cfg, deploy_rng), cfg), policy_rng


def run_simulation(cfg: SimulationConfig, network: Optional[Network] = None) -> SimulationResult:
    """Run rounds until the horizon or until no sector can elect a head."""
    if network is None:
        network, rng = build_network(cfg)
    else:
        _, rng = streams(cfg.rng_seed)
    records: List[RoundRecord] = []
    for r in range(1, cfg.rounds + 1):
        rec = run_round(network, r, cfg.protocol, rng)
        records.append(rec)
        if rec.terminal or rec.alive == 0:
            log.debug("run stops at round %d: no sector can deliver", r)
            break
    return SimulationResult(cfg, records, network_lifetime(records, len(network)), network)
