from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError

INTERFERENCE_MODES = ("off", "same-round-transmitters")


@dataclass(frozen=True)
class ChannelModel:
    """Deterministic inverse-power path loss with a 1 m near-field clamp."""

    tx_power: float = 0.1  # W
    path_loss_exponent: float = 2.0
    noise_floor: float = 1e-10  # W
    interference_mode: str = "off"

    def __post_init__(self):
        if not self.tx_power > 0:
            raise ConfigError("channel.tx_power must be > 0", field="channel.tx_power")
        if not self.noise_floor > 0:
            raise ConfigError("channel.noise_floor must be > 0", field="channel.noise_floor")
        if self.interference_mode not in INTERFERENCE_MODES:
            raise ConfigError(
                f"channel.interference_mode must be one of {INTERFERENCE_MODES}", field="channel.interference_mode"
            )

    def received_power(self, distance):
        d = np.maximum(np.asarray(distance, dtype=float), 1.0)
        return self.tx_power * d ** (-self.path_loss_exponent)


def compute_sinr(node, receiver, channel: ChannelModel, concurrent_tx=()) -> float:
    """SINR at ``receiver`` for a transmission from ``node`` (a position).

    ``concurrent_tx`` holds positions of other simultaneous transmitters and is
    ignored when interference is off.
    """
    signal = float(channel.received_power(np.hypot(node[0] - receiver[0], node[1] - receiver[1])))
    interference = 0.0
    if channel.interference_mode != "off":
        for p in concurrent_tx:
            interference += float(channel.received_power(np.hypot(p[0] - receiver[0], p[1] - receiver[1])))
    return signal / (channel.noise_floor + interference)


def sinr_at(positions: np.ndarray, receiver, channel: ChannelModel) -> np.ndarray:
    """SINR of every node in ``positions`` at ``receiver``.

    Under ``same-round-transmitters`` all nodes are taken to transmit at once,
    so each one sees the others as interference.
    """
    positions = np.asarray(positions, dtype=float).reshape(-1, 2)
    power = channel.received_power(np.hypot(positions[:, 0] - receiver[0], positions[:, 1] - receiver[1]))
    if channel.interference_mode == "off":
        return power / channel.noise_floor
    return power / (channel.noise_floor + (power.sum() - power))
