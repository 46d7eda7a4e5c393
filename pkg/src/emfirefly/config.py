"""Simulation configuration: defaults, JSON parsing and validation."""
from __future__ import annotations

import dataclasses
import hashlib
import json
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from .channel import ChannelModel
from .energy import RadioModel
from .errors import ConfigError
from .selection import AttractionParams, FitnessWeights

PROTOCOLS = ("em-firefly", "random-ch", "max-energy-ch")
LOAD_MODES = ("cumulative", "round")


@dataclass(frozen=True)
class SimulationConfig:
    node_count: int = 500
    # square deployment of side area_side unless area_radius selects a disk
    area_side: float = 100.0
    area_radius: Optional[float] = None
    center: Tuple[float, float] = (0.0, 0.0)
    tx_range: float = 250.0
    initial_energy: float = 200.0
    sector_count: int = 6
    weights: FitnessWeights = field(default_factory=FitnessWeights)
    attraction: AttractionParams = field(default_factory=AttractionParams)
    radio: RadioModel = field(default_factory=RadioModel)
    channel: ChannelModel = field(default_factory=ChannelModel)
    protocol: str = "em-firefly"
    horizon_rounds: int = 180
    duration_s: Optional[float] = None
    rounds_per_second: float = 1.0
    rng_seed: int = 0
    buffer_size: int = 150
    packets_per_round: int = 1
    load_mode: str = "cumulative"

    def __post_init__(self):
        def need(cond, name, msg):
            if not cond:
                raise ConfigError(f"{name}: {msg}", field=name)

        need(self.node_count >= 1, "node_count", "must be >= 1")
        need(self.area_side > 0, "area_side", "must be > 0")
        need(self.area_radius is None or self.area_radius > 0, "area_radius", "must be > 0")
        need(len(self.center) == 2 and all(math.isfinite(c) for c in self.center), "center", "must be two finite numbers")
        need(self.tx_range > 0, "tx_range", "must be > 0")
        need(self.initial_energy > 0, "initial_energy", "must be > 0")
        need(self.sector_count >= 1, "sector_count", "must be >= 1")
        need(self.protocol in PROTOCOLS, "protocol", f"must be one of {PROTOCOLS}")
        need(self.horizon_rounds >= 0, "horizon_rounds", "must be >= 0")
        need(self.duration_s is None or self.duration_s >= 0, "duration_s", "must be >= 0")
        need(self.rounds_per_second > 0, "rounds_per_second", "must be > 0")
        need(self.buffer_size >= 1, "buffer_size", "must be >= 1")
        need(self.packets_per_round >= 1, "packets_per_round", "must be >= 1")
        need(self.load_mode in LOAD_MODES, "load_mode", f"must be one of {LOAD_MODES}")

    @property
    def rounds(self) -> int:
        """Round horizon, derived from ``duration_s`` when that is set."""
        if self.duration_s is not None:
            return int(math.ceil(self.duration_s * self.rounds_per_second - 1e-9))
        return self.horizon_rounds

    def replace(self, **changes) -> "SimulationConfig":
        return dataclasses.replace(self, **changes)


_NESTED = {
    "attraction": AttractionParams,
    "radio": RadioModel,
    "channel": ChannelModel,
}
_INT_FIELDS = {"node_count", "sector_count", "horizon_rounds", "rng_seed", "buffer_size", "packets_per_round"}
_NESTED_INT = {("attraction", "queue_size"), ("radio", "packet_bits"), ("radio", "hello_bits")}


def _number(value, name, integer=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{name}: expected a number, got {value!r}", field=name)
    if integer:
        if isinstance(value, float) and not value.is_integer():
            raise ConfigError(f"{name}: expected an integer, got {value!r}", field=name)
        return int(value)
    if not math.isfinite(value):
        raise ConfigError(f"{name}: must be finite", field=name)
    return float(value)


def _parse_weights(value) -> FitnessWeights:
    if isinstance(value, dict):
        unknown = set(value) - {"w1", "w2", "w3", "w4"}
        if unknown:
            raise ConfigError(f"weights: unknown key(s) {sorted(unknown)}", field="weights")
        ws = [_number(value.get(k, d), f"weights.{k}") for k, d in zip(("w1", "w2", "w3", "w4"), FitnessWeights().as_tuple())]
    elif isinstance(value, (list, tuple)) and len(value) == 4:
        ws = [_number(v, "weights") for v in value]
    else:
        raise ConfigError("weights: expected a list of four numbers or a {w1..w4} object", field="weights")
    return FitnessWeights(*ws)


def _parse_nested(name, value):
    cls = _NESTED[name]
    if not isinstance(value, dict):
        raise ConfigError(f"{name}: expected an object", field=name)
    known = {f.name for f in dataclasses.fields(cls)}
    unknown = set(value) - known
    if unknown:
        key = sorted(unknown)[0]
        raise ConfigError(f"unknown key {name}.{key}", field=f"{name}.{key}")
    kwargs = {}
    for key, v in value.items():
        if name == "channel" and key == "interference_mode":
            kwargs[key] = v
        else:
            kwargs[key] = _number(v, f"{name}.{key}", integer=(name, key) in _NESTED_INT)
    return cls(**kwargs)


def parse_config(document) -> SimulationConfig:
    """Build a validated config from a JSON string or a decoded mapping.

    Missing keys take their defaults; unknown keys and out-of-range values
    raise :class:`ConfigError` naming the field.
    """
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document) if document.strip() else {}
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if document is None:
        document = {}
    if not isinstance(document, dict):
        raise ConfigError("config must be a JSON object")
    known = {f.name for f in dataclasses.fields(SimulationConfig)}
    kwargs: Dict[str, Any] = {}
    for key, value in document.items():
        if key not in known:
            raise ConfigError(f"unknown key {key!r}", field=key)
        if key == "weights":
            kwargs[key] = _parse_weights(value)
        elif key in _NESTED:
            kwargs[key] = _parse_nested(key, value)
        elif key == "protocol" or key == "load_mode":
            if not isinstance(value, str):
                raise ConfigError(f"{key}: expected a string", field=key)
            kwargs[key] = value
        elif key == "center":
            if not isinstance(value, (list, tuple)) or len(value) != 2:
                raise ConfigError("center: expected [x, y]", field="center")
            kwargs[key] = (_number(value[0], "center"), _number(value[1], "center"))
        elif key in ("area_radius", "duration_s") and value is None:
            kwargs[key] = None
        else:
            kwargs[key] = _number(value, key, integer=key in _INT_FIELDS)
    return SimulationConfig(**kwargs)


def defaulted_keys(document) -> List[str]:
    """Top-level config keys absent from ``document`` (so taken from defaults)."""
    if isinstance(document, (str, bytes)):
        document = json.loads(document) if document.strip() else {}
    document = document or {}
    return [f.name for f in dataclasses.fields(SimulationConfig) if f.name not in document]


def render(cfg: SimulationConfig) -> Dict[str, Any]:
    out: Dict[str, Any] = {}
    for f in dataclasses.fields(cfg):
        value = getattr(cfg, f.name)
        if isinstance(value, FitnessWeights):
            value = list(value.as_tuple())
        elif dataclasses.is_dataclass(value):
            value = dataclasses.asdict(value)
        elif isinstance(value, tuple):
            value = list(value)
        out[f.name] = value
    return out


def config_hash(cfg: SimulationConfig) -> str:
    blob = json.dumps(render(cfg), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def load_config(path) -> SimulationConfig:
    with open(path) as fh:
        return parse_config(fh.read())
