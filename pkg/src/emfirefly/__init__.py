"""EM-FIREFLY: firefly-based cluster-head election for sectorised sensor networks."""

__version__ = "0.1.0"

from .config import SimulationConfig, parse_config  # noqa: E402
from .protocol import run_simulation  # noqa: E402

__all__ = ["SimulationConfig", "parse_config", "run_simulation", "__version__"]
