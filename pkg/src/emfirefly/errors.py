class EmFireflyError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(EmFireflyError, ValueError):
    """Invalid configuration. ``field`` names the offending key when known."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field

    def to_dict(self):
        return {"error": "config", "field": self.field, "message": str(self)}


class DeadNodeError(EmFireflyError):
    pass


class OutOfRegionError(EmFireflyError, ValueError):
    pass


class NoCandidatesError(EmFireflyError):
    """A cluster has no alive, sink-reachable node to elect."""


class SweepError(EmFireflyError):
    def __init__(self, message, manifest=None):
        super().__init__(message)
        self.manifest = manifest or []
