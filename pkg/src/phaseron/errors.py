"""Exception hierarchy shared by every phaseron module."""


class PhaseronError(Exception):
    """Base class for all library errors."""


class InvalidGateError(PhaseronError, ValueError):
    """A gate references qubits that do not exist or is malformed."""


class CorruptedStateError(PhaseronError, ValueError):
    """An amplitude vector is not normalized."""


class DimensionMismatchError(PhaseronError, ValueError):
    pass


class CapacityError(PhaseronError, MemoryError):
    """Requested dense object would be too large."""


class ConfigError(PhaseronError, ValueError):
    """Invalid experiment or training configuration."""
