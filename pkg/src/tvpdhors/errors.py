"""Exception types shared across the package."""


class TvpdError(Exception):
    """Base class for all scheme errors."""


class UnknownAlgorithm(TvpdError):
    """Hash algorithm identifier is not in the registry."""


class InvalidPlan(TvpdError):
    """Partition plan violates coprimality, size, or count requirements."""


class InfeasiblePlan(TvpdError):
    """No partition plan exists for the requested target."""


class UnknownPreset(TvpdError):
    """No published parameter set for the requested security level."""


class CounterExhausted(TvpdError):
    """Weak-message retry counter exceeded its bound."""


class OutsideTimeWindow(TvpdError):
    """Operation attempted outside the key's validity window."""


class KeyReuseWarning(UserWarning):
    """A one-time key was asked to sign more than once."""


class ParseError(TvpdError):
    """Serialized data could not be decoded.

    Carries the field name and byte offset where decoding failed.
    """

    def __init__(self, field: str, offset: int, reason: str = ""):
        self.field = field
        self.offset = offset
        msg = f"parse error in field {field!r} at byte {offset}"
        if reason:
            msg += f": {reason}"
        super().__init__(msg)


class VersionMismatch(TvpdError):
    """Serialized data uses an unsupported format version."""
