"""Exception types shared across the package."""


class PseudosieveError(Exception):
    """Base class for package-specific failures."""


class InvalidModulusError(PseudosieveError, ValueError):
    """A modulus is zero, out of range, or not pairwise coprime."""


class NotInvertibleError(PseudosieveError, ValueError):
    """Modular inverse requested for a non-unit."""


class EmptyWheelError(PseudosieveError, ValueError):
    """A wheel factor admits no residues, so the wheel enumerates nothing."""


class BlockOverflowError(PseudosieveError, RuntimeError):
    """An enumeration block exceeds its configured size cap."""


class InvalidConfigurationError(PseudosieveError, ValueError):
    """A filter or search configuration is inconsistent."""


class CheckpointCorruptError(PseudosieveError, RuntimeError):
    """A checkpoint file is unreadable or fails validation."""


class CheckpointMismatchError(PseudosieveError, RuntimeError):
    """A checkpoint belongs to a different search configuration."""


class InvalidRecordError(PseudosieveError, ValueError):
    """A table record is malformed or inconsistent with its index."""
