"""Shared exception types."""


class DiskFullError(RuntimeError):
    """Raised when an allocation asks for more blocks than are free."""


class BlockStateError(ValueError):
    """Raised on an illegal block state transition (used->used, unused->unused)."""


class ConfigError(ValueError):
    """Raised for unreadable or invalid run configuration."""


class TraceError(ValueError):
    """Raised for malformed or inconsistent workload traces."""
