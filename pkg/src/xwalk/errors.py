"""Exception hierarchy shared across the package.

CLI exit codes: ValidationError family -> 1, I/O (OSError) -> 2,
BackendLoadError -> 3.
"""


class XwalkError(Exception):
    """Base class for all package-specific errors."""


class ValidationError(XwalkError, ValueError):
    """Invalid value, policy, matrix, config entry, or malformed input data."""


class PolicyError(ValidationError):
    """Window policy violates n >= 1 or 0 <= t <= n."""


class OrderingError(ValidationError):
    """Observation pushed with a timestamp older than the previous one."""


class ConfigError(ValidationError):
    """Config file problem; message carries the offending line or key."""


class DecodeError(XwalkError):
    """Image bytes could not be decoded."""


class EndOfStream(XwalkError):
    """A replay backend ran out of manifest entries."""


class BackendLoadError(XwalkError):
    """Classifier backend could not be initialized (missing/malformed model)."""


class ClassificationError(XwalkError):
    """A single frame failed to classify; the caller may treat it as transient."""
