class TrainerError(Exception):
    """Base class for trainer errors."""


class ValidationError(TrainerError, ValueError):
    """Invalid training configuration value."""


class DatasetError(TrainerError):
    """Dataset directory is missing a class folder or a folder is empty."""


class ExportError(TrainerError):
    """Model export failed or the round-trip check exceeded tolerance."""
