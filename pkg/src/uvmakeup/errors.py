"""Error and warning types shared across the package.

Every error carries a short machine-readable ``category`` so the CLI and the
HTTP service can map failures without string-matching messages.
"""


class UVMakeupError(Exception):
    """Base class for all package errors."""

    category = "internal"

    def __init__(self, message, detail=None):
        super().__init__(message)
        self.message = message
        self.detail = detail or {}


class GeometryError(UVMakeupError):
    """Face geometry could not be produced or does not fit the image."""

    category = "geometry"


class GeometryMismatchError(GeometryError):
    """Position map coordinates do not index into the given image."""

    category = "geometry"


class ModelNotInitializedError(UVMakeupError):
    """A network was used before its parameters were initialized or loaded."""

    category = "model"


class ModelMissingError(UVMakeupError):
    """A branch was enabled but no model is available for it."""

    category = "model"


class CheckpointError(UVMakeupError):
    """Checkpoint file unreadable, truncated, or wrong version/kind."""

    category = "checkpoint"


class ConfigError(UVMakeupError):
    """Bad or missing configuration value."""

    category = "config"


class DataError(UVMakeupError):
    """Dataset missing, empty, or malformed."""

    category = "data"


class PlacementError(DataError):
    """Sticker placement falls outside the usable face region."""

    category = "data"


class TrainingDivergedError(UVMakeupError):
    """Loss became NaN or infinite during training."""

    category = "training"


class RequestValidationError(UVMakeupError):
    """A transfer request violates its invariants."""

    category = "request"


class EmptyFaceWarning(UserWarning):
    """Rendering was asked to draw a position map with no valid quads."""


class EmptyRegionWarning(UserWarning):
    """A mask was empty at threshold; the operation degraded to a no-op."""


class VacuousClassWarning(UserWarning):
    """An IoU class was empty in both masks and scored as perfect agreement."""


class ReducedScaleWarning(UserWarning):
    """An image was too small for the full multi-scale pyramid."""
