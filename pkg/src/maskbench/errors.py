"""Exception types shared across the toolkit."""


class MaskbenchError(Exception):
    """Base class for all toolkit errors."""


class DegeneratePolygon(MaskbenchError):
    """Polygon has fewer than 3 vertices or zero area."""


class DimensionMismatch(MaskbenchError):
    """Two rasters that must share dimensions do not."""


class CorruptMaskFile(MaskbenchError):
    """Persisted mask violates the format's invariants."""


class ManifestParseError(MaskbenchError):
    """Dataset manifest is malformed."""


class MissingImage(MaskbenchError):
    """Manifest entry points at a file that does not exist."""


class UnknownImage(MaskbenchError):
    """image_id is not part of the loaded manifest."""


class InvariantViolation(MaskbenchError):
    """An annotation record update would break a store invariant."""


class StorageError(MaskbenchError):
    """Persisting or reading an artifact failed at the I/O level."""


class LockHeld(MaskbenchError):
    """Another writing session owns the dataset lock."""


class DuplicateResult(MaskbenchError):
    """More than one recognition result for the same image_id."""


class EmptyTruth(MaskbenchError):
    """Ground-truth text normalizes to the empty string."""
