"""Exception types shared across the package."""


class TraceError(Exception):
    """Base class for all errors raised by this package."""


class ManifestError(TraceError):
    """Manifest missing, unparseable, or carrying an unknown schema version."""


class ArrayFormatError(TraceError):
    """Array file or its sidecar is malformed (bad header, payload size mismatch)."""


class ShapeMismatchError(TraceError):
    """Row/column counts disagree with the dataset contract."""


class NonFiniteError(TraceError):
    """A NaN or infinity was found where only finite values are allowed."""


class ParameterError(TraceError):
    """An operation parameter is out of its valid range (e.g. k, anchor index)."""
