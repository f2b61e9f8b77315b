"""Exception types shared across the package."""


class DiskspanError(Exception):
    """Base class for all diskspan errors."""


class FormatError(DiskspanError):
    """A text file does not conform to its declared format."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DuplicatePoint(DiskspanError):
    """Two input points share identical coordinates."""


class InvalidRadius(DiskspanError):
    """A disk radius is not strictly positive."""


class DegenerateDirection(DiskspanError):
    """Cone index requested for a zero-length direction."""


class InvalidEpsilon(DiskspanError):
    """Epsilon is outside (0, 1) or its reciprocal is not a power of two."""


class EqualKeys(DiskspanError):
    """agree() called on two identical shuffled keys."""


class QuantizationCollision(DiskspanError):
    """Two distinct points quantized to the same Morton key."""


class ResolutionExceeded(DiskspanError):
    """Point spread too large for the fixed-width key quantization."""


class NotUnitInstance(DiskspanError):
    """Unit-disk construction invoked on an instance with mixed radii."""


class NotNormalized(DiskspanError):
    """Operation requires a normalized instance (max radius 1, origin corner)."""


class EmptySet(DiskspanError):
    """Bichromatic closest pair requested with an empty side."""


class NotFarEdge(DiskspanError):
    """Bucket assignment requested for an edge inside the close range."""


class InvalidShift(DiskspanError):
    """Shift coordinates (alpha, beta) outside the legal integer ranges."""


class OracleTooLarge(DiskspanError):
    """Brute-force oracle invoked above its configured size cap."""


class NotSubgraph(DiskspanError):
    """Claimed spanner contains an edge absent from the host graph."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class SeparatorInvariantViolation(DiskspanError):
    """A separator-tree invariant failed; carries a witness."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class DegenerateAxis(DiskspanError):
    """Double-line separator requested along an axis with <2 distinct coords."""


class InductionOrderViolation(DiskspanError):
    """Augmented graph requested before its parent's boundary weights exist."""


class DisconnectedGraph(DiskspanError):
    """Diameter estimation on a disconnected graph without per-component mode."""
