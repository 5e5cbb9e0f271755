"""Exception hierarchy shared by all modules."""


class GeometryError(Exception):
    """Base class for every error raised by the toolkit."""


class ModelMismatchError(GeometryError, TypeError):
    """Points or lines belong to a different space model."""


class DegenerateSegmentError(GeometryError, ValueError):
    """A segment with equal endpoints cannot be extended."""


class DegeneratePairError(GeometryError, ValueError):
    """A line cannot join a boundary point to itself."""


class UnsupportedBoundaryError(GeometryError):
    """The model has no Gromov boundary support."""


class CapacityError(GeometryError):
    """A sample would exceed the configured cardinality cap."""

    def __init__(self, cap, needed=None):
        self.cap = cap
        self.needed = needed
        msg = f"sample would exceed the cardinality cap of {cap} points"
        if needed is not None:
            msg += f" (about {needed} needed)"
        super().__init__(msg)


class EmptyRegionError(GeometryError, ValueError):
    """A net was requested on an empty sample."""


class ConfigurationError(GeometryError, ValueError):
    """Missing or inconsistent configuration."""


class InsufficientSampleError(GeometryError, ValueError):
    """Too few points for the requested statistic."""


class DomainError(GeometryError, ValueError):
    """A parameter lies outside its admissible range."""


class FitError(GeometryError, ValueError):
    """A growth fit window holds too few samples."""


class AlignmentError(GeometryError, ValueError):
    """Two series share no common grid beyond the threshold."""


class GenerationDepthError(GeometryError, ValueError):
    """A flow time exceeds the depth the line family was generated for."""


class InvalidWeightError(GeometryError, ValueError):
    """A weight function violates positivity, symmetry, mass or moment."""


class DegenerateSubsetError(GeometryError, ValueError):
    """A boundary subset has fewer than two points."""


class BasepointError(GeometryError, ValueError):
    """A basepoint lies outside the required set."""
