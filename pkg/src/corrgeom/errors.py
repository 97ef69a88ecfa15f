"""Exception types shared across the package."""


class CorrGeomError(Exception):
    """Base class for all errors raised by this package."""


class IngestError(CorrGeomError):
    """Malformed CSV input (missing cells, bad numbers, broken tick column)."""


class DuplicateIdError(CorrGeomError):
    """Series labels collide."""


class EmptyOverlapError(CorrGeomError):
    """Series share no common tick range."""


class ZeroVarianceError(CorrGeomError):
    """A window is constant, so it has no direction on the sphere."""


class DimensionMismatchError(CorrGeomError):
    """Vector or matrix shapes are incompatible."""


class AngleDomainError(CorrGeomError, ValueError):
    """A correlation value lies outside [-1, 1]."""


class MetricViolationError(CorrGeomError):
    """A distance matrix fails the metric axioms beyond tolerance."""


class TooFewPointsError(CorrGeomError):
    """An operation needs more points than were supplied."""


class InvalidTriangleError(CorrGeomError):
    """Side lengths violate the spherical triangle inequalities."""


class NonEmbeddableError(CorrGeomError):
    """Pairwise distances admit no Euclidean embedding of the requested dimension."""


class HemisphereError(CorrGeomError):
    """Point set does not fit inside one open hemisphere, so its geodesic hull
    is undefined under the gnomonic construction."""


class HullRankError(CorrGeomError):
    """Hull points span more than three dimensions; they lie on no common
    2-sphere and have no two-dimensional hull area."""


class WindowTooLongError(CorrGeomError):
    """The summation window exceeds the series length."""
