"""Joint correlation of time series via angular geometry on the sphere.

Sliding windows map each series to a unit vector; Pearson correlations are
cosines of angles between those vectors; the spread of the resulting point
cloud (diameter, best triangle area, geodesic hull area) measures how
phase-locked the set is, with minima over time marking locked states.
"""

from .correlation import (
    CorrelationMatrix,
    CovarianceMatrix,
    correlation_from_units,
    correlation_matrix,
    covariance_matrix,
    pearson_rho,
    twisted_dot,
    windowed_covariance,
)
from .errors import (
    AngleDomainError,
    CorrGeomError,
    DimensionMismatchError,
    DuplicateIdError,
    EmptyOverlapError,
    HemisphereError,
    HullRankError,
    IngestError,
    InvalidTriangleError,
    MetricViolationError,
    NonEmbeddableError,
    TooFewPointsError,
    WindowTooLongError,
    ZeroVarianceError,
)
from .events import (
    KIND_DIAMETER,
    KIND_HULL,
    KIND_MAX_TRIANGLE,
    MEASURE_KINDS,
    ComparisonReport,
    Event,
    EventList,
    MeasureSeries,
    compare_event_sets,
    detect_minima,
    sliding_measures,
)
from .measures import (
    CHORDAL_CAYLEY_MENGER,
    EXACT_SPHERICAL,
    HullResult,
    MeasureResult,
    SandwichReport,
    cayley_menger_volume,
    diameter,
    embed_in_span,
    max_simplex_volume,
    sandwich_check,
    spherical_convex_hull_area,
    spherical_triangle_area,
)
from .metric import (
    CLASS_INTERMEDIATE,
    CLASS_MAX_NEGATIVE,
    CLASS_MAX_POSITIVE,
    CLASS_UNCORRELATED,
    PROJECTIVE,
    SPHERICAL,
    DistanceMatrix,
    MetricReport,
    ProjectivePointSet,
    classify_correlation,
    correlation_angle,
    distance_matrix,
    hemisphere_witness,
    projective_angle,
    sign_lift,
    verify_metric_axioms,
)
from .series import (
    CenteredUnitVector,
    TimeSeries,
    TimeSeriesSet,
    WindowSpec,
    align,
    read_timeseries_csv,
    window_vector,
    windowed_unit_matrix,
    write_timeseries_csv,
)

__version__ = "0.1.0"
