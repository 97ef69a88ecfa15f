"""Independent oracles and a synthetic phase-locking generator.

Nothing in the core library imports this module; it exists to cross-check
the geometry by other routes (vertex-angle triangle areas, Gram-matrix
simplex volumes, Monte Carlo containment sampling) and to manufacture time
series with planted coupling episodes for end-to-end detection tests.

All randomness comes from numpy's default PCG64 generator seeded explicitly,
so every estimate and every synthetic dataset is reproducible within this
build for a fixed seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidTriangleError
from .measures import _edge_normals, _validate_sides, embed_in_span, spherical_convex_hull_area
from .metric import ProjectivePointSet
from .series import TimeSeries, TimeSeriesSet

TRIANGLE_TOL = 1e-9


def girard_area(a: float, b: float, c: float) -> float:
    """Spherical triangle area as the angle sum minus pi (Girard).

    Vertex angles come from the spherical law of cosines,

        cos A = (cos a - cos b cos c) / (sin b sin c),

    an entirely different route than L'Huilier's half-side tangents, which is
    what makes this a useful cross-check. Less accurate near degenerate
    triangles, where arccos is poorly conditioned.
    """
    sa, sb, sc, _ = _validate_sides(a, b, c)
    sides = (sa, sb, sc)
    if min(sides) <= TRIANGLE_TOL:
        return 0.0
    total = 0.0
    for i in range(3):
        opp = sides[i]
        s1, s2 = sides[(i + 1) % 3], sides[(i + 2) % 3]
        cos_angle = (math.cos(opp) - math.cos(s1) * math.cos(s2)) / (
            math.sin(s1) * math.sin(s2)
        )
        total += math.acos(min(1.0, max(-1.0, cos_angle)))
    return total - math.pi


def gram_simplex_volume(dists) -> float:
    """Euclidean simplex volume by explicit coordinate reconstruction.

    Builds the Gram matrix of edge vectors anchored at vertex 0, embeds via
    its eigendecomposition, and measures the parallelepiped through a QR
    factorization. Shares no code path with the Cayley-Menger determinant.
    """
    m = np.asarray(dists, dtype=float)
    npts = m.shape[0]
    d = npts - 1
    if d == 0:
        return 0.0
    sq = m * m
    gram = 0.5 * (sq[0, 1:][:, None] + sq[0, 1:][None, :] - sq[1:, 1:])
    vals, vecs = np.linalg.eigh(gram)
    vals = np.clip(vals, 0.0, None)
    coords = vecs * np.sqrt(vals)  # rows: edge vectors from vertex 0
    r = np.linalg.qr(coords.T, mode="r")
    diag = np.abs(np.diagonal(r))
    if diag.size < d:
        return 0.0
    return float(np.prod(diag)) / math.factorial(d)


@dataclass(frozen=True)
class OracleEstimate:
    """A sampled estimate with its binomial standard error."""

    value: float
    standard_error: float
    samples: int
    rng_seed: int

    def __post_init__(self):
        if self.standard_error < 0.0:
            raise ValueError("standard error must be nonnegative")

    def within(self, exact: float, sigmas: float = 3.0) -> bool:
        return abs(exact - self.value) <= sigmas * self.standard_error


def _orthonormal_frame(axis: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    seed = np.eye(3)[int(np.argmin(np.abs(axis)))]
    e1 = seed - (seed @ axis) * axis
    e1 /= np.linalg.norm(e1)
    return e1, np.cross(axis, e1)


def monte_carlo_hull_area(points, samples: int = 1_000_000, seed: int = 0) -> OracleEstimate:
    """Estimate the geodesic hull area by containment sampling.

    A sample point is inside when it lies on the interior side of every hull
    edge's great circle. Sampling is uniform over the smallest spherical cap
    (around the hull vertices' centroid) that contains the hull, falling back
    to the full sphere when the cap would reach a quarter turn; the estimate
    is the domain area times the hit fraction.
    """
    hull = spherical_convex_hull_area(points)
    if hull.degenerate:
        return OracleEstimate(0.0, 0.0, samples, seed)
    pset = points if isinstance(points, ProjectivePointSet) else ProjectivePointSet.from_vectors(np.asarray(points, dtype=float))
    coords = embed_in_span(pset.points)
    normals = _edge_normals(coords, hull.vertices)

    verts = coords[list(hull.vertices)]
    axis = verts.sum(axis=0)
    axis /= np.linalg.norm(axis)
    max_angle = float(np.arccos(np.clip(verts @ axis, -1.0, 1.0)).max()) + 1e-9

    rng = np.random.default_rng(seed)
    if max_angle < math.pi / 2:
        # Caps of radius < pi/2 are geodesically convex, so they contain the
        # whole hull, not just its vertices.
        z_min = math.cos(max_angle)
        domain_area = 2 * math.pi * (1.0 - z_min)
        z = rng.uniform(z_min, 1.0, samples)
        phi = rng.uniform(0.0, 2 * math.pi, samples)
        e1, e2 = _orthonormal_frame(axis)
        sin_t = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
        pts = (
            z[:, None] * axis[None, :]
            + (sin_t * np.cos(phi))[:, None] * e1[None, :]
            + (sin_t * np.sin(phi))[:, None] * e2[None, :]
        )
    else:
        domain_area = 4 * math.pi
        pts = rng.normal(size=(samples, 3))
        pts /= np.linalg.norm(pts, axis=1, keepdims=True)

    hits = int(((pts @ normals.T) >= 0.0).all(axis=1).sum())
    p = hits / samples
    value = domain_area * p
    stderr = domain_area * math.sqrt(max(p * (1.0 - p), 0.0) / samples)
    return OracleEstimate(value, stderr, samples, seed)


# ---------------------------------------------------------------------------
# Synthetic phase-locking generator
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SyntheticSpec:
    """Recipe for synthetic series with planted coupling episodes.

    Outside episodes every series is an independent slow sinusoid plus
    Gaussian noise. Inside an episode of strength lam each series becomes
    lam * shared_driver + (1 - lam) * own_process + noise, so lam = 1 with
    vanishing noise drives all pairwise correlations to +-1 and every spread
    measure to zero. Episodes are half-open [start, end) index ranges.
    """

    n_series: int
    length: int
    episodes: tuple[tuple[int, int, float], ...]
    noise_sigma: float
    rng_seed: int
    driver_period: float = 20.0
    own_period_range: tuple[float, float] = (60.0, 120.0)

    def __post_init__(self):
        if self.n_series < 1:
            raise ValueError("need at least one series")
        if self.length < 1:
            raise ValueError("length must be positive")
        if not self.noise_sigma > 0.0:
            raise ValueError("noise_sigma must be > 0")
        eps = tuple((int(s), int(e), float(lam)) for s, e, lam in self.episodes)
        prev_end = 0
        for s, e, lam in eps:
            if not 0 <= s < e <= self.length:
                raise ValueError(f"episode ({s}, {e}) out of range")
            if s < prev_end:
                raise ValueError("episodes must be sorted and non-overlapping")
            if not 0.0 <= lam <= 1.0:
                raise ValueError(f"coupling strength {lam} outside [0, 1]")
            prev_end = e
        object.__setattr__(self, "episodes", eps)


def simulate(spec: SyntheticSpec) -> TimeSeriesSet:
    """Generate the series set described by ``spec``.

    Deterministic for a fixed seed: the draw order (driver phase, per-series
    periods and phases, noise) never depends on the episode list, so a zero-
    strength episode reproduces the unperturbed output bit for bit.
    """
    rng = np.random.default_rng(spec.rng_seed)
    t = np.arange(spec.length, dtype=float)
    driver = np.sin(2 * math.pi * t / spec.driver_period + rng.uniform(0.0, 2 * math.pi))
    lo, hi = spec.own_period_range
    periods = rng.uniform(lo, hi, spec.n_series)
    phases = rng.uniform(0.0, 2 * math.pi, spec.n_series)
    noise = rng.normal(0.0, spec.noise_sigma, (spec.n_series, spec.length))

    series = []
    for i in range(spec.n_series):
        own = np.sin(2 * math.pi * t / periods[i] + phases[i])
        x = own + noise[i]
        for s, e, lam in spec.episodes:
            x[s:e] = lam * driver[s:e] + (1.0 - lam) * own[s:e] + noise[i, s:e]
        series.append(TimeSeries(f"s{i + 1}", 0, 1, x))
    return TimeSeriesSet(tuple(series))


BENCHMARK_WINDOW = 21
BENCHMARK_MIN_SEPARATION = 21
# Prominence is a quantity in each measure's own units (radians for the
# diameter, steradians for triangle areas), so the benchmark carries one
# threshold per measure rather than pretending the units compare.
BENCHMARK_MIN_PROMINENCE = {"diameter": 0.5, "max_triangle_area": 0.15}


def coupling_benchmark(seed: int, window: int = BENCHMARK_WINDOW) -> SyntheticSpec:
    """The canonical planted-episode benchmark: four series of length 500
    with two strength-0.9 episodes of three windows each."""
    span = 3 * window
    return SyntheticSpec(
        n_series=4,
        length=500,
        episodes=((120, 120 + span, 0.9), (340, 340 + span, 0.9)),
        noise_sigma=0.1,
        rng_seed=seed,
    )
