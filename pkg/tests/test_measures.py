import itertools
import math

import numpy as np
import pytest

from corrgeom import (
    CHORDAL_CAYLEY_MENGER,
    EXACT_SPHERICAL,
    HemisphereError,
    HullRankError,
    InvalidTriangleError,
    NonEmbeddableError,
    ProjectivePointSet,
    TooFewPointsError,
    cayley_menger_volume,
    diameter,
    max_simplex_volume,
    sandwich_check,
    sign_lift,
    spherical_convex_hull_area,
    spherical_triangle_area,
)
from corrgeom.testkit import girard_area, gram_simplex_volume

# Frozen oracle values (independently computed; see matching oracle tests).
EQUILATERAL_THIRD_PI_AREA = 0.5512855984325309  # 3*arccos(1/3) - pi
SQUARE_MAX_TRIANGLE = 0.6796738189082434
SQUARE_HULL_AREA = 1.3593476378164868


def square_config():
    """Four points at colatitude pi/4, longitudes 0, pi/2, pi, 3pi/2."""
    pts = []
    for lon in (0.0, math.pi / 2, math.pi, 3 * math.pi / 2):
        pts.append(
            (
                math.sin(math.pi / 4) * math.cos(lon),
                math.sin(math.pi / 4) * math.sin(lon),
                math.cos(math.pi / 4),
            )
        )
    return np.array(pts)


def cap_points(rng, n, radius, dim=3):
    """Random points on S^2 within an open cap of the given angular radius."""
    z = rng.uniform(math.cos(radius), 1.0, n)
    phi = rng.uniform(0.0, 2 * math.pi, n)
    sin_t = np.sqrt(1.0 - z * z)
    pts = np.column_stack([sin_t * np.cos(phi), sin_t * np.sin(phi), z])
    if dim > 3:
        pts = np.hstack([pts, np.zeros((n, dim - 3))])
    return pts


def angles_of(points):
    gram = np.clip(points @ points.T, -1, 1)
    ang = np.arccos(np.triu(gram) + np.triu(gram, 1).T)
    np.fill_diagonal(ang, 0.0)
    return ang


class TestDiameter:
    def test_zero_matrix(self):
        out = diameter(np.zeros((3, 3)))
        assert out.value == 0.0
        assert out.witness == (0, 1)

    def test_equal_entries(self):
        m = np.full((4, 4), math.pi / 2)
        np.fill_diagonal(m, 0.0)
        out = diameter(m)
        assert out.value == math.pi / 2
        assert out.witness == (0, 1)  # lexicographically smallest on ties

    def test_listed_entries(self):
        m = np.zeros((3, 3))
        m[0, 1] = m[1, 0] = math.pi / 6
        m[0, 2] = m[2, 0] = math.pi / 4
        m[1, 2] = m[2, 1] = math.pi / 3
        out = diameter(m)
        assert out.value == math.pi / 3
        assert out.witness == (1, 2)
        assert out.method == EXACT_SPHERICAL
        assert out.dimension == 1

    def test_too_few_points(self):
        with pytest.raises(TooFewPointsError):
            diameter(np.zeros((1, 1)))


class TestSphericalTriangleArea:
    def test_octant(self):
        assert spherical_triangle_area(math.pi / 2, math.pi / 2, math.pi / 2) == pytest.approx(
            math.pi / 2, abs=1e-12
        )

    def test_collinear_degenerate_is_exactly_zero(self):
        assert spherical_triangle_area(0.3, 0.4, 0.7) == 0.0
        assert spherical_triangle_area(0.7, 0.3, 0.4) == 0.0

    def test_equilateral_against_girard_oracle(self):
        got = spherical_triangle_area(math.pi / 3, math.pi / 3, math.pi / 3)
        oracle = 3 * math.acos(1.0 / 3.0) - math.pi  # Girard via vertex angles
        assert got == pytest.approx(oracle, abs=1e-12)
        assert got == pytest.approx(EQUILATERAL_THIRD_PI_AREA, abs=1e-12)

    def test_invalid_triangle_reports_margin(self):
        with pytest.raises(InvalidTriangleError, match="margin"):
            spherical_triangle_area(3.0, 0.1, math.pi / 2)

    def test_perimeter_cap(self):
        with pytest.raises(InvalidTriangleError, match="perimeter"):
            spherical_triangle_area(2.5, 2.5, 2.0)

    def test_argument_symmetry_exact(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            a, b = rng.uniform(0.3, 1.2, 2)
            c = rng.uniform(abs(a - b) + 0.05, min(a + b, 2 * math.pi - a - b) - 0.05)
            sides = (a, b, c)
            values = {
                spherical_triangle_area(*[sides[i] for i in perm])
                for perm in itertools.permutations(range(3))
            }
            assert len(values) == 1

    def test_lhuilier_vs_girard_sample(self):
        rng = np.random.default_rng(1)
        count = 0
        while count < 200:
            pts = rng.normal(size=(3, 3))
            pts /= np.linalg.norm(pts, axis=1, keepdims=True)
            d = angles_of(pts)
            a, b, c = d[0, 1], d[0, 2], d[1, 2]
            sides = sorted((a, b, c))
            if min(sides) < 0.05 or max(sides) > math.pi - 0.05:
                continue
            if sides[0] + sides[1] - sides[2] < 0.05:
                continue
            assert spherical_triangle_area(a, b, c) == pytest.approx(
                girard_area(a, b, c), abs=1e-10
            )
            count += 1


class TestCayleyMenger:
    def test_equilateral_unit_triangle(self):
        d = np.array([[0.0, 1.0, 1.0], [1.0, 0.0, 1.0], [1.0, 1.0, 0.0]])
        assert cayley_menger_volume(d) == pytest.approx(math.sqrt(3) / 4, abs=1e-12)

    def test_regular_unit_tetrahedron(self):
        d = np.ones((4, 4)) - np.eye(4)
        assert cayley_menger_volume(d) == pytest.approx(math.sqrt(2) / 12, abs=1e-12)

    def test_repeated_point_gives_zero(self):
        d = np.array([[0.0, 0.0, 1.0], [0.0, 0.0, 1.0], [1.0, 1.0, 0.0]])
        assert cayley_menger_volume(d) == 0.0

    def test_non_embeddable_raises(self):
        d = np.array([[0.0, 1.0, 3.0], [1.0, 0.0, 1.0], [3.0, 1.0, 0.0]])
        with pytest.raises(NonEmbeddableError):
            cayley_menger_volume(d)

    def test_matches_gram_oracle_on_random_embeddable_inputs(self):
        rng = np.random.default_rng(2)
        for dim in (2, 3, 4):
            for _ in range(25):
                pts = rng.normal(size=(dim + 1, dim))
                d = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=2)
                cm = cayley_menger_volume(d)
                gram = gram_simplex_volume(d)
                assert cm == pytest.approx(gram, abs=1e-9)


class TestMaxSimplexVolume:
    def test_single_triangle(self):
        pts = np.eye(3)
        d = angles_of(pts)
        out = max_simplex_volume(d, 2)
        assert out.value == spherical_triangle_area(d[0, 1], d[0, 2], d[1, 2])
        assert out.witness == (0, 1, 2)

    def test_identical_points_zero(self):
        out = max_simplex_volume(np.zeros((4, 4)), 2)
        assert out.value == 0.0

    def test_basis_plus_diagonal_witness(self):
        pts = np.vstack([np.eye(3), np.ones(3) / math.sqrt(3)])
        d = angles_of(pts)
        out = max_simplex_volume(d, 2)
        # brute-force oracle over all four triangles via the Girard route
        areas = {
            trio: girard_area(d[trio[0], trio[1]], d[trio[0], trio[2]], d[trio[1], trio[2]])
            for trio in itertools.combinations(range(4), 3)
        }
        best = max(areas, key=areas.get)
        assert out.witness == best == (0, 1, 2)
        assert out.value == pytest.approx(math.pi / 2, abs=1e-12)
        assert all(areas[t] < math.pi / 2 - 1e-6 for t in areas if t != (0, 1, 2))

    def test_dimension_one_equals_diameter_exactly(self):
        rng = np.random.default_rng(3)
        pts = rng.normal(size=(6, 4))
        pts /= np.linalg.norm(pts, axis=1, keepdims=True)
        d = angles_of(pts)
        a = diameter(d)
        b = max_simplex_volume(d, 1)
        assert a.value == b.value and a.witness == b.witness

    def test_tie_takes_lexicographically_smallest_witness(self):
        out = max_simplex_volume(angles_of(square_config()), 2)
        assert out.witness == (0, 1, 2)
        assert out.value == pytest.approx(SQUARE_MAX_TRIANGLE, abs=1e-12)

    def test_too_few_points(self):
        with pytest.raises(TooFewPointsError):
            max_simplex_volume(np.zeros((3, 3)), 3)

    def test_chordal_tetrahedron(self):
        pts = np.array(
            [[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]]
        ) / math.sqrt(3)
        out = max_simplex_volume(angles_of(pts), 3)
        assert out.method == CHORDAL_CAYLEY_MENGER
        assert out.witness == (0, 1, 2, 3)
        side = math.sqrt(8.0 / 3.0)  # chord between tetrahedron vertices
        assert out.value == pytest.approx(side**3 / (6 * math.sqrt(2)), abs=1e-12)

    def test_accepts_point_set_with_true_spherical_sides(self):
        pts = square_config()
        via_points = max_simplex_volume(ProjectivePointSet.from_vectors(pts), 2)
        via_matrix = max_simplex_volume(angles_of(pts), 2)
        assert via_points.value == via_matrix.value


class TestHull:
    def test_three_points_is_their_triangle(self):
        pts = np.eye(3)
        hull = spherical_convex_hull_area(pts)
        d = angles_of(pts)
        assert hull.area == pytest.approx(math.pi / 2, abs=1e-12)
        assert set(hull.vertices) == {0, 1, 2}
        assert hull.triangulation == ((0, 1, 2),) or hull.triangulation == ((0, 2, 1),)
        assert not hull.degenerate
        assert hull.interior == ()

    def test_great_circle_points_degenerate(self):
        angles = np.radians([-40.0, -10.0, 20.0, 50.0])
        pts = np.column_stack([np.sin(angles), np.zeros(4), np.cos(angles)])
        hull = spherical_convex_hull_area(pts)
        assert hull.degenerate
        assert hull.area == 0.0
        assert hull.triangulation == ()
        assert set(hull.vertices) == {0, 3}  # the two extremes

    def test_square_exceeds_best_triangle(self):
        hull = spherical_convex_hull_area(square_config())
        assert hull.area == pytest.approx(SQUARE_HULL_AREA, abs=1e-12)
        assert len(hull.vertices) == 4
        assert len(hull.triangulation) == 2
        assert hull.area > SQUARE_MAX_TRIANGLE + 1e-6

    def test_interior_point_discarded(self):
        pts = np.vstack([square_config(), [0.0, 0.0, 1.0]])
        hull = spherical_convex_hull_area(pts)
        assert hull.interior == (4,)
        assert 4 not in hull.vertices
        assert hull.area == pytest.approx(SQUARE_HULL_AREA, abs=1e-12)

    def test_too_few_points(self):
        with pytest.raises(TooFewPointsError):
            spherical_convex_hull_area(np.eye(3)[:2])

    def test_hemisphere_violation(self):
        pts = np.array([[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [-1.0, 0.0, 0.0]])
        lifted = sign_lift(pts)
        assert not lifted.in_open_hemisphere
        with pytest.raises(HemisphereError):
            spherical_convex_hull_area(lifted)

    def test_rank_above_three_rejected(self):
        with pytest.raises(HullRankError):
            spherical_convex_hull_area(np.eye(4))

    def test_rotation_invariance(self):
        rng = np.random.default_rng(4)
        pts = cap_points(rng, 7, math.radians(40.0))
        base = spherical_convex_hull_area(pts)
        for _ in range(5):
            q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
            if np.linalg.det(q) < 0:
                q[:, 0] = -q[:, 0]
            rotated = spherical_convex_hull_area(pts @ q.T)
            assert rotated.area == pytest.approx(base.area, abs=1e-9)
            assert set(rotated.vertices) == set(base.vertices)

    def test_permutation_invariance(self):
        rng = np.random.default_rng(5)
        pts = cap_points(rng, 8, math.radians(35.0))
        base = spherical_convex_hull_area(pts)
        for _ in range(5):
            perm = rng.permutation(8)
            shuffled = spherical_convex_hull_area(pts[perm])
            assert shuffled.area == pytest.approx(base.area, abs=1e-12)
            assert {int(perm[i]) for i in shuffled.vertices} == set(base.vertices)

    def test_area_is_sum_of_triangulation(self):
        rng = np.random.default_rng(6)
        pts = cap_points(rng, 9, math.radians(45.0))
        hull = spherical_convex_hull_area(pts)
        d = angles_of(pts)
        total = sum(
            spherical_triangle_area(d[a, b], d[a, c], d[b, c])
            for a, b, c in hull.triangulation
        )
        assert hull.area == pytest.approx(total, abs=1e-9)

    def test_monotonicity_under_added_point(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            pts = cap_points(rng, 6, math.radians(40.0))
            extra = cap_points(rng, 1, math.radians(40.0))
            bigger = np.vstack([pts, extra])
            d_small = diameter(angles_of(pts)).value
            d_big = diameter(angles_of(bigger)).value
            assert d_big >= d_small - 1e-12
            m_small = max_simplex_volume(angles_of(pts), 2).value
            m_big = max_simplex_volume(angles_of(bigger), 2).value
            assert m_big >= m_small - 1e-12
            h_small = spherical_convex_hull_area(pts).area
            h_big = spherical_convex_hull_area(bigger).area
            assert h_big >= h_small - 1e-9

    def test_centroid_failure_falls_back_to_witness_center(self):
        # Hemisphere-valid configuration whose centroid faces one point at
        # more than 90 degrees; the hull must still be produced.
        rng = np.random.default_rng(8)
        cluster = np.array([1.0, 0.0, 0.0]) + 0.05 * rng.normal(size=(9, 3))
        cluster /= np.linalg.norm(cluster, axis=1, keepdims=True)
        theta = math.radians(100.0)
        outlier = np.array([math.cos(theta), math.sin(theta), 0.0])
        pts = np.vstack([cluster, outlier])
        pset = ProjectivePointSet.from_vectors(pts)
        assert pset.in_open_hemisphere
        hull = spherical_convex_hull_area(pset)
        assert 9 in hull.vertices  # the outlier is extreme
        assert hull.area > 0.0


class TestSandwich:
    def test_three_points_ratio_one(self):
        rng = np.random.default_rng(9)
        pts = cap_points(rng, 3, math.radians(40.0))
        report = sandwich_check(ProjectivePointSet.from_vectors(pts))
        assert report.passed
        assert report.ratio == 1.0
        assert report.bound_factor == 1

    def test_square_ratio_exactly_two(self):
        report = sandwich_check(ProjectivePointSet.from_vectors(square_config()))
        assert report.passed
        assert report.bound_factor == 2
        assert report.ratio == pytest.approx(2.0, abs=1e-12)
        assert 1.0 < report.ratio <= 2.0

    def test_cluster_plus_outlier(self):
        rng = np.random.default_rng(10)
        cluster = cap_points(rng, 7, math.radians(8.0))
        outlier = np.array([[math.sin(0.8), 0.0, math.cos(0.8)]])
        pts = np.vstack([cluster, outlier])
        report = sandwich_check(ProjectivePointSet.from_vectors(pts))
        assert report.max_simplex.value <= report.hull.area + 1e-9

    def test_randomized_property(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            n = int(rng.integers(4, 11))
            pts = cap_points(rng, n, math.radians(40.0))
            report = sandwich_check(ProjectivePointSet.from_vectors(pts))
            assert report.lower_ok and report.upper_ok

    def test_only_dimension_two(self):
        with pytest.raises(ValueError):
            sandwich_check(np.eye(3), dimension=3)
