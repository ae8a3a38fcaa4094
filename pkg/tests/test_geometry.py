"""Eigen-geometry: decomposition contracts, planarity, plane and line fits."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rgbcurve import (
    DegenerateInputError,
    covariance_eigen,
    fit_line_through_origin,
    fit_plane,
    planarity_measure,
)
from support import eigenvalues_by_characteristic_cubic, rotation_matrix

SQUARE = np.array([[0, 0, 0], [2, 0, 0], [0, 2, 0], [2, 2, 0]], dtype=float)


def rgb_clouds(min_size=3):
    return st.lists(
        st.tuples(*[st.floats(0, 255, allow_nan=False, width=32)] * 3),
        min_size=min_size, max_size=40,
    ).map(np.asarray)


class TestCovarianceEigen:
    def test_two_point_symmetric(self):
        pts = np.array([[127, 128, 128], [129, 128, 128]], dtype=float)
        eig = covariance_eigen(pts)
        assert np.allclose(eig.eigenvalues, [1.0, 0.0, 0.0], atol=1e-12)
        assert np.allclose(eig.eigenvectors[0], [1, 0, 0], atol=1e-12)
        assert np.allclose(eig.centroid, [128, 128, 128])

    def test_planar_square(self):
        eig = covariance_eigen(SQUARE)
        assert np.allclose(eig.eigenvalues, [1.0, 1.0, 0.0], atol=1e-12)
        assert np.allclose(np.abs(eig.eigenvectors[2]), [0, 0, 1], atol=1e-12)

    def test_seeded_cloud_matches_characteristic_cubic(self):
        # independent oracle: trigonometric roots of the characteristic cubic
        rng = np.random.default_rng(42)
        pts = rng.uniform(0.0, 20.0, size=(5, 3))
        centered = pts - pts.mean(axis=0)
        cov = centered.T @ centered / len(pts)
        expected = eigenvalues_by_characteristic_cubic(cov)
        eig = covariance_eigen(pts)
        assert np.all(np.abs(eig.eigenvalues - expected) <= 1e-9)

    def test_eigenvector_contracts(self):
        rng = np.random.default_rng(7)
        for seed in range(5):
            pts = rng.uniform(0, 255, size=(30, 3))
            eig = covariance_eigen(pts)
            vecs = eig.eigenvectors
            # orthonormal within 1e-9, descending eigenvalues, oriented
            assert np.allclose(vecs @ vecs.T, np.eye(3), atol=1e-9)
            assert eig.eigenvalues[0] >= eig.eigenvalues[1] >= eig.eigenvalues[2] >= 0
            for v in vecs:
                assert v[np.argmax(np.abs(v))] >= 0
            # covariance reconstructed from the decomposition
            centered = pts - pts.mean(axis=0)
            cov = centered.T @ centered / len(pts)
            rebuilt = vecs.T @ np.diag(eig.eigenvalues) @ vecs
            assert np.abs(rebuilt - cov).max() <= 1e-6 * np.abs(cov).max()

    def test_degenerate_inputs(self):
        with pytest.raises(DegenerateInputError):
            covariance_eigen(np.array([[1.0, 2.0, 3.0]]))
        with pytest.raises(DegenerateInputError):
            covariance_eigen(np.full((10, 3), 37.5))

    def test_rotation_equivariance(self):
        rng = np.random.default_rng(11)
        pts = rng.uniform(0, 255, size=(40, 3))
        base = covariance_eigen(pts)
        for seed in range(3):
            rot = rotation_matrix(np.random.default_rng(seed))
            rotated = covariance_eigen(pts @ rot.T)
            assert np.allclose(rotated.eigenvalues, base.eigenvalues, atol=1e-6)
            for i in range(3):
                # up to the sign convention, eigenvectors rotate with the data
                dot = abs(rotated.eigenvectors[i] @ (rot @ base.eigenvectors[i]))
                assert dot == pytest.approx(1.0, abs=1e-6)


class TestPlanarityMeasure:
    def test_collinear_is_perfectly_linear(self):
        pts = np.array([[t, t, t] for t in range(0, 260, 10)], dtype=float)
        pm = planarity_measure(pts)
        assert pm.rounded() == (100.0, 100.0)

    def test_coplanar_square(self):
        pm = planarity_measure(SQUARE)
        assert pm.v2 == pytest.approx(100.0, abs=1e-9)
        assert pm.v1 == pytest.approx(50.0, abs=1e-9)

    def test_translation_invariance(self):
        rng = np.random.default_rng(3)
        pts = rng.uniform(0, 200, size=(25, 3))
        pm = planarity_measure(pts)
        shifted = planarity_measure(pts + np.array([40.0, -25.0, 10.0]))
        assert shifted.v1 == pytest.approx(pm.v1, abs=1e-6)
        assert shifted.v2 == pytest.approx(pm.v2, abs=1e-6)

    @settings(max_examples=30, deadline=None)
    @given(rgb_clouds(), st.floats(0.05, 20.0))
    def test_scale_invariance(self, pts, scale):
        try:
            pm = planarity_measure(pts)
        except DegenerateInputError:
            return
        scaled = planarity_measure(pts * scale)
        assert scaled.v1 == pytest.approx(pm.v1, abs=1e-9)
        assert scaled.v2 == pytest.approx(pm.v2, abs=1e-9)
        assert 0.0 <= pm.v1 <= pm.v2 <= 100.0 + 1e-12

    def test_weighted_measure(self):
        # duplicating a point must equal doubling its weight
        pts = np.array([[0, 0, 0], [10, 0, 0], [0, 8, 0], [3, 3, 3.0]])
        dup = np.vstack([pts, pts[1:2]])
        weighted = planarity_measure(pts, weights=[1, 2, 1, 1])
        plain = planarity_measure(dup)
        assert weighted.v1 == pytest.approx(plain.v1, abs=1e-12)
        assert weighted.v2 == pytest.approx(plain.v2, abs=1e-12)


class TestFitPlane:
    def test_square_frame(self):
        frame = fit_plane(SQUARE)
        assert np.allclose(np.abs(frame.normal), [0, 0, 1], atol=1e-12)
        assert np.allclose(frame.origin, [1, 1, 0])

    def test_symmetric_plane_normal(self):
        rng = np.random.default_rng(5)
        u = rng.uniform(0, 255, size=40)
        v = rng.uniform(0, 255, size=40)
        pts = np.column_stack([u, v, 300.0 - u - v])
        frame = fit_plane(pts)
        assert np.allclose(np.abs(frame.normal), np.ones(3) / np.sqrt(3), atol=1e-9)

    def test_noisy_plane_residual(self):
        # oracle: residual measured against the generating plane itself
        rng = np.random.default_rng(17)
        x = rng.uniform(0, 200, size=400)
        y = rng.uniform(0, 200, size=400)
        z = 0.2 * x + 0.1 * y + 40.0 + rng.normal(0, 1.0, size=400)
        pts = np.column_stack([x, y, z])
        frame = fit_plane(pts)
        rms = np.sqrt(np.mean(frame.offsets(pts) ** 2))
        assert rms <= 1.5

    def test_residual_equals_sqrt_lambda3(self):
        rng = np.random.default_rng(23)
        pts = rng.uniform(0, 255, size=(60, 3))
        frame = fit_plane(pts)
        eig = covariance_eigen(pts)
        rms = np.sqrt(np.mean(frame.offsets(pts) ** 2))
        assert rms == pytest.approx(np.sqrt(eig.eigenvalues[2]), abs=1e-6)

    def test_right_handed_triad(self):
        rng = np.random.default_rng(29)
        pts = rng.uniform(0, 255, size=(50, 3))
        frame = fit_plane(pts)
        triad = np.stack([frame.axis_u, frame.axis_v, frame.normal])
        assert np.allclose(triad @ triad.T, np.eye(3), atol=1e-9)
        assert np.linalg.det(triad) == pytest.approx(1.0, abs=1e-9)

    def test_normal_translation_invariant(self):
        rng = np.random.default_rng(31)
        pts = rng.uniform(20, 230, size=(30, 3))
        a = fit_plane(pts)
        b = fit_plane(pts + np.array([11.0, -7.0, 3.0]))
        assert np.allclose(a.normal, b.normal, atol=1e-6)

    def test_collinear_rejected(self):
        pts = np.array([[t, 2 * t, 3 * t] for t in range(10)], dtype=float)
        with pytest.raises(DegenerateInputError):
            fit_plane(pts)


class TestFitLineThroughOrigin:
    def test_exact_ray(self):
        direction = np.array([0.8, 0.5, 0.33])
        pts = np.outer(np.arange(50, 251, 25, dtype=float), direction)
        line = fit_line_through_origin(pts)
        assert np.allclose(line.direction, direction / np.linalg.norm(direction),
                           atol=1e-12)
        assert line.rms_residual == pytest.approx(0.0, abs=1e-9)

    def test_repeated_point(self):
        pts = np.array([[100.0, 50.0, 25.0]] * 3)
        line = fit_line_through_origin(pts)
        expected = np.array([100.0, 50.0, 25.0])
        expected /= np.linalg.norm(expected)
        assert np.allclose(line.direction, expected, atol=1e-12)
        assert np.allclose(line.direction, [0.873, 0.436, 0.218], atol=5e-4)
        assert line.rms_residual == pytest.approx(0.0, abs=1e-9)

    def test_not_translation_invariant(self):
        # the origin constraint makes translation change the answer
        rng = np.random.default_rng(13)
        pts = np.outer(rng.uniform(50, 250, size=30), [0.7, 0.7, 0.14]) \
            + rng.normal(0, 1, size=(30, 3))
        a = fit_line_through_origin(pts)
        b = fit_line_through_origin(pts + np.array([0.0, 80.0, 0.0]))
        assert np.abs(a.direction - b.direction).max() > 1e-3

    def test_all_zero_rejected(self):
        with pytest.raises(DegenerateInputError):
            fit_line_through_origin(np.zeros((5, 3)))

    def test_residual_value(self):
        # offset points orthogonally from a known ray; RMS equals the offset
        d = np.array([1.0, 0.0, 0.0])
        pts = np.array([[t, 5.0, 0.0] for t in np.linspace(100, 300, 12)])
        pts = np.vstack([pts, [[t, -5.0, 0.0] for t in np.linspace(100, 300, 12)]])
        line = fit_line_through_origin(pts)
        assert np.allclose(line.direction, d, atol=5e-3)
        offsets = pts - np.outer(pts @ line.direction, line.direction)
        expected = np.sqrt(np.mean((offsets ** 2).sum(axis=1)))
        assert line.rms_residual == pytest.approx(expected, rel=1e-9)
