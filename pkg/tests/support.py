"""Shared oracle helpers for the test suite.

Each oracle is an independent route to an expected value: a trigonometric
characteristic-polynomial root solver for eigenvalues, a dense-polyline
nearest-distance oracle, direct least-squares fits through numpy's
polynomial module, and a planar-cubic construction whose covariance
eigenframe provably coincides with its generating frame.
"""

from __future__ import annotations

import math

import numpy as np
from numpy.polynomial import polynomial as npoly

from rgbcurve.geometry import PlaneFrame


def eigenvalues_by_characteristic_cubic(cov: np.ndarray) -> np.ndarray:
    """Roots of det(C - x I) = 0 via the trigonometric cubic formula.

    Uses only scalar math on hand-expanded minors, so it shares nothing
    with the LAPACK eigensolver path it cross-checks.
    """
    c = np.asarray(cov, dtype=np.float64)
    tr = c[0, 0] + c[1, 1] + c[2, 2]
    minors = (
        c[1, 1] * c[2, 2] - c[1, 2] * c[2, 1]
        + c[0, 0] * c[2, 2] - c[0, 2] * c[2, 0]
        + c[0, 0] * c[1, 1] - c[0, 1] * c[1, 0]
    )
    det = (
        c[0, 0] * (c[1, 1] * c[2, 2] - c[1, 2] * c[2, 1])
        - c[0, 1] * (c[1, 0] * c[2, 2] - c[1, 2] * c[2, 0])
        + c[0, 2] * (c[1, 0] * c[2, 1] - c[1, 1] * c[2, 0])
    )
    # x^3 + b x^2 + cc x + d, depressed via x = t - b/3
    b, cc, d = -tr, minors, -det
    p = cc - b * b / 3.0
    q = 2.0 * b ** 3 / 27.0 - b * cc / 3.0 + d
    if p >= -1e-300:
        roots = np.full(3, -b / 3.0)
    else:
        m = 2.0 * math.sqrt(-p / 3.0)
        arg = max(-1.0, min(1.0, 3.0 * q / (p * m)))
        theta = math.acos(arg) / 3.0
        roots = np.array([
            m * math.cos(theta - 2.0 * math.pi * k / 3.0) - b / 3.0
            for k in range(3)
        ])
    return np.sort(roots)[::-1]


def dense_polyline_distances(model, queries: np.ndarray,
                             dense_count: int = 100_000) -> np.ndarray:
    """Nearest distance to a dense resampling of the model's curve.

    The polynomial is resampled at dense_count parameters over the model
    domain and queried through a KD-tree, a different engine than the
    production argmin path.
    """
    from scipy.spatial import cKDTree

    grid = np.linspace(model.u_domain[0], model.u_domain[1], dense_count)
    dense = model.plane.embed(grid, npoly.polyval(grid, model.coefficients))
    dist, _ = cKDTree(dense).query(np.asarray(queries, dtype=np.float64))
    return dist


def polyfit_rms(u: np.ndarray, v: np.ndarray, degree: int) -> float:
    """RMS residual of numpy's own least-squares polynomial fit."""
    coeffs = npoly.polyfit(u, v, degree)
    return float(np.sqrt(np.mean((v - npoly.polyval(u, coeffs)) ** 2)))


def random_frame(rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Random right-handed orthonormal triad."""
    basis = np.linalg.qr(rng.normal(size=(3, 3)))[0]
    u, v = basis[:, 0], basis[:, 1]
    return u, v, np.cross(u, v)


def aligned_planar_cubic(seed: int, n: int = 64):
    """Planar cubic whose generating frame equals its covariance eigenframe.

    With a symmetric u-grid, choosing a1 = -a3 * m4 / m2 zeroes Cov(u, v)
    and a0 = -a2 * m2 zeroes the v-mean, so the centroid sits at the
    generating origin and the eigen-directions coincide with the
    generating axes (u-variance is kept dominant). Only such palettes can
    reproduce their generating coefficients verbatim.

    Returns (points, (origin, axis_u, axis_v), coefficients).
    """
    rng = np.random.default_rng(seed)
    u = np.linspace(-120.0, 120.0, n)
    m2 = float(np.mean(u ** 2))
    m4 = float(np.mean(u ** 4))
    a3 = rng.uniform(0.4e-5, 1.6e-5) * rng.choice([-1.0, 1.0])
    a2 = rng.uniform(0.4e-3, 1.6e-3) * rng.choice([-1.0, 1.0])
    a1 = -a3 * m4 / m2
    a0 = -a2 * m2
    coefficients = np.array([a0, a1, a2, a3])
    v = npoly.polyval(u, coefficients)
    assert np.var(v) < 0.5 * np.var(u), "construction must keep u dominant"
    axis_u, axis_v, _ = random_frame(rng)
    origin = 128.0 + rng.uniform(-10.0, 10.0, size=3)
    points = origin + u[:, None] * axis_u + v[:, None] * axis_v
    return points, (origin, axis_u, axis_v), coefficients


def plane_frame(origin, axis_u, axis_v) -> PlaneFrame:
    axis_u = np.asarray(axis_u, dtype=np.float64)
    axis_v = np.asarray(axis_v, dtype=np.float64)
    return PlaneFrame(origin=np.asarray(origin, dtype=np.float64),
                      axis_u=axis_u, axis_v=axis_v,
                      normal=np.cross(axis_u, axis_v))


def rotation_matrix(rng: np.random.Generator) -> np.ndarray:
    """Random proper rotation."""
    q = np.linalg.qr(rng.normal(size=(3, 3)))[0]
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q
