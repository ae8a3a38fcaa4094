"""Eigen-geometry of RGB point clouds.

Covariance eigen-analysis, the planarity measure, best-fit planes, and
best-fit lines through the origin. These are the primitives the rest of
the library builds on. All functions are pure and operate on (N, 3)
float arrays of RGB samples; every derived direction vector follows a
deterministic sign convention so results are reproducible across runs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError

__all__ = [
    "EigenDecomposition",
    "PlanarityMeasure",
    "PlaneFrame",
    "OriginLine",
    "as_points",
    "covariance_eigen",
    "planarity_measure",
    "fit_plane",
    "fit_line_through_origin",
]

# Directions whose eigenvalue falls below this fraction of the leading
# eigenvalue carry no usable variance.
_RELATIVE_EIGENVALUE_FLOOR = 1e-9

# Total variance below this is indistinguishable from "all points equal".
_VARIANCE_FLOOR = 1e-18


def as_points(points) -> np.ndarray:
    """Coerce input to an (N, 3) float64 array of RGB samples."""
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim == 1 and pts.size == 3:
        pts = pts[None, :]
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise ValueError(f"expected (N, 3) RGB points, got shape {pts.shape}")
    if not np.all(np.isfinite(pts)):
        raise ValueError("RGB points must be finite")
    return pts


def _oriented(v: np.ndarray) -> np.ndarray:
    """Flip sign so the largest-magnitude component is nonnegative.

    Ties break on the first index attaining the maximum magnitude, which
    pins the orientation of eigenvectors bit-for-bit across runs.
    """
    idx = int(np.argmax(np.abs(v)))
    return -v if v[idx] < 0 else np.array(v, copy=True)


def _weights(weights, n: int) -> np.ndarray | None:
    if weights is None:
        return None
    w = np.asarray(weights, dtype=np.float64).reshape(-1)
    if w.shape[0] != n:
        raise ValueError(f"expected {n} weights, got {w.shape[0]}")
    if np.any(w < 0) or w.sum() <= 0:
        raise ValueError("weights must be nonnegative with positive sum")
    return w


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigen-structure of a point cloud's covariance.

    eigenvalues are sorted descending and clamped at zero; eigenvectors
    are the matching unit vectors stored as rows.
    """

    eigenvalues: np.ndarray   # (3,), descending, >= 0, RGB units squared
    eigenvectors: np.ndarray  # (3, 3), row i pairs with eigenvalues[i]
    centroid: np.ndarray      # (3,) mean of the inputs


@dataclass(frozen=True)
class PlanarityMeasure:
    """Cumulative variance percentages of the one and two largest eigenvalues."""

    v1: float
    v2: float

    def rounded(self) -> tuple[float, float]:
        """Display form: both percentages rounded to 2 decimals."""
        return (round(self.v1, 2), round(self.v2, 2))

    def __str__(self) -> str:
        r1, r2 = self.rounded()
        return f"[{r1:.2f}, {r2:.2f}]"


@dataclass(frozen=True)
class PlaneFrame:
    """Orthonormal frame of a best-fit plane in RGB space.

    axis_u and axis_v span the plane (leading eigen-directions); normal
    completes a right-handed triad.
    """

    origin: np.ndarray  # (3,) centroid of the fitted points
    axis_u: np.ndarray  # (3,) unit, leading in-plane direction
    axis_v: np.ndarray  # (3,) unit, second in-plane direction
    normal: np.ndarray  # (3,) unit, axis_u x axis_v

    def to_plane_coords(self, points) -> tuple[np.ndarray, np.ndarray]:
        """Project points onto the plane; returns (u, v) coordinate arrays."""
        d = as_points(points) - self.origin
        return d @ self.axis_u, d @ self.axis_v

    def embed(self, u, v) -> np.ndarray:
        """Map in-plane (u, v) coordinates back to 3D RGB points."""
        u = np.asarray(u, dtype=np.float64)
        v = np.asarray(v, dtype=np.float64)
        return (
            self.origin
            + u[..., None] * self.axis_u
            + v[..., None] * self.axis_v
        )

    def offsets(self, points) -> np.ndarray:
        """Signed orthogonal distance of each point from the plane."""
        return (as_points(points) - self.origin) @ self.normal


@dataclass(frozen=True)
class OriginLine:
    """Best-fit line through (0, 0, 0): the shading ray of a uniform material."""

    direction: np.ndarray  # (3,) unit vector, albedo ratios up to scale
    rms_residual: float    # RGB units, orthogonal RMS distance


def covariance_eigen(points, weights=None) -> EigenDecomposition:
    """Eigen-decompose the population covariance of an RGB point cloud.

    Covariance is normalized by N (or by the weight total when per-point
    weights are given). Eigenvalues come back sorted descending with the
    deterministic sign convention applied to each eigenvector.

    Raises DegenerateInputError for fewer than 2 points or when all
    points coincide.
    """
    pts = as_points(points)
    if pts.shape[0] < 2:
        raise DegenerateInputError("need at least 2 points")
    w = _weights(weights, pts.shape[0])
    if w is None:
        centroid = pts.mean(axis=0)
        centered = pts - centroid
        cov = centered.T @ centered / pts.shape[0]
    else:
        total = w.sum()
        centroid = (w[:, None] * pts).sum(axis=0) / total
        centered = pts - centroid
        cov = (w[:, None] * centered).T @ centered / total
    if np.trace(cov) <= _VARIANCE_FLOOR:
        raise DegenerateInputError("all points are identical; covariance is zero")
    vals, vecs = np.linalg.eigh(cov)
    vals = np.maximum(vals[::-1], 0.0)
    rows = np.stack([_oriented(vecs[:, 2 - i]) for i in range(3)])
    return EigenDecomposition(eigenvalues=vals, eigenvectors=rows, centroid=centroid)


def planarity_measure(points, weights=None) -> PlanarityMeasure:
    """Percentages of variance captured by the one and two largest eigenvalues.

    Also used for joint measures: pass the concatenation of several
    palettes to assess a shared subspace. Values are exact internally;
    round only for display via PlanarityMeasure.rounded().
    """
    eig = covariance_eigen(points, weights=weights)
    total = float(eig.eigenvalues.sum())
    v1 = 100.0 * float(eig.eigenvalues[0]) / total
    v2 = 100.0 * float(eig.eigenvalues[0] + eig.eigenvalues[1]) / total
    return PlanarityMeasure(v1=v1, v2=v2)


def fit_plane(points, weights=None) -> PlaneFrame:
    """Best-fit plane (least orthogonal squared distance) through a cloud.

    The frame origin is the centroid and the in-plane axes are the two
    leading eigenvectors. Collinear input has no defined plane and raises
    DegenerateInputError; model such data as an OriginLine instead.
    """
    eig = covariance_eigen(points, weights=weights)
    vals = eig.eigenvalues
    if vals[1] <= _RELATIVE_EIGENVALUE_FLOOR * vals[0]:
        raise DegenerateInputError("points are collinear; no plane is defined")
    axis_u = eig.eigenvectors[0]
    axis_v = eig.eigenvectors[1]
    normal = np.cross(axis_u, axis_v)
    normal /= np.linalg.norm(normal)
    return PlaneFrame(origin=eig.centroid, axis_u=axis_u, axis_v=axis_v, normal=normal)


def fit_line_through_origin(points) -> OriginLine:
    """Best-fit line constrained through the RGB origin.

    Maximizes the summed squared projections over unit directions, i.e.
    takes the leading eigenvector of the uncentered second-moment matrix.
    Centering is deliberately omitted: the line must pass through
    (0, 0, 0), which is what makes it a shading ray.
    """
    pts = as_points(points)
    if pts.shape[0] < 2:
        raise DegenerateInputError("need at least 2 points")
    moment = pts.T @ pts / pts.shape[0]
    if np.trace(moment) <= _VARIANCE_FLOOR:
        raise DegenerateInputError("all points are at the origin")
    _, vecs = np.linalg.eigh(moment)
    direction = _oriented(vecs[:, 2])
    sq = (pts * pts).sum(axis=1) - (pts @ direction) ** 2
    rms = float(np.sqrt(max(sq.mean(), 0.0)))
    return OriginLine(direction=direction, rms_residual=rms)
