"""Planar cubic curve models of an exemplar's color distribution.

A model is a best-fit plane through the exemplar's palette plus a cubic
polynomial v = a0 + a1*u + a2*u^2 + a3*u^3 in the plane's (u, v)
coordinates, materialized as a dense polyline of 3D samples. Distance
queries, outlier masks, and a byte-stable serialization format live here.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.spatial import cKDTree

from .errors import (
    DegenerateInputError,
    IllConditionedError,
    MalformedDocumentError,
    VersionMismatchError,
)
from .geometry import PlanarityMeasure, PlaneFrame, as_points, fit_plane, planarity_measure
from .quantize import Palette, as_image

__all__ = [
    "MODEL_FORMAT",
    "MODEL_VERSION",
    "CurveModel",
    "CurveDistance",
    "OutlierMask",
    "fit_curve",
    "distance_to_curve",
    "outlier_mask",
    "serialize_model",
    "deserialize_model",
]

MODEL_FORMAT = "rgb-curve-model"
MODEL_VERSION = 1

DEFAULT_SAMPLE_COUNT = 512
DEFAULT_EXTRAPOLATION = 0.10
# Samples may leave the RGB cube by this much before being trimmed; matches
# the default conformity distance so trimming never removes reachable curve.
CUBE_MARGIN = 25.0

_CONDITION_LIMIT = 1e12
_ARC_CHECK_TOL = 1e-6


@dataclass(frozen=True)
class CurveModel:
    """Plane frame + cubic coefficients + sampled polyline.

    samples[i] lies exactly at plane.embed(u_i, p(u_i)) for evenly spaced
    u_i over u_domain; arc_length is the polyline length. Instances are
    immutable and safe to share across threads.
    """

    plane: PlaneFrame
    coefficients: np.ndarray       # (4,) a0..a3 for v = p(u)
    u_domain: tuple[float, float]
    samples: np.ndarray            # (S, 3)
    arc_length: float
    planarity: PlanarityMeasure | None = None
    provenance: dict | None = None

    def __post_init__(self):
        self.coefficients.setflags(write=False)
        self.samples.setflags(write=False)

    @property
    def sample_count(self) -> int:
        return len(self.samples)

    @cached_property
    def segment_lengths(self) -> np.ndarray:
        seg = np.sqrt((np.diff(self.samples, axis=0) ** 2).sum(axis=1))
        seg.setflags(write=False)
        return seg

    @property
    def sample_spacing(self) -> float:
        """Max adjacent-sample distance h; nearest-sample distance queries
        are within h/2 of the true curve distance."""
        return float(self.segment_lengths.max())

    @cached_property
    def _tree(self) -> cKDTree:
        return cKDTree(self.samples)

    def nearest_samples(self, points) -> tuple[np.ndarray, np.ndarray]:
        """Bulk query: (distances, nearest sample indices) for (..., 3) points."""
        pts = np.asarray(points, dtype=np.float64)
        dist, idx = self._tree.query(pts.reshape(-1, 3))
        return dist.reshape(pts.shape[:-1]), idx.reshape(pts.shape[:-1])

    @classmethod
    def from_parameters(cls, plane: PlaneFrame, coefficients, u_domain,
                        sample_count: int, planarity=None,
                        provenance=None) -> "CurveModel":
        """Build a model by sampling the polynomial; the one code path that
        generates polylines, shared by fitting and deserialization."""
        coeffs = np.asarray(coefficients, dtype=np.float64).reshape(-1)
        if coeffs.shape != (4,):
            raise ValueError("expected 4 polynomial coefficients")
        u0, u1 = float(u_domain[0]), float(u_domain[1])
        if not u0 < u1:
            raise ValueError("u_domain must satisfy u_min < u_max")
        if sample_count < 2:
            raise ValueError("sample_count must be >= 2")
        _check_frame(plane)
        grid = np.linspace(u0, u1, int(sample_count))
        samples = plane.embed(grid, npoly.polyval(grid, coeffs))
        arc = float(np.sqrt((np.diff(samples, axis=0) ** 2).sum(axis=1)).sum())
        return cls(plane=plane, coefficients=coeffs, u_domain=(u0, u1),
                   samples=samples, arc_length=arc, planarity=planarity,
                   provenance=provenance)


@dataclass(frozen=True)
class CurveDistance:
    """Nearest-sample query result."""

    distance: float
    nearest_sample_index: int
    nearest_point: np.ndarray  # (3,)


@dataclass(frozen=True)
class OutlierMask:
    """Pixels farther from the curve than the conformity distance."""

    mask: np.ndarray  # (H, W) bool, True = outlier
    outlier_fraction: float

    def __post_init__(self):
        self.mask.setflags(write=False)


def _check_frame(plane: PlaneFrame, tol: float = 1e-6):
    triad = np.stack([plane.axis_u, plane.axis_v, plane.normal])
    if not np.allclose(triad @ triad.T, np.eye(3), atol=tol):
        raise ValueError("plane frame is not orthonormal")


def _shift_poly(coeffs: np.ndarray, shift: float) -> np.ndarray:
    """Re-express sum c_k * (x + shift)^k in plain powers of x."""
    out = np.zeros(4)
    term = np.array([1.0])
    for ck in coeffs:
        out[: term.size] += ck * term
        term = npoly.polymul(term, [shift, 1.0])
    return out


def fit_curve(palette, extrapolation_fraction: float = DEFAULT_EXTRAPOLATION,
              sample_count: int = DEFAULT_SAMPLE_COUNT,
              weight_by_counts: bool = False, trim_to_cube: bool = True,
              cube_margin: float = CUBE_MARGIN,
              provenance: dict | None = None) -> CurveModel:
    """Fit the plane + cubic color model to a palette.

    Args:
        palette: a Palette, or directly an (N, 3) array of colors.
        extrapolation_fraction: fraction of the observed u-range added to
            each end of the sampling domain before trimming.
        weight_by_counts: weight palette entries by pixel counts in the
            plane fit and the polynomial fit (default: entries count once).
        trim_to_cube: drop end samples outside the RGB cube inflated by
            cube_margin, bounding extrapolation artifacts.

    The polynomial is solved by normal equations on a centered and scaled
    monomial basis, then re-expressed in plain plane coordinates.

    Raises DegenerateInputError for collinear palettes (model those as an
    OriginLine) and IllConditionedError when the normal equations exceed
    the condition limit.
    """
    if isinstance(palette, Palette):
        colors = palette.colors
        weights = palette.counts.astype(np.float64) if weight_by_counts else None
    else:
        colors = as_points(palette)
        weights = None
    if len(colors) < 4:
        raise DegenerateInputError("need at least 4 palette colors for a cubic")
    if not 0.0 <= extrapolation_fraction <= 1.0:
        raise ValueError("extrapolation_fraction must be in [0, 1]")

    plane = fit_plane(colors, weights=weights)
    u, v = plane.to_plane_coords(colors)
    if np.unique(u).size < 4:
        raise DegenerateInputError("need at least 4 distinct u-projections")

    w = np.ones_like(u) if weights is None else weights
    u_mean = float(np.average(u, weights=w))
    u_scale = float(np.abs(u - u_mean).max())
    t = (u - u_mean) / u_scale
    basis = np.vander(t, 4, increasing=True)
    gram = basis.T @ (basis * w[:, None])
    condition = float(np.linalg.cond(gram))
    if condition > _CONDITION_LIMIT:
        raise IllConditionedError(
            f"normal equations condition {condition:.3e} exceeds {_CONDITION_LIMIT:.0e}"
        )
    scaled = np.linalg.solve(gram, basis.T @ (w * v))
    centered = scaled / u_scale ** np.arange(4)
    coefficients = _shift_poly(centered, -u_mean)

    u_min, u_max = float(u.min()), float(u.max())
    ext = extrapolation_fraction * (u_max - u_min)
    grid = np.linspace(u_min - ext, u_max + ext, sample_count)
    points = plane.embed(grid, npoly.polyval(grid, coefficients))

    lo, hi = 0, sample_count - 1
    if trim_to_cube:
        inside = np.all((points >= -cube_margin) & (points <= 255.0 + cube_margin),
                        axis=1)
        lo, hi = _contiguous_run(inside, anchor=int(
            np.argmin(np.abs(grid - 0.5 * (u_min + u_max)))))
    if hi - lo + 1 < 2:
        lo, hi = 0, sample_count - 1

    return CurveModel.from_parameters(
        plane=plane,
        coefficients=coefficients,
        u_domain=(float(grid[lo]), float(grid[hi])),
        sample_count=hi - lo + 1,
        planarity=planarity_measure(colors, weights=weights),
        provenance=provenance,
    )


def _contiguous_run(inside: np.ndarray, anchor: int) -> tuple[int, int]:
    """Longest run of True containing anchor, else the longest run overall."""
    if inside.all():
        return 0, len(inside) - 1
    if not inside.any():
        return 0, len(inside) - 1
    edges = np.flatnonzero(np.diff(inside.astype(np.int8)))
    starts = np.r_[0, edges + 1]
    ends = np.r_[edges, len(inside) - 1]
    runs = [(s, e) for s, e in zip(starts, ends) if inside[s]]
    for s, e in runs:
        if s <= anchor <= e:
            return s, e
    return max(runs, key=lambda r: r[1] - r[0])


def distance_to_curve(query, model: CurveModel) -> CurveDistance:
    """Exact nearest-sample distance for a single RGB point.

    Ties resolve to the lowest sample index. The reported distance is
    within model.sample_spacing / 2 of the true curve distance.
    """
    q = np.asarray(query, dtype=np.float64).reshape(3)
    d = np.sqrt(((model.samples - q) ** 2).sum(axis=1))
    i = int(np.argmin(d))
    return CurveDistance(distance=float(d[i]), nearest_sample_index=i,
                         nearest_point=model.samples[i])


def outlier_mask(image, model: CurveModel, d_t: float = 25.0) -> OutlierMask:
    """Mark pixels at curve distance >= d_t; conformity is strictly below d_t.

    Runs on raw pixel values, not on a quantized image.
    """
    img = as_image(image)
    dist, _ = model.nearest_samples(img)
    mask = dist >= d_t
    return OutlierMask(mask=mask, outlier_fraction=float(mask.mean()))


def serialize_model(model: CurveModel) -> str:
    """Byte-stable JSON text for a model; identical models serialize identically."""
    doc = {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "plane": {
            "origin": list(model.plane.origin),
            "axisU": list(model.plane.axis_u),
            "axisV": list(model.plane.axis_v),
            "normal": list(model.plane.normal),
        },
        "coefficients": list(model.coefficients),
        "uDomain": list(model.u_domain),
        "sampleCount": model.sample_count,
        "arcLength": model.arc_length,
        "planarity": None if model.planarity is None
        else [model.planarity.v1, model.planarity.v2],
        "provenance": model.provenance,
    }
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _require(doc: dict, key: str):
    if key not in doc:
        raise MalformedDocumentError(f"missing field {key!r}")
    return doc[key]


def _vec3(value, name: str) -> np.ndarray:
    arr = np.asarray(value, dtype=np.float64).reshape(-1)
    if arr.shape != (3,) or not np.all(np.isfinite(arr)):
        raise MalformedDocumentError(f"field {name!r} is not a finite 3-vector")
    return arr


def deserialize_model(text: str) -> CurveModel:
    """Parse a model document, recompute its polyline, and cross-check it.

    The samples and arc length are regenerated from plane + coefficients +
    uDomain; a stored arcLength that disagrees by more than 1e-6 marks the
    document as corrupt.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedDocumentError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise MalformedDocumentError("document root must be an object")
    if _require(doc, "format") != MODEL_FORMAT:
        raise MalformedDocumentError(f"unknown format {doc['format']!r}")
    if _require(doc, "version") != MODEL_VERSION:
        raise VersionMismatchError(
            f"unsupported version {doc['version']!r}; expected {MODEL_VERSION}"
        )
    plane_doc = _require(doc, "plane")
    if not isinstance(plane_doc, dict):
        raise MalformedDocumentError("'plane' must be an object")
    plane = PlaneFrame(
        origin=_vec3(_require(plane_doc, "origin"), "plane.origin"),
        axis_u=_vec3(_require(plane_doc, "axisU"), "plane.axisU"),
        axis_v=_vec3(_require(plane_doc, "axisV"), "plane.axisV"),
        normal=_vec3(_require(plane_doc, "normal"), "plane.normal"),
    )
    coefficients = np.asarray(_require(doc, "coefficients"), dtype=np.float64)
    u_domain = np.asarray(_require(doc, "uDomain"), dtype=np.float64).reshape(-1)
    if u_domain.shape != (2,):
        raise MalformedDocumentError("'uDomain' must hold two numbers")
    sample_count = _require(doc, "sampleCount")
    stored_arc = float(_require(doc, "arcLength"))
    planarity_doc = _require(doc, "planarity")
    planarity = None
    if planarity_doc is not None:
        pm = np.asarray(planarity_doc, dtype=np.float64).reshape(-1)
        if pm.shape != (2,):
            raise MalformedDocumentError("'planarity' must hold two numbers")
        planarity = PlanarityMeasure(v1=float(pm[0]), v2=float(pm[1]))
    provenance = doc.get("provenance")
    try:
        model = CurveModel.from_parameters(
            plane=plane, coefficients=coefficients,
            u_domain=(float(u_domain[0]), float(u_domain[1])),
            sample_count=int(sample_count), planarity=planarity,
            provenance=provenance,
        )
    except (ValueError, TypeError) as exc:
        raise MalformedDocumentError(str(exc)) from exc
    if abs(model.arc_length - stored_arc) > _ARC_CHECK_TOL:
        raise MalformedDocumentError(
            f"stored arcLength {stored_arc!r} disagrees with recomputation "
            f"{model.arc_length!r}"
        )
    return model
