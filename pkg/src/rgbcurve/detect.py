"""Exemplar-based material detection, segmentation, and recognition.

A probe pixel conforms when its distance to the exemplar curve is below
d_t. Conforming pixels are grouped into 8-connected regions; each region's
pixels vote for their nearest curve sample, and the region is accepted
when the arc length covered by well-voted samples exceeds l_t. Recognition
scores a whole probe the same way but with a vote threshold that adapts to
the number of conforming pixels.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy import ndimage

from .curve import CurveModel
from .quantize import as_image

__all__ = [
    "Region",
    "DetectionResult",
    "RecognitionScore",
    "conformity_mask",
    "extract_regions",
    "coverage_length",
    "detect",
    "recognize",
]

DEFAULT_D_T = 25.0
DEFAULT_L_S = 10
DEFAULT_L_T = 150.0
DEFAULT_KAPPA = 0.02
MIN_REGION_PIXELS = 50

_EIGHT_CONNECTED = np.ones((3, 3), dtype=int)


@dataclass(frozen=True)
class Region:
    """A spatially contiguous group of conforming probe pixels.

    pixels holds (x, y) = (column, row) coordinates. vote_histogram,
    coverage_length, and accepted are filled by the detection pipeline.
    """

    pixels: np.ndarray                    # (P, 2) int
    sample_indices: np.ndarray | None = None  # (P,) nearest curve sample per pixel
    vote_histogram: np.ndarray | None = None  # (S,) conforming votes per sample
    coverage_length: float | None = None
    accepted: bool | None = None

    def __post_init__(self):
        for arr in (self.pixels, self.sample_indices, self.vote_histogram):
            if arr is not None:
                arr.setflags(write=False)

    @property
    def pixel_count(self) -> int:
        return len(self.pixels)


@dataclass(frozen=True)
class DetectionResult:
    """Conformity mask plus scored regions for one probe image."""

    conformity_mask: np.ndarray  # (H, W) bool
    regions: tuple[Region, ...]
    parameters: dict

    def __post_init__(self):
        self.conformity_mask.setflags(write=False)

    def accepted_mask(self) -> np.ndarray:
        """Boolean image marking pixels of accepted regions."""
        out = np.zeros(self.conformity_mask.shape, dtype=bool)
        for region in self.regions:
            if region.accepted:
                out[region.pixels[:, 1], region.pixels[:, 0]] = True
        return out


@dataclass(frozen=True)
class RecognitionScore:
    """Whole-probe recognition: covered arc length under the adaptive threshold."""

    score: float          # RGB units, <= model arc_length
    adaptive_l_s: int
    conforming_count: int


def conformity_mask(image, model: CurveModel, d_t: float = DEFAULT_D_T) -> np.ndarray:
    """Pixels whose raw color is strictly closer than d_t to the curve."""
    img = as_image(image)
    dist, _ = model.nearest_samples(img)
    return dist < d_t


def extract_regions(mask: np.ndarray, sample_indices: np.ndarray | None = None,
                    min_region_pixels: int = MIN_REGION_PIXELS) -> list[Region]:
    """8-connected components of a boolean mask, small speckles dropped.

    When the per-pixel nearest-sample index grid is supplied, each region
    carries its pixels' indices so coverage can be computed later.
    """
    mask = np.asarray(mask, dtype=bool)
    if sample_indices is not None and np.shape(sample_indices) != mask.shape:
        raise ValueError("sample_indices shape must match the mask")
    labels, n_labels = ndimage.label(mask, structure=_EIGHT_CONNECTED)
    regions: list[Region] = []
    if n_labels == 0:
        return regions
    flat = labels.ravel()
    nonzero = np.flatnonzero(flat)
    order = nonzero[np.argsort(flat[nonzero], kind="stable")]
    boundaries = np.searchsorted(flat[order], np.arange(1, n_labels + 1))
    width = mask.shape[1]
    for k in range(n_labels):
        lo = boundaries[k]
        hi = boundaries[k + 1] if k + 1 < n_labels else len(order)
        member = order[lo:hi]
        if len(member) < min_region_pixels:
            continue
        pixels = np.column_stack([member % width, member // width]).astype(np.int64)
        indices = None
        if sample_indices is not None:
            indices = np.asarray(sample_indices).ravel()[member]
        regions.append(Region(pixels=pixels, sample_indices=indices))
    return regions


def _coverage_from_votes(votes: np.ndarray, model: CurveModel, l_s: int,
                         mode: str) -> float:
    kept = votes > l_s
    if mode == "both":
        seg_kept = kept[:-1] & kept[1:]
    elif mode == "either":
        seg_kept = kept[:-1] | kept[1:]
    else:
        raise ValueError(f"unknown coverage mode {mode!r}")
    return float(model.segment_lengths[seg_kept].sum())


def coverage_length(region: Region, model: CurveModel, l_s: int = DEFAULT_L_S,
                    mode: str = "both") -> float:
    """Arc length of the curve covered by a region's well-voted samples.

    Each pixel votes for its nearest sample; samples with strictly more
    than l_s votes are kept. By default a polyline segment counts only
    when both its endpoint samples are kept; mode="either" relaxes that to
    one endpoint.
    """
    if region.sample_indices is None:
        raise ValueError("region has no nearest-sample indices; "
                         "extract regions with the index grid attached")
    votes = np.bincount(region.sample_indices, minlength=model.sample_count)
    return _coverage_from_votes(votes, model, l_s, mode)


def detect(image, model: CurveModel, d_t: float = DEFAULT_D_T,
           l_s: int = DEFAULT_L_S, l_t: float = DEFAULT_L_T,
           min_region_pixels: int = MIN_REGION_PIXELS,
           coverage_mode: str = "both") -> DetectionResult:
    """Find regions of the probe that match the exemplar model.

    Pipeline: conformity mask -> 8-connected regions -> per-region vote
    histograms -> coverage length; a region is accepted when its coverage
    strictly exceeds l_t. Deterministic for identical inputs.
    """
    img = as_image(image)
    dist, idx = model.nearest_samples(img)
    mask = dist < d_t
    scored = []
    for region in extract_regions(mask, idx, min_region_pixels):
        votes = np.bincount(region.sample_indices, minlength=model.sample_count)
        coverage = _coverage_from_votes(votes, model, l_s, coverage_mode)
        scored.append(replace(region, vote_histogram=votes,
                              coverage_length=coverage,
                              accepted=bool(coverage > l_t)))
    return DetectionResult(
        conformity_mask=mask,
        regions=tuple(scored),
        parameters={"dT": float(d_t), "lS": int(l_s), "lT": float(l_t),
                    "minRegionPixels": int(min_region_pixels),
                    "coverageMode": coverage_mode},
    )


def recognize(image, model: CurveModel, kappa: float = DEFAULT_KAPPA,
              d_t: float = DEFAULT_D_T, l_s_floor: int = DEFAULT_L_S,
              coverage_mode: str = "both") -> RecognitionScore:
    """Score how well a probe's colors spread over the exemplar curve.

    Votes are pooled over all conforming pixels (no region split) and
    thresholded at an adaptive level that grows with the conforming pixel
    density, max(l_s_floor, round(kappa * n_conforming / sample_count)),
    so large blobs must cover proportionally more of the curve. The score
    is the covered arc length; disjoint color clusters that pile onto a
    short stretch of the curve score low no matter how many pixels agree.
    """
    img = as_image(image)
    dist, idx = model.nearest_samples(img)
    conforming = dist < d_t
    n = int(conforming.sum())
    adaptive = max(int(l_s_floor), int(round(kappa * n / model.sample_count)))
    if n == 0:
        return RecognitionScore(score=0.0, adaptive_l_s=adaptive, conforming_count=0)
    votes = np.bincount(idx[conforming].ravel(), minlength=model.sample_count)
    score = _coverage_from_votes(votes, model, adaptive, coverage_mode)
    return RecognitionScore(score=score, adaptive_l_s=adaptive, conforming_count=n)
