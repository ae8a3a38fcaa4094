"""Shading-change versus reflectance-change classification.

Under a distant point light, a diffusely reflecting uniform material puts
all of its image colors on a single line through the RGB origin: per pixel
each channel is the same shading factor scaled by that channel's albedo.
Color clouds that are strongly one-dimensional therefore read as shading
variation; clouds that need more dimensions read as reflectance variation.
The classifier thresholds the planarity measure's v1; a synthetic
Lambertian renderer provides the physics ground truth for tests.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import PlanarityMeasure, fit_line_through_origin, planarity_measure

__all__ = [
    "SHADING",
    "REFLECTANCE",
    "AMBIGUOUS",
    "VariationLabel",
    "LambertianScene",
    "classify_variation",
    "synthesize_lambertian",
]

SHADING = "shading"
REFLECTANCE = "reflectance"
AMBIGUOUS = "ambiguous"

# Fraction of variance the leading eigenvalue must capture to call a patch
# shading-only, and the ceiling below which it is clearly reflectance.
DEFAULT_SHADING_V1_MIN = 96.0
DEFAULT_REFLECTANCE_V1_MAX = 89.0


@dataclass(frozen=True)
class VariationLabel:
    """Classification of a patch's color variation."""

    label: str                 # SHADING, REFLECTANCE, or AMBIGUOUS
    pm: PlanarityMeasure
    line_residual: float       # RMS distance to the best origin line, diagnostic only


@dataclass(frozen=True)
class LambertianScene:
    """Inputs for the diffuse renderer: one albedo, one distant light."""

    albedo: np.ndarray          # (3,) per-channel reflectance in (0, 1]
    flux: float                 # light source flux density, > 0
    light_direction: np.ndarray  # (3,) unit vector toward the light
    normal_field: np.ndarray    # (H, W, 3) unit surface normals

    def __post_init__(self):
        albedo = np.asarray(self.albedo, dtype=np.float64).reshape(3)
        if np.any(albedo <= 0) or np.any(albedo > 1):
            raise ValueError("albedo channels must lie in (0, 1]")
        if self.flux <= 0:
            raise ValueError("flux must be positive")
        light = np.asarray(self.light_direction, dtype=np.float64).reshape(3)
        if abs(np.linalg.norm(light) - 1.0) > 1e-6:
            raise ValueError("light_direction must be a unit vector")
        normals = np.asarray(self.normal_field, dtype=np.float64)
        if normals.ndim != 3 or normals.shape[2] != 3:
            raise ValueError("normal_field must be (H, W, 3)")
        norms = np.sqrt((normals ** 2).sum(axis=2))
        if not np.allclose(norms, 1.0, atol=1e-6):
            raise ValueError("normal_field vectors must be unit length")
        object.__setattr__(self, "albedo", albedo)
        object.__setattr__(self, "light_direction", light)
        object.__setattr__(self, "normal_field", normals)


def classify_variation(points, shading_v1_min: float = DEFAULT_SHADING_V1_MIN,
                       reflectance_v1_max: float = DEFAULT_REFLECTANCE_V1_MAX,
                       ) -> VariationLabel:
    """Label a patch's colors as shading-, reflectance-driven, or ambiguous.

    The decision uses only the planarity measure's v1: at or above
    shading_v1_min the cloud is effectively a single direction (shading);
    below reflectance_v1_max it clearly is not; in between the evidence is
    ambiguous and reported as such. The origin-line RMS residual rides
    along as a diagnostic but does not influence the label.
    """
    if not reflectance_v1_max < shading_v1_min:
        raise ValueError("reflectance_v1_max must be below shading_v1_min")
    pm = planarity_measure(points)
    line = fit_line_through_origin(points)
    if pm.v1 >= shading_v1_min:
        label = SHADING
    elif pm.v1 < reflectance_v1_max:
        label = REFLECTANCE
    else:
        label = AMBIGUOUS
    return VariationLabel(label=label, pm=pm, line_residual=line.rms_residual)


def synthesize_lambertian(scene: LambertianScene) -> np.ndarray:
    """Render a diffuse scene to an (H, W, 3) float image in [0, 255].

    Per pixel the incident shading is flux * max(0, normal . light) -- one
    scalar shared by all channels -- and each channel is that shading times
    the channel albedo, scaled to 8-bit range and clamped. Back-facing
    normals render black.
    """
    shading = scene.flux * np.maximum(scene.normal_field @ scene.light_direction, 0.0)
    return np.clip(shading[..., None] * scene.albedo * 255.0, 0.0, 255.0)
