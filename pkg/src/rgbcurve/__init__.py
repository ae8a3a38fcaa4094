"""Compact color-appearance models for single-process materials.

An image of a material whose look varies along one dominant cause (baking,
chlorophyll level, surface shading, light absorption) occupies a highly
reduced subspace of RGB: near a plane, and usually near a cubic curve on
that plane. This package quantizes an exemplar image to a palette,
measures the planarity of its colors, fits the plane + cubic curve model,
classifies shading- versus reflectance-driven variation, and uses a fitted
model to detect, segment, and score similar materials in probe images.
"""

from .curve import (
    CurveDistance,
    CurveModel,
    OutlierMask,
    deserialize_model,
    distance_to_curve,
    fit_curve,
    outlier_mask,
    serialize_model,
)
from .detect import (
    DetectionResult,
    RecognitionScore,
    Region,
    conformity_mask,
    coverage_length,
    detect,
    extract_regions,
    recognize,
)
from .errors import (
    ColorModelError,
    ConfigError,
    DecodeError,
    DegenerateInputError,
    IllConditionedError,
    MalformedDocumentError,
    MismatchedDimensionsError,
    UnsupportedMethodError,
    VersionMismatchError,
)
from .geometry import (
    EigenDecomposition,
    OriginLine,
    PlanarityMeasure,
    PlaneFrame,
    covariance_eigen,
    fit_line_through_origin,
    fit_plane,
    planarity_measure,
)
from .quantize import (
    METHODS,
    ErrorHistogram,
    Palette,
    error_histogram,
    palette_document,
    quantize,
)
from .raster import image_content_hash, load_image, render_overlay, save_image
from .shading import (
    AMBIGUOUS,
    REFLECTANCE,
    SHADING,
    LambertianScene,
    VariationLabel,
    classify_variation,
    synthesize_lambertian,
)

__version__ = "0.1.0"

__all__ = [
    "AMBIGUOUS",
    "ColorModelError",
    "ConfigError",
    "CurveDistance",
    "CurveModel",
    "DecodeError",
    "DegenerateInputError",
    "DetectionResult",
    "EigenDecomposition",
    "ErrorHistogram",
    "IllConditionedError",
    "LambertianScene",
    "METHODS",
    "MalformedDocumentError",
    "MismatchedDimensionsError",
    "OriginLine",
    "OutlierMask",
    "Palette",
    "PlanarityMeasure",
    "PlaneFrame",
    "REFLECTANCE",
    "RecognitionScore",
    "Region",
    "SHADING",
    "UnsupportedMethodError",
    "VariationLabel",
    "VersionMismatchError",
    "classify_variation",
    "conformity_mask",
    "covariance_eigen",
    "coverage_length",
    "deserialize_model",
    "detect",
    "distance_to_curve",
    "error_histogram",
    "extract_regions",
    "fit_curve",
    "fit_line_through_origin",
    "fit_plane",
    "image_content_hash",
    "load_image",
    "outlier_mask",
    "palette_document",
    "planarity_measure",
    "quantize",
    "recognize",
    "render_overlay",
    "save_image",
    "serialize_model",
    "synthesize_lambertian",
]
