"""Exception types shared across the library."""


class ColorModelError(Exception):
    """Base class for all library-specific errors."""


class DegenerateInputError(ColorModelError):
    """Input carries no usable variation (too few, identical, or collinear points)."""


class IllConditionedError(ColorModelError):
    """A least-squares system is too ill-conditioned to solve reliably."""


class UnsupportedMethodError(ColorModelError):
    """Unknown quantization method identifier."""


class MismatchedDimensionsError(ColorModelError):
    """Mask or assignment dimensions do not match the image."""


class MalformedDocumentError(ColorModelError):
    """A serialized document is missing fields or internally inconsistent."""


class VersionMismatchError(ColorModelError):
    """A serialized document declares an unsupported format version."""


class DecodeError(ColorModelError):
    """An input file could not be decoded as an 8-bit RGB image."""


class ConfigError(ColorModelError):
    """Invalid run configuration: bad parameter value or unknown key."""
