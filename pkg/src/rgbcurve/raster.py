"""Image decode/encode, overlays, and atomic artifact writes."""

from __future__ import annotations

import hashlib
import os
import tempfile
import warnings
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import DecodeError, MismatchedDimensionsError
from .quantize import as_image

__all__ = [
    "load_image",
    "save_image",
    "render_overlay",
    "image_content_hash",
    "atomic_write_text",
    "atomic_write_bytes",
]

_ALPHA_MODES = {"RGBA", "LA", "PA"}
_GRAY_MODES = {"L", "I", "I;16", "1"}


def load_image(path) -> np.ndarray:
    """Decode an image file to an (H, W, 3) float64 array in [0, 255].

    Grayscale inputs are expanded to RGB and alpha channels are discarded,
    each with a warning. Raises DecodeError for missing or undecodable
    files.
    """
    path = Path(path)
    try:
        with Image.open(path) as im:
            mode = im.mode
            has_alpha = mode in _ALPHA_MODES or (
                mode == "P" and "transparency" in im.info
            )
            if has_alpha:
                warnings.warn(f"{path.name}: alpha channel discarded")
            elif mode in _GRAY_MODES:
                warnings.warn(f"{path.name}: grayscale input expanded to RGB")
            rgb = im.convert("RGB")
            arr = np.asarray(rgb, dtype=np.float64)
    except FileNotFoundError as exc:
        raise DecodeError(f"cannot read {path}: file not found") from exc
    except (UnidentifiedImageError, OSError, ValueError) as exc:
        raise DecodeError(f"cannot decode {path}: {exc}") from exc
    return arr


def save_image(path, image) -> None:
    """Write an image as 8-bit PNG, atomically (temp file + rename)."""
    img = as_image(image)
    data = np.clip(np.rint(img), 0, 255).astype(np.uint8)
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".png")
    try:
        with os.fdopen(fd, "wb") as handle:
            Image.fromarray(data, mode="RGB").save(handle, format="PNG")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def render_overlay(image, mask, tint) -> np.ndarray:
    """Replace masked pixels with a flat tint color; others pass through."""
    img = as_image(image)
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != img.shape[:2]:
        raise MismatchedDimensionsError(
            f"mask {mask.shape} does not match image {img.shape[:2]}"
        )
    out = img.copy()
    out[mask] = np.asarray(tint, dtype=np.float64).reshape(3)
    return out


def image_content_hash(image) -> str:
    """SHA-256 of the 8-bit pixel content; stable across container formats."""
    img = as_image(image)
    data = np.clip(np.rint(img), 0, 255).astype(np.uint8)
    digest = hashlib.sha256()
    digest.update(f"{data.shape[0]}x{data.shape[1]}|".encode())
    digest.update(data.tobytes())
    return digest.hexdigest()


def atomic_write_text(path, text: str) -> None:
    atomic_write_bytes(path, text.encode("utf-8"))


def atomic_write_bytes(path, data: bytes) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent)
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
