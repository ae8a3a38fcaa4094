"""Seeded synthetic scenes and images.

Generators for test oracles and demos: band-limited scalar fields, smooth
normal fields, random Lambertian scenes, in-cube reference curves, and
images whose colors are painted from a known curve. Everything is driven
by numpy Generators seeded explicitly, so outputs are reproducible.
"""

from __future__ import annotations

import numpy as np
from numpy.polynomial import polynomial as npoly

from .curve import CurveModel
from .geometry import PlaneFrame
from .shading import LambertianScene

__all__ = [
    "smooth_field",
    "smooth_normal_field",
    "random_lambertian_scene",
    "random_reference_curve",
    "reference_curve_model",
    "curve_image",
    "two_material_scene",
    "ramp_image",
]


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def smooth_field(height: int, width: int, rng, components: int = 4) -> np.ndarray:
    """Band-limited random scalar field rescaled to [0, 1]."""
    rng = _rng(rng)
    yy, xx = np.meshgrid(np.linspace(0.0, 1.0, height),
                         np.linspace(0.0, 1.0, width), indexing="ij")
    f = np.zeros((height, width))
    for k in range(components):
        fx, fy = rng.uniform(0.4, 2.4, size=2)
        phase = rng.uniform(0.0, 2.0 * np.pi)
        f += rng.uniform(0.5, 1.0) / (k + 1) * np.sin(
            2.0 * np.pi * (fx * xx + fy * yy) + phase
        )
    f -= f.min()
    peak = f.max()
    return f / peak if peak > 0 else np.zeros_like(f)


def smooth_normal_field(height: int, width: int, rng, relief: float = 8.0) -> np.ndarray:
    """Unit normals of a random smooth height field, mostly facing +z."""
    rng = _rng(rng)
    z = relief * smooth_field(height, width, rng)
    gy, gx = np.gradient(z)
    normals = np.dstack([-gx, -gy, np.ones_like(z)])
    normals /= np.sqrt((normals ** 2).sum(axis=2, keepdims=True))
    return normals


def random_lambertian_scene(height: int = 96, width: int = 96,
                            seed: int = 0) -> LambertianScene:
    """Random smooth surface under a distant near-overhead light."""
    rng = _rng(seed)
    albedo = rng.uniform(0.25, 1.0, size=3)
    flux = rng.uniform(0.6, 1.0)
    light = np.array([rng.normal(0.0, 0.15), rng.normal(0.0, 0.15), 1.0])
    light /= np.linalg.norm(light)
    normals = smooth_normal_field(height, width, rng)
    return LambertianScene(albedo=albedo, flux=float(flux),
                           light_direction=light, normal_field=normals)


def random_reference_curve(seed: int = 0, span: float = 340.0,
                           margin: float = 6.0):
    """Random plane frame + cubic coefficients staying inside the RGB cube.

    Returns (plane, coefficients, (u_min, u_max)). The u half-span shrinks
    until every sampled curve point keeps `margin` clearance from the cube
    faces, so generated sweeps are a few hundred RGB units of arc.
    """
    rng = _rng(seed)
    basis = np.linalg.qr(rng.normal(size=(3, 3)))[0]
    axis_u, axis_v = basis[:, 0], basis[:, 1]
    normal = np.cross(axis_u, axis_v)
    origin = 128.0 + rng.uniform(-12.0, 12.0, size=3)
    coefficients = np.array([
        0.0,
        rng.uniform(-0.25, 0.25),
        rng.uniform(-1.5e-3, 1.5e-3),
        rng.uniform(-1.2e-5, 1.2e-5),
    ])
    plane = PlaneFrame(origin=origin, axis_u=axis_u, axis_v=axis_v, normal=normal)
    half = span / 2.0
    for _ in range(40):
        grid = np.linspace(-half, half, 257)
        pts = plane.embed(grid, npoly.polyval(grid, coefficients))
        if pts.min() >= margin and pts.max() <= 255.0 - margin:
            break
        half *= 0.92
    return plane, coefficients, (-half, half)


def reference_curve_model(seed: int = 0, sample_count: int = 512, **kwargs) -> CurveModel:
    """CurveModel built directly from a random reference curve."""
    plane, coefficients, domain = random_reference_curve(seed, **kwargs)
    return CurveModel.from_parameters(plane, coefficients, domain, sample_count)


def curve_image(height: int, width: int, plane: PlaneFrame, coefficients,
                u_domain, seed: int = 0, noise_sigma: float = 2.5,
                u_coverage: tuple[float, float] = (0.0, 1.0)) -> np.ndarray:
    """Image whose colors sweep a known planar cubic, plus Gaussian noise.

    A smooth field drives the curve parameter across the image, so equal
    colors cluster spatially and conforming pixels form contiguous
    regions. u_coverage restricts the sweep to a sub-interval of the
    domain (0 = u_min, 1 = u_max).
    """
    rng = _rng(seed)
    u0, u1 = float(u_domain[0]), float(u_domain[1])
    c0, c1 = u_coverage
    lo = u0 + c0 * (u1 - u0)
    hi = u0 + c1 * (u1 - u0)
    u = lo + (hi - lo) * smooth_field(height, width, rng)
    img = plane.embed(u, npoly.polyval(u, np.asarray(coefficients, dtype=np.float64)))
    if noise_sigma > 0:
        img = img + rng.normal(0.0, noise_sigma, size=img.shape)
    return np.clip(img, 0.0, 255.0)


def two_material_scene(model: CurveModel, height: int = 160, width: int = 160,
                       seed: int = 0, offset: float = 60.0,
                       noise_sigma: float = 1.5):
    """Probe whose left half follows the model and right half a far line.

    The right half copies curve samples displaced `offset` along the plane
    normal; since the polyline lies in the plane, every displaced pixel is
    at least `offset` from the curve. Returns (image, truth) where truth
    marks the conforming left half.
    """
    rng = _rng(seed)
    u0, u1 = model.u_domain
    u = u0 + (u1 - u0) * smooth_field(height, width, rng)
    on_curve = model.plane.embed(u, npoly.polyval(u, model.coefficients))
    off_curve = on_curve + offset * model.plane.normal
    split = width // 2
    img = np.empty((height, width, 3))
    img[:, :split] = on_curve[:, :split]
    img[:, split:] = off_curve[:, split:]
    if noise_sigma > 0:
        img = img + rng.normal(0.0, noise_sigma, size=img.shape)
    truth = np.zeros((height, width), dtype=bool)
    truth[:, :split] = True
    return np.clip(img, 0.0, 255.0), truth


def ramp_image(color_a, color_b, height: int = 256, width: int = 256) -> np.ndarray:
    """Linear blend of two colors along the image diagonal."""
    a = np.asarray(color_a, dtype=np.float64).reshape(3)
    b = np.asarray(color_b, dtype=np.float64).reshape(3)
    yy, xx = np.meshgrid(np.arange(height), np.arange(width), indexing="ij")
    t = (xx + yy) / float(max(width - 1 + height - 1, 1))
    return a + t[..., None] * (b - a)
