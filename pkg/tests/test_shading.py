"""Shading classifier and the Lambertian renderer that anchors it."""

import numpy as np
import pytest

from rgbcurve import (
    AMBIGUOUS,
    REFLECTANCE,
    SHADING,
    LambertianScene,
    classify_variation,
    fit_line_through_origin,
    quantize,
    synthesize_lambertian,
)
from rgbcurve.synth import random_lambertian_scene, smooth_normal_field


def cloud_with_v1(v1: float, v2: float = 99.5, center=(150.0, 140.0, 130.0)):
    """Six points whose covariance eigenvalue fractions hit (v1, v2) exactly.

    Axis-aligned +/- offsets give a diagonal covariance, so the variance
    fractions are set directly by the offset magnitudes.
    """
    lam = np.array([v1, v2 - v1, 100.0 - v2])
    offsets = np.sqrt(3.0 * lam)
    pts = [np.asarray(center) + s * offsets[i] * np.eye(3)[i]
           for i in range(3) for s in (+1.0, -1.0)]
    return np.asarray(pts)


def flat_normals(h=8, w=8):
    normals = np.zeros((h, w, 3))
    normals[..., 2] = 1.0
    return normals


class TestClassifyVariation:
    # labels for planarity values observed on real matte, flame-like, and
    # specular-contaminated patches
    @pytest.mark.parametrize("v1,v2,expected", [
        (99.54, 99.98, SHADING),      # matte egg-like surface
        (76.41, 98.86, REFLECTANCE),  # flame colors
        (91.28, 99.34, AMBIGUOUS),    # icy sorbet with specular highlights
    ])
    def test_reference_planarity_labels(self, v1, v2, expected):
        pts = cloud_with_v1(v1, v2)
        result = classify_variation(pts)
        assert result.pm.v1 == pytest.approx(v1, abs=1e-9)
        assert result.pm.v2 == pytest.approx(v2, abs=1e-9)
        assert result.label == expected

    def test_threshold_boundaries(self):
        # eigen roundoff perturbs constructed v1 by ~1e-13, so probe the
        # thresholds just either side rather than exactly on them
        assert classify_variation(cloud_with_v1(96.001)).label == SHADING
        assert classify_variation(cloud_with_v1(95.999)).label == AMBIGUOUS
        assert classify_variation(cloud_with_v1(89.001)).label == AMBIGUOUS
        assert classify_variation(cloud_with_v1(88.999, 99.0)).label == REFLECTANCE

    def test_threshold_overrides(self):
        pts = cloud_with_v1(93.0)
        assert classify_variation(pts).label == AMBIGUOUS
        assert classify_variation(pts, shading_v1_min=92.0).label == SHADING
        assert classify_variation(
            pts, shading_v1_min=98.0, reflectance_v1_max=95.0).label == REFLECTANCE
        with pytest.raises(ValueError):
            classify_variation(pts, shading_v1_min=80.0, reflectance_v1_max=90.0)

    def test_line_residual_is_reported(self):
        direction = np.array([0.8, 0.5, 0.3])
        pts = np.outer(np.linspace(50, 250, 24), direction)
        result = classify_variation(pts)
        assert result.label == SHADING
        assert result.line_residual == pytest.approx(0.0, abs=1e-9)


class TestSynthesizeLambertian:
    def test_uniform_scene(self):
        scene = LambertianScene(albedo=np.ones(3), flux=0.5,
                                light_direction=np.array([0.0, 0.0, 1.0]),
                                normal_field=flat_normals())
        img = synthesize_lambertian(scene)
        assert np.allclose(img, 127.5)

    def test_orthogonal_light_renders_black(self):
        scene = LambertianScene(albedo=np.array([0.9, 0.8, 0.7]), flux=1.0,
                                light_direction=np.array([1.0, 0.0, 0.0]),
                                normal_field=flat_normals())
        assert np.all(synthesize_lambertian(scene) == 0.0)

    def test_back_facing_clamped_to_zero(self):
        normals = flat_normals()
        normals[..., 2] = -1.0
        scene = LambertianScene(albedo=np.ones(3) * 0.5, flux=1.0,
                                light_direction=np.array([0.0, 0.0, 1.0]),
                                normal_field=normals)
        assert np.all(synthesize_lambertian(scene) == 0.0)

    def test_channel_proportionality(self):
        # without clamping, any two channels keep a constant ratio
        scene = random_lambertian_scene(48, 48, seed=5)
        img = synthesize_lambertian(scene)
        lit = img[..., 0] > 1.0
        ratio_gr = img[..., 1][lit] / img[..., 0][lit]
        ratio_br = img[..., 2][lit] / img[..., 0][lit]
        assert ratio_gr.max() - ratio_gr.min() <= 1e-6
        assert ratio_br.max() - ratio_br.min() <= 1e-6

    def test_flux_invariance_of_label(self):
        rng = np.random.default_rng(9)
        normals = smooth_normal_field(48, 48, rng)
        base = dict(albedo=np.array([0.9, 0.6, 0.3]),
                    light_direction=np.array([0.0, 0.0, 1.0]),
                    normal_field=normals)
        img_a = synthesize_lambertian(LambertianScene(flux=0.4, **base))
        img_b = synthesize_lambertian(LambertianScene(flux=0.8, **base))
        res_a = classify_variation(quantize(img_a).colors)
        res_b = classify_variation(quantize(img_b).colors)
        assert res_a.label == res_b.label == SHADING
        assert res_a.pm.v1 == pytest.approx(res_b.pm.v1, abs=1e-6)

    def test_renderer_recovers_albedo_direction(self):
        # the rendered pipeline is its own oracle: colors must sit on the
        # origin line through the albedo
        albedo = np.array([0.9, 0.6, 0.3])
        rng = np.random.default_rng(33)
        scene = LambertianScene(albedo=albedo, flux=0.9,
                                light_direction=np.array([0.0, 0.0, 1.0]),
                                normal_field=smooth_normal_field(96, 96, rng))
        img = synthesize_lambertian(scene)
        palette = quantize(img)
        result = classify_variation(palette.colors)
        assert result.label == SHADING
        assert result.pm.v1 >= 99.5
        line = fit_line_through_origin(palette.colors)
        expected = albedo / np.linalg.norm(albedo)
        angle = np.degrees(np.arccos(np.clip(line.direction @ expected, -1, 1)))
        assert angle <= 0.5
        assert line.rms_residual <= 2.0

    def test_two_albedo_mix_is_not_shading(self):
        # two origin lines 30 degrees apart cannot look one-dimensional
        a1 = np.array([0.95, 0.55, 0.25])
        d1 = a1 / np.linalg.norm(a1)
        w = np.cross(d1, np.cross([0.0, 0.0, 1.0], d1))
        w /= np.linalg.norm(w)
        d2 = np.cos(np.radians(30.0)) * d1 + np.sin(np.radians(30.0)) * w
        a2 = d2 / d2.max() * 0.9
        rng = np.random.default_rng(0)
        normals = smooth_normal_field(64, 64, rng)
        light = np.array([0.0, 0.0, 1.0])
        halves = [
            synthesize_lambertian(LambertianScene(
                albedo=a, flux=0.9, light_direction=light, normal_field=normals))
            for a in (a1, a2)
        ]
        mixed = np.concatenate(halves, axis=1)
        result = classify_variation(quantize(mixed).colors)
        assert result.label != SHADING

    def test_scene_validation(self):
        with pytest.raises(ValueError):
            LambertianScene(albedo=np.array([0.5, 0.5, 1.5]), flux=1.0,
                            light_direction=np.array([0.0, 0.0, 1.0]),
                            normal_field=flat_normals())
        with pytest.raises(ValueError):
            LambertianScene(albedo=np.ones(3) * 0.5, flux=0.0,
                            light_direction=np.array([0.0, 0.0, 1.0]),
                            normal_field=flat_normals())
        with pytest.raises(ValueError):
            LambertianScene(albedo=np.ones(3) * 0.5, flux=1.0,
                            light_direction=np.array([0.0, 0.0, 2.0]),
                            normal_field=flat_normals())
        with pytest.raises(ValueError):
            LambertianScene(albedo=np.ones(3) * 0.5, flux=1.0,
                            light_direction=np.array([0.0, 0.0, 1.0]),
                            normal_field=flat_normals() * 2.0)
