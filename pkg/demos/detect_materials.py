"""Walkthrough: detecting a material in a probe from a single exemplar.

Detection is two gates. A probe pixel conforms when its color is within
d_t = 25 of the exemplar curve. A conforming region is accepted only when
its pixels spread over more than l_t = 150 RGB units of the curve's arc
(samples need more than l_s = 10 pixel votes to count) -- so a big blob of
one color that happens to sit near the curve still fails.

Usage: python demos/detect_materials.py [output_dir]
"""

import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from rgbcurve import detect, fit_curve, quantize, render_overlay
from rgbcurve.synth import curve_image, random_reference_curve, two_material_scene

out_dir = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_out")
out_dir.mkdir(parents=True, exist_ok=True)

# Fit the exemplar model.
plane, coeffs, domain = random_reference_curve(seed=3)
exemplar = curve_image(192, 192, plane, coeffs, domain, seed=3, noise_sigma=2.5)
model = fit_curve(quantize(exemplar))
print(f"exemplar model: arc length {model.arc_length:.1f}, PM {model.planarity}")

# Probe 1: half follows the exemplar's curve, half is a different material
# offset 60 RGB units away.
probe, truth = two_material_scene(model, height=192, width=192, seed=9)
result = detect(probe, model)  # d_t=25, l_s=10, l_t=150
print("two-material probe:")
for i, region in enumerate(result.regions):
    print(f"  region {i}: {region.pixel_count} px, covers "
          f"{region.coverage_length:.1f} of {model.arc_length:.1f} units "
          f"-> {'accepted' if region.accepted else 'rejected'}")
accepted = result.accepted_mask()
iou = (accepted & truth).sum() / (accepted | truth).sum()
print(f"  IoU against ground truth: {iou:.3f}")

# Probe 2: a single flat color close to the curve conforms pixel-wise but
# covers almost no arc, so the region gate rejects it.
flat = np.tile(model.samples[model.sample_count // 2], (160, 160, 1))
flat_result = detect(flat, model)
region = flat_result.regions[0]
print(f"flat near-curve probe: {region.pixel_count} px conform but cover "
      f"only {region.coverage_length:.1f} units -> "
      f"{'accepted' if region.accepted else 'rejected'}")

fig, axes = plt.subplots(1, 4, figsize=(14, 3.6))
axes[0].imshow(probe.astype(np.uint8))
axes[0].set_title("probe (left half matches)")
axes[1].imshow(result.conformity_mask, cmap="gray")
axes[1].set_title("conforming pixels (d_t=25)")
axes[2].imshow(accepted, cmap="gray")
axes[2].set_title("accepted regions (l_t=150)")
axes[3].imshow(render_overlay(probe, ~result.conformity_mask,
                              (255.0, 0.0, 0.0)).astype(np.uint8))
axes[3].set_title("outliers tinted red")
for ax in axes:
    ax.axis("off")

fig.tight_layout()
target = out_dir / "detect_materials.png"
fig.savefig(target, dpi=110)
print(f"wrote {target}")
