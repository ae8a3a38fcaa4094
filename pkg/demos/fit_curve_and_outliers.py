"""Walkthrough: fitting the plane + cubic curve model and masking outliers.

The exemplar's palette is projected onto its best-fit plane, a cubic
v = p(u) is fit in plane coordinates, and the resulting 3D polyline
becomes the material's compact color model. Pixels farther than d_t = 25
from the polyline are outliers (background, secondary processes,
compression artifacts, or the polynomial's own boundary behavior).

Usage: python demos/fit_curve_and_outliers.py [output_dir]
"""

import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from rgbcurve import fit_curve, outlier_mask, quantize, render_overlay, serialize_model
from rgbcurve.synth import curve_image, random_reference_curve

out_dir = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_out")
out_dir.mkdir(parents=True, exist_ok=True)

plane, coeffs, domain = random_reference_curve(seed=23)
image = curve_image(224, 224, plane, coeffs, domain, seed=23, noise_sigma=2.5)

# Paint a foreign patch into the exemplar to stand in for background.
image[16:48, 16:48] = image[16:48, 16:48] * 0.0 + np.array([30.0, 90.0, 200.0])

palette = quantize(image)
model = fit_curve(palette)
print(f"palette PM = {model.planarity}")
print(f"cubic coefficients: {np.array2string(model.coefficients, precision=6)}")
print(f"sampled polyline: {model.sample_count} points, "
      f"arc length {model.arc_length:.1f} RGB units, "
      f"u domain [{model.u_domain[0]:.1f}, {model.u_domain[1]:.1f}]")

mask = outlier_mask(image, model, d_t=25.0)
print(f"outlier fraction at d_t=25: {100 * mask.outlier_fraction:.2f}% "
      "(the injected patch)")

document = serialize_model(model)
model_path = out_dir / "demo_model.json"
model_path.write_text(document)
print(f"wrote {model_path} ({len(document)} bytes, byte-stable)")

fig = plt.figure(figsize=(13, 4))

ax = fig.add_subplot(1, 3, 1)
ax.imshow(image.astype(np.uint8))
ax.set_title("exemplar with foreign patch")
ax.axis("off")

ax = fig.add_subplot(1, 3, 2, projection="3d")
c = palette.colors
ax.scatter(c[:, 0], c[:, 1], c[:, 2], s=5, c=np.clip(c / 255, 0, 1),
           label="palette")
s = model.samples
ax.plot(s[:, 0], s[:, 1], s[:, 2], "r-", lw=2, label="fitted cubic")
ax.set_xlabel("R"), ax.set_ylabel("G"), ax.set_zlabel("B")
ax.legend(fontsize=8)
ax.set_title("palette and fitted curve")

ax = fig.add_subplot(1, 3, 3)
overlay = render_overlay(image, mask.mask, (255.0, 0.0, 0.0))
ax.imshow(overlay.astype(np.uint8))
ax.set_title("outliers tinted red (distance >= 25)")
ax.axis("off")

fig.tight_layout()
target = out_dir / "fit_curve_and_outliers.png"
fig.savefig(target, dpi=110)
print(f"wrote {target}")
