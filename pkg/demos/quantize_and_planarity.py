"""Walkthrough: palette quantization and the planarity measure.

Builds a synthetic exemplar whose colors sweep a cubic curve in RGB,
reduces it to 256 colors with each of the four quantizers, and shows that
planarity is a property of the data, not of the quantization algorithm.

Usage: python demos/quantize_and_planarity.py [output_dir]
"""

import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from rgbcurve import METHODS, error_histogram, planarity_measure, quantize
from rgbcurve.synth import curve_image, random_reference_curve

out_dir = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_out")
out_dir.mkdir(parents=True, exist_ok=True)

# A 256x256 exemplar: one material, one process, colors near a planar curve.
plane, coeffs, domain = random_reference_curve(seed=11)
image = curve_image(256, 256, plane, coeffs, domain, seed=11, noise_sigma=2.5)
print(f"exemplar: {image.shape[1]}x{image.shape[0]}, "
      f"{len(np.unique(image.reshape(-1, 3), axis=0))} distinct colors")

# Quantize with every method. The planarity measure [v1, v2] reports the
# variance captured by the one and two leading eigen-directions: v2 near
# 100 means the palette sits on a plane in RGB.
palettes = {}
for method in METHODS:
    palette = quantize(image, method=method, palette_size=256)
    palettes[method] = palette
    pm = planarity_measure(palette.colors)
    hist = error_histogram(image, palette)
    print(f"  {method:17s} colors={len(palette.colors):3d}  PM={pm}  "
          f"mean reconstruction error={hist.mean_error:.2f}")

v2s = [planarity_measure(p.colors).v2 for p in palettes.values()]
print(f"max pairwise |dv2| across methods: "
      f"{max(abs(a - b) for a in v2s for b in v2s):.3f} percentage points")

# Joint planarity: materials that share a process also share a subspace.
# A second exemplar of the "same" material (same curve, different sweep)
# merged with the first stays planar.
sibling = curve_image(256, 256, plane, coeffs, domain, seed=77, noise_sigma=2.5)
joint = np.vstack([palettes["minimum-variance"].colors,
                   quantize(sibling).colors])
print(f"joint PM over both exemplars' palettes: {planarity_measure(joint)}")

# Plot: the exemplar, the error histogram, and the palettes in RGB space.
fig = plt.figure(figsize=(13, 4))

ax = fig.add_subplot(1, 3, 1)
ax.imshow(image.astype(np.uint8))
ax.set_title("synthetic exemplar")
ax.axis("off")

ax = fig.add_subplot(1, 3, 2)
hist = error_histogram(image, palettes["minimum-variance"])
ax.bar(hist.bin_starts, 100 * hist.fractions, width=hist.bin_width,
       align="edge", color="tab:blue")
ax.set_xlabel("Euclidean reconstruction error (RGB units)")
ax.set_ylabel("% of pixels")
ax.set_title("minimum-variance error histogram")

ax = fig.add_subplot(1, 3, 3, projection="3d")
colors_by_method = {"minimum-variance": "red", "median-cut": "green",
                    "octree": "blue", "k-means": "magenta"}
for method, palette in palettes.items():
    c = palette.colors
    ax.scatter(c[:, 0], c[:, 1], c[:, 2], s=4,
               color=colors_by_method[method], label=method, alpha=0.5)
ax.set_xlabel("R")
ax.set_ylabel("G")
ax.set_zlabel("B")
ax.set_title("256-color palettes (all methods overlap)")
ax.legend(fontsize=7)

fig.tight_layout()
target = out_dir / "quantize_and_planarity.png"
fig.savefig(target, dpi=110)
print(f"wrote {target}")
