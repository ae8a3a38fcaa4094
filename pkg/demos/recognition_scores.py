"""Walkthrough: recognition scoring against an exemplar model.

Recognition asks a stricter question than detection: how much of the
exemplar's color sweep does the probe actually reproduce? Votes are pooled
over all conforming pixels and thresholded adaptively with the conforming
count, and the score is the covered arc length. Probes whose colors
cluster on a short stretch of the curve score low no matter how many
pixels conform.

Usage: python demos/recognition_scores.py [output_dir]
"""

import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from rgbcurve import fit_curve, quantize, recognize
from rgbcurve.synth import curve_image, random_reference_curve

out_dir = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_out")
out_dir.mkdir(parents=True, exist_ok=True)

plane, coeffs, domain = random_reference_curve(seed=3)
exemplar = curve_image(192, 192, plane, coeffs, domain, seed=3, noise_sigma=2.5)
model = fit_curve(quantize(exemplar))
print(f"model arc length: {model.arc_length:.1f} RGB units")

# Probes covering progressively less of the curve, same pixel count each.
coverages = [(0.0, 1.0), (0.0, 0.5), (0.0, 0.25), (0.4, 0.5)]
labels, scores = [], []
probes = []
for lo, hi in coverages:
    probe = curve_image(160, 160, plane, coeffs, domain, seed=31,
                        noise_sigma=1.5, u_coverage=(lo, hi))
    result = recognize(probe, model)
    label = f"{int(100 * (hi - lo))}% of curve"
    labels.append(label)
    scores.append(result.score)
    probes.append(probe)
    print(f"  probe covering {label:14s} score={result.score:6.1f}  "
          f"(adaptive l_s={result.adaptive_l_s}, "
          f"{result.conforming_count} conforming px)")

# An unrelated flat color: nothing conforms, score is zero.
far = np.clip(np.tile(model.samples[0] + 120.0 * model.plane.normal,
                      (64, 64, 1)), 0, 255)
print(f"  unrelated probe: score={recognize(far, model).score:.1f}")

fig, axes = plt.subplots(2, len(probes), figsize=(3.1 * len(probes), 6))
for i, (probe, label, score) in enumerate(zip(probes, labels, scores)):
    axes[0, i].imshow(probe.astype(np.uint8))
    axes[0, i].set_title(label, fontsize=9)
    axes[0, i].axis("off")
axes[1, 0].bar(range(len(scores)), scores, color="tab:orange")
axes[1, 0].axhline(model.arc_length, ls="--", c="k", lw=1)
axes[1, 0].set_xticks(range(len(scores)), labels, rotation=20, fontsize=7)
axes[1, 0].set_ylabel("score (covered arc length)")
axes[1, 0].set_title("scores vs. full arc (dashed)", fontsize=9)
for ax in axes[1, 1:]:
    ax.axis("off")

fig.tight_layout()
target = out_dir / "recognition_scores.png"
fig.savefig(target, dpi=110)
print(f"wrote {target}")
