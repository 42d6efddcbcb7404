#!/usr/bin/env python3
"""From image to verdict, one stage at a time.

Builds the detector pipeline by hand for one original and one forged image:
derivative field, projections, autocovariance, spectrum, score. Writes the
two spectrum CSVs into the current directory so they can be plotted or
diffed.
"""

from pathlib import Path

import numpy as np

from imgauth.detect import (
    DetectorConfig,
    autocovariance,
    image_derivative_magnitude,
    normalized_projections,
    periodicity_score,
    radon_transform,
    spectrum_csv,
)
from imgauth.image_io import GrayImage
from imgauth.resample import apply_affine, synthesis_params

OUT = Path.cwd()

rng = np.random.default_rng(7)
original = GrayImage(rng.random((128, 128)))
forged = apply_affine(original, synthesis_params(128, 128, scale=1.2), "linear")

print("=== projections are exact line sums ===")
field = image_derivative_magnitude(original, 2)
sino = radon_transform(field)
print(f"angle   0: projection length {sino.projections[0].size} == width, "
      f"sum matches field total: {np.isclose(sino.projections[0].sum(), field.sum())}")
print(f"angle  90: projection length {sino.projections[90].size} == height")
print(f"angle  45: projection length {sino.projections[45].size} (diagonal support)")
print()

print("=== per-angle periodicity strength, original vs forged ===")
cfg = DetectorConfig()
for name, img in (("original", original), ("forged", forged)):
    field = image_derivative_magnitude(img, 2)
    sino = radon_transform(field)
    counts = radon_transform(np.ones_like(field))
    best = (0.0, -1, 0.0)
    for angle, proj in zip(sino.angles, normalized_projections(sino, counts)):
        lag = min(cfg.max_lag, proj.size // 2)
        freq, strength = periodicity_score(autocovariance(proj, lag), cfg.dc_exclusion_bins)
        if strength > best[0]:
            best = (strength, int(angle), freq)
    print(f"{name:>9}: max strength {best[0]:7.2f} at angle {best[1]:3d}, "
          f"frequency {best[2]:.4f} cycles/sample")
print()

for name, img in (("original", original), ("forged", forged)):
    path = OUT / f"spectrum_{name}.csv"
    path.write_text(spectrum_csv(img, cfg))
    print(f"wrote {path} ({sum(1 for _ in open(path))} rows)")
print()
print("An original's spectrum is flat noise in every projection; the forged")
print("one carries a sharp line you can spot in spectrum_forged.csv at the")
print("reported angle and frequency.")
