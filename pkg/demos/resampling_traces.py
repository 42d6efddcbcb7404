#!/usr/bin/env python3
"""Why resampling is detectable: the variance of an interpolated signal's
derivative depends on where you sit between the original samples.

Walks through the three kernels: prints the theoretical variance over one
period, confirms it against measured statistics of actually-resampled noise,
and shows the periodicity appearing in a warped image's detector score.
"""

import numpy as np

from imgauth.detect import (
    DetectorConfig,
    derivative_n,
    detect_forgery,
    theoretical_derivative_variance,
)
from imgauth.image_io import GrayImage
from imgauth.resample import KERNELS, Signal, apply_affine, resample_signal_1d, synthesis_params

rng = np.random.default_rng(1)

print("=== theoretical variance of the 2nd difference across one sample period ===")
phases = np.linspace(0.0, 1.0, 9)
header = "phase  " + "  ".join(f"{k:>8}" for k in KERNELS)
print(header)
for phi in phases:
    row = [f"{theoretical_derivative_variance(k, 2, float(phi), 1.0):8.4f}" for k in KERNELS]
    print(f"{phi:5.3f}  " + "  ".join(row))
print()
print("nearest repeats samples, so its profile is flat; linear and cubic dip")
print("between samples: that dip, repeated every sample step, is the trace.")
print()

print("=== measured variance of the 2nd difference after a fractional shift ===")
rows, length = 3000, 64
noise = rng.normal(size=(rows, length))
for kernel in ("linear", "cubic"):
    for phase in (0.0, 0.5):
        diffed = np.empty((rows, length))
        positions = np.arange(length, dtype=float) + phase
        for i in range(rows):
            shifted = resample_signal_1d(Signal(noise[i]), positions, kernel)
            diffed[i] = derivative_n(shifted, 2)
        measured = diffed[:, 4:-4].var(axis=0).mean()
        expected = theoretical_derivative_variance(kernel, 2, phase, 1.0)
        print(f"{kernel:>6} phase {phase}: measured {measured:.4f}  theory {expected:.4f}")
print()

print("=== detector scores: original noise image vs its 1.2x upscale ===")
cfg = DetectorConfig()
img = GrayImage(rng.random((128, 128)))
forged = apply_affine(img, synthesis_params(128, 128, scale=1.2), "linear")
v_orig = detect_forgery(img, cfg)
v_forg = detect_forgery(forged, cfg)
print(f"original:  {v_orig.label:>9}  score {v_orig.score:7.2f}  (threshold {cfg.threshold:.2f})")
print(f"upscaled:  {v_forg.label:>9}  score {v_forg.score:7.2f}")
best = max(v_forg.report.entries, key=lambda e: e.strength)
print(f"strongest periodicity at angle {best.angle} deg, {best.dominant_frequency:.4f} cycles/sample")
print(f"(1.2x upscale repeats its interpolation phase every 6 pixels: 1/6 = {1 / 6:.4f})")
