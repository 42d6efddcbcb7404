#!/usr/bin/env python3
"""Regenerate the shipped default verdict threshold.

The package never hard-codes a hand-picked decision constant: the default in
imgauth.detect.DEFAULT_THRESHOLD is the output of this exact calibration — a
fixed 12-image corpus of LCG noise originals, the standard forgery grid
(scales 1.1..1.5 x linear/cubic), and the gap-midpoint rule. Rerunning this
script must print the same number that ships in the source.
"""

import numpy as np

from imgauth.detect import DEFAULT_THRESHOLD, DetectorConfig
from imgauth.image_io import GrayImage
from imgauth.pipeline import calibrate_detector
from imgauth.rng import Lcg64


def noise_image(seed, side=128):
    gen = Lcg64(seed)
    return GrayImage(np.array(gen.uniforms(side * side)).reshape(side, side))


originals = [noise_image(7_000 + i) for i in range(12)]
result = calibrate_detector(originals, DetectorConfig(threshold=1.0))

print(f"calibrated threshold: {result.tau!r}")
print(f"shipped default:      {DEFAULT_THRESHOLD!r}")
print(f"identical:            {result.tau == DEFAULT_THRESHOLD}")
print()
print(f"original scores ({len(result.original_scores)}): "
      f"max {max(result.original_scores):.2f}")
print(f"forgery scores ({len(result.forgery_scores)}): "
      f"min {min(result.forgery_scores):.2f}")
print(f"balanced accuracy at the threshold: {result.balanced_accuracy}")
