"""Deterministic synthetic face-like images for desk-scale experiments.

Each subject is a fixed mixture of low-frequency cosine modes; variants of a
subject add seeded pixel noise and small brightness/contrast jitter. The
patterns are smooth enough to pass the authenticity gate untouched while the
mode mixtures keep subjects far apart in feature space. Everything derives
from the package LCG, so a (seed, subject, variant) triple names one exact
image on every platform.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .gallery import Gallery, write_gallery
from .image_io import GrayImage
from .preprocess import idct2
from .rng import Lcg64

_MAX_MODE_SUM = 4


def _subject_pattern(side: int, seed: int, subject: int) -> np.ndarray:
    gen = Lcg64(seed * 1_000_003 + subject * 7_919)
    coeffs = np.zeros((side, side))
    for u in range(_MAX_MODE_SUM + 1):
        for v in range(_MAX_MODE_SUM + 1 - u):
            if u == 0 and v == 0:
                continue
            coeffs[u, v] = gen.uniform(-1.0, 1.0) / (1.0 + u + v)
    pattern = idct2(coeffs)
    lo, hi = pattern.min(), pattern.max()
    if hi <= lo:
        return np.full((side, side), 0.5)
    return 0.25 + 0.5 * (pattern - lo) / (hi - lo)


def synthetic_face(side: int, seed: int, subject: int, variant: int) -> GrayImage:
    """One face image: subject pattern + variant jitter + pixel noise."""
    base = _subject_pattern(side, seed, subject)
    gen = Lcg64(seed * 1_000_003 + subject * 7_919 + (variant + 1) * 104_729)
    gain = 1.0 + gen.uniform(-0.05, 0.05)
    offset = gen.uniform(-0.03, 0.03)
    noise = np.array(
        [gen.gauss(0.05) for _ in range(side * side)]
    ).reshape(side, side)
    return GrayImage(np.clip(gain * (base - 0.5) + 0.5 + offset + noise, 0.0, 1.0))


def build_face_gallery(
    root,
    subjects: int = 10,
    train_per_subject: int = 4,
    test_per_subject: int = 2,
    side: int = 128,
    seed: int = 2024,
) -> tuple[Gallery, Gallery]:
    """Write train/ and test/ galleries under root; returns both loaded."""
    root = Path(root)
    train_items, test_items = [], []
    for s in range(subjects):
        label = f"s{s:02d}"
        for v in range(train_per_subject + test_per_subject):
            img = synthetic_face(side, seed, s, v)
            name = f"{label}_v{v}.pgm"
            if v < train_per_subject:
                train_items.append((label, name, img))
            else:
                test_items.append((label, name, img))
    train = write_gallery(root / "train", train_items)
    test = write_gallery(root / "test", test_items)
    return train, test
