"""Interpolating resampler: kernels, 1-D signal resampling, affine image warps.

The resampler is the ground-truth forgery generator: warping an image onto a
new grid with any interpolating kernel leaves the periodic correlation traces
the detector looks for.

Kernel conventions
------------------
nearest   box on [-0.5, 0.5): w(-0.5) = 1, w(+0.5) = 0 (deterministic ties)
linear    hat, support (-1, 1)
cubic     Keys cubic convolution kernel with a = -0.5, support (-2, 2)

All three interpolate (w(0) = 1, w(k) = 0 at nonzero integers k) and form a
partition of unity, so resampling a constant signal returns that constant.
Out-of-range samples use symmetric (edge-repeating) extension.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .image_io import GrayImage

KERNELS = ("nearest", "linear", "cubic")
CUBIC_A = -0.5

# sample taps relative to floor(position), per kernel
_TAPS = {"linear": (0, 1), "cubic": (-1, 0, 1, 2)}


class SingularTransformError(ValueError):
    """Affine coefficient matrix is not invertible."""


def kernel_weight(kernel: str, t):
    """Weight w(t) of the named kernel; accepts scalars or arrays."""
    t = np.asarray(t, dtype=np.float64)
    a = np.abs(t)
    if kernel == "nearest":
        w = np.where((t >= -0.5) & (t < 0.5), 1.0, 0.0)
    elif kernel == "linear":
        w = np.maximum(0.0, 1.0 - a)
    elif kernel == "cubic":
        inner = (CUBIC_A + 2.0) * a**3 - (CUBIC_A + 3.0) * a**2 + 1.0
        outer = CUBIC_A * (a**3 - 5.0 * a**2 + 8.0 * a - 4.0)
        w = np.where(a < 1.0, inner, np.where(a < 2.0, outer, 0.0))
    else:
        raise ValueError(f"unknown kernel {kernel!r}, expected one of {KERNELS}")
    return w if w.ndim else float(w)


@dataclass(frozen=True)
class Signal:
    """Uniformly sampled 1-D signal with sampling step > 0."""

    samples: np.ndarray
    step: float = 1.0

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=np.float64)
        if s.ndim != 1 or s.size == 0:
            raise ValueError("samples must be a non-empty 1-D sequence")
        if not self.step > 0:
            raise ValueError(f"step must be positive, got {self.step}")
        object.__setattr__(self, "samples", s)


@dataclass(frozen=True)
class AffineParams:
    """Affine sampling map used by apply_affine.

    The output pixel at (X, Y) is interpolated from the source image at
    (a0 + a1*X + a2*Y, b0 + b1*X + b2*Y); a0/b0 are in pixels, the rest are
    dimensionless. The 2x2 part must be invertible.
    """

    a0: float
    a1: float
    a2: float
    b0: float
    b1: float
    b2: float

    def __post_init__(self):
        if abs(self.determinant) < 1e-12:
            raise SingularTransformError(
                f"affine matrix [[{self.a1}, {self.a2}], [{self.b1}, {self.b2}]] is singular"
            )

    @property
    def determinant(self) -> float:
        return self.a1 * self.b2 - self.a2 * self.b1

    @staticmethod
    def identity() -> "AffineParams":
        return AffineParams(0.0, 1.0, 0.0, 0.0, 0.0, 1.0)


def reflect_indices(idx: np.ndarray, n: int) -> np.ndarray:
    """Fold integer indices into [0, n) by symmetric (edge-repeating) extension."""
    if n == 1:
        return np.zeros_like(idx)
    m = np.mod(idx, 2 * n)
    return np.where(m < n, m, 2 * n - 1 - m)


def _gather_1d(samples: np.ndarray, t: np.ndarray, kernel: str) -> np.ndarray:
    """Evaluate sum_k f_k w(t - k) with symmetric extension; t in sample units."""
    n = samples.size
    if kernel == "nearest":
        idx = np.floor(t + 0.5).astype(np.int64)
        return samples[reflect_indices(idx, n)]
    base = np.floor(t).astype(np.int64)
    frac = t - base
    out = np.zeros_like(t, dtype=np.float64)
    for tap in _TAPS[kernel]:
        w = kernel_weight(kernel, frac - tap)
        out += w * samples[reflect_indices(base + tap, n)]
    return out


def resample_signal_1d(sig: Signal, positions, kernel: str) -> np.ndarray:
    """Interpolate the signal at arbitrary positions (same units as step)."""
    if kernel not in KERNELS:
        raise ValueError(f"unknown kernel {kernel!r}, expected one of {KERNELS}")
    pos = np.asarray(positions, dtype=np.float64)
    if not np.all(np.isfinite(pos)):
        raise ValueError("positions must be finite")
    return _gather_1d(sig.samples, pos / sig.step, kernel)


def apply_affine(img: GrayImage, p: AffineParams, kernel: str) -> GrayImage:
    """Resample the image through the affine map, separably per axis.

    Output has the input's dimensions. Source lookups outside the image use
    symmetric extension; the result is clamped to [0, 1] (the cubic kernel
    can overshoot).
    """
    if kernel not in KERNELS:
        raise ValueError(f"unknown kernel {kernel!r}, expected one of {KERNELS}")
    h, w = img.height, img.width
    xs = np.arange(w, dtype=np.float64)
    ys = np.arange(h, dtype=np.float64)
    src_x = p.a0 + p.a1 * xs[None, :] + p.a2 * ys[:, None]
    src_y = p.b0 + p.b1 * xs[None, :] + p.b2 * ys[:, None]

    px = img.pixels
    if kernel == "nearest":
        ix = reflect_indices(np.floor(src_x + 0.5).astype(np.int64), w)
        iy = reflect_indices(np.floor(src_y + 0.5).astype(np.int64), h)
        out = px[iy, ix]
    else:
        bx = np.floor(src_x).astype(np.int64)
        by = np.floor(src_y).astype(np.int64)
        fx = src_x - bx
        fy = src_y - by
        out = np.zeros((h, w), dtype=np.float64)
        for ty in _TAPS[kernel]:
            wy = kernel_weight(kernel, fy - ty)
            iy = reflect_indices(by + ty, h)
            for tx in _TAPS[kernel]:
                wx = kernel_weight(kernel, fx - tx)
                ix = reflect_indices(bx + tx, w)
                out += (wy * wx) * px[iy, ix]
    return GrayImage(np.clip(out, 0.0, 1.0))


def _rotation(deg: float) -> np.ndarray:
    r = np.deg2rad(deg)
    c, s = np.cos(r), np.sin(r)
    return np.array([[c, -s], [s, c]])


def synthesis_params(
    width: int,
    height: int,
    scale: float = 1.0,
    rotate_deg: float = 0.0,
    skew: float = 0.0,
) -> AffineParams:
    """Build the sampling map for a content transform about the image centre.

    The content is skewed, then rotated, then scaled (factor > 1 magnifies).
    Returned coefficients are the output-to-source lookup used by
    apply_affine, i.e. the inverse of the content transform, with the centre
    shift folded into a0/b0.
    """
    if scale == 0.0:
        raise SingularTransformError("scale factor 0 collapses the image")
    fwd = (scale * np.eye(2)) @ _rotation(rotate_deg) @ np.array([[1.0, skew], [0.0, 1.0]])
    det = fwd[0, 0] * fwd[1, 1] - fwd[0, 1] * fwd[1, 0]
    if abs(det) < 1e-12:
        raise SingularTransformError("requested transform is singular")
    inv = np.array([[fwd[1, 1], -fwd[0, 1]], [-fwd[1, 0], fwd[0, 0]]]) / det
    cx, cy = (width - 1) / 2.0, (height - 1) / 2.0
    shift = np.array([cx, cy]) - inv @ np.array([cx, cy])
    # + 0.0 folds negative zeros from the inversion into plain zeros
    return AffineParams(
        a0=float(shift[0]) + 0.0, a1=float(inv[0, 0]) + 0.0, a2=float(inv[0, 1]) + 0.0,
        b0=float(shift[1]) + 0.0, b1=float(inv[1, 0]) + 0.0, b2=float(inv[1, 1]) + 0.0,
    )
