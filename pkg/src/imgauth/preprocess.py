"""Image conditioning and feature extraction for the recognition stage.

A probe or gallery image is smoothed, contrast-normalised, shrunk to a small
square, and flattened to a 1-D vector; the vector is then either used raw,
reduced to its leading zigzag DCT coefficients, or projected onto a PCA
basis fitted over the gallery.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.fft import dctn, idctn
from scipy.ndimage import uniform_filter

from .image_io import GrayImage


def average_filter(img: GrayImage, k: int) -> GrayImage:
    """k x k box mean with symmetric edge extension; k must be odd and >= 3."""
    if k < 3 or k % 2 == 0:
        raise ValueError(f"filter size must be an odd integer >= 3, got {k}")
    out = uniform_filter(img.pixels, size=k, mode="reflect")
    return GrayImage(np.clip(out, 0.0, 1.0))


def histogram_equalize(img: GrayImage) -> GrayImage:
    """Spread the 256-level intensity histogram toward uniform.

    Levels are v = round(255 p), half up; level v maps to
    (cdf(v) - cdf_min) / (N - cdf_min) where cdf_min is the cdf at the
    lowest occupied level. A constant image is returned unchanged (the map
    would be 0/0).
    """
    levels = np.floor(img.pixels * 255.0 + 0.5).astype(np.int64)
    hist = np.bincount(levels.ravel(), minlength=256)
    cdf = np.cumsum(hist)
    occupied = np.nonzero(hist)[0]
    if occupied.size <= 1:
        return GrayImage(img.pixels)
    cdf_min = cdf[occupied[0]]
    n = img.pixels.size
    lut = (cdf - cdf_min) / float(n - cdf_min)
    return GrayImage(np.clip(lut[levels], 0.0, 1.0))


def contrast_stretch(img: GrayImage, lo_pct: float, hi_pct: float) -> GrayImage:
    """Map the [lo_pct, hi_pct] percentile range linearly onto [0, 1]."""
    if not (0.0 <= lo_pct < hi_pct <= 100.0):
        raise ValueError(f"need 0 <= lo < hi <= 100, got ({lo_pct}, {hi_pct})")
    lo, hi = np.percentile(img.pixels, [lo_pct, hi_pct])
    if hi <= lo:
        return GrayImage(img.pixels)
    return GrayImage(np.clip((img.pixels - lo) / (hi - lo), 0.0, 1.0))


def resize_bilinear(img: GrayImage, out_w: int, out_h: int) -> GrayImage:
    """Bilinear resize with corner-aligned coordinates.

    Output corners sample input corners exactly; a single-row or
    single-column output samples the input midline.
    """
    if out_w < 1 or out_h < 1:
        raise ValueError(f"output size must be positive, got {out_w}x{out_h}")

    def axis_coords(n_out, n_in):
        if n_out == 1:
            return np.full(1, (n_in - 1) / 2.0)
        return np.arange(n_out) * ((n_in - 1) / (n_out - 1))

    sx = axis_coords(out_w, img.width)
    sy = axis_coords(out_h, img.height)
    x0 = np.minimum(np.floor(sx).astype(np.int64), img.width - 1)
    y0 = np.minimum(np.floor(sy).astype(np.int64), img.height - 1)
    x1 = np.minimum(x0 + 1, img.width - 1)
    y1 = np.minimum(y0 + 1, img.height - 1)
    fx = sx - x0
    fy = sy - y0

    px = img.pixels
    top = px[np.ix_(y0, x0)] * (1 - fx) + px[np.ix_(y0, x1)] * fx
    bot = px[np.ix_(y1, x0)] * (1 - fx) + px[np.ix_(y1, x1)] * fx
    out = top * (1 - fy)[:, None] + bot * fy[:, None]
    return GrayImage(np.clip(out, 0.0, 1.0))


def dct2(img: GrayImage) -> np.ndarray:
    """Orthonormal 2-D type-II DCT of the pixel array (energy preserving)."""
    return dctn(img.pixels, type=2, norm="ortho")


def idct2(coeffs: np.ndarray) -> np.ndarray:
    """Inverse of dct2."""
    return idctn(np.asarray(coeffs, dtype=np.float64), type=2, norm="ortho")


def zigzag_indices(side: int) -> list[tuple[int, int]]:
    """(row, col) pairs of a side x side block in zigzag scan order."""
    order = []
    for s in range(2 * side - 1):
        diag = [(i, s - i) for i in range(max(0, s - side + 1), min(s, side - 1) + 1)]
        order.extend(diag if s % 2 else diag[::-1])
    return order


def dct_lowfreq_features(img: GrayImage, k: int) -> np.ndarray:
    """First k zigzag-ordered DCT coefficients of the (square) image."""
    if img.width != img.height:
        raise ValueError(f"expected a square image, got {img.width}x{img.height}")
    if not 1 <= k <= img.width * img.height:
        raise ValueError(f"k must be in 1..{img.width * img.height}, got {k}")
    coeffs = dct2(img)
    order = zigzag_indices(img.width)[:k]
    rows = [r for r, _ in order]
    cols = [c for _, c in order]
    return coeffs[rows, cols]


@dataclass(frozen=True)
class PcaModel:
    """Mean vector plus orthonormal components, eigenvalues non-increasing."""

    mean: np.ndarray
    components: np.ndarray  # shape (k, dim)
    eigenvalues: np.ndarray  # shape (k,), all >= 0

    @property
    def dim(self) -> int:
        return self.mean.size

    @property
    def k(self) -> int:
        return self.components.shape[0]


def _fix_signs(components: np.ndarray) -> np.ndarray:
    out = components.copy()
    for i in range(out.shape[0]):
        j = int(np.argmax(np.abs(out[i])))
        if out[i, j] < 0:
            out[i] = -out[i]
    return out


def _complete_component(existing: list, dim: int) -> np.ndarray:
    """Deterministic unit vector orthogonal to all accepted components."""
    for j in range(dim):
        v = np.zeros(dim)
        v[j] = 1.0
        for c in existing:
            v -= (c @ v) * c
        nrm = np.linalg.norm(v)
        if nrm > 0.5:
            return v / nrm
    raise ValueError("cannot complete an orthonormal basis")


def pca_fit(vectors, k: int) -> PcaModel:
    """Top-k principal components of the sample covariance.

    Uses the Gram-matrix route (n x n eigenproblem) when there are fewer
    samples than dimensions. Component signs are fixed so each component's
    largest-magnitude entry is positive; eigenvalues are clamped at zero.
    """
    x = np.asarray(vectors, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 2:
        raise ValueError("need at least two vectors of equal length")
    n, dim = x.shape
    if not 1 <= k <= min(n - 1, dim):
        raise ValueError(f"k must be in 1..min(n-1={n - 1}, dim={dim}), got {k}")

    mean = x.mean(axis=0)
    xc = x - mean
    if n < dim:
        gram = (xc @ xc.T) / (n - 1)
        evals, evecs = np.linalg.eigh(gram)
        order = np.argsort(evals)[::-1][:k]
        evals = np.maximum(evals[order], 0.0)
        comps = []
        for i, col in enumerate(order):
            v = xc.T @ evecs[:, col]
            nrm = np.linalg.norm(v)
            if nrm > 1e-12:
                comps.append(v / nrm)
            else:
                comps.append(_complete_component(comps, dim))
        components = np.vstack(comps)
    else:
        cov = (xc.T @ xc) / (n - 1)
        evals_all, evecs = np.linalg.eigh(cov)
        order = np.argsort(evals_all)[::-1][:k]
        evals = np.maximum(evals_all[order], 0.0)
        components = evecs[:, order].T

    return PcaModel(mean=mean, components=_fix_signs(components), eigenvalues=evals)


def project_features(model: PcaModel, v) -> np.ndarray:
    """Coordinates of v in the component basis: components @ (v - mean)."""
    vec = np.asarray(v, dtype=np.float64)
    if vec.shape != (model.dim,):
        raise ValueError(f"expected a length-{model.dim} vector, got shape {vec.shape}")
    return model.components @ (vec - model.mean)


def reconstruct_features(model: PcaModel, coords) -> np.ndarray:
    """Back-projection: mean + components^T @ coords."""
    c = np.asarray(coords, dtype=np.float64)
    if c.shape != (model.k,):
        raise ValueError(f"expected {model.k} coordinates, got shape {c.shape}")
    return model.mean + model.components.T @ c


def preprocess_to_vector(img: GrayImage, target_side: int = 20) -> np.ndarray:
    """Standard conditioning: 3x3 mean filter, equalize, shrink, flatten.

    The output has length target_side**2 (400 with the default side of 20)
    and is deterministic for identical input bytes.
    """
    if target_side < 4:
        raise ValueError(f"target_side must be >= 4, got {target_side}")
    out = average_filter(img, 3)
    out = histogram_equalize(out)
    out = resize_bilinear(out, target_side, target_side)
    return out.pixels.reshape(-1).copy()
