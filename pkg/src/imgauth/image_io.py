"""Grayscale image container and portable graymap (PGM) codec.

Pixels live as float64 in [0, 1]; 8-bit quantisation happens only at the
file boundary. Binary "P5" and ASCII "P2" graymaps with maxval <= 255 are
read; writing always emits binary P5 with maxval 255 and no comments.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_WHITESPACE = b" \t\n\r\x0b\x0c"


class PgmDecodeError(ValueError):
    """Malformed PGM byte stream; ``offset`` is the byte position at fault."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


@dataclass(frozen=True, eq=False)
class GrayImage:
    """2-D grayscale raster, shape (height, width), values in [0, 1].

    The pixel array is copied and frozen at construction, so instances can be
    shared between threads freely.
    """

    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels, dtype=np.float64)
        if px.ndim != 2 or px.size == 0:
            raise ValueError(f"image must be a non-empty 2-D array, got shape {px.shape}")
        if not np.all(np.isfinite(px)):
            raise ValueError("image contains non-finite pixel values")
        lo, hi = float(px.min()), float(px.max())
        if lo < 0.0 or hi > 1.0:
            raise ValueError(f"pixel values outside [0, 1]: min={lo}, max={hi}")
        px = px.copy()
        px.flags.writeable = False
        object.__setattr__(self, "pixels", px)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def allclose(self, other: "GrayImage", tol: float = 0.0) -> bool:
        return self.pixels.shape == other.pixels.shape and bool(
            np.all(np.abs(self.pixels - other.pixels) <= tol)
        )


@dataclass(frozen=True)
class CropRect:
    """Axis-aligned crop rectangle in pixel units, top-left origin."""

    x0: int
    y0: int
    w: int
    h: int

    def __post_init__(self):
        if self.x0 < 0 or self.y0 < 0:
            raise ValueError(f"crop origin must be non-negative, got ({self.x0}, {self.y0})")
        if self.w < 1 or self.h < 1:
            raise ValueError(f"crop size must be positive, got {self.w}x{self.h}")


def _tokens(data: bytes):
    """Yield (token, offset) pairs, skipping whitespace and # comments."""
    i, n = 0, len(data)
    while i < n:
        c = data[i : i + 1]
        if c in (b"#",):
            j = data.find(b"\n", i)
            i = n if j < 0 else j + 1
            continue
        if c in _WHITESPACE:
            i += 1
            continue
        start = i
        while i < n and data[i : i + 1] not in _WHITESPACE and data[i : i + 1] != b"#":
            i += 1
        yield data[start:i], start, i


def load_pgm(data: bytes) -> GrayImage:
    """Decode a binary (P5) or ASCII (P2) graymap into a GrayImage.

    Stored pixel values are raw/maxval. Raises PgmDecodeError with the byte
    offset for malformed headers, bad maxval, or truncated sample data.
    """
    toks = _tokens(data)

    def next_token(what):
        try:
            return next(toks)
        except StopIteration:
            raise PgmDecodeError(f"missing {what}", len(data)) from None

    magic, off, _ = next_token("magic number")
    if magic not in (b"P5", b"P2"):
        raise PgmDecodeError(f"unsupported magic {magic!r}, expected P5 or P2", off)

    header = []
    for what in ("width", "height", "maxval"):
        tok, off, end = next_token(what)
        try:
            val = int(tok)
        except ValueError:
            raise PgmDecodeError(f"non-numeric {what} token {tok!r}", off) from None
        header.append((val, off, end))

    (width, w_off, _), (height, h_off, _), (maxval, m_off, m_end) = header
    if width < 1:
        raise PgmDecodeError(f"width must be positive, got {width}", w_off)
    if height < 1:
        raise PgmDecodeError(f"height must be positive, got {height}", h_off)
    if maxval < 1 or maxval > 255:
        raise PgmDecodeError(f"maxval must be in 1..255, got {maxval}", m_off)

    count = width * height
    if magic == b"P5":
        # exactly one whitespace byte separates the header from the raster
        if m_end >= len(data) or data[m_end : m_end + 1] not in _WHITESPACE:
            raise PgmDecodeError("expected a whitespace byte after maxval", m_end)
        raster = m_end + 1
        avail = len(data) - raster
        if avail < count:
            raise PgmDecodeError(
                f"truncated raster: expected {count} bytes, got {avail}", raster + avail
            )
        raw = np.frombuffer(data, dtype=np.uint8, count=count, offset=raster)
        if raw.max(initial=0) > maxval:
            bad = int(np.argmax(raw > maxval))
            raise PgmDecodeError(
                f"sample value {raw[bad]} exceeds maxval {maxval}", raster + bad
            )
    else:
        samples = []
        for tok, off, _ in toks:
            try:
                v = int(tok)
            except ValueError:
                raise PgmDecodeError(f"non-numeric sample token {tok!r}", off) from None
            if v < 0 or v > maxval:
                raise PgmDecodeError(f"sample value {v} outside 0..{maxval}", off)
            samples.append(v)
            if len(samples) == count:
                break
        if len(samples) < count:
            raise PgmDecodeError(
                f"truncated samples: expected {count}, got {len(samples)}", len(data)
            )
        raw = np.array(samples, dtype=np.float64)

    pixels = raw.astype(np.float64).reshape(height, width) / float(maxval)
    return GrayImage(pixels)


def save_pgm(img: GrayImage) -> bytes:
    """Encode as binary P5 with maxval 255; bytes are round(p*255), half up."""
    quant = np.floor(img.pixels * 255.0 + 0.5).astype(np.uint8)
    header = f"P5\n{img.width} {img.height}\n255\n".encode("ascii")
    return header + quant.tobytes()


def crop(img: GrayImage, rect: CropRect) -> GrayImage:
    """Copy the rectangle out of the image; out-of-bounds rects are an error."""
    if rect.x0 + rect.w > img.width or rect.y0 + rect.h > img.height:
        raise ValueError(
            f"crop rect (x0={rect.x0}, y0={rect.y0}, w={rect.w}, h={rect.h}) "
            f"exceeds image bounds {img.width}x{img.height}"
        )
    return GrayImage(img.pixels[rect.y0 : rect.y0 + rect.h, rect.x0 : rect.x0 + rect.w])
