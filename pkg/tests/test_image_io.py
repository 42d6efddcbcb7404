import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from imgauth.image_io import (
    CropRect,
    GrayImage,
    PgmDecodeError,
    crop,
    load_pgm,
    save_pgm,
)


def test_load_p5_basic():
    data = b"P5\n2 2\n255\n" + bytes([0, 255, 128, 64])
    img = load_pgm(data)
    assert (img.width, img.height) == (2, 2)
    assert np.array_equal(img.pixels, np.array([[0.0, 1.0], [128 / 255, 64 / 255]]))


def test_load_p5_single_pixel():
    img = load_pgm(b"P5\n1 1\n255\n" + bytes([255]))
    assert img.pixels[0, 0] == 1.0


def test_load_p5_truncated_names_offset():
    data = b"P5\n2 2\n255\n" + bytes([1, 2, 3])
    with pytest.raises(PgmDecodeError) as err:
        load_pgm(data)
    assert err.value.offset == len(data)
    assert "truncated" in str(err.value)


def test_load_p2_ascii_with_comments():
    data = b"P2 # ascii graymap\n2 # width\n2\n# maxval next\n255\n0 255\n128 64\n"
    img = load_pgm(data)
    assert np.array_equal(img.pixels, np.array([[0.0, 1.0], [128 / 255, 64 / 255]]))


def test_load_rejects_bad_magic_and_maxval():
    with pytest.raises(PgmDecodeError):
        load_pgm(b"P6\n1 1\n255\n\x00")
    with pytest.raises(PgmDecodeError):
        load_pgm(b"P5\n1 1\n0\n\x00")
    with pytest.raises(PgmDecodeError):
        load_pgm(b"P5\n1 1\n999\n\x00")


def test_load_requires_whitespace_separator_before_raster():
    # a comment cannot stand in for the single separator byte
    with pytest.raises(PgmDecodeError, match="whitespace byte after maxval"):
        load_pgm(b"P5\n1 1\n255#c\n\x00")
    with pytest.raises(PgmDecodeError):
        load_pgm(b"P5\n1 1\n255")


def test_load_scales_by_maxval():
    img = load_pgm(b"P5\n2 1\n100\n" + bytes([0, 100]))
    assert np.array_equal(img.pixels, np.array([[0.0, 1.0]]))
    with pytest.raises(PgmDecodeError):
        load_pgm(b"P5\n2 1\n100\n" + bytes([0, 101]))


def test_save_rounds_half_up():
    img = GrayImage(np.array([[0.5]]))
    data = save_pgm(img)
    assert data.endswith(bytes([128]))


def test_save_zeros():
    data = save_pgm(GrayImage(np.zeros((2, 2))))
    assert data.endswith(bytes([0, 0, 0, 0]))


def test_roundtrip_quantized_images_bit_exact(rng):
    for _ in range(20):
        h, w = rng.integers(1, 24, size=2)
        levels = rng.integers(0, 256, size=(h, w))
        img = GrayImage(levels / 255.0)
        again = load_pgm(save_pgm(img))
        assert np.array_equal(img.pixels, again.pixels)
        # and the byte stream itself is stable
        assert save_pgm(again) == save_pgm(img)


def test_roundtrip_within_one_level(rng):
    img = GrayImage(rng.random((9, 7)))
    again = load_pgm(save_pgm(img))
    assert np.abs(again.pixels - img.pixels).max() <= 1 / 255 / 2 + 1e-12


def test_crop_full_is_identity(rng):
    img = GrayImage(rng.random((5, 8)))
    out = crop(img, CropRect(0, 0, 8, 5))
    assert np.array_equal(out.pixels, img.pixels)


def test_crop_single_pixel(rng):
    img = GrayImage(rng.random((4, 4)))
    out = crop(img, CropRect(0, 0, 1, 1))
    assert out.pixels[0, 0] == img.pixels[0, 0]


def test_crop_interior_of_ramp():
    ramp = GrayImage(np.arange(16).reshape(4, 4) / 15.0)
    out = crop(ramp, CropRect(1, 1, 2, 2))
    expected = np.array([[5, 6], [9, 10]]) / 15.0
    assert np.array_equal(out.pixels, expected)


def test_crop_out_of_bounds_reports_coordinates():
    img = GrayImage(np.zeros((4, 4)))
    with pytest.raises(ValueError, match=r"x0=2.*w=3"):
        crop(img, CropRect(2, 0, 3, 2))


def test_crop_rect_validation():
    with pytest.raises(ValueError):
        CropRect(-1, 0, 1, 1)
    with pytest.raises(ValueError):
        CropRect(0, 0, 0, 1)


@given(
    st.lists(st.floats(min_value=0.0, max_value=1.0), min_size=1, max_size=32),
    st.integers(min_value=1, max_value=8),
)
@settings(max_examples=40, deadline=None)
def test_grayimage_accepts_unit_interval(values, width):
    height = max(1, len(values) // width)
    arr = np.resize(np.array(values), (height, width))
    img = GrayImage(arr)
    assert img.pixels.min() >= 0.0 and img.pixels.max() <= 1.0


@pytest.mark.parametrize("bad", [-0.01, 1.01, np.nan, np.inf])
def test_grayimage_rejects_out_of_range(bad):
    arr = np.full((2, 2), 0.5)
    arr[0, 0] = bad
    with pytest.raises(ValueError):
        GrayImage(arr)


def test_grayimage_is_frozen(noise_image):
    with pytest.raises(ValueError):
        noise_image.pixels[0, 0] = 0.0
