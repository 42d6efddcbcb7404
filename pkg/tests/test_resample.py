import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from imgauth.image_io import GrayImage
from imgauth.resample import (
    KERNELS,
    AffineParams,
    Signal,
    SingularTransformError,
    apply_affine,
    kernel_weight,
    resample_signal_1d,
    synthesis_params,
)


class TestKernelWeight:
    def test_linear_values(self):
        assert kernel_weight("linear", 0.0) == 1.0
        assert kernel_weight("linear", 0.5) == 0.5
        assert kernel_weight("linear", 1.0) == 0.0

    def test_cubic_interpolating(self):
        assert kernel_weight("cubic", 0.0) == 1.0
        assert kernel_weight("cubic", 1.0) == pytest.approx(0.0, abs=1e-15)
        assert kernel_weight("cubic", 2.0) == 0.0
        assert kernel_weight("cubic", -1.0) == pytest.approx(0.0, abs=1e-15)

    def test_nearest_tie_convention(self):
        assert kernel_weight("nearest", -0.5) == 1.0
        assert kernel_weight("nearest", 0.5) == 0.0
        assert kernel_weight("nearest", 0.0) == 1.0

    def test_unknown_kernel(self):
        with pytest.raises(ValueError, match="unknown kernel"):
            kernel_weight("quintic", 0.0)

    @given(st.floats(min_value=0.0, max_value=1.0, exclude_max=True))
    @settings(max_examples=100, deadline=None)
    def test_partition_of_unity(self, phase):
        for kernel in KERNELS:
            total = sum(kernel_weight(kernel, phase - k) for k in range(-4, 5))
            assert abs(total - 1.0) < 1e-12


class TestResampleSignal:
    def test_constant_signal_any_kernel(self):
        sig = Signal(np.full(12, 3.0))
        positions = np.linspace(0.0, 11.0, 45)
        for kernel in KERNELS:
            out = resample_signal_1d(sig, positions, kernel)
            assert np.abs(out - 3.0).max() < 1e-9

    def test_linear_ramp_midpoint(self):
        out = resample_signal_1d(Signal(np.array([0.0, 1.0, 2.0, 3.0])), [1.5], "linear")
        assert out[0] == pytest.approx(1.5)

    def test_grid_positions_reproduce_samples(self, rng):
        sig = Signal(rng.random(32))
        for kernel in KERNELS:
            out = resample_signal_1d(sig, np.arange(32, dtype=float), kernel)
            assert np.array_equal(out, sig.samples), kernel

    def test_step_scales_positions(self):
        sig = Signal(np.array([0.0, 1.0, 2.0, 3.0]), step=2.5)
        out = resample_signal_1d(sig, [2.5 * 1.5], "linear")
        assert out[0] == pytest.approx(1.5)

    def test_rejects_non_finite_positions(self):
        with pytest.raises(ValueError):
            resample_signal_1d(Signal(np.ones(4)), [np.nan], "linear")

    def test_signal_validation(self):
        with pytest.raises(ValueError):
            Signal(np.array([]))
        with pytest.raises(ValueError):
            Signal(np.ones(3), step=0.0)


class TestApplyAffine:
    def test_identity_exact(self, rng):
        img = GrayImage(rng.random((12, 17)))
        for kernel in KERNELS:
            out = apply_affine(img, AffineParams.identity(), kernel)
            assert np.array_equal(out.pixels, img.pixels), kernel

    def test_integer_translation_nearest_shifts(self, rng):
        img = GrayImage(rng.random((8, 8)))
        p = AffineParams(a0=2.0, a1=1.0, a2=0.0, b0=0.0, b1=0.0, b2=1.0)
        out = apply_affine(img, p, "nearest")
        # interior: output column j shows source column j+2
        assert np.array_equal(out.pixels[:, :6], img.pixels[:, 2:])
        # edge columns fold back: sources 8, 9 reflect to 7, 6
        assert np.array_equal(out.pixels[:, 6], img.pixels[:, 7])
        assert np.array_equal(out.pixels[:, 7], img.pixels[:, 6])

    def test_translation_composition(self, rng):
        # two resamplings only collapse to one when the first lands on the
        # grid; the unrestricted fractional case double-smooths by design
        img = GrayImage(rng.random((24, 24)))
        t = lambda u: AffineParams(a0=u, a1=1.0, a2=0.0, b0=0.0, b1=0.0, b2=1.0)
        chained = apply_affine(apply_affine(img, t(2.0), "linear"), t(0.45), "linear")
        combined = apply_affine(img, t(2.45), "linear")
        interior = (slice(4, 20), slice(4, 20))
        assert np.abs(chained.pixels[interior] - combined.pixels[interior]).max() < 1e-9

    def test_fractional_chain_differs_from_single(self):
        # documents why the composition property needs a grid-aligned step
        impulse = np.zeros((1, 9))
        impulse[0, 4] = 1.0
        img = GrayImage(impulse)
        t = lambda u: AffineParams(a0=u, a1=1.0, a2=0.0, b0=0.0, b1=0.0, b2=1.0)
        chained = apply_affine(apply_affine(img, t(0.3), "linear"), t(0.45), "linear")
        combined = apply_affine(img, t(0.75), "linear")
        assert np.abs(chained.pixels - combined.pixels).max() > 0.05

    def test_singular_params_rejected(self):
        with pytest.raises(SingularTransformError):
            AffineParams(a0=0, a1=1.0, a2=2.0, b0=0, b1=0.5, b2=1.0)

    def test_output_clamped(self, rng):
        img = GrayImage((rng.random((16, 16)) > 0.5).astype(float))
        p = synthesis_params(16, 16, scale=1.3)
        out = apply_affine(img, p, "cubic")  # cubic overshoots without the clamp
        assert out.pixels.min() >= 0.0 and out.pixels.max() <= 1.0


class TestSynthesisParams:
    def test_upscale_samples_down(self):
        # content magnification s looks up source at coordinate/s
        p = synthesis_params(100, 100, scale=1.25)
        assert p.a1 == pytest.approx(0.8)
        assert p.b2 == pytest.approx(0.8)
        assert p.a2 == p.b1 == 0.0

    def test_rotation_90_is_index_permutation(self, rng):
        img = GrayImage(rng.random((15, 15)))
        p = synthesis_params(15, 15, rotate_deg=90.0)
        out = apply_affine(img, p, "nearest")
        # oracle: output(X, Y) == input at the inverse-rotated index
        c = 7
        expected = np.empty_like(img.pixels)
        for yy in range(15):
            for xx in range(15):
                sx = c + (yy - c)
                sy = c - (xx - c)
                expected[yy, xx] = img.pixels[sy, sx]
        assert np.array_equal(out.pixels, expected)

    def test_rotation_four_times_identity(self, rng):
        img = GrayImage(rng.random((16, 16)))
        p = synthesis_params(16, 16, rotate_deg=90.0)
        out = img
        for _ in range(4):
            out = apply_affine(out, p, "nearest")
        assert np.array_equal(out.pixels, img.pixels)

    def test_zero_scale_rejected(self):
        with pytest.raises(SingularTransformError):
            synthesis_params(10, 10, scale=0.0)
