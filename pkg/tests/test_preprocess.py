import numpy as np
import pytest

from imgauth.image_io import GrayImage
from imgauth.preprocess import (
    average_filter,
    contrast_stretch,
    dct2,
    dct_lowfreq_features,
    histogram_equalize,
    idct2,
    pca_fit,
    preprocess_to_vector,
    project_features,
    reconstruct_features,
    resize_bilinear,
    zigzag_indices,
)


class TestAverageFilter:
    def test_constant_unchanged(self):
        img = GrayImage(np.full((6, 6), 0.42))
        out = average_filter(img, 3)
        assert np.allclose(out.pixels, 0.42)

    def test_unit_impulse_spreads(self):
        px = np.zeros((7, 7))
        px[3, 3] = 1.0
        out = average_filter(GrayImage(px), 3)
        assert np.allclose(out.pixels[2:5, 2:5], 1 / 9)
        assert out.pixels[0, 0] == 0.0

    def test_mean_preserved(self, rng):
        img = GrayImage(rng.random((21, 17)))
        for k in (3, 5):
            out = average_filter(img, k)
            assert out.pixels.mean() == pytest.approx(img.pixels.mean(), abs=1e-9)

    @pytest.mark.parametrize("k", [1, 2, 4])
    def test_bad_kernel_size(self, k):
        with pytest.raises(ValueError):
            average_filter(GrayImage(np.zeros((4, 4))), k)


class TestHistogramEqualize:
    def test_constant_unchanged(self):
        img = GrayImage(np.full((5, 5), 0.77))
        out = histogram_equalize(img)
        assert np.array_equal(out.pixels, img.pixels)

    def test_two_level_split_maps_to_extremes(self):
        px = np.empty((2, 4))
        px[0, :] = 100 / 255
        px[1, :] = 101 / 255
        out = histogram_equalize(GrayImage(px))
        assert np.allclose(out.pixels[0], 0.0)
        assert np.allclose(out.pixels[1], 1.0)

    @staticmethod
    def _entropy(img):
        levels = np.floor(img.pixels * 255 + 0.5).astype(int)
        hist = np.bincount(levels.ravel(), minlength=256)
        p = hist[hist > 0] / hist.sum()
        return float(-(p * np.log2(p)).sum())

    def test_entropy_preserved_when_levels_separated(self, rng):
        # a per-level map can merge levels but never split them, so entropy
        # can only be preserved (injective map) or reduced; occupied levels
        # spaced two apart keep the map injective and the entropy exact
        for _ in range(10):
            levels = 2 * rng.integers(0, 128, size=(64, 64))
            img = GrayImage(levels / 255.0)
            out = histogram_equalize(img)
            assert self._entropy(out) >= self._entropy(img) - 1e-9

    def test_entropy_never_increases(self, rng):
        for _ in range(10):
            img = GrayImage(np.clip(rng.beta(2, 5, size=(32, 32)), 0, 1))
            out = histogram_equalize(img)
            assert self._entropy(out) <= self._entropy(img) + 1e-9

    def test_output_in_unit_interval(self, rng):
        out = histogram_equalize(GrayImage(rng.random((16, 16))))
        assert out.pixels.min() >= 0.0 and out.pixels.max() <= 1.0


class TestContrastStretch:
    def test_full_range_image_unchanged(self):
        px = np.linspace(0, 1, 64).reshape(8, 8)
        out = contrast_stretch(GrayImage(px), 0, 100)
        assert np.abs(out.pixels - px).max() < 1e-9

    def test_narrow_range_expands_to_full(self):
        px = np.linspace(0.25, 0.75, 64).reshape(8, 8)
        out = contrast_stretch(GrayImage(px), 0, 100)
        assert out.pixels.min() == pytest.approx(0.0)
        assert out.pixels.max() == pytest.approx(1.0)

    def test_ramp_clamps_ten_percent_each_end(self):
        px = np.linspace(0, 1, 100).reshape(10, 10)
        out = contrast_stretch(GrayImage(px), 10, 90)
        assert int((out.pixels == 0.0).sum()) == 10
        assert int((out.pixels == 1.0).sum()) == 10

    def test_constant_unchanged(self):
        img = GrayImage(np.full((4, 4), 0.3))
        out = contrast_stretch(img, 5, 95)
        assert np.array_equal(out.pixels, img.pixels)

    def test_inverted_percentiles_rejected(self):
        with pytest.raises(ValueError):
            contrast_stretch(GrayImage(np.zeros((2, 2))), 90, 10)


class TestResizeBilinear:
    def test_same_size_identity(self, rng):
        img = GrayImage(rng.random((9, 13)))
        out = resize_bilinear(img, 13, 9)
        assert np.abs(out.pixels - img.pixels).max() < 1e-12

    def test_constant_stays_constant(self):
        img = GrayImage(np.full((5, 7), 0.61))
        out = resize_bilinear(img, 3, 11)
        assert np.allclose(out.pixels, 0.61)

    def test_two_by_two_to_one_by_three(self):
        img = GrayImage(np.array([[0.0, 1.0], [0.0, 1.0]]))
        out = resize_bilinear(img, 3, 1)
        assert np.allclose(out.pixels, [[0.0, 0.5, 1.0]])

    def test_corners_align(self, rng):
        img = GrayImage(rng.random((6, 6)))
        out = resize_bilinear(img, 4, 4)
        assert out.pixels[0, 0] == pytest.approx(img.pixels[0, 0])
        assert out.pixels[-1, -1] == pytest.approx(img.pixels[-1, -1])

    def test_bad_size_rejected(self):
        with pytest.raises(ValueError):
            resize_bilinear(GrayImage(np.zeros((2, 2))), 0, 3)


class TestDct:
    def test_constant_image_single_coefficient(self):
        n, m, c = 6, 4, 0.3
        coeffs = dct2(GrayImage(np.full((n, m), c)))
        assert coeffs[0, 0] == pytest.approx(c * np.sqrt(n * m))
        rest = coeffs.copy()
        rest[0, 0] = 0.0
        assert np.abs(rest).max() < 1e-12

    def test_parseval(self, rng):
        img = GrayImage(rng.random((12, 9)))
        coeffs = dct2(img)
        assert (coeffs**2).sum() == pytest.approx((img.pixels**2).sum(), rel=1e-9)

    def test_round_trip(self, rng):
        img = GrayImage(rng.random((8, 8)))
        back = idct2(dct2(img))
        assert np.abs(back - img.pixels).max() < 1e-9

    def test_zigzag_order_start(self):
        order = zigzag_indices(4)
        assert order[:6] == [(0, 0), (0, 1), (1, 0), (2, 0), (1, 1), (0, 2)]
        assert len(order) == 16 and len(set(order)) == 16

    def test_lowfreq_features_pick_dc_first(self, rng):
        img = GrayImage(rng.random((8, 8)))
        feats = dct_lowfreq_features(img, 10)
        assert feats.shape == (10,)
        assert feats[0] == pytest.approx(dct2(img)[0, 0])


class TestPca:
    def test_collinear_points_give_line_direction(self, rng):
        direction = np.array([3.0, 4.0]) / 5.0
        pts = np.outer(rng.normal(size=40), direction) + np.array([1.0, -2.0])
        model = pca_fit(pts, 2)
        cosine = abs(model.components[0] @ direction)
        assert cosine > 1 - 1e-8
        assert model.eigenvalues[1] == pytest.approx(0.0, abs=1e-12)

    def test_full_rank_reconstruction(self, rng):
        pts = rng.random((8, 5))
        model = pca_fit(pts, 5)
        for row in pts:
            back = reconstruct_features(model, project_features(model, row))
            assert np.abs(back - row).max() < 1e-8

    def test_eigenvector_residuals(self, rng):
        pts = rng.random((12, 30))  # gram route
        model = pca_fit(pts, 6)
        xc = pts - pts.mean(axis=0)
        cov = xc.T @ xc / (pts.shape[0] - 1)
        for v, lam in zip(model.components, model.eigenvalues):
            assert np.linalg.norm(cov @ v - lam * v) < 1e-8

    def test_components_orthonormal_and_sorted(self, rng):
        pts = rng.random((20, 12))
        model = pca_fit(pts, 8)
        gram = model.components @ model.components.T
        assert np.abs(gram - np.eye(8)).max() < 1e-8
        assert np.all(np.diff(model.eigenvalues) <= 1e-12)
        assert np.all(model.eigenvalues >= 0)

    def test_mean_projects_to_zero(self, rng):
        pts = rng.random((10, 6))
        model = pca_fit(pts, 3)
        assert np.abs(project_features(model, model.mean)).max() < 1e-12

    def test_in_span_distances_preserved(self, rng):
        basis = np.linalg.qr(rng.normal(size=(9, 3)))[0].T  # 3 orthonormal rows
        coords = rng.normal(size=(15, 3))
        pts = coords @ basis + rng.normal(size=9) * 0.0
        model = pca_fit(pts, 3)
        a, b = pts[2], pts[7]
        pa, pb = project_features(model, a), project_features(model, b)
        assert np.linalg.norm(pa - pb) == pytest.approx(np.linalg.norm(a - b), rel=1e-8)

    def test_k_too_large_rejected(self, rng):
        pts = rng.random((4, 10))
        with pytest.raises(ValueError):
            pca_fit(pts, 4)  # max is count-1 = 3

    def test_sign_convention(self, rng):
        pts = rng.random((10, 5))
        model = pca_fit(pts, 3)
        for comp in model.components:
            assert comp[np.argmax(np.abs(comp))] > 0


class TestPreprocessToVector:
    def test_default_length_400(self, rng):
        img = GrayImage(rng.random((64, 64)))
        vec = preprocess_to_vector(img)
        assert vec.shape == (400,)

    def test_constant_image_constant_vector(self):
        vec = preprocess_to_vector(GrayImage(np.full((40, 40), 0.25)), 10)
        assert np.allclose(vec, vec[0])

    def test_deterministic(self, rng):
        px = rng.random((50, 50))
        v1 = preprocess_to_vector(GrayImage(px), 20)
        v2 = preprocess_to_vector(GrayImage(px.copy()), 20)
        assert np.array_equal(v1, v2)

    def test_small_target_rejected(self):
        with pytest.raises(ValueError):
            preprocess_to_vector(GrayImage(np.zeros((8, 8))), 3)
