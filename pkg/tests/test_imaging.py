import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from PIL import Image

from browning.imaging import (
    BinaryMask,
    CorruptImageError,
    GrayImage,
    Histogram,
    ImageNotFoundError,
    RgbImage,
    UnsupportedFormatError,
    WeightPair,
    compute_histogram,
    gaussian_kernel,
    gaussian_lowpass,
    load_image,
    load_mask,
    resize_bilinear,
    round_half_away,
    save_image,
    save_mask,
    weighted_gray_values,
    weighted_grayscale,
    write_histogram_csv,
)

rgb_arrays = arrays(np.uint8, st.tuples(st.integers(1, 8), st.integers(1, 8), st.just(3)))
gray_arrays = arrays(np.uint8, st.tuples(st.integers(1, 12), st.integers(1, 12)))


def rgb(values):
    return RgbImage(np.asarray(values, dtype=np.uint8))


class TestTypes:
    def test_rgb_shape_checked(self):
        with pytest.raises(ValueError):
            RgbImage(np.zeros((2, 2), np.uint8))
        with pytest.raises(ValueError):
            RgbImage(np.zeros((0, 3, 3), np.uint8))

    def test_gray_range_checked(self):
        with pytest.raises(ValueError):
            GrayImage(np.array([[300]]))

    def test_mask_values_checked(self):
        with pytest.raises(ValueError):
            BinaryMask(np.array([[0, 2]]))

    def test_rasters_are_read_only(self):
        img = GrayImage(np.zeros((2, 2), np.uint8))
        with pytest.raises(ValueError):
            img.pixels[0, 0] = 1

    def test_histogram_needs_256_bins(self):
        with pytest.raises(ValueError):
            Histogram(np.zeros(10))

    def test_weight_pair(self):
        assert WeightPair.parse("0.3,1") == WeightPair(0.3, 1.0)
        with pytest.raises(ValueError):
            WeightPair(-0.1, 0.5)
        with pytest.raises(ValueError):
            WeightPair.parse("1,2,3")

    def test_round_half_away(self):
        assert round_half_away(np.array([0.5, 1.5, 2.5, -0.5, 127.5])).tolist() == [1, 2, 3, -1, 128]


class TestIO:
    def test_ppm_all_white(self, tmp_path):
        path = tmp_path / "white.ppm"
        path.write_bytes(b"P6\n2 2\n255\n" + b"\xff" * 12)
        img = load_image(path)
        assert (img.width, img.height) == (2, 2)
        assert (img.pixels == 255).all()

    def test_png_single_pixel(self, tmp_path):
        path = tmp_path / "px.png"
        Image.fromarray(np.array([[[10, 20, 30]]], np.uint8), "RGB").save(path)
        assert load_image(path).pixels[0, 0].tolist() == [10, 20, 30]

    def test_truncated_png_is_corrupt(self, tmp_path):
        good = tmp_path / "good.png"
        Image.fromarray(np.random.default_rng(0).integers(0, 256, (64, 64, 3), dtype=np.uint8)).save(good)
        bad = tmp_path / "bad.png"
        bad.write_bytes(good.read_bytes()[:200])
        with pytest.raises(CorruptImageError):
            load_image(bad)

    def test_truncated_ppm_is_corrupt(self, tmp_path):
        path = tmp_path / "short.ppm"
        path.write_bytes(b"P6\n4 4\n255\n" + b"\x00" * 10)
        with pytest.raises(CorruptImageError):
            load_image(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ImageNotFoundError):
            load_image(tmp_path / "nothing.png")

    def test_unsupported_format(self, tmp_path):
        path = tmp_path / "pic.jpg"
        Image.new("RGB", (2, 2)).save(path, format="JPEG")
        with pytest.raises(UnsupportedFormatError):
            load_image(path)

    def test_pgm_replicated_to_rgb(self, tmp_path):
        path = tmp_path / "g.pgm"
        path.write_bytes(b"P5\n2 1\n255\n\x07\xc8")
        img = load_image(path)
        assert img.pixels[0].tolist() == [[7, 7, 7], [200, 200, 200]]

    @pytest.mark.parametrize("suffix", [".png", ".ppm"])
    def test_rgb_round_trip(self, tmp_path, suffix):
        arr = np.random.default_rng(1).integers(0, 256, (5, 7, 3), dtype=np.uint8)
        save_image(RgbImage(arr), tmp_path / f"x{suffix}")
        assert np.array_equal(load_image(tmp_path / f"x{suffix}").pixels, arr)

    def test_mask_written_as_0_255(self, tmp_path):
        mask = BinaryMask(np.array([[0, 1], [1, 0]], np.uint8))
        save_mask(mask, tmp_path / "m.png")
        raw = np.asarray(Image.open(tmp_path / "m.png"))
        assert sorted(np.unique(raw).tolist()) == [0, 255]
        assert load_mask(tmp_path / "m.png") == mask


class TestResize:
    def test_identity(self):
        img = RgbImage(np.random.default_rng(2).integers(0, 256, (6, 9, 3), dtype=np.uint8))
        assert resize_bilinear(img, 9, 6) == img

    def test_two_by_two_to_one(self):
        # center sample at (0.5, 0.5): mean of 0, 0, 255, 255 = 127.5 -> 128
        img = rgb([[[0] * 3, [0] * 3], [[255] * 3, [255] * 3]])
        out = resize_bilinear(img, 1, 1)
        assert out.pixels[0, 0].tolist() == [128, 128, 128]

    def test_camera_frame_constant(self):
        img = RgbImage(np.broadcast_to(np.array([200, 180, 40], np.uint8), (1200, 1600, 3)))
        out = resize_bilinear(img, 1000, 750)
        assert (out.width, out.height) == (1000, 750)
        assert (out.pixels == [200, 180, 40]).all()

    def test_upsample_ramp(self):
        # 2 -> 4 pixels: src coords -0.25, 0.25, 0.75, 1.25 clamp to 0, .25, .75, 1
        img = rgb([[[0] * 3, [100] * 3]])
        out = resize_bilinear(img, 4, 1)
        assert out.pixels[0, :, 0].tolist() == [0, 25, 75, 100]

    def test_zero_target(self):
        with pytest.raises(ValueError):
            resize_bilinear(rgb([[[1, 2, 3]]]), 0, 1)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 255), st.integers(1, 6), st.integers(1, 6), st.integers(1, 9), st.integers(1, 9))
    def test_constant_stays_constant(self, v, w, h, nw, nh):
        img = RgbImage(np.full((h, w, 3), v, np.uint8))
        assert (resize_bilinear(img, nw, nh).pixels == v).all()


class TestGaussian:
    def test_sigma_half_is_three_by_three(self):
        k = gaussian_kernel(0.5)
        z = 1 + 4 * math.exp(-2) + 4 * math.exp(-4)
        assert k.shape == (3, 3)
        assert k[1, 1] == pytest.approx(1 / z, abs=1e-15)
        assert k[0, 1] == pytest.approx(math.exp(-2) / z, abs=1e-15)
        assert k[0, 0] == pytest.approx(math.exp(-4) / z, abs=1e-15)

    def test_impulse_response(self):
        img = np.zeros((5, 5), np.uint8)
        img[2, 2] = 255
        out = gaussian_lowpass(GrayImage(img), 0.5).pixels
        z = 1 + 4 * math.exp(-2) + 4 * math.exp(-4)
        # 255/z = 158.29, 255 e^-2/z = 21.42, 255 e^-4/z = 2.90
        expected = np.array([[3, 21, 3], [21, 158, 21], [3, 21, 3]])
        assert np.array_equal(out[1:4, 1:4], expected)
        assert round(255 / z) == 158 and round(255 * math.exp(-2) / z) == 21
        assert out[0].sum() == 0 and out[:, 0].sum() == 0

    def test_edge_replication(self):
        img = np.zeros((3, 3), np.uint8)
        img[0, :] = 90
        out = gaussian_lowpass(GrayImage(img), 0.5).pixels
        # top row sees itself twice (replicated) and row 1 once
        w_far = math.exp(-2) / (1 + 2 * math.exp(-2))
        assert out[0, 0] == round(90 * (1 - w_far))

    @pytest.mark.parametrize("sigma", [0.0, -1.0])
    def test_non_positive_sigma(self, sigma):
        with pytest.raises(ValueError):
            gaussian_lowpass(GrayImage(np.zeros((2, 2), np.uint8)), sigma)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 255), st.floats(0.2, 3.0))
    def test_constant_identity(self, v, sigma):
        img = GrayImage(np.full((7, 6), v, np.uint8))
        assert gaussian_lowpass(img, sigma) == img

    @settings(max_examples=60, deadline=None)
    @given(gray_arrays, st.floats(0.3, 2.0))
    def test_output_within_input_range(self, arr, sigma):
        out = gaussian_lowpass(GrayImage(arr), sigma).pixels.astype(int)
        assert out.min() >= int(arr.min()) - 1
        assert out.max() <= int(arr.max()) + 1

    def test_separable_matches_direct_2d(self):
        arr = np.random.default_rng(3).integers(0, 256, (20, 17), dtype=np.uint8)
        for sigma in (0.5, 1.0, 1.7):
            k = gaussian_kernel(sigma)
            r = k.shape[0] // 2
            pad = np.pad(arr.astype(float), r, mode="edge")
            direct = np.zeros(arr.shape)
            for dy in range(2 * r + 1):
                for dx in range(2 * r + 1):
                    direct += k[dy, dx] * pad[dy : dy + arr.shape[0], dx : dx + arr.shape[1]]
            expected = np.floor(direct + 0.5)
            got = gaussian_lowpass(GrayImage(arr), sigma).pixels
            assert np.abs(got - expected).max() <= 1
            assert (got == expected).mean() > 0.99


class TestWeightedGrayscale:
    def test_table_row_weights(self):
        assert weighted_grayscale(rgb([[[100, 150, 37]]]), WeightPair(0.3, 1)).pixels[0, 0] == 180

    def test_zero_weights(self):
        img = RgbImage(np.random.default_rng(4).integers(0, 256, (4, 4, 3), dtype=np.uint8))
        assert (weighted_grayscale(img, WeightPair(0, 0)).pixels == 0).all()

    def test_saturates(self):
        w = WeightPair(0.7641, 0.7436)
        assert weighted_grayscale(rgb([[[200, 180, 0]]]), w).pixels[0, 0] == 255

    def test_production_rounding(self):
        # 76.41 + 74.36 = 150.77
        w = WeightPair(0.7641, 0.7436)
        assert weighted_grayscale(rgb([[[100, 100, 9]]]), w).pixels[0, 0] == 151

    @settings(max_examples=60, deadline=None)
    @given(rgb_arrays, st.floats(0, 2), st.floats(0, 2), st.floats(0, 2), st.floats(0, 2))
    def test_linear_before_clamp(self, arr, a1, b1, a2, b2):
        img = RgbImage(arr)
        total = weighted_gray_values(img, WeightPair(a1 + a2, b1 + b2))
        parts = weighted_gray_values(img, WeightPair(a1, b1)) + weighted_gray_values(img, WeightPair(a2, b2))
        np.testing.assert_allclose(total, parts, rtol=1e-12, atol=1e-9)

    @settings(max_examples=60, deadline=None)
    @given(rgb_arrays, st.data(), st.floats(0, 1.5), st.floats(0, 1.5))
    def test_blue_never_matters(self, arr, data, a, b):
        other = arr.copy()
        other[..., 2] = data.draw(arrays(np.uint8, arr.shape[:2]))
        w = WeightPair(a, b)
        assert weighted_grayscale(RgbImage(arr), w) == weighted_grayscale(RgbImage(other), w)


class TestHistogram:
    def test_constant(self):
        h = compute_histogram(GrayImage(np.full((2, 2), 7, np.uint8)))
        assert h.counts[7] == 4 and h.total == 4 and h.counts.sum() == 4

    def test_two_levels(self):
        h = compute_histogram(GrayImage(np.array([[0, 0], [255, 255]], np.uint8)))
        assert h.counts[0] == 2 and h.counts[255] == 2 and h.total == 4

    @settings(max_examples=40, deadline=None)
    @given(rgb_arrays, st.floats(0, 1), st.floats(0, 1))
    def test_total_and_determinism(self, arr, a, b):
        img = RgbImage(arr)
        w = WeightPair(a, b)
        h1 = compute_histogram(weighted_grayscale(img, w))
        h2 = compute_histogram(weighted_grayscale(RgbImage(arr.copy()), w))
        assert h1 == h2
        assert h1.total == arr.shape[0] * arr.shape[1]

    def test_csv_dump(self, tmp_path):
        h = compute_histogram(GrayImage(np.array([[3, 3, 9]], np.uint8)))
        write_histogram_csv(h, tmp_path / "h.csv")
        lines = (tmp_path / "h.csv").read_text().splitlines()
        assert lines[0] == "level,count"
        assert len(lines) == 257
        assert lines[4] == "3,2" and lines[10] == "9,1"
