import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from supcast.video_io import Gop, frame_psnrs, load_raw_video, mse, psnr, synthetic_gop


def write_raw(path, n_frames, width, height, value=37):
    payload = bytes([value]) * (n_frames * width * height)
    path.write_bytes(payload)
    return path


class TestLoadRawVideo:
    def test_eight_cif_frames_make_two_gops(self, tmp_path):
        p = write_raw(tmp_path / "v.yuv", 8, 352, 288)
        gops = load_raw_video(p, 352, 288, gop_size=4)
        assert len(gops) == 2
        assert all(g.gop_size == 4 and g.width == 352 and g.height == 288 for g in gops)
        assert gops[0].pixels.max() == 37.0

    def test_trailing_partial_gop_discarded(self, tmp_path):
        p = write_raw(tmp_path / "v.yuv", 5, 16, 8)
        gops = load_raw_video(p, 16, 8, gop_size=4)
        assert len(gops) == 1

    def test_empty_file_yields_no_gops(self, tmp_path):
        p = tmp_path / "empty.yuv"
        p.write_bytes(b"")
        assert load_raw_video(p, 16, 8, gop_size=4) == []

    def test_misaligned_size_names_frame_bytes(self, tmp_path):
        p = tmp_path / "bad.yuv"
        p.write_bytes(b"\x00" * (16 * 8 + 3))
        with pytest.raises(ValueError, match="128"):
            load_raw_video(p, 16, 8, gop_size=1)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ValueError, match="not found"):
            load_raw_video(tmp_path / "nope.yuv", 16, 8, 1)

    def test_byte_values_map_to_reals(self, tmp_path):
        data = bytes(range(256)) * 2
        p = tmp_path / "ramp.yuv"
        p.write_bytes(data)
        (gop,) = load_raw_video(p, 32, 8, gop_size=2)
        assert gop.pixels.min() == 0.0 and gop.pixels.max() == 255.0


class TestSyntheticGop:
    def test_constant_fills_value(self):
        g = synthetic_gop("constant", 16, 8, 3, seed=0, value=128.0)
        assert np.all(g.pixels == 128.0)

    def test_gradient_deterministic_per_seed(self):
        a = synthetic_gop("gradient", 32, 16, 2, seed=5)
        b = synthetic_gop("gradient", 32, 16, 2, seed=5)
        assert np.array_equal(a.pixels, b.pixels)

    def test_moving_pattern_seed_sensitivity(self):
        a = synthetic_gop("moving-pattern", 32, 16, 2, seed=1)
        b = synthetic_gop("moving-pattern", 32, 16, 2, seed=2)
        assert not np.array_equal(a.pixels, b.pixels)

    def test_range_stays_in_bounds(self):
        for kind in ("gradient", "moving-pattern"):
            g = synthetic_gop(kind, 32, 16, 4, seed=9)
            assert g.pixels.min() >= 0.0 and g.pixels.max() <= 255.0

    def test_zero_dimension_rejected(self):
        with pytest.raises(ValueError):
            synthetic_gop("constant", 0, 8, 2)

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError, match="unknown synthetic kind"):
            synthetic_gop("checkerboard", 8, 8, 2)


class TestPsnr:
    def test_peak_error_is_zero_db(self):
        ref = Gop(np.zeros((1, 4, 4)))
        rec = Gop(np.full((1, 4, 4), 255.0))
        assert psnr(ref, rec) == pytest.approx(0.0, abs=1e-12)

    def test_mse_100_gives_20db(self):
        # 255^2 / 650.25 == 100
        ref = Gop(np.zeros((1, 4, 4)))
        rec = Gop(np.full((1, 4, 4), math.sqrt(650.25)))
        assert psnr(ref, rec) == pytest.approx(20.0, abs=1e-9)

    def test_unit_mse_matches_high_precision_log(self):
        # independent oracle: slow series-free evaluation with the math module
        expected = 10.0 * math.log10(255.0**2)
        ref = Gop(np.zeros((2, 4, 4)))
        rec = Gop(np.ones((2, 4, 4)))
        assert psnr(ref, rec) == pytest.approx(expected, abs=1e-9)
        assert expected == pytest.approx(48.13, abs=0.01)

    def test_identical_gops_hit_infinity_sentinel(self):
        g = synthetic_gop("moving-pattern", 16, 16, 2, seed=3)
        assert psnr(g, g) == math.inf

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(ValueError, match="mismatch"):
            psnr(Gop(np.zeros((1, 4, 4))), Gop(np.zeros((1, 4, 8))))

    def test_per_frame_averaging_not_pooled(self):
        ref = Gop(np.zeros((2, 2, 2)))
        rec = Gop(np.stack([np.full((2, 2), 1.0), np.full((2, 2), 10.0)]))
        per_frame = frame_psnrs(ref, rec)
        assert psnr(ref, rec) == pytest.approx(per_frame.mean())
        pooled = 10 * math.log10(255**2 / mse(ref.pixels, rec.pixels))
        assert psnr(ref, rec) != pytest.approx(pooled)

    @given(st.integers(0, 2**31 - 1))
    @settings(max_examples=20, deadline=None)
    def test_symmetry(self, seed):
        a = synthetic_gop("moving-pattern", 16, 16, 2, seed=seed)
        b = synthetic_gop("moving-pattern", 16, 16, 2, seed=seed + 1)
        assert psnr(a, b) == pytest.approx(psnr(b, a), rel=1e-12)


def test_zero_mean_noise_converges_to_variance():
    rng = np.random.default_rng(42)
    var = 7.3
    base = np.full((4, 512, 512), 100.0)  # > 1e6 pixels
    noisy = base + rng.normal(0.0, math.sqrt(var), base.shape)
    assert mse(base, noisy) == pytest.approx(var, rel=0.03)
