import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from supcast.transform import (
    CoeffVolume,
    assemble_chunks,
    forward_3d_dct,
    inverse_3d_dct,
    partition_chunks,
)
from supcast.video_io import Gop, psnr, synthetic_gop


def random_gop(rng, t=4, h=16, w=16):
    return Gop(rng.uniform(0.0, 255.0, size=(t, h, w)))


class TestForwardInverse:
    def test_constant_gop_is_dc_only(self):
        c = 57.0
        g = Gop(np.full((4, 8, 16), c))
        vol = forward_3d_dct(g)
        expected_dc = c * np.sqrt(4 * 8 * 16)
        assert vol.coeffs[0, 0, 0] == pytest.approx(expected_dc, rel=1e-12)
        rest = vol.coeffs.copy()
        rest[0, 0, 0] = 0.0
        assert np.max(np.abs(rest)) < 1e-9

    def test_energy_preserved(self):
        rng = np.random.default_rng(0)
        for _ in range(5):
            g = random_gop(rng)
            vol = forward_3d_dct(g)
            e_pix = np.sum(g.pixels**2)
            e_coef = np.sum(vol.coeffs**2)
            assert abs(e_pix - e_coef) / e_pix < 1e-6

    def test_round_trip_identity(self):
        rng = np.random.default_rng(1)
        g = random_gop(rng)
        back = inverse_3d_dct(forward_3d_dct(g))
        assert np.max(np.abs(back.pixels - g.pixels)) < 1e-8

    def test_round_trip_psnr_over_100db(self):
        g = synthetic_gop("moving-pattern", 32, 32, 4, seed=2)
        back = inverse_3d_dct(forward_3d_dct(g))
        assert psnr(g, back) >= 100.0

    def test_zero_volume_and_dc_only_volume(self):
        zero = CoeffVolume(np.zeros((2, 4, 4)))
        assert np.all(inverse_3d_dct(zero).pixels == 0.0)
        dc = np.zeros((2, 4, 4))
        dc[0, 0, 0] = 10.0 * np.sqrt(2 * 4 * 4)
        back = inverse_3d_dct(CoeffVolume(dc))
        assert np.allclose(back.pixels, 10.0, atol=1e-12)


class TestPartition:
    def test_cif_grid_counts(self):
        g = synthetic_gop("moving-pattern", 352, 288, 4, seed=0)
        chunks = partition_chunks(forward_3d_dct(g), 8)
        assert len(chunks) == 256
        assert all(c.coeffs.shape == (36, 44) for c in chunks)

    def test_single_chunk_grid(self):
        g = synthetic_gop("moving-pattern", 16, 8, 3, seed=0)
        chunks = partition_chunks(forward_3d_dct(g), 1)
        assert len(chunks) == 3
        assert chunks[0].coeffs.shape == (8, 16)

    def test_every_coefficient_assigned_once(self):
        g = synthetic_gop("moving-pattern", 16, 16, 2, seed=1)
        vol = forward_3d_dct(g)
        chunks = partition_chunks(vol, 4)
        assert sum(c.size for c in chunks) == vol.coeffs.size
        total = sum(np.sum(c.coeffs**2) for c in chunks)
        assert total == pytest.approx(np.sum(vol.coeffs**2), rel=1e-12)

    def test_indivisible_dimensions_rejected(self):
        g = synthetic_gop("moving-pattern", 18, 16, 2, seed=1)
        with pytest.raises(ValueError, match="divisible"):
            partition_chunks(forward_3d_dct(g), 4)

    def test_variance_is_mean_square(self):
        g = synthetic_gop("moving-pattern", 16, 16, 2, seed=3)
        for c in partition_chunks(forward_3d_dct(g), 4):
            assert c.variance == pytest.approx(np.mean(c.coeffs**2), rel=1e-12)

    def test_variance_multiset_invariant_under_order(self):
        g = synthetic_gop("moving-pattern", 16, 16, 2, seed=4)
        chunks = partition_chunks(forward_3d_dct(g), 4)
        variances = sorted(c.variance for c in chunks)
        rng = np.random.default_rng(0)
        shuffled = list(chunks)
        rng.shuffle(shuffled)
        assert sorted(c.variance for c in shuffled) == variances


class TestAssemble:
    def test_full_set_restores_volume_exactly(self):
        g = synthetic_gop("moving-pattern", 16, 16, 2, seed=5)
        vol = forward_3d_dct(g)
        chunks = partition_chunks(vol, 4)
        back = assemble_chunks(chunks, vol.dims)
        assert np.array_equal(back.coeffs, vol.coeffs)

    def test_partial_set_zero_fills(self):
        g = synthetic_gop("moving-pattern", 16, 16, 2, seed=6)
        vol = forward_3d_dct(g)
        chunks = partition_chunks(vol, 4)
        half = chunks[::2]
        back = assemble_chunks(half, vol.dims)
        for c in chunks[1::2]:
            plane, row, col = c.origin
            bh, bw = c.coeffs.shape
            assert np.all(back.coeffs[plane, row : row + bh, col : col + bw] == 0.0)

    def test_retained_energy_identity(self):
        g = synthetic_gop("moving-pattern", 16, 16, 2, seed=7)
        vol = forward_3d_dct(g)
        chunks = partition_chunks(vol, 4)
        kept = chunks[:10]
        back = assemble_chunks(kept, vol.dims)
        assert np.sum(back.coeffs**2) == pytest.approx(
            sum(np.sum(c.coeffs**2) for c in kept), rel=1e-12
        )

    def test_overlapping_chunks_rejected(self):
        g = synthetic_gop("moving-pattern", 16, 16, 2, seed=8)
        vol = forward_3d_dct(g)
        chunks = partition_chunks(vol, 4)
        with pytest.raises(ValueError, match="overlap"):
            assemble_chunks([chunks[0], chunks[0]], vol.dims)


@given(st.integers(0, 2**31 - 1), st.sampled_from([(2, 8, 8), (3, 8, 16), (4, 16, 8)]))
@settings(max_examples=25, deadline=None)
def test_parseval_property(seed, dims):
    rng = np.random.default_rng(seed)
    g = Gop(rng.normal(128.0, 40.0, size=dims))
    vol = forward_3d_dct(g)
    e_pix = np.sum(g.pixels**2)
    assert abs(e_pix - np.sum(vol.coeffs**2)) / e_pix < 1e-6
