"""Orthonormal 3-D DCT over a GOP and chunk partitioning of the coefficient volume."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.fft import dctn, idctn

from .video_io import Gop


@dataclass(frozen=True)
class CoeffVolume:
    """Transform coefficients of one GOP, shape (depth, height, width)."""

    coeffs: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.coeffs, dtype=np.float64)
        if arr.ndim != 3 or arr.size == 0:
            raise ValueError("coefficient volume must be a nonempty 3-D array")
        object.__setattr__(self, "coeffs", arr)

    @property
    def depth(self) -> int:
        return self.coeffs.shape[0]

    @property
    def height(self) -> int:
        return self.coeffs.shape[1]

    @property
    def width(self) -> int:
        return self.coeffs.shape[2]

    @property
    def dims(self) -> tuple[int, int, int]:
        return self.coeffs.shape


@dataclass(frozen=True)
class Chunk:
    """Rectangular coefficient block with its mean energy.

    ``variance`` is the zero-mean second moment (mean of squared coefficients),
    which is the per-coefficient signal power the allocator and receivers use.
    ``origin`` is (plane, row, col) of the block's top-left coefficient.
    """

    id: int
    coeffs: np.ndarray
    variance: float
    origin: tuple[int, int, int]

    @property
    def size(self) -> int:
        return self.coeffs.size

    @property
    def energy(self) -> float:
        return self.variance * self.coeffs.size


def forward_3d_dct(gop: Gop) -> CoeffVolume:
    """Energy-preserving separable type-II DCT along time, height, and width."""
    return CoeffVolume(dctn(gop.pixels, type=2, norm="ortho", axes=(0, 1, 2)))


def inverse_3d_dct(vol: CoeffVolume) -> Gop:
    """Exact inverse of forward_3d_dct up to floating-point error."""
    return Gop(idctn(vol.coeffs, type=2, norm="ortho", axes=(0, 1, 2)))


def partition_chunks(vol: CoeffVolume, chunks_per_side: int) -> list[Chunk]:
    """Split each temporal plane into a chunks_per_side x chunks_per_side block grid.

    Produces depth * chunks_per_side**2 chunks; every coefficient lands in
    exactly one chunk. Chunk ids run plane-major, then row, then column.
    """
    if chunks_per_side < 1:
        raise ValueError("chunks_per_side must be >= 1")
    depth, height, width = vol.dims
    if height % chunks_per_side or width % chunks_per_side:
        raise ValueError(
            f"frame dimensions {width}x{height} must be divisible by "
            f"chunks_per_side={chunks_per_side}"
        )
    bh = height // chunks_per_side
    bw = width // chunks_per_side
    chunks = []
    cid = 0
    for plane in range(depth):
        for br in range(chunks_per_side):
            for bc in range(chunks_per_side):
                block = vol.coeffs[plane, br * bh : (br + 1) * bh, bc * bw : (bc + 1) * bw]
                chunks.append(
                    Chunk(
                        id=cid,
                        coeffs=block.copy(),
                        variance=float(np.mean(block**2)),
                        origin=(plane, br * bh, bc * bw),
                    )
                )
                cid += 1
    return chunks


def assemble_chunks(chunks: list[Chunk], dims: tuple[int, int, int]) -> CoeffVolume:
    """Place chunk blocks back into a volume, zero-filling uncovered positions.

    Inverse of partition_chunks on a full chunk set; a partial set leaves the
    missing blocks at zero.
    """
    depth, height, width = dims
    out = np.zeros((depth, height, width))
    covered = np.zeros((depth, height, width), dtype=bool)
    for chunk in chunks:
        plane, row, col = chunk.origin
        bh, bw = chunk.coeffs.shape
        if plane >= depth or row + bh > height or col + bw > width:
            raise ValueError(f"chunk {chunk.id} at {chunk.origin} does not fit in {dims}")
        if covered[plane, row : row + bh, col : col + bw].any():
            raise ValueError(f"chunk {chunk.id} overlaps a previously placed chunk")
        out[plane, row : row + bh, col : col + bw] = chunk.coeffs
        covered[plane, row : row + bh, col : col + bw] = True
    return CoeffVolume(out)
