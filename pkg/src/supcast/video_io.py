"""Raw grayscale video ingestion, synthetic test sources, and MSE/PSNR metrics."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

PEAK_VALUE = 255.0

SYNTHETIC_KINDS = ("constant", "gradient", "moving-pattern")


@dataclass(frozen=True)
class Frame:
    """One grayscale frame stored as float luminance samples, shape (height, width)."""

    samples: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.samples, dtype=np.float64)
        if arr.ndim != 2 or arr.size == 0:
            raise ValueError("frame samples must be a nonempty 2-D array")
        if not np.all(np.isfinite(arr)):
            raise ValueError("frame samples must all be finite")
        object.__setattr__(self, "samples", arr)

    @property
    def height(self) -> int:
        return self.samples.shape[0]

    @property
    def width(self) -> int:
        return self.samples.shape[1]


@dataclass(frozen=True)
class Gop:
    """Group of consecutive equal-size frames; pixels has shape (gop_size, height, width)."""

    pixels: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.pixels, dtype=np.float64)
        if arr.ndim != 3 or arr.size == 0:
            raise ValueError("GOP pixels must be a nonempty (frames, height, width) array")
        if not np.all(np.isfinite(arr)):
            raise ValueError("GOP pixels must all be finite")
        object.__setattr__(self, "pixels", arr)

    @property
    def gop_size(self) -> int:
        return self.pixels.shape[0]

    @property
    def height(self) -> int:
        return self.pixels.shape[1]

    @property
    def width(self) -> int:
        return self.pixels.shape[2]

    def frames(self) -> list[Frame]:
        return [Frame(plane) for plane in self.pixels]


def load_raw_video(path, width: int, height: int, gop_size: int) -> list[Gop]:
    """Read headerless 8-bit planar luminance video and group frames into GOPs.

    Frames are width*height bytes each, concatenated with no header. A trailing
    group with fewer than gop_size frames is discarded.
    """
    if width <= 0 or height <= 0:
        raise ValueError("frame dimensions must be positive")
    if gop_size < 1:
        raise ValueError("gop_size must be >= 1")
    p = Path(path)
    if not p.is_file():
        raise ValueError(f"video file not found: {p}")
    raw = p.read_bytes()
    frame_bytes = width * height
    if len(raw) % frame_bytes != 0:
        raise ValueError(
            f"file size {len(raw)} is not a multiple of the expected "
            f"{frame_bytes}-byte frame ({width}x{height})"
        )
    n_frames = len(raw) // frame_bytes
    n_gops = n_frames // gop_size
    if n_gops == 0:
        return []
    usable = n_gops * gop_size * frame_bytes
    data = np.frombuffer(raw[:usable], dtype=np.uint8).astype(np.float64)
    volume = data.reshape(n_gops, gop_size, height, width)
    return [Gop(volume[g]) for g in range(n_gops)]


def synthetic_gop(
    kind: str,
    width: int,
    height: int,
    gop_size: int,
    seed: int = 0,
    value: float = 128.0,
) -> Gop:
    """Generate a deterministic synthetic GOP of the given kind.

    ``constant`` fills every sample with ``value``; ``gradient`` is a seeded
    wrapping ramp; ``moving-pattern`` is a translating sum of smooth waves plus
    light pixel texture, shaped to have a video-like coefficient energy decay.
    """
    if width <= 0 or height <= 0:
        raise ValueError("frame dimensions must be positive")
    if gop_size < 1:
        raise ValueError("gop_size must be >= 1")
    if kind not in SYNTHETIC_KINDS:
        raise ValueError(f"unknown synthetic kind {kind!r}; expected one of {SYNTHETIC_KINDS}")

    rng = np.random.default_rng(seed)
    if kind == "constant":
        if not 0.0 <= value <= PEAK_VALUE:
            raise ValueError("constant value must lie in [0, 255]")
        pixels = np.full((gop_size, height, width), float(value))
        return Gop(pixels)

    tt, yy, xx = np.meshgrid(
        np.arange(gop_size, dtype=np.float64),
        np.arange(height, dtype=np.float64),
        np.arange(width, dtype=np.float64),
        indexing="ij",
    )
    if kind == "gradient":
        gx, gy = rng.uniform(-1.0, 1.0, size=2)
        base = rng.uniform(0.0, PEAK_VALUE)
        drift = rng.uniform(10.0, 60.0)
        pixels = (base + PEAK_VALUE * (gx * xx / width + gy * yy / height) + drift * tt) % 256.0
        return Gop(np.clip(pixels, 0.0, PEAK_VALUE))

    pixels = _moving_pattern(xx, yy, tt, width, height, rng)
    return Gop(pixels)


def _moving_pattern(xx, yy, tt, width, height, rng) -> np.ndarray:
    # Translating superposition of smooth 2-D waves. Low spatial frequencies
    # carry most of the energy, a mid-frequency band supplies detail the way
    # camera texture and motion do, and the white texture keeps the weakest
    # chunks from being exactly empty.
    n_low, n_mid = 24, 16
    cycles = np.concatenate(
        [0.4 + rng.exponential(2.2, size=n_low), rng.uniform(6.0, 28.0, size=n_mid)]
    )
    amp = np.concatenate(
        [1.0 / (1.0 + cycles[:n_low]) ** 1.1, rng.uniform(0.05, 0.16, size=n_mid)]
    )
    theta = rng.uniform(0.0, 2.0 * np.pi, size=n_low + n_mid)
    phase = rng.uniform(0.0, 2.0 * np.pi, size=n_low + n_mid)
    dx, dy = rng.uniform(-4.0, 4.0, size=2)

    fx = cycles * np.cos(theta) / width
    fy = cycles * np.sin(theta) / height
    field = np.zeros_like(xx)
    for k in range(n_low + n_mid):
        arg = 2.0 * np.pi * (fx[k] * (xx + dx * tt) + fy[k] * (yy + dy * tt)) + phase[k]
        field += amp[k] * np.cos(arg)

    field *= 42.0 / max(field.std(), 1e-12)
    texture = rng.normal(0.0, 4.0, size=xx.shape)
    return np.clip(128.0 + field + texture, 0.0, PEAK_VALUE)


def mse(reference: np.ndarray, reconstructed: np.ndarray) -> float:
    """Pooled mean squared error over all samples."""
    a = np.asarray(reference, dtype=np.float64)
    b = np.asarray(reconstructed, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return float(np.mean((a - b) ** 2))


def frame_psnrs(reference: Gop, reconstructed: Gop) -> np.ndarray:
    """Per-frame PSNR in dB; +inf where a frame reconstructs exactly."""
    if reference.pixels.shape != reconstructed.pixels.shape:
        raise ValueError(
            f"GOP shape mismatch: {reference.pixels.shape} vs {reconstructed.pixels.shape}"
        )
    err = reference.pixels - reconstructed.pixels
    per_frame_mse = np.mean(err**2, axis=(1, 2))
    out = np.full(per_frame_mse.shape, np.inf)
    nonzero = per_frame_mse > 0.0
    out[nonzero] = 10.0 * np.log10(PEAK_VALUE**2 / per_frame_mse[nonzero])
    return out


def psnr(reference: Gop, reconstructed: Gop) -> float:
    """Mean of per-frame PSNRs in dB (+inf when every frame is exact)."""
    return float(np.mean(frame_psnrs(reference, reconstructed)))
