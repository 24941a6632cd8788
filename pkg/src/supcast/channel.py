"""Rayleigh fading, complex symbol packing, superposed transmission, and linear decoding."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SQRT2 = np.sqrt(2.0)


@dataclass(frozen=True)
class UserGeometry:
    """Receiver location relative to the transmitter."""

    distance: float
    eta: float
    zone: str  # "near" or "far"

    def __post_init__(self):
        if self.distance < 0.0:
            raise ValueError("distance must be nonnegative")
        if self.eta <= 0.0:
            raise ValueError("path-loss exponent must be positive")
        if self.zone not in ("near", "far"):
            raise ValueError(f"zone must be 'near' or 'far', got {self.zone!r}")


@dataclass(frozen=True)
class ChannelState:
    """One user's channel draw for a GOP: complex gain and noise variance."""

    h: complex
    sigma2: float

    def __post_init__(self):
        if self.sigma2 <= 0.0:
            raise ValueError("noise variance must be positive")
        if not np.isfinite(self.h):
            raise ValueError("channel gain must be finite")


def path_loss_scale(distance: float, eta: float, ref_distance: float = 1.0) -> float:
    """Amplitude attenuation 1/sqrt(1 + (d/ref)^eta)."""
    if ref_distance <= 0.0:
        raise ValueError("reference distance must be positive")
    return 1.0 / np.sqrt(1.0 + (distance / ref_distance) ** eta)


def sample_gain(geom: UserGeometry, rng, ref_distance: float = 1.0) -> complex:
    """Draw the per-GOP complex gain: unit Rayleigh fading scaled by path loss."""
    r = (rng.standard_normal() + 1j * rng.standard_normal()) / SQRT2
    return complex(r * path_loss_scale(geom.distance, geom.eta, ref_distance))


def pack_complex(coeffs) -> np.ndarray:
    """Map pairs of real coefficients to complex symbols along the last axis.

    Symbol k is (coeffs[2k] + 1j*coeffs[2k+1])/sqrt(2), so the mean squared
    symbol magnitude equals the mean squared coefficient.
    """
    arr = np.asarray(coeffs, dtype=np.float64)
    if arr.shape[-1] % 2:
        raise ValueError("coefficient count must be even to form complex symbols")
    return (arr[..., 0::2] + 1j * arr[..., 1::2]) / SQRT2


def unpack_complex(symbols) -> np.ndarray:
    """Exact inverse of pack_complex."""
    arr = np.asarray(symbols, dtype=np.complex128)
    out = np.empty(arr.shape[:-1] + (2 * arr.shape[-1],))
    out[..., 0::2] = arr.real * SQRT2
    out[..., 1::2] = arr.imag * SQRT2
    return out


def awgn(shape, sigma2: float, rng) -> np.ndarray:
    """Circularly-symmetric complex Gaussian noise with total variance sigma2."""
    scale = np.sqrt(sigma2 / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def transmit_pair(bl, el, g_bl, g_el, state: ChannelState, rng) -> np.ndarray:
    """Received superposed symbols y = h*(g_bl*x_bl + g_el*x_el) + w.

    Scaling factors may be scalars or column vectors broadcasting over stacked
    per-chunk symbol rows.
    """
    xb = np.asarray(bl, dtype=np.complex128)
    xe = np.asarray(el, dtype=np.complex128)
    if xb.shape != xe.shape:
        raise ValueError(f"stream length mismatch: {xb.shape} vs {xe.shape}")
    clean = state.h * (np.asarray(g_bl) * xb + np.asarray(g_el) * xe)
    return clean + awgn(xb.shape, state.sigma2, rng)


def _llse(y, gain, source_var, noise_var):
    # Minimum-MSE linear estimate of a zero-mean source observed through a
    # known complex gain in additive noise.
    scale = np.conj(gain) * source_var / (np.abs(gain) ** 2 * source_var + noise_var)
    return scale * y


def receive_far(y, g_bl, g_el, lambda_bl, lambda_el, state: ChannelState) -> np.ndarray:
    """Decode the base chunk treating the superposed enhanced signal as noise.

    Returns real coefficients. Parameters broadcast like transmit_pair.
    """
    noise_eff = np.abs(state.h) ** 2 * np.asarray(g_el) ** 2 * np.asarray(lambda_el) + state.sigma2
    est = _llse(np.asarray(y), state.h * np.asarray(g_bl), np.asarray(lambda_bl), noise_eff)
    return unpack_complex(est)


def receive_near(y, bl_truth, g_bl, g_el, lambda_bl, lambda_el, state: ChannelState):
    """Decode both chunks with ideal cancellation of the base signal.

    The base contribution is subtracted using the true transmitted symbols
    (the decoder is assumed to recover it error-free), then the enhanced chunk
    is linearly decoded against thermal noise only. Returns (base coefficients,
    enhanced coefficients).
    """
    xb = np.asarray(bl_truth, dtype=np.complex128)
    residual = np.asarray(y) - state.h * np.asarray(g_bl) * xb
    est_el = _llse(residual, state.h * np.asarray(g_el), np.asarray(lambda_el), state.sigma2)
    return unpack_complex(xb), unpack_complex(est_el)
