"""Variance-ordered chunk retention and base/enhanced layer bisection."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .transform import Chunk


@dataclass(frozen=True)
class LayerPlan:
    """Retained chunks split into base and enhanced layers plus dropped ids.

    ``bl`` and ``el`` are ordered by descending variance; every variance in
    ``bl`` is >= every variance in ``el``.
    """

    bl: list[Chunk]
    el: list[Chunk]
    discarded: list[int]
    m: int

    @property
    def lambdas_bl(self) -> np.ndarray:
        return np.array([c.variance for c in self.bl])

    @property
    def lambdas_el(self) -> np.ndarray:
        return np.array([c.variance for c in self.el])


def plan_bandwidth(total_chunks: int, chunk_len: int, beta: float) -> int:
    """Number of superposed chunk pairs that fit in the compressed bandwidth.

    Source bandwidth is total_chunks*chunk_len/2 complex symbols (two real
    coefficients per symbol); each pair occupies chunk_len/2 symbols. The
    result is capped at total_chunks/2 since a pair consumes two chunks.
    """
    if beta <= 0.0 or beta > 1.0:
        raise ValueError(f"beta must lie in (0, 1], got {beta}")
    if total_chunks <= 0 or total_chunks % 2:
        raise ValueError("total_chunks must be positive and even")
    if chunk_len <= 0 or chunk_len % 2:
        raise ValueError("chunk_len must be positive and even")
    symbols_available = int(np.floor(beta * total_chunks * chunk_len / 2))
    per_pair = chunk_len // 2
    return min(symbols_available // per_pair, total_chunks // 2)


def softcast_retention(total_chunks: int, chunk_len: int, beta: float) -> int:
    """Chunks a non-superposed stream can carry: one chunk per chunk_len/2 symbols."""
    if beta <= 0.0 or beta > 1.0:
        raise ValueError(f"beta must lie in (0, 1], got {beta}")
    if chunk_len <= 0 or chunk_len % 2:
        raise ValueError("chunk_len must be positive and even")
    symbols_available = int(np.floor(beta * total_chunks * chunk_len / 2))
    return min(symbols_available // (chunk_len // 2), total_chunks)


def bisect_layers(chunks: list[Chunk], m_prime: int) -> LayerPlan:
    """Keep the 2*m_prime highest-variance chunks and bisect them into layers.

    The top m_prime chunks by variance form the base layer, the next m_prime
    the enhanced layer; the rest are discarded. Equal variances are broken by
    ascending chunk id so the split is reproducible.
    """
    if m_prime < 1:
        raise ValueError("m_prime must be >= 1 (nothing to transmit otherwise)")
    if len(chunks) < 2 * m_prime:
        raise ValueError(f"need at least {2 * m_prime} chunks, got {len(chunks)}")
    ordered = sorted(chunks, key=lambda c: (-c.variance, c.id))
    bl = ordered[:m_prime]
    el = ordered[m_prime : 2 * m_prime]
    discarded = [c.id for c in ordered[2 * m_prime :]]
    return LayerPlan(bl=bl, el=el, discarded=discarded, m=m_prime)
