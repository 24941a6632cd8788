"""Two-stage power allocation and the closed-form linear-decoder distortion model.

Stage one spreads the GOP budget across chunks in proportion to the square
root of their variances. Stage two splits each superposed pair's budget
between its base and enhanced chunks by solving the pair distortion minimum
in closed form, subject to the full-budget and layer-ordering constraints.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class PairBudget:
    """Pre-allocated powers for one base-layer chunk and one enhanced-layer chunk."""

    p_bl: float
    p_el: float

    def __post_init__(self):
        if self.p_bl < 0.0 or self.p_el < 0.0:
            raise ValueError("powers must be nonnegative")

    @property
    def p_pair(self) -> float:
        return self.p_bl + self.p_el


@dataclass(frozen=True)
class ScalingPair:
    """Amplitude scaling factors applied to a superposed chunk pair."""

    g_bl: float
    g_el: float

    def __post_init__(self):
        if self.g_bl < 0.0 or self.g_el < 0.0:
            raise ValueError("scaling factors must be nonnegative")


@dataclass(frozen=True)
class LinkParams:
    """Channel state the allocator optimizes against: worst near/far gains."""

    h_n: complex
    h_f: complex
    sigma2: float
    p_total: float

    def __post_init__(self):
        if self.sigma2 <= 0.0:
            raise ValueError("noise variance must be positive")
        if self.p_total <= 0.0:
            raise ValueError("power budget must be positive")


def preallocate(lambdas_bl, lambdas_el, p_total: float) -> list[PairBudget]:
    """Spread p_total across all chunks proportionally to sqrt(variance).

    Returns one budget per index position; positions pair base and enhanced
    budgets only after scheduling decides the actual pairing. The budgets sum
    to p_total and zero-variance chunks receive exactly zero.
    """
    lam_bl = np.asarray(lambdas_bl, dtype=np.float64)
    lam_el = np.asarray(lambdas_el, dtype=np.float64)
    if lam_bl.shape != lam_el.shape or lam_bl.ndim != 1:
        raise ValueError("variance lists must be 1-D and of equal length")
    if np.any(lam_bl < 0.0) or np.any(lam_el < 0.0):
        raise ValueError("variances must be nonnegative")
    if p_total <= 0.0:
        raise ValueError("power budget must be positive")
    roots_bl = np.sqrt(lam_bl)
    roots_el = np.sqrt(lam_el)
    denom = roots_bl.sum() + roots_el.sum()
    if denom == 0.0:
        raise ValueError("all variances are zero; no signal energy to allocate")
    p_bl = roots_bl / denom * p_total
    p_el = roots_el / denom * p_total
    return [PairBudget(float(b), float(e)) for b, e in zip(p_bl, p_el)]


def softcast_allocate(lambdas, p_total: float) -> np.ndarray:
    """Per-chunk scaling factors for non-superposed transmission.

    Power per chunk is proportional to sqrt(variance); the scaling factor
    g = sqrt(P/variance) realizes it, with g = 0 for empty chunks.
    """
    lam = np.asarray(lambdas, dtype=np.float64)
    if np.any(lam < 0.0):
        raise ValueError("variances must be nonnegative")
    roots = np.sqrt(lam)
    denom = roots.sum()
    if denom == 0.0:
        raise ValueError("all variances are zero; no signal energy to allocate")
    powers = roots / denom * p_total
    g = np.zeros_like(lam)
    positive = lam > 0.0
    g[positive] = np.sqrt(powers[positive] / lam[positive])
    return g


def distortion_near(lambda_el, g_el, h_n, sigma2):
    """MSE of linearly decoding the enhanced chunk after the base signal is removed."""
    lam = np.asarray(lambda_el, dtype=np.float64)
    s = np.abs(h_n) ** 2
    return lam * sigma2 / (s * np.asarray(g_el) ** 2 * lam + sigma2)


def distortion_far(lambda_bl, lambda_el, g_bl, g_el, h_f, sigma2):
    """MSE of linearly decoding the base chunk with the enhanced signal as noise."""
    lam_b = np.asarray(lambda_bl, dtype=np.float64)
    lam_e = np.asarray(lambda_el, dtype=np.float64)
    u = np.abs(h_f) ** 2
    interference = u * np.asarray(g_el) ** 2 * lam_e
    return lam_b * (interference + sigma2) / (u * np.asarray(g_bl) ** 2 * lam_b + interference + sigma2)


def pair_distortion(lambda_bl, lambda_el, g_bl, g_el, link: LinkParams):
    """Sum distortion of one superposed pair across both receiver classes.

    The far users' unconditional enhanced-layer loss is a constant offset and
    is accounted for at reporting time, not here.
    """
    return distortion_near(lambda_el, g_el, link.h_n, link.sigma2) + distortion_far(
        lambda_bl, lambda_el, g_bl, g_el, link.h_f, link.sigma2
    )


def _split_pair_power(lam_bl, lam_el, p_pair, s_near, u_far, sigma2):
    """Closed-form within-pair split; returns squared scaling factors (arrays).

    With the pair budget fully spent, the pair distortion is convex in the
    enhanced-layer signal power q = g_el^2 * lam_el, so the optimum is the
    stationary point clamped to [0, p_pair/2]; the upper end is where the
    layer-ordering constraint becomes active.
    """
    lam_bl = np.asarray(lam_bl, dtype=np.float64)
    lam_el, p_pair = np.broadcast_arrays(
        np.asarray(lam_el, dtype=np.float64), np.asarray(p_pair, dtype=np.float64)
    )
    lam_bl = np.broadcast_to(lam_bl, lam_el.shape)
    sigma = np.sqrt(sigma2)

    gel2 = np.zeros(lam_el.shape)
    gbl2 = np.zeros(lam_el.shape)

    live = (p_pair > 0.0) & (lam_bl > 0.0)
    el_live = live & (lam_el > 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        if s_near > 0.0 and u_far > 0.0:
            stationary = sigma / np.sqrt(s_near * u_far) * np.sqrt(
                (u_far * p_pair + sigma2) / (lam_bl * lam_el)
            ) - sigma2 / (s_near * lam_el)
        elif s_near == 0.0:
            # Useless near user: all pair power goes to the base layer.
            stationary = np.full(lam_el.shape, -np.inf)
        else:
            # Useless far user: push the enhanced layer to the ordering bound.
            stationary = np.full(lam_el.shape, np.inf)
        cap = p_pair / (2.0 * lam_el)
        gel2[el_live] = np.clip(stationary, 0.0, cap)[el_live]
        gbl2[live] = ((p_pair - gel2 * lam_el) / lam_bl)[live]
    return gbl2, gel2


def reallocate_pair(lambda_bl: float, lambda_el: float, p_pair: float, link: LinkParams) -> ScalingPair:
    """Optimal scaling factors for one superposed pair under its budget.

    The full pair budget is spent (signal power g_bl^2*lam_bl + g_el^2*lam_el
    equals p_pair) and the enhanced-layer signal power never exceeds the base
    layer's. Degenerate inputs (zero budget or an empty pair) scale to zero.
    """
    if lambda_bl < 0.0 or lambda_el < 0.0:
        raise ValueError("variances must be nonnegative")
    if lambda_bl == 0.0 and lambda_el > 0.0:
        raise ValueError("base-layer variance of zero with nonzero enhanced variance")
    gbl2, gel2 = _split_pair_power(
        lambda_bl,
        lambda_el,
        max(p_pair, 0.0),
        float(np.abs(link.h_n) ** 2),
        float(np.abs(link.h_f) ** 2),
        link.sigma2,
    )
    return ScalingPair(float(np.sqrt(gbl2)), float(np.sqrt(gel2)))


def reallocate_grid(lambdas_bl, lambdas_el, budgets: list[PairBudget], link: LinkParams):
    """Scaling factors for every hypothetical (base i, enhanced j) pairing.

    Pair (i, j) spends budget p_bl[i] + p_el[j]. Returns two (M, M) arrays of
    scaling factors, indexed [i, j].
    """
    lam_bl = np.asarray(lambdas_bl, dtype=np.float64)[:, None]
    lam_el = np.asarray(lambdas_el, dtype=np.float64)[None, :]
    p_bl = np.array([b.p_bl for b in budgets])[:, None]
    p_el = np.array([b.p_el for b in budgets])[None, :]
    if np.any((lam_bl == 0.0) & (lam_el > 0.0)):
        raise ValueError("base-layer variance of zero with nonzero enhanced variance")
    gbl2, gel2 = _split_pair_power(
        lam_bl,
        lam_el,
        p_bl + p_el,
        float(np.abs(link.h_n) ** 2),
        float(np.abs(link.h_f) ** 2),
        link.sigma2,
    )
    return np.sqrt(gbl2), np.sqrt(gel2)


def distortion_matrix(lambdas_bl, lambdas_el, budgets: list[PairBudget], link: LinkParams) -> np.ndarray:
    """Pairwise sum-distortion under the two-stage power rule, indexed [i, j]."""
    lam_bl = np.asarray(lambdas_bl, dtype=np.float64)[:, None]
    lam_el = np.asarray(lambdas_el, dtype=np.float64)[None, :]
    g_bl, g_el = reallocate_grid(lambdas_bl, lambdas_el, budgets, link)
    return np.asarray(pair_distortion(lam_bl, lam_el, g_bl, g_el, link))
