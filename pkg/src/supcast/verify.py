"""Brute-force and Monte-Carlo oracles plus the pass/fail verification suites.

The oracles deliberately avoid the closed-form code paths they check: the
pair power split is compared against an exhaustive grid over feasible signal
powers, the distortion formulas against simulated transmission, and the
deferred-acceptance scheduler against full permutation search.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from . import channel, matching, power
from .channel import ChannelState
from .power import LinkParams


@dataclass(frozen=True)
class CheckResult:
    """One verified property: the measured value against its threshold."""

    name: str
    measured: float
    threshold: float
    passed: bool
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = f" ({self.detail})" if self.detail else ""
        return f"{status}  {self.name}: measured {self.measured:.6g} vs threshold {self.threshold:.6g}{extra}"


# ---------------------------------------------------------------------------
# instance generators


def random_link(rng, p_total: float, sigma2: float) -> LinkParams:
    """Worst-user channel draw shaped like the simulated cell geometry."""
    d_near = rng.uniform(1.0, 5.0)
    d_far = rng.uniform(5.0, 9.0)
    ray = lambda: (rng.standard_normal() + 1j * rng.standard_normal()) / np.sqrt(2.0)
    h_n = ray() / np.sqrt(1.0 + d_near**2)
    h_f = ray() / np.sqrt(1.0 + d_far**2)
    return LinkParams(h_n=complex(h_n), h_f=complex(h_f), sigma2=sigma2, p_total=p_total)


def random_pipeline_matrix(rng, m: int) -> np.ndarray:
    """Pairwise distortion matrix drawn the way the encoder produces them.

    Chunk variances follow a decaying profile with a texture floor, budgets
    come from the square-root pre-allocation, and the channel draw mimics the
    worst near/far users of a simulated cell.
    """
    scale = rng.uniform(50.0, 5000.0)
    decay = rng.uniform(0.05, 0.6)
    lam = scale * np.exp(-decay * np.arange(2 * m)) + rng.uniform(0.5, 5.0)
    lam_bl, lam_el = lam[:m], lam[m:]
    p_total = 2.0 * m
    sigma2 = 10.0 ** (-rng.uniform(5.0, 25.0) / 10.0)
    link = random_link(rng, p_total, sigma2)
    budgets = power.preallocate(lam_bl, lam_el, p_total)
    return power.distortion_matrix(lam_bl, lam_el, budgets, link)


def random_pair_draw(rng):
    """One (variances, budget, link) draw for the pair power-split check."""
    lam_bl = rng.uniform(1.0, 100.0)
    lam_el = rng.uniform(0.01, 1.0) * lam_bl
    p_pair = rng.uniform(0.2, 8.0)
    sigma2 = 10.0 ** (-rng.uniform(5.0, 25.0) / 10.0)
    link = random_link(rng, p_total=p_pair, sigma2=sigma2)
    return lam_bl, lam_el, p_pair, link


# ---------------------------------------------------------------------------
# oracles


def grid_search_pair(lam_bl, lam_el, p_pair, link: LinkParams, resolution: float = 1e-4,
                     coarse: int = 240):
    """Exhaustive search of the within-pair split over feasible signal powers.

    Sweeps the (base, enhanced) signal-power plane: a coarse 2-D grid over the
    whole feasible triangle plus a fine scan of the full-budget boundary at
    ``resolution * p_pair`` steps. Distortion is evaluated directly in signal
    powers, independent of the closed-form solver. Returns the minimum found.
    """
    s = abs(link.h_n) ** 2
    u = abs(link.h_f) ** 2
    sigma2 = link.sigma2

    def total_d(p, q):
        d_near = lam_el * sigma2 / (s * q + sigma2)
        d_far = lam_bl * (u * q + sigma2) / (u * p + u * q + sigma2)
        return d_near + d_far

    # coarse interior sweep (q <= p, p + q <= p_pair)
    grid = np.linspace(0.0, p_pair, coarse)
    pg, qg = np.meshgrid(grid, grid, indexing="ij")
    feasible = (qg <= pg) & (pg + qg <= p_pair)
    d_interior = np.where(feasible, total_d(pg, qg), np.inf)
    best = float(d_interior.min())

    # fine scan of the active-budget boundary
    q = np.arange(0.0, p_pair / 2.0 + resolution * p_pair, resolution * p_pair)
    q = q[q <= p_pair / 2.0]
    d_boundary = total_d(p_pair - q, q)
    idx = int(np.argmin(d_boundary))
    if d_boundary[idx] < best:
        best = float(d_boundary[idx])
    return best


def lagrangian_power_oracle(lambdas, p_total: float) -> np.ndarray:
    """Numerically minimize sum(lambda_k / P_k) subject to sum(P_k) = p_total."""
    lam = np.asarray(lambdas, dtype=np.float64)
    n = lam.size
    x0 = np.full(n, p_total / n)
    res = minimize(
        lambda p: float(np.sum(lam / p)),
        x0,
        jac=lambda p: -lam / p**2,
        constraints=[{"type": "eq", "fun": lambda p: p.sum() - p_total}],
        bounds=[(1e-9 * p_total, p_total)] * n,
        method="SLSQP",
        options={"maxiter": 500, "ftol": 1e-14},
    )
    if not res.success:
        raise RuntimeError(f"power oracle failed to converge: {res.message}")
    return res.x


def mc_mse_far(lam_bl, lam_el, g_bl, g_el, link: LinkParams, n_coeffs: int, rng) -> float:
    """Empirical decoding MSE of the base chunk via simulated transmission."""
    state = ChannelState(h=link.h_f, sigma2=link.sigma2)
    x_bl = rng.normal(0.0, np.sqrt(lam_bl), n_coeffs)
    x_el = rng.normal(0.0, np.sqrt(lam_el), n_coeffs) if lam_el > 0 else np.zeros(n_coeffs)
    y = channel.transmit_pair(
        channel.pack_complex(x_bl), channel.pack_complex(x_el), g_bl, g_el, state, rng
    )
    decoded = channel.receive_far(y, g_bl, g_el, lam_bl, lam_el, state)
    return float(np.mean((decoded - x_bl) ** 2))


def mc_mse_near(lam_bl, lam_el, g_bl, g_el, link: LinkParams, n_coeffs: int, rng) -> float:
    """Empirical decoding MSE of the enhanced chunk via simulated transmission."""
    state = ChannelState(h=link.h_n, sigma2=link.sigma2)
    x_bl = rng.normal(0.0, np.sqrt(lam_bl), n_coeffs)
    x_el = rng.normal(0.0, np.sqrt(lam_el), n_coeffs)
    x_bl_sym = channel.pack_complex(x_bl)
    y = channel.transmit_pair(x_bl_sym, channel.pack_complex(x_el), g_bl, g_el, state, rng)
    _, el_dec = channel.receive_near(y, x_bl_sym, g_bl, g_el, lam_bl, lam_el, state)
    return float(np.mean((el_dec - x_el) ** 2))


def enumerate_stable_matchings(d: np.ndarray) -> list[np.ndarray]:
    """All stable pairings of a small matrix, by filtering every permutation."""
    m = d.shape[0]
    out = []
    for perm in itertools.permutations(range(m)):
        cand = matching.Matching(pairs=np.array(perm, dtype=np.int64))
        if matching.is_stable(cand, d):
            out.append(cand.pairs)
    return out


# ---------------------------------------------------------------------------
# measured statistics used by both the CLI report and the acceptance tests


def stability_stats(n_matrices: int = 1000, m_low: int = 2, m_high: int = 32, seed: int = 7):
    """Stability and proposal-bound violations over random matrices, both drivers."""
    rng = np.random.default_rng(seed)
    violations = 0
    worst_ratio = 0.0
    for _ in range(n_matrices):
        m = int(rng.integers(m_low, m_high + 1))
        d = rng.uniform(0.0, 1.0, size=(m, m))
        for driver in ("bl", "el"):
            result = matching.becma(d, driver)
            ok = matching.is_stable(result, d) and result.proposals <= m * m
            worst_ratio = max(worst_ratio, result.proposals / (m * m))
            if not ok:
                violations += 1
    return {"violations": violations, "trials": 2 * n_matrices, "worst_proposal_ratio": worst_ratio}


def near_optimality_stats(n_instances: int = 500, m: int = 7, seed: int = 11):
    """Scheduler totals vs exhaustive search on realistic matrices, both drivers."""
    rng = np.random.default_rng(seed)
    gaps = []
    driver_diffs = []
    within = 0
    for _ in range(n_instances):
        d = random_pipeline_matrix(rng, m)
        best = matching.total_distortion(matching.exhaustive_match(d), d)
        t_bl = matching.total_distortion(matching.becma(d, "bl"), d)
        t_el = matching.total_distortion(matching.becma(d, "el"), d)
        gaps.append(t_bl / best - 1.0)
        driver_diffs.append(abs(t_bl - t_el) / best)
        if t_bl <= 1.05 * best:
            within += 1
    return {
        "frac_within_5pct": within / n_instances,
        "mean_gap": float(np.mean(gaps)),
        "max_gap": float(np.max(gaps)),
        "mean_driver_diff": float(np.mean(driver_diffs)),
    }


def reallocation_stats(n_draws: int = 200, seed: int = 13, resolution: float = 1e-4):
    """Closed-form split vs grid search, plus constraint residuals."""
    rng = np.random.default_rng(seed)
    worst_gap = 0.0
    worst_budget_err = 0.0
    order_violations = 0
    for _ in range(n_draws):
        lam_bl, lam_el, p_pair, link = random_pair_draw(rng)
        sp = power.reallocate_pair(lam_bl, lam_el, p_pair, link)
        achieved = float(power.pair_distortion(lam_bl, lam_el, sp.g_bl, sp.g_el, link))
        best = grid_search_pair(lam_bl, lam_el, p_pair, link, resolution=resolution)
        worst_gap = max(worst_gap, achieved / best - 1.0)
        spent = sp.g_bl**2 * lam_bl + sp.g_el**2 * lam_el
        worst_budget_err = max(worst_budget_err, abs(spent - p_pair) / p_pair)
        if sp.g_el**2 * lam_el > sp.g_bl**2 * lam_bl * (1.0 + 1e-12) + 1e-12:
            order_violations += 1
    return {
        "worst_gap": worst_gap,
        "worst_budget_err": worst_budget_err,
        "order_violations": order_violations,
    }


def preallocate_stats(n_instances: int = 50, seed: int = 17):
    """Closed-form pre-allocation vs the numerical Lagrangian oracle."""
    rng = np.random.default_rng(seed)
    worst_rel = 0.0
    worst_budget = 0.0
    for _ in range(n_instances):
        m = int(rng.integers(2, 7))
        lam_bl = np.sort(rng.uniform(1.0, 50.0, m))[::-1]
        lam_el = np.sort(rng.uniform(0.5, 1.0, m) * lam_bl.min())[::-1]
        p_total = float(rng.uniform(1.0, 20.0))
        budgets = power.preallocate(lam_bl, lam_el, p_total)
        mine = np.array([b.p_bl for b in budgets] + [b.p_el for b in budgets])
        worst_budget = max(worst_budget, abs(mine.sum() - p_total) / p_total)
        oracle = lagrangian_power_oracle(np.concatenate([lam_bl, lam_el]), p_total)
        worst_rel = max(worst_rel, float(np.max(np.abs(mine - oracle) / oracle)))
    return {"worst_rel_err": worst_rel, "worst_budget_err": worst_budget}


def distortion_mc_stats(n_sets: int = 20, n_coeffs: int = 1_000_000, seed: int = 19):
    """Closed-form distortions vs Monte-Carlo transmission, worst relative error."""
    rng = np.random.default_rng(seed)
    worst_near = 0.0
    worst_far = 0.0
    for _ in range(n_sets):
        lam_bl, lam_el, p_pair, link = random_pair_draw(rng)
        sp = power.reallocate_pair(lam_bl, lam_el, p_pair, link)
        g_bl, g_el = sp.g_bl, max(sp.g_el, 1e-3)  # keep the enhanced layer observable
        pred_far = float(power.distortion_far(lam_bl, lam_el, g_bl, g_el, link.h_f, link.sigma2))
        emp_far = mc_mse_far(lam_bl, lam_el, g_bl, g_el, link, n_coeffs, rng)
        worst_far = max(worst_far, abs(emp_far - pred_far) / pred_far)
        pred_near = float(power.distortion_near(lam_el, g_el, link.h_n, link.sigma2))
        emp_near = mc_mse_near(lam_bl, lam_el, g_bl, g_el, link, n_coeffs, rng)
        worst_near = max(worst_near, abs(emp_near - pred_near) / pred_near)
    return {"worst_rel_near": worst_near, "worst_rel_far": worst_far}


# ---------------------------------------------------------------------------
# suites


def suite_matching(fast: bool = False) -> list[CheckResult]:
    n_stab = 200 if fast else 1000
    n_inst = 100 if fast else 500
    stab = stability_stats(n_matrices=n_stab)
    opt = near_optimality_stats(n_instances=n_inst)
    return [
        CheckResult(
            "stable matching on random matrices",
            stab["violations"], 0, stab["violations"] == 0,
            f"{stab['trials']} runs, worst proposal ratio {stab['worst_proposal_ratio']:.2f}",
        ),
        CheckResult(
            "share of instances within 5% of exhaustive",
            opt["frac_within_5pct"], 0.95, opt["frac_within_5pct"] >= 0.95,
        ),
        CheckResult(
            "mean optimality gap vs exhaustive",
            opt["mean_gap"], 0.02, opt["mean_gap"] <= 0.02,
        ),
        CheckResult(
            "mean driver disagreement",
            opt["mean_driver_diff"], 0.02, opt["mean_driver_diff"] <= 0.02,
        ),
    ]


def suite_power(fast: bool = False) -> list[CheckResult]:
    n_draws = 40 if fast else 200
    realloc = reallocation_stats(n_draws=n_draws)
    prealloc = preallocate_stats(n_instances=10 if fast else 50)
    return [
        CheckResult(
            "pair split vs grid-search optimum (relative gap)",
            realloc["worst_gap"], 0.01, realloc["worst_gap"] <= 0.01,
        ),
        CheckResult(
            "pair budget spent exactly (relative residual)",
            realloc["worst_budget_err"], 1e-9, realloc["worst_budget_err"] <= 1e-9,
        ),
        CheckResult(
            "layer power ordering violations",
            realloc["order_violations"], 0, realloc["order_violations"] == 0,
        ),
        CheckResult(
            "pre-allocation vs Lagrangian oracle (relative error)",
            prealloc["worst_rel_err"], 1e-3, prealloc["worst_rel_err"] <= 1e-3,
        ),
        CheckResult(
            "pre-allocation budget conservation",
            prealloc["worst_budget_err"], 1e-9, prealloc["worst_budget_err"] <= 1e-9,
        ),
    ]


def suite_distortion(fast: bool = False) -> list[CheckResult]:
    stats = distortion_mc_stats(n_sets=5 if fast else 20, n_coeffs=200_000 if fast else 1_000_000)
    return [
        CheckResult(
            "near-user closed form vs Monte-Carlo (worst relative error)",
            stats["worst_rel_near"], 0.03, stats["worst_rel_near"] <= 0.03,
        ),
        CheckResult(
            "far-user closed form vs Monte-Carlo (worst relative error)",
            stats["worst_rel_far"], 0.03, stats["worst_rel_far"] <= 0.03,
        ),
    ]


SUITES = {
    "matching": suite_matching,
    "power": suite_power,
    "distortion": suite_distortion,
}


def run_suites(names, fast: bool = False) -> list[CheckResult]:
    results = []
    for name in names:
        if name not in SUITES:
            raise ValueError(f"unknown verification suite {name!r}; expected one of {sorted(SUITES)}")
        results.extend(SUITES[name](fast=fast))
    return results
