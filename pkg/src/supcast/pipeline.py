"""End-to-end multicast simulation: encode a GOP per scheme, run every receiver, score.

Power and scheduling are optimized against the worst near and far channel
draws so every user in a zone can decode what the plan promises; results are
reported per user.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import channel, layering, matching, power, transform
from .channel import ChannelState, UserGeometry
from .layering import LayerPlan
from .matching import Matching
from .power import LinkParams
from .transform import Chunk
from .video_io import Gop, frame_psnrs

SCHEMES = ("supcast_bl", "supcast_el", "supcast_exhaustive", "softcast", "noma_ra")

SUPERPOSED_SCHEMES = ("supcast_bl", "supcast_el", "supcast_exhaustive", "noma_ra")


@dataclass(frozen=True)
class Scenario:
    """One simulation cell: users, channel statistics, and coding settings."""

    near_users: list[UserGeometry]
    far_users: list[UserGeometry]
    eta: float = 2.0
    snr_db: float = 15.0
    beta: float = 0.5
    gop_size: int = 4
    chunks_per_side: int = 8
    p_chunk: float = 1.0
    scheme: str = "supcast_bl"
    seed: int = 0
    ref_distance: float = 300.0
    clamp: bool = False

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}; expected one of {SCHEMES}")
        if not 0.0 < self.beta <= 1.0:
            raise ValueError(f"beta must lie in (0, 1], got {self.beta}")
        if self.p_chunk <= 0.0:
            raise ValueError("per-chunk power must be positive")
        for geom in self.near_users:
            if geom.zone != "near":
                raise ValueError("near_users must all have zone 'near'")
        for geom in self.far_users:
            if geom.zone != "far":
                raise ValueError("far_users must all have zone 'far'")

    @property
    def sigma2(self) -> float:
        """Noise variance from the configured channel SNR at the per-chunk power."""
        return self.p_chunk * 10.0 ** (-self.snr_db / 10.0)

    @property
    def users(self) -> list[UserGeometry]:
        return list(self.near_users) + list(self.far_users)


@dataclass(frozen=True)
class ChannelStates:
    """Per-user channel draws for one GOP, ordered like Scenario.users."""

    near: list[ChannelState]
    far: list[ChannelState]

    def worst_near(self) -> ChannelState:
        return min(self.near, key=lambda s: abs(s.h))

    def worst_far(self) -> ChannelState:
        return min(self.far, key=lambda s: abs(s.h))

    @property
    def all(self) -> list[ChannelState]:
        return list(self.near) + list(self.far)


@dataclass(frozen=True)
class TransmissionPlan:
    """Everything the simulated transmitter emits plus receiver-side metadata."""

    scheme: str
    scenario: Scenario
    source: Gop
    dims: tuple[int, int, int]
    m: int
    superposed: bool
    bl_chunks: list[Chunk]
    el_chunks: list[Chunk] | None  # slot-aligned (already permuted); None when not superposed
    bl_coeffs: np.ndarray  # (m, chunk_len)
    el_coeffs: np.ndarray  # zeros when not superposed
    lambdas_bl: np.ndarray
    lambdas_el: np.ndarray
    g_bl: np.ndarray
    g_el: np.ndarray
    pairing: Matching | None
    layer: LayerPlan | None
    discarded_ids: list[int]
    discarded_energy: float
    el_energy: float
    p_total: float


@dataclass(frozen=True)
class RunResult:
    """Per-user scoring row for one simulation cell."""

    scheme: str
    seed: int
    snr_db: float
    beta: float
    user_id: int
    zone: str
    distance_m: float
    psnr_db: float
    mse_total: float
    mse_llse: float
    mse_discarded: float
    mse_undecodable_el: float


@dataclass(frozen=True)
class Sweep:
    """Cartesian experiment grid over schemes, betas, SNRs, and trial seeds."""

    schemes: list[str]
    snr_db: list[float]
    betas: list[float]
    seeds: list[int]
    chunks_per_side: int = 8
    eta: float = 2.0
    p_chunk: float = 1.0
    users_per_zone: int = 5
    near_radius: tuple[float, float] = (100.0, 500.0)
    far_radius: tuple[float, float] = (500.0, 900.0)
    ref_distance: float = 300.0
    master_seed: int = 0
    clamp: bool = False

    def __post_init__(self):
        for scheme in self.schemes:
            if scheme not in SCHEMES:
                raise ValueError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")
        for beta in self.betas:
            if not 0.0 < beta <= 1.0:
                raise ValueError(f"beta must lie in (0, 1], got {beta}")
        if any(int(s) < 0 for s in self.seeds) or self.master_seed < 0:
            raise ValueError("seeds must be nonnegative")
        if self.users_per_zone < 1:
            raise ValueError("users_per_zone must be >= 1")


def _stream(*keys) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(k) for k in keys]))


def _snr_key(snr_db: float) -> int:
    return int(round(snr_db * 1000.0)) + 1_000_000


def _beta_key(beta: float) -> int:
    return int(round(beta * 1_000_000.0))


def _partition(gop: Gop, scenario: Scenario):
    vol = transform.forward_3d_dct(gop)
    chunks = transform.partition_chunks(vol, scenario.chunks_per_side)
    return vol.dims, chunks


def _superposed_plan(gop, scenario, layer, pairing, g_bl, g_el, p_total, chunks, dims):
    by_id = {c.id: c for c in chunks}
    el_slots = [layer.el[j] for j in pairing.pairs]
    discarded_energy = float(sum(by_id[cid].energy for cid in layer.discarded))
    el_energy = float(sum(c.energy for c in layer.el))
    return TransmissionPlan(
        scheme=scenario.scheme,
        scenario=scenario,
        source=gop,
        dims=dims,
        m=layer.m,
        superposed=True,
        bl_chunks=list(layer.bl),
        el_chunks=el_slots,
        bl_coeffs=np.stack([c.coeffs.ravel() for c in layer.bl]),
        el_coeffs=np.stack([c.coeffs.ravel() for c in el_slots]),
        lambdas_bl=layer.lambdas_bl,
        lambdas_el=np.array([c.variance for c in el_slots]),
        g_bl=np.asarray(g_bl, dtype=np.float64),
        g_el=np.asarray(g_el, dtype=np.float64),
        pairing=pairing,
        layer=layer,
        discarded_ids=list(layer.discarded),
        discarded_energy=discarded_energy,
        el_energy=el_energy,
        p_total=p_total,
    )


def encode_supcast(gop: Gop, scenario: Scenario, states: ChannelStates) -> TransmissionPlan:
    """Full encoding chain: transform, layering, two-stage power, pair scheduling.

    The pairwise distortion matrix is evaluated at the worst near and far
    channel draws, then scheduled by deferred acceptance (or exhaustively for
    the supcast_exhaustive scheme).
    """
    dims, chunks = _partition(gop, scenario)
    m = layering.plan_bandwidth(len(chunks), chunks[0].size, scenario.beta)
    layer = layering.bisect_layers(chunks, m)
    p_total = scenario.p_chunk * 2 * m
    budgets = power.preallocate(layer.lambdas_bl, layer.lambdas_el, p_total)
    link = LinkParams(states.worst_near().h, states.worst_far().h, scenario.sigma2, p_total)

    lam_bl = layer.lambdas_bl
    lam_el = layer.lambdas_el
    g_bl_grid, g_el_grid = power.reallocate_grid(lam_bl, lam_el, budgets, link)
    d = np.asarray(
        power.pair_distortion(lam_bl[:, None], lam_el[None, :], g_bl_grid, g_el_grid, link)
    )
    if scenario.scheme == "supcast_el":
        pairing = matching.becma(d, "el")
    elif scenario.scheme == "supcast_exhaustive":
        pairing = matching.exhaustive_match(d)
    else:
        pairing = matching.becma(d, "bl")

    rows = np.arange(m)
    g_bl = g_bl_grid[rows, pairing.pairs]
    g_el = g_el_grid[rows, pairing.pairs]
    return _superposed_plan(gop, scenario, layer, pairing, g_bl, g_el, p_total, chunks, dims)


def encode_noma_ra(gop: Gop, scenario: Scenario, seed) -> TransmissionPlan:
    """Reference superposed encoding: random pairing, square-root power rule only."""
    dims, chunks = _partition(gop, scenario)
    m = layering.plan_bandwidth(len(chunks), chunks[0].size, scenario.beta)
    layer = layering.bisect_layers(chunks, m)
    p_total = scenario.p_chunk * 2 * m
    pairing = matching.random_match(m, seed)
    g_all = power.softcast_allocate(
        np.concatenate([layer.lambdas_bl, layer.lambdas_el]), p_total
    )
    g_bl = g_all[:m]
    g_el = g_all[m:][pairing.pairs]
    return _superposed_plan(gop, scenario, layer, pairing, g_bl, g_el, p_total, chunks, dims)


def encode_softcast(gop: Gop, scenario: Scenario) -> TransmissionPlan:
    """Non-superposed baseline: keep what fits, one chunk per symbol slot."""
    dims, chunks = _partition(gop, scenario)
    retained = layering.softcast_retention(len(chunks), chunks[0].size, scenario.beta)
    if retained < 1:
        raise ValueError("bandwidth too small to carry a single chunk")
    ordered = sorted(chunks, key=lambda c: (-c.variance, c.id))
    kept = ordered[:retained]
    dropped = ordered[retained:]
    p_total = scenario.p_chunk * retained
    g = power.softcast_allocate(np.array([c.variance for c in kept]), p_total)
    coeffs = np.stack([c.coeffs.ravel() for c in kept])
    return TransmissionPlan(
        scheme=scenario.scheme,
        scenario=scenario,
        source=gop,
        dims=dims,
        m=retained,
        superposed=False,
        bl_chunks=kept,
        el_chunks=None,
        bl_coeffs=coeffs,
        el_coeffs=np.zeros_like(coeffs),
        lambdas_bl=np.array([c.variance for c in kept]),
        lambdas_el=np.zeros(retained),
        g_bl=np.asarray(g, dtype=np.float64),
        g_el=np.zeros(retained),
        pairing=None,
        layer=None,
        discarded_ids=[c.id for c in dropped],
        discarded_energy=float(sum(c.energy for c in dropped)),
        el_energy=0.0,
        p_total=p_total,
    )


def encode(gop: Gop, scenario: Scenario, states: ChannelStates, noma_seed) -> TransmissionPlan:
    """Dispatch to the scheme-specific encoder."""
    if scenario.scheme == "softcast":
        return encode_softcast(gop, scenario)
    if scenario.scheme == "noma_ra":
        return encode_noma_ra(gop, scenario, noma_seed)
    return encode_supcast(gop, scenario, states)


def _simulate_user_raw(plan: TransmissionPlan, user: UserGeometry, state: ChannelState, rng):
    """Transmit every slot through one user's channel and reconstruct.

    Returns the reconstructed GOP plus the squared-error bookkeeping needed
    for multi-GOP accumulation.
    """
    col = lambda a: np.asarray(a)[:, None]
    x_bl = channel.pack_complex(plan.bl_coeffs)
    x_el = channel.pack_complex(plan.el_coeffs)
    y = channel.transmit_pair(x_bl, x_el, col(plan.g_bl), col(plan.g_el), state, rng)

    if plan.superposed and user.zone == "near":
        bl_dec, el_dec = channel.receive_near(
            y, x_bl, col(plan.g_bl), col(plan.g_el),
            col(plan.lambdas_bl), col(plan.lambdas_el), state,
        )
        decode_el = True
        sq_undecodable = 0.0
    else:
        bl_dec = channel.receive_far(
            y, col(plan.g_bl), col(plan.g_el),
            col(plan.lambdas_bl), col(plan.lambdas_el), state,
        )
        el_dec = np.zeros_like(plan.el_coeffs)
        decode_el = False
        sq_undecodable = plan.el_energy if plan.superposed else 0.0

    sq_llse = float(np.sum((bl_dec - plan.bl_coeffs) ** 2))
    if decode_el:
        sq_llse += float(np.sum((el_dec - plan.el_coeffs) ** 2))

    decoded = []
    for i, bl in enumerate(plan.bl_chunks):
        decoded.append(replace(bl, coeffs=bl_dec[i].reshape(bl.coeffs.shape)))
        if plan.superposed:
            el = plan.el_chunks[i]
            decoded.append(replace(el, coeffs=el_dec[i].reshape(el.coeffs.shape)))
    vol = transform.assemble_chunks(decoded, plan.dims)
    recon = transform.inverse_3d_dct(vol)
    if plan.scenario.clamp:
        recon = Gop(np.clip(recon.pixels, 0.0, 255.0))

    err = plan.source.pixels - recon.pixels
    return recon, {
        "frame_psnrs": frame_psnrs(plan.source, recon),
        "sq_total": float(np.sum(err**2)),
        "sq_llse": sq_llse,
        "sq_discarded": plan.discarded_energy,
        "sq_undecodable": sq_undecodable,
        "n_pixels": plan.source.pixels.size,
    }


def simulate_user(
    plan: TransmissionPlan, user: UserGeometry, state: ChannelState, rng, user_id: int = 0
) -> tuple[Gop, RunResult]:
    """Simulate one user's reception of a single-GOP plan and score it."""
    recon, raw = _simulate_user_raw(plan, user, state, rng)
    n = raw["n_pixels"]
    result = RunResult(
        scheme=plan.scheme,
        seed=plan.scenario.seed,
        snr_db=plan.scenario.snr_db,
        beta=plan.scenario.beta,
        user_id=user_id,
        zone=user.zone,
        distance_m=user.distance,
        psnr_db=float(np.mean(raw["frame_psnrs"])),
        mse_total=raw["sq_total"] / n,
        mse_llse=raw["sq_llse"] / n,
        mse_discarded=raw["sq_discarded"] / n,
        mse_undecodable_el=raw["sq_undecodable"] / n,
    )
    return recon, result


def place_users(sweep: Sweep, trial_seed: int) -> tuple[list[UserGeometry], list[UserGeometry]]:
    """Draw user radii uniformly within each zone ring, deterministically per trial."""
    rng = _stream(sweep.master_seed, trial_seed, 1)
    near = [
        UserGeometry(float(d), sweep.eta, "near")
        for d in rng.uniform(*sweep.near_radius, size=sweep.users_per_zone)
    ]
    far = [
        UserGeometry(float(d), sweep.eta, "far")
        for d in rng.uniform(*sweep.far_radius, size=sweep.users_per_zone)
    ]
    return near, far


def draw_states(scenario: Scenario, rng) -> ChannelStates:
    """One channel draw per user for a GOP interval."""
    make = lambda geom: ChannelState(
        channel.sample_gain(geom, rng, scenario.ref_distance), scenario.sigma2
    )
    return ChannelStates(
        near=[make(g) for g in scenario.near_users],
        far=[make(g) for g in scenario.far_users],
    )


def run_trial(gops: list[Gop], scenario: Scenario, sweep: Sweep) -> list[RunResult]:
    """Simulate every GOP and user for one sweep cell, aggregating per user.

    Channel fading and noise streams are keyed without the scheme so scheme
    comparisons at the same trial seed are paired.
    """
    users = scenario.users
    acc = [
        {"frame_psnrs": [], "sq_total": 0.0, "sq_llse": 0.0,
         "sq_discarded": 0.0, "sq_undecodable": 0.0, "n_pixels": 0}
        for _ in users
    ]
    skey, bkey = _snr_key(scenario.snr_db), _beta_key(scenario.beta)
    for gidx, gop in enumerate(gops):
        fade_rng = _stream(sweep.master_seed, scenario.seed, 2, gidx)
        states = draw_states(scenario, fade_rng)
        noma_rng = _stream(sweep.master_seed, scenario.seed, 4, gidx)
        plan = encode(gop, scenario, states, noma_rng)
        for uid, (user, state) in enumerate(zip(users, states.all)):
            noise_rng = _stream(sweep.master_seed, scenario.seed, 3, gidx, uid, skey, bkey)
            _, raw = _simulate_user_raw(plan, user, state, noise_rng)
            a = acc[uid]
            a["frame_psnrs"].extend(raw["frame_psnrs"].tolist())
            for key in ("sq_total", "sq_llse", "sq_discarded", "sq_undecodable"):
                a[key] += raw[key]
            a["n_pixels"] += raw["n_pixels"]

    rows = []
    for uid, (user, a) in enumerate(zip(users, acc)):
        n = a["n_pixels"]
        rows.append(
            RunResult(
                scheme=scenario.scheme,
                seed=scenario.seed,
                snr_db=scenario.snr_db,
                beta=scenario.beta,
                user_id=uid,
                zone=user.zone,
                distance_m=user.distance,
                psnr_db=float(np.mean(a["frame_psnrs"])),
                mse_total=a["sq_total"] / n,
                mse_llse=a["sq_llse"] / n,
                mse_discarded=a["sq_discarded"] / n,
                mse_undecodable_el=a["sq_undecodable"] / n,
            )
        )
    return rows


def run_experiment(gops: list[Gop], sweep: Sweep) -> list[RunResult]:
    """Execute the full sweep grid; row order follows the scheme/beta/snr/seed nesting."""
    if not gops:
        raise ValueError("no GOPs to transmit")
    rows: list[RunResult] = []
    for scheme in sweep.schemes:
        for beta in sweep.betas:
            for snr in sweep.snr_db:
                for seed in sweep.seeds:
                    near, far = place_users(sweep, int(seed))
                    scenario = Scenario(
                        near_users=near,
                        far_users=far,
                        eta=sweep.eta,
                        snr_db=float(snr),
                        beta=float(beta),
                        gop_size=gops[0].gop_size,
                        chunks_per_side=sweep.chunks_per_side,
                        p_chunk=sweep.p_chunk,
                        scheme=scheme,
                        seed=int(seed),
                        ref_distance=sweep.ref_distance,
                        clamp=sweep.clamp,
                    )
                    rows.extend(run_trial(gops, scenario, sweep))
    return rows


def _filter_rows(rows, scheme, snr_db, beta, zone):
    eps = 1e-9
    out = [
        r
        for r in rows
        if (scheme is None or r.scheme == scheme)
        and (snr_db is None or abs(r.snr_db - snr_db) < eps)
        and (beta is None or abs(r.beta - beta) < eps)
        and (zone is None or r.zone == zone)
    ]
    if not out:
        raise ValueError("no rows match the requested filters")
    return out


def mean_psnr(rows: list[RunResult], scheme=None, snr_db=None, beta=None, zone=None) -> float:
    """Mean of per-user PSNRs over all rows matching the given filters."""
    return float(np.mean([r.psnr_db for r in _filter_rows(rows, scheme, snr_db, beta, zone)]))


def system_psnr(rows: list[RunResult], scheme=None, snr_db=None, beta=None, zone=None) -> float:
    """Multicast-level PSNR: pool MSE across users per trial, then average in dB.

    Pooling the squared error before the log keeps the weakest receivers
    visible in the aggregate, which is how saturation behavior shows up when
    some users hit an unrecoverable-loss floor.
    """
    matched = _filter_rows(rows, scheme, snr_db, beta, zone)
    seeds = sorted({r.seed for r in matched})
    vals = []
    for seed in seeds:
        pooled = np.mean([r.mse_total for r in matched if r.seed == seed])
        vals.append(10.0 * np.log10(255.0**2 / pooled))
    return float(np.mean(vals))
