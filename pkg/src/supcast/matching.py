"""Chunk scheduling as one-to-one two-sided matching on a pairwise distortion matrix."""

from __future__ import annotations

import functools
import heapq
import itertools
from dataclasses import dataclass

import numpy as np

EXHAUSTIVE_CAP = 9


@dataclass(frozen=True)
class Matching:
    """Permutation pairing base chunk i with enhanced chunk pairs[i].

    ``proposals`` records how many proposals the deferred-acceptance run made;
    it is None for matchings produced any other way.
    """

    pairs: np.ndarray
    proposals: int | None = None

    def __post_init__(self):
        arr = np.asarray(self.pairs, dtype=np.int64)
        if arr.ndim != 1 or sorted(arr.tolist()) != list(range(arr.size)):
            raise ValueError("pairs must be a permutation of 0..M-1")
        object.__setattr__(self, "pairs", arr)

    @property
    def m(self) -> int:
        return self.pairs.size

    def inverse(self) -> np.ndarray:
        inv = np.empty_like(self.pairs)
        inv[self.pairs] = np.arange(self.pairs.size)
        return inv


@dataclass(frozen=True)
class PreferenceLists:
    """Row/column orderings of the distortion matrix, best (lowest) first."""

    bl_prefs: np.ndarray
    el_prefs: np.ndarray


def _check_matrix(d) -> np.ndarray:
    arr = np.asarray(d, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.size == 0:
        raise ValueError("distortion matrix must be square and nonempty")
    if np.any(np.isnan(arr)):
        raise ValueError("distortion matrix contains NaN")
    return arr


def build_preferences(d) -> PreferenceLists:
    """Sort partners by ascending distortion, ties broken by ascending index."""
    arr = _check_matrix(d)
    bl = np.argsort(arr, axis=1, kind="stable")
    el = np.argsort(arr.T, axis=1, kind="stable")
    return PreferenceLists(bl_prefs=bl, el_prefs=el)


def becma(d, driver: str = "bl") -> Matching:
    """Deferred-acceptance chunk pairing; returns a stable matching.

    Chunks on the driving side propose down their preference lists; a proposed
    chunk displaces its held partner only when the proposer ranks strictly
    better. Unmatched proposers are processed in ascending id order, making
    the outcome deterministic. At most M^2 proposals are made.
    """
    arr = _check_matrix(d)
    key = driver.lower()
    if key not in ("bl", "el"):
        raise ValueError(f"driver must be 'bl' or 'el', got {driver!r}")
    prefs = build_preferences(arr)
    if key == "bl":
        proposer_prefs, receiver_prefs = prefs.bl_prefs, prefs.el_prefs
    else:
        proposer_prefs, receiver_prefs = prefs.el_prefs, prefs.bl_prefs

    m = arr.shape[0]
    # receiver_rank[r, p] = position of proposer p in receiver r's list
    receiver_rank = np.empty((m, m), dtype=np.int64)
    rows = np.arange(m)[:, None]
    receiver_rank[rows, receiver_prefs] = np.arange(m)[None, :]

    next_choice = [0] * m
    held = [-1] * m  # held[receiver] = proposer currently accepted
    matched = [-1] * m  # matched[proposer] = receiver currently holding it
    unmatched = list(range(m))
    heapq.heapify(unmatched)
    proposals = 0

    while unmatched:
        p = heapq.heappop(unmatched)
        r = int(proposer_prefs[p, next_choice[p]])
        next_choice[p] += 1
        proposals += 1
        current = held[r]
        if current == -1:
            held[r] = p
            matched[p] = r
        elif receiver_rank[r, p] < receiver_rank[r, current]:
            held[r] = p
            matched[p] = r
            matched[current] = -1
            heapq.heappush(unmatched, current)
        else:
            heapq.heappush(unmatched, p)

    pairs = np.array(matched, dtype=np.int64)
    if key == "el":
        inv = np.empty(m, dtype=np.int64)
        inv[pairs] = np.arange(m)
        pairs = inv
    return Matching(pairs=pairs, proposals=proposals)


@functools.lru_cache(maxsize=4)
def _all_permutations(m: int) -> np.ndarray:
    return np.array(list(itertools.permutations(range(m))), dtype=np.int64)


def exhaustive_match(d, cap: int = EXHAUSTIVE_CAP) -> Matching:
    """Minimum-total-distortion pairing by enumerating all M! permutations.

    Ties resolve to the lexicographically smallest permutation. Refuses
    matrices larger than ``cap`` to bound the factorial cost.
    """
    arr = _check_matrix(d)
    m = arr.shape[0]
    if m > cap:
        raise ValueError(f"exhaustive matching is capped at M={cap}, got M={m}")
    perms = _all_permutations(m)
    totals = arr[np.arange(m)[None, :], perms].sum(axis=1)
    best = int(np.argmin(totals))  # first minimum = lexicographically smallest
    return Matching(pairs=perms[best].copy())


def random_match(m: int, seed) -> Matching:
    """Uniformly random pairing, deterministic for a given seed."""
    if m < 1:
        raise ValueError("m must be >= 1")
    rng = np.random.default_rng(seed)
    return Matching(pairs=rng.permutation(m).astype(np.int64))


def is_stable(matching: Matching, d) -> bool:
    """True when no (i, j) would both strictly improve by pairing together."""
    arr = _check_matrix(d)
    pi = matching.pairs
    inv = matching.inverse()
    current_row = arr[np.arange(arr.shape[0]), pi][:, None]  # d[i, pi(i)]
    current_col = arr[inv, np.arange(arr.shape[0])][None, :]  # d[pi^-1(j), j]
    blocking = (arr < current_row) & (arr < current_col)
    return not bool(blocking.any())


def total_distortion(matching: Matching, d) -> float:
    """Sum of matrix entries selected by the pairing."""
    arr = _check_matrix(d)
    if matching.m != arr.shape[0]:
        raise ValueError("matching size does not match matrix size")
    return float(arr[np.arange(arr.shape[0]), matching.pairs].sum())
