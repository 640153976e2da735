"""Seeded Monte Carlo estimates of the winner law.

Uniforms come from a counter-based stream: the uniform for replicate ``r``
and player ``i`` is output number ``r * n + (i - 1)`` of a Philox-4x64
generator keyed by the seed. Any block of replicates can therefore be
generated independently, and results do not depend on the chunking.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .exact import InversionConfig, solve_decreasing
from .model import PlayerFamily, ProportionalFamily, transform_family

log = logging.getLogger(__name__)

RNG_LABEL = "philox4x64-10/counter"
_CHUNK_VALUES = 1 << 21
_X_MIN, _X_MAX = 1e-300, 1e300


def uniform_block(seed: int, start: int, count: int) -> np.ndarray:
    """Uniforms number ``start .. start+count-1`` of the stream for ``seed``.

    Values lie strictly inside ``(0, 1)``: 53 random bits centred in their cell.
    """
    if not 0 <= seed < 2 ** 64:
        raise ValueError("seed must be a 64-bit unsigned integer")
    bg = np.random.Philox(key=np.array([seed, 0], dtype=np.uint64))
    blocks, skip = divmod(start, 4)
    if blocks:
        bg.advance(blocks)
    if skip:
        bg.random_raw(skip)
    raw = bg.random_raw(count)
    return ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0 ** -53


@dataclass
class SimReport:
    counts: np.ndarray
    draws: int
    probs_hat: np.ndarray
    ci_radius: np.ndarray
    seed: int
    rng_label: str = RNG_LABEL
    ties: int = 0

    def covers(self, probs) -> np.ndarray:
        """Per-player flag: ``|p_hat - p| <= ci_radius``."""
        return np.abs(self.probs_hat - np.asarray(probs)) <= self.ci_radius


def sample_player(family: PlayerFamily, i: int, u, inv_cfg: InversionConfig = InversionConfig()):
    """Inverse-transform draw: ``x`` with ``F_i(x) = u`` for ``0 < u < 1``.

    Analytic inverses are used when the family has them, the bracketing
    solver otherwise.
    Draws beyond the float range come back as ``inf`` (above ``1e300``) or
    ``0.0`` (below ``1e-300``); heavy tails such as ``1/log(1+x)`` put a
    visible share of their mass there.
    """
    ua = np.asarray(u, dtype=float)
    flat = np.atleast_1d(ua)
    if np.any(flat <= 0) or np.any(flat >= 1):
        raise ValueError("u must lie strictly inside (0, 1)")
    family._check_index(i)
    t = -np.log(flat)
    with np.errstate(over="ignore"):
        x = family.player_inverse(i, t)
    if x is None:
        x = np.empty_like(t)
        with np.errstate(over="ignore", divide="ignore"):
            top = t < family.nu_player(i, np.array([_X_MAX]))[0]
            bottom = t > family.nu_player(i, np.array([_X_MIN]))[0]
        x[top] = np.inf
        x[bottom] = 0.0
        mid = ~(top | bottom)
        if mid.any():
            br = family.player_bracket(i, t[mid])
            x[mid] = solve_decreasing(lambda z: family.nu_player(i, z), t[mid], inv_cfg, br)
    x = np.asarray(x, dtype=float).reshape(ua.shape)
    return float(x) if x.ndim == 0 else x


def _chunks(draws: int, n: int):
    per = max(1, _CHUNK_VALUES // n)
    for r0 in range(0, draws, per):
        yield r0, min(draws, r0 + per)


def _uniforms(n, seed, r0, r1):
    return uniform_block(seed, r0 * n, (r1 - r0) * n).reshape(r1 - r0, n)


def _sample_matrix(family, seed, r0, r1, inv_cfg):
    u = _uniforms(family.n, seed, r0, r1)
    x = np.empty_like(u)
    for i in range(1, family.n + 1):
        x[:, i - 1] = sample_player(family, i, u[:, i - 1], inv_cfg)
    return x


def _rank_matrix(family, seed, r0, r1, inv_cfg):
    """Matrix with the same row-wise order as the sampled ``X``.

    A shared tail makes ``r(X_i) = -ln(u_i) / c_i``, so ``-(-ln u_i / c_i)``
    orders the players exactly without inverting ``r``; this never overflows.
    """
    if isinstance(family, ProportionalFamily):
        t = -np.log(_uniforms(family.n, seed, r0, r1))
        with np.errstate(divide="ignore"):
            return -(t / family.weights)
    return _sample_matrix(family, seed, r0, r1, inv_cfg)


def _argmax_with_ties(x: np.ndarray):
    # lowest index wins exact float ties
    win = np.argmax(x, axis=1)
    top = x[np.arange(x.shape[0]), win]
    ties = int(((x == top[:, None]).sum(axis=1) > 1).sum())
    return win, ties


def estimate_winner_probs(family: PlayerFamily, draws: int, seed: int,
                          inv_cfg: InversionConfig = InversionConfig()) -> SimReport:
    """Monte Carlo frequencies of the argmax index with 3-sigma radii."""
    if draws < 1:
        raise ValueError("draws must be positive")
    n = family.n
    counts = np.zeros(n, dtype=np.int64)
    ties = 0
    if n == 1:
        counts[0] = draws
    else:
        for r0, r1 in _chunks(draws, n):
            win, t = _argmax_with_ties(_rank_matrix(family, seed, r0, r1, inv_cfg))
            counts += np.bincount(win, minlength=n)
            ties += t
    if ties:
        log.info("%d exact float ties among %d replicates", ties, draws)
    p = counts / draws
    radius = 3.0 * np.sqrt(p * (1 - p) / draws)
    return SimReport(counts, draws, p, radius, seed, ties=ties)


def transform_invariance_check(family: PlayerFamily, f, f_inv, draws: int, seed: int,
                               inv_cfg: InversionConfig = InversionConfig()) -> bool:
    """Path-wise check that ``f(X_i)`` has the same argmax as ``X_i``.

    The same uniforms drive the original and the transformed family; the
    check passes only if the winner agrees on every replicate.
    """
    other = transform_family(family, f, f_inv)
    n = family.n
    for r0, r1 in _chunks(draws, n):
        a, _ = _argmax_with_ties(_sample_matrix(family, seed, r0, r1, inv_cfg))
        b, _ = _argmax_with_ties(_sample_matrix(other, seed, r0, r1, inv_cfg))
        if np.any(a != b):
            return False
    return True


def bernoulli_max_membership(p: float, n: int, draws: int, seed: int) -> float:
    """Share of replicates where player 1 attains the maximum of ``n`` i.i.d. Bernoulli(p).

    Ties count as membership, so the expected value is ``p + (1-p)**n``.
    """
    if not 0 < p < 1:
        raise ValueError("p must lie in (0, 1)")
    if n < 1 or draws < 1:
        raise ValueError("n and draws must be positive")
    hits = 0
    for r0, r1 in _chunks(draws, n):
        x = _uniforms(n, seed, r0, r1) < p
        hits += int((x[:, 0] >= x.max(axis=1)).sum())
    return hits / draws


def bernoulli_membership_exact(p: float, n: int) -> float:
    return p + (1.0 - p) ** n
