"""Large-n behaviour of the winner index.

For large ``n`` the winner probabilities approach ``alpha_i = c_i / b_n``
with ``b_n = c_1 + ... + c_n``. Placing ``alpha_i`` at ``i/n`` gives a
measure on ``[0, 1]`` whose limit, when ``b`` is regularly varying with
index ``rho``, has cdf ``x**rho``. Triangular arrays ``c_in = g(i/n)``
produce the density ``g / int g``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import integrate

from .exact import InversionConfig, QuadratureConfig, winner_probs_exact
from .model import FamilyError, PlayerFamily

#: rho above this is reported as a point mass at 1, below its inverse as one at 0
POINT_MASS_RHO = 64.0
RATIO_TOL = 0.01
DEFAULT_GRID = np.linspace(0.0, 1.0, 101)


@dataclass(frozen=True)
class LimitMeasure:
    """Weak limit of the winner position ``A_n / n``.

    ``kind`` is one of ``"power_law"``, ``"point_mass_at_zero"``,
    ``"point_mass_at_one"`` or ``"density"``.
    """

    kind: str
    rho: Optional[float] = None
    density: Optional[Callable] = None
    g_integral: Optional[float] = None  # triangular arrays: predicted b_n / n
    outside_hypotheses: bool = False

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "point_mass_at_zero":
            return np.where(x >= 0, 1.0, 0.0)
        if self.kind == "point_mass_at_one":
            return np.where(x >= 1, 1.0, 0.0)
        if self.kind == "power_law":
            return np.clip(x, 0.0, 1.0) ** self.rho
        if self.kind == "density":
            flat = np.atleast_1d(np.clip(x, 0.0, 1.0))
            vals = [integrate.quad(lambda t: float(self.density(np.array([t]))[0]),
                                   0.0, v, limit=200)[0] for v in flat]
            return np.asarray(vals).reshape(x.shape)
        raise ValueError(f"unknown limit kind {self.kind!r}")


def power_law(rho: float) -> LimitMeasure:
    """``x**rho`` on ``[0, 1]``; the endpoints ``0`` and ``inf`` become point masses."""
    if rho == 0:
        return LimitMeasure("point_mass_at_zero", rho=0.0)
    if math.isinf(rho):
        return LimitMeasure("point_mass_at_one", rho=math.inf)
    if rho < 0:
        raise ValueError("rho must be non-negative")
    return LimitMeasure("power_law", rho=float(rho))


@dataclass
class RhoEstimate:
    rho_hat: float
    sequence_of_ratios: list
    ratio_condition_holds: bool
    ratio_witness: list = field(default_factory=list)
    fit_slope: float = float("nan")


def _weights(family: PlayerFamily) -> np.ndarray:
    if family.weights is None:
        raise FamilyError(f"{family.kind} family carries no weights")
    return np.asarray(family.weights, dtype=float)


def alpha_weights(family: PlayerFamily) -> np.ndarray:
    """``c_i / b_n``: the large-n approximation of the winner law."""
    w = _weights(family)
    return w / w.sum()


def approximation_error(family: PlayerFamily, inv_cfg: InversionConfig = InversionConfig(),
                        quad_cfg: QuadratureConfig = QuadratureConfig()) -> float:
    """``max_i |p_i / alpha_i - 1|`` with ``p`` from the exact basic formula."""
    a = alpha_weights(family)
    if np.any(a <= 0):
        raise FamilyError("relative error needs every weight positive")
    p = winner_probs_exact(family, inv_cfg, quad_cfg).probs
    return float(np.max(np.abs(p / a - 1.0)))


def total_variation(p, q) -> float:
    """``sum |p_i - q_i|`` on the common support ``{i/n}``."""
    return float(np.abs(np.asarray(p) - np.asarray(q)).sum())


def _floor_index(n: int, x: np.ndarray) -> np.ndarray:
    # k with k/n <= x < (k+1)/n, guarded against 0.29 * 100 = 28.999...
    k = np.floor(n * x * (1 + 1e-12) + 1e-9).astype(np.int64)
    return np.clip(k, 0, n)


def empirical_limit_cdf(family_or_weights, grid=None) -> np.ndarray:
    """``F_n(x) = sum_{i <= floor(n x)} c_i / b_n`` on ``grid``.

    Accepts a family with weights or a plain weight vector.
    """
    if isinstance(family_or_weights, PlayerFamily):
        w = _weights(family_or_weights)
    else:
        w = np.asarray(family_or_weights, dtype=float)
    grid = DEFAULT_GRID if grid is None else np.asarray(grid, dtype=float)
    if np.any(grid < 0) or np.any(grid > 1):
        raise ValueError("grid points must lie in [0, 1]")
    n = w.size
    cum = np.concatenate([[0.0], np.cumsum(w)])
    return cum[_floor_index(n, grid)] / cum[-1]


def empirical_limit_cdf_log(log_weights, grid=None) -> np.ndarray:
    """Same as :func:`empirical_limit_cdf` from ``log c_i`` (no overflow)."""
    lw = np.asarray(log_weights, dtype=float)
    grid = DEFAULT_GRID if grid is None else np.asarray(grid, dtype=float)
    lcum = np.concatenate([[-np.inf], np.logaddexp.accumulate(lw)])
    return np.exp(lcum[_floor_index(lw.size, grid)] - lcum[-1])


def log_partial_sums(log_weights) -> np.ndarray:
    """``log b_n`` for ``n = 1..len`` computed without overflow."""
    return np.logaddexp.accumulate(np.asarray(log_weights, dtype=float))


def b_from_log_weights(log_weights) -> Callable[[int], float]:
    """``n -> log b_n`` lookup, for :func:`estimate_rho`'s ``log_b``."""
    lb = log_partial_sums(log_weights)
    return lambda n: float(lb[int(n) - 1])


def _log_of(v) -> float:
    # math.log handles python ints beyond float range
    if isinstance(v, (int, np.integer)):
        if v <= 0:
            raise ValueError("b must be positive")
        return math.log(int(v))
    v = float(v)
    if not v > 0:
        raise ValueError("b must be positive")
    if math.isinf(v):
        raise OverflowError("b overflows; pass log_b instead")
    return math.log(v)


def estimate_rho(b: Optional[Callable[[int], float]] = None, n_max: int = 10 ** 5, *,
                 log_b: Optional[Callable[[int], float]] = None, n_points: int = 8,
                 ratio_tol: float = RATIO_TOL,
                 divergence: float = POINT_MASS_RHO) -> RhoEstimate:
    """Regular-variation index of ``b_n`` from the doubling ratios ``b_n / b_2n``.

    ``L_k = -log2(b(n_k) / b(2 n_k))`` is taken on ``n_k = n_max // 2**k`` for
    the ``n_points`` largest such ``n_k`` (fewer when ``n_max`` is small) and
    regressed on ``1 / ln n_k``; the intercept is ``rho_hat``. This removes
    the first-order bias of slowly varying factors such as ``ln n``.
    ``rho_hat`` is ``inf`` when ``L`` at ``n_max`` or the intercept exceeds
    ``divergence`` (ratios tending to 0), and is clipped at 0 from below.

    Ratios are formed in log space; ``b`` may return python ints of any size.
    ``ratio_condition_holds`` reports whether ``|b(n+1)/b(n) - 1| < ratio_tol``
    at ``n_max``.
    """
    if (b is None) == (log_b is None):
        raise ValueError("pass exactly one of b and log_b")
    if n_max < 2:
        raise ValueError("n_max must be at least 2")
    lb = log_b if log_b is not None else (lambda n: _log_of(b(n)))

    ns = []
    k = n_max
    while k >= 1 and len(ns) < n_points:
        ns.append(k)
        k //= 2
    ns = np.array(sorted(ns))

    probes = sorted(set(ns.tolist()) | set((2 * ns).tolist()) | {n_max + 1})
    logs = {m: lb(int(m)) for m in probes}
    seq = [logs[m] for m in probes]
    if np.any(np.diff(seq) < -1e-12 * np.maximum(1.0, np.abs(seq[1:]))):
        raise ValueError("b is not non-decreasing on the probe points")

    L = np.array([(logs[2 * m] - logs[m]) / math.log(2.0) for m in ns])
    ratios = [(int(m), float(2.0 ** -l)) for m, l in zip(ns, L)]

    step = logs[n_max + 1] - logs[n_max]
    witness = [(int(n_max), float(math.exp(step)))]
    holds = abs(math.expm1(step)) < ratio_tol

    slope = float("nan")
    if ns.size >= 2 and np.all(ns > 1):
        u = 1.0 / np.log(ns.astype(float))
        slope, intercept = np.polyfit(u, L, 1)
    else:
        intercept = float(L[-1])
    if L[-1] > divergence or intercept > divergence:
        rho = math.inf
    else:
        rho = max(0.0, float(intercept))
    return RhoEstimate(rho, ratios, bool(holds), witness, float(slope))


def classify_limit(est: RhoEstimate, high: float = POINT_MASS_RHO,
                   low: float = 1.0 / POINT_MASS_RHO) -> LimitMeasure:
    """Map a rho estimate to its limit measure.

    Estimates beyond ``high`` or below ``low`` collapse to point masses. When
    the ratio condition fails the measure is flagged as lying outside the
    regular-variation hypotheses; the classification is still returned.
    """
    flag = not est.ratio_condition_holds
    if est.rho_hat > high:
        return LimitMeasure("point_mass_at_one", rho=math.inf, outside_hypotheses=flag)
    if est.rho_hat < low:
        return LimitMeasure("point_mass_at_zero", rho=0.0, outside_hypotheses=flag)
    return LimitMeasure("power_law", rho=float(est.rho_hat), outside_hypotheses=flag)


def triangular_limit(g: Callable) -> LimitMeasure:
    """Limit density ``g / int_0^1 g`` of triangular weights ``c_in = g(i/n)``.

    ``g_integral`` on the result is ``int_0^1 g``, the predicted slope of
    ``b_n`` in ``n``.
    """
    mass = integrate.quad(lambda t: float(np.asarray(g(np.array([t])), dtype=float)[0]),
                          0.0, 1.0, limit=200)[0]
    if not mass > 0:
        raise FamilyError("integral of g over [0, 1] must be positive")
    probe = np.asarray(g(np.linspace(0, 1, 257)), dtype=float)
    if np.any(probe < 0):
        raise FamilyError("g must be non-negative")

    def density(x):
        return np.asarray(g(np.asarray(x, dtype=float)), dtype=float) / mass

    return LimitMeasure("density", density=density, g_integral=mass)


def max_cdf_deviation(values: Sequence[float], target: Sequence[float]) -> float:
    return float(np.max(np.abs(np.asarray(values) - np.asarray(target))))
