"""Exact winner distribution.

Two independent routes compute ``p_i = P(argmax = i)``:

* :func:`winner_probs_exact` inverts the summed hazard exponent
  ``S(x) = sum_j nu_j(x)`` and integrates ``nu_i(x(y))`` against ``exp(-y)``;
* :func:`winner_probs_product` integrates ``prod_{j != i} F_j`` against
  ``dF_i`` after the substitution ``u = F_i(x)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np
from numpy.polynomial.laguerre import laggauss

from .model import PlayerFamily, ProportionalFamily

#: largest and smallest x at which hazard exponents are evaluated
X_MIN, X_MAX = 1e-300, 1e300


class NumericalError(RuntimeError):
    """A numerical routine failed to meet its contract."""


class InversionError(NumericalError):
    pass


class QuadratureError(NumericalError):
    pass


@dataclass(frozen=True)
class InversionConfig:
    bracket_lo: float = 1e-6
    bracket_hi: float = 1e6
    # targets span many decades (-log u near u = 1 is ~1e-16), so the
    # absolute part is kept negligible by default
    abs_tol: float = 1e-300
    rel_tol: float = 1e-13
    max_iter: int = 400
    max_expand: int = 300  # enough to reach 1e-300 and 1e300 from the default bracket

    def __post_init__(self):
        if not 0 < self.bracket_lo < self.bracket_hi:
            raise ValueError("need 0 < bracket_lo < bracket_hi")
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be positive")


@dataclass(frozen=True)
class QuadratureConfig:
    scheme: str = "gauss-laguerre"
    nodes: int = 64
    y_max: float = 50.0
    tol: float = 1e-12
    max_panels: int = 4000
    # Gauss-Laguerre results whose error proxy exceeds this are recomputed
    # with the adaptive scheme; None disables the fallback
    fallback_tol: float | None = 1e-9

    def __post_init__(self):
        if self.scheme not in ("gauss-laguerre", "truncated-adaptive"):
            raise ValueError(f"unknown quadrature scheme {self.scheme!r}")
        if self.nodes < 2:
            raise ValueError("need at least 2 nodes")
        if self.scheme == "truncated-adaptive" and self.y_max < 30:
            raise ValueError("y_max must be at least 30 for the adaptive scheme")


@dataclass
class WinnerDistribution:
    probs: np.ndarray
    method: str
    tolerance_estimate: float = 0.0
    diagnostics: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.probs.size

    def check(self) -> None:
        """Assert the probability-vector invariants."""
        if np.any(self.probs < 0):
            raise NumericalError(f"{self.method}: negative probability")
        eps = max(1e-8, self.tolerance_estimate)
        total = float(self.probs.sum())
        if abs(total - 1.0) > eps:
            raise NumericalError(f"{self.method}: probabilities sum to {total!r}")


# ---------------------------------------------------------------------------
# monotone root finding

def solve_decreasing(fn: Callable[[np.ndarray], np.ndarray], targets,
                     cfg: InversionConfig = InversionConfig(), bracket=None) -> np.ndarray:
    """Vectorised solve of ``fn(x) = t`` for a continuous non-increasing ``fn``.

    The bracket ``[bracket_lo, bracket_hi]`` is widened by factors of 10
    (at most ``max_expand`` times per side, and never beyond
    ``[1e-300, 1e300]``) until it straddles every target; the bracket then
    shrinks in ``log x``. A node is accepted once ``|fn(x) - t| <= abs_tol + rel_tol*t``
    or its bracket has shrunk to adjacent floats; flat stretches resolve to a
    point inside the flat stretch. Steps are Illinois (regula falsi) steps in
    ``(log x, log fn)`` coordinates, which are nearly linear for power-type
    tails, with a bisection step whenever interpolation leaves the bracket
    and on every fourth iteration.

    ``bracket`` optionally replaces the configured starting bracket with
    per-target ``(lo, hi)`` arrays; expansion still applies if it is wrong.
    """
    t = np.atleast_1d(np.asarray(targets, dtype=float))
    if np.any(~(t > 0)) or np.any(~np.isfinite(t)):
        raise InversionError("targets must be positive and finite")
    if bracket is None:
        lo = np.full(t.shape, cfg.bracket_lo)
        hi = np.full(t.shape, cfg.bracket_hi)
    else:
        lo = np.broadcast_to(np.asarray(bracket[0], dtype=float), t.shape).copy()
        hi = np.broadcast_to(np.asarray(bracket[1], dtype=float), t.shape).copy()
        if not (np.all(lo > 0) and np.all(lo < hi)):
            raise InversionError("invalid starting bracket")

    def f(x):
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            return np.asarray(fn(x), dtype=float)

    for _ in range(cfg.max_expand):
        bad = f(lo) < t
        if not bad.any():
            break
        lo = np.where(bad, np.maximum(lo / 10.0, 1e-300), lo)
    else:
        if np.any(f(lo) < t):
            raise InversionError("bracket expansion exhausted at the lower end")
    for _ in range(cfg.max_expand):
        bad = f(hi) > t
        if not bad.any():
            break
        hi = np.where(bad, np.minimum(hi * 10.0, 1e300), hi)
    else:
        if np.any(f(hi) > t):
            raise InversionError("bracket expansion exhausted at the upper end")

    tol = cfg.abs_tol + cfg.rel_tol * t
    logt = np.log(t)
    a, b = np.log(lo), np.log(hi)

    def g(z):
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.log(f(np.exp(z))) - logt

    ga, gb = g(a), g(b)  # ga >= 0 >= gb
    last = np.zeros(t.shape, dtype=np.int8)
    x = np.exp(0.5 * (a + b))
    done = np.zeros(t.shape, dtype=bool)
    for it in range(cfg.max_iter):
        with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
            z = b - gb * (b - a) / (gb - ga)
        mid = 0.5 * (a + b)
        # every fourth step is a plain bisection, which bounds the worst case
        bad = ~np.isfinite(z) | (z <= a) | (z >= b) | (it % 4 == 3)
        z = np.where(bad, mid, z)
        x = np.where(done, x, np.exp(z))
        val = f(x)
        hit = np.abs(val - t) <= tol
        collapsed = np.nextafter(np.exp(a), np.inf) >= np.exp(b)
        done |= hit | collapsed
        if done.all():
            return x
        gz = np.log(np.maximum(val, 1e-320)) - logt
        left = ~done & (val > t)    # root lies right of z
        right = ~done & ~(val > t)
        # Illinois: damp the stale end when the same end moves twice
        gb = np.where(left & (last == 1), 0.5 * gb, gb)
        ga = np.where(right & (last == -1), 0.5 * ga, ga)
        a = np.where(left, z, a)
        ga = np.where(left, gz, ga)
        b = np.where(right, z, b)
        gb = np.where(right, gz, gb)
        last = np.where(left, 1, np.where(right, -1, last)).astype(np.int8)
    raise InversionError(f"max_iter={cfg.max_iter} exceeded for {int((~done).sum())} targets")


def sum_nu(family: PlayerFamily, x):
    """``S(x) = sum_i nu_i(x)``, non-increasing in ``x``."""
    xa = np.asarray(x, dtype=float)
    if np.any(xa <= 0):
        raise ValueError("x must be positive")
    out = family.sum_nu(np.atleast_1d(xa)).reshape(xa.shape)
    return float(out) if out.ndim == 0 else out


def invert_sum(family: PlayerFamily, y, cfg: InversionConfig = InversionConfig()):
    """``x(y)`` solving ``S(x) = y``.

    Uses the family's analytic inverse when it has one (proportional tails
    with a known ``r^{-1}``), the expanding-bracket solver otherwise.
    """
    ya = np.asarray(y, dtype=float)
    flat = np.atleast_1d(ya)
    if np.any(flat <= 0):
        raise ValueError("y must be positive")
    x = family.sum_inverse(flat)
    if x is None:
        x = solve_decreasing(family.sum_nu, flat, cfg, family.sum_bracket(flat))
    x = np.asarray(x, dtype=float).reshape(ya.shape)
    return float(x) if x.ndim == 0 else x


# ---------------------------------------------------------------------------
# quadrature

# 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1]
_XGK = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0])
_WGK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714])
_WG = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327])

GK_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
GK_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
_G_IDX = np.array([1, 3, 5, 7, 9, 11, 13])
G_WEIGHTS = np.concatenate([_WG[:-1], _WG[::-1]])


def adaptive_gk(f, a: float, b: float, tol: float, max_panels: int = 4000,
                initial_panels: int = 8):
    """Globally adaptive Gauss-Kronrod (7/15) integration of a vector integrand.

    ``f`` maps an array of abscissae of shape ``(m,)`` to values of shape
    ``(k, m)`` (``k`` independent integrands). All panels of one refinement
    sweep are evaluated in a single call.

    Returns ``(integral, error_estimate, panels_used)``; the error estimate is
    the max over components of the summed ``|K15 - G7|`` panel differences.
    """
    edges = np.linspace(a, b, initial_panels + 1)
    los, his = edges[:-1], edges[1:]
    total = None
    err_done = None
    used = 0
    while True:
        half = 0.5 * (his - los)
        ctr = 0.5 * (his + los)
        pts = (ctr[:, None] + half[:, None] * GK_NODES[None, :]).ravel()
        vals = np.atleast_2d(np.asarray(f(pts), dtype=float))
        vals = vals.reshape(vals.shape[0], los.size, GK_NODES.size)
        k15 = (vals * GK_WEIGHTS).sum(axis=2) * half
        g7 = (vals[:, :, _G_IDX] * G_WEIGHTS).sum(axis=2) * half
        err = np.abs(k15 - g7).max(axis=0)
        used += los.size
        if total is None:
            total = np.zeros(vals.shape[0])
            err_done = 0.0
        width = b - a
        ok = err <= tol * np.maximum(half * 2 / width, 1e-3)
        total += k15[:, ok].sum(axis=1)
        err_done += err[ok].sum()
        if ok.all():
            return total, err_done, used
        if used + 2 * int((~ok).sum()) > max_panels:
            raise QuadratureError(
                f"adaptive quadrature exceeded {max_panels} panels "
                f"(remaining error {err[~ok].sum():.3g})")
        los, his = los[~ok], his[~ok]
        mids = 0.5 * (los + his)
        los, his = np.concatenate([los, mids]), np.concatenate([mids, his])


def _nu_at(family: PlayerFamily, x: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        m = family.nu_matrix(x)
    return m


def winner_probs_exact(family: PlayerFamily, inv_cfg: InversionConfig = InversionConfig(),
                       quad_cfg: QuadratureConfig = QuadratureConfig()) -> WinnerDistribution:
    """Winner law from ``p_i = int_0^inf nu_i(x(y)) exp(-y) dy``.

    ``x(y)`` is computed once per quadrature node and shared by all players.
    For proportional families the integrand is ``(c_i / b_n) y`` and
    Gauss-Laguerre is exact.
    """
    n = family.n
    if n == 1:
        return WinnerDistribution(np.ones(1), "basic-formula", 0.0)

    inv_tol = n * (inv_cfg.abs_tol + inv_cfg.rel_tol)
    residuals = []
    # beyond [X_MIN, X_MAX] each player's share nu_i / S is frozen at the edge;
    # the integrand there lies in [0, y], which bounds the error
    edges = _nu_at(family, np.array([X_MAX, X_MIN]))
    s_top, s_bot = edges.sum(axis=0)
    share_top = edges[:, 0] / s_top if s_top > 0 else np.zeros(n)
    share_bot = edges[:, 1] / s_bot if np.isfinite(s_bot) and s_bot > 0 else np.zeros(n)
    edge_err = 0.5 * s_top ** 2 + (math.exp(-s_bot) * (1 + s_bot) if np.isfinite(s_bot) else 0.0)
    if isinstance(family, ProportionalFamily):
        edge_err = 0.0  # shares are c_i / b_n at every x

    def integrand_matrix(ys):
        ys = np.atleast_1d(ys)
        top, bot = ys < s_top, ys > s_bot
        mid = ~(top | bot)
        vals = np.empty((n, ys.size))
        xs = np.empty(ys.size)
        xs[top], xs[bot] = np.inf, 0.0
        vals[:, top] = share_top[:, None] * ys[top]
        vals[:, bot] = share_bot[:, None] * ys[bot]
        if mid.any():
            xs[mid] = invert_sum(family, ys[mid], inv_cfg)
            v = _nu_at(family, xs[mid])
            if np.any(~np.isfinite(v)):
                raise NumericalError("non-finite hazard exponent at a quadrature node")
            if np.any(v < 0):
                raise NumericalError("negative integrand: hazard exponent is not a valid nu")
            resid = np.abs(v.sum(axis=0) - ys[mid]) / (inv_cfg.abs_tol + inv_cfg.rel_tol * ys[mid])
            residuals.append(float(resid.max()))
            vals[:, mid] = v
        return vals, xs

    if quad_cfg.scheme == "gauss-laguerre":
        ys, ws = laggauss(quad_cfg.nodes)
        vals, xs = integrand_matrix(ys)
        probs = vals @ ws
        # error proxy: the same rule at half the nodes
        ys2, ws2 = laggauss(max(2, quad_cfg.nodes // 2))
        probs2 = integrand_matrix(ys2)[0] @ ws2
        if isinstance(family, ProportionalFamily) and family.sum_inverse(ys[:1]) is not None:
            quad_err = 16 * np.finfo(float).eps * max(1, quad_cfg.nodes)
        else:
            quad_err = float(np.abs(probs - probs2).max())
        if quad_cfg.fallback_tol is not None and quad_err > quad_cfg.fallback_tol:
            adaptive = replace(quad_cfg, scheme="truncated-adaptive")
            out = winner_probs_exact(family, inv_cfg, adaptive)
            out.diagnostics["fallback_from"] = {"scheme": quad_cfg.scheme,
                                                "nodes": quad_cfg.nodes,
                                                "error_proxy": quad_err}
            return out
        diag = {"nodes": quad_cfg.nodes, "x_nodes": xs,
                "max_scaled_residual": max(residuals, default=0.0)}
    else:
        Y = quad_cfg.y_max

        def f(ys):
            return integrand_matrix(ys)[0] * np.exp(-ys)[None, :]

        probs, err, panels = adaptive_gk(f, 0.0, Y, quad_cfg.tol, quad_cfg.max_panels)
        quad_err = float(err) + (1 + Y) * np.exp(-Y)
        diag = {"panels": panels, "y_max": Y,
                "max_scaled_residual": max(residuals, default=0.0)}
    diag["mass_beyond_x_max"] = float(-math.expm1(-s_top))
    return WinnerDistribution(np.asarray(probs, dtype=float), "basic-formula",
                              float(quad_err + inv_tol + edge_err), diag)


def _player_quantile(family: PlayerFamily, i: int, u: np.ndarray,
                     inv_cfg: InversionConfig) -> np.ndarray:
    """``x`` with ``F_i(x) = u`` (``0 < u < 1``), clamped to ``[X_MIN, X_MAX]``."""
    t = -np.log(u)
    with np.errstate(over="ignore"):
        x = family.player_inverse(i, t)
    if x is not None:
        return np.asarray(x, dtype=float)
    x = np.empty_like(t)
    edge = _nu_at(family, np.array([X_MAX, X_MIN]))[i - 1]
    top, bot = t < edge[0], t > edge[1]
    x[top], x[bot] = X_MAX, X_MIN
    mid = ~(top | bot)
    if mid.any():
        x[mid] = solve_decreasing(lambda z: family.nu_player(i, z), t[mid], inv_cfg,
                                  family.player_bracket(i, t[mid]))
    return x


def winner_probs_product(family: PlayerFamily, quad_cfg: QuadratureConfig = QuadratureConfig(),
                         inv_cfg: InversionConfig = InversionConfig()) -> WinnerDistribution:
    """Winner law from ``p_i = int_0^1 prod_{j != i} F_j(F_i^{-1}(u)) du``.

    Each player gets its own adaptive Gauss-Kronrod integration over ``u``;
    this route never inverts the summed exponent.
    """
    n = family.n
    if n == 1:
        return WinnerDistribution(np.ones(1), "product-form", 0.0)
    probs = np.zeros(n)
    errs = np.zeros(n)
    panels = []
    others = np.ones(n, dtype=bool)
    for i in range(1, n + 1):
        probe = family.nu_player(i, np.array([1e-12, 1.0, 1e12]))
        if np.all(probe == 0):
            # F_i == 1 on x > 0: never strictly ahead of anybody
            continue
        others[:] = True
        others[i - 1] = False

        # beyond [X_MIN, X_MAX] the ratios nu_j / nu_i are frozen at the edge,
        # giving the integrand u**R there (exact for proportional families)
        edge = _nu_at(family, np.array([X_MAX, X_MIN]))
        t_top, t_bot = edge[i - 1]
        rest = edge[others].sum(axis=0)
        with np.errstate(divide="ignore", invalid="ignore"):
            r_top = rest[0] / t_top if t_top > 0 else 0.0
            r_bot = rest[1] / t_bot if np.isfinite(t_bot) and t_bot > 0 else 0.0

        def g(u, i=i, mask=others.copy(), t_top=t_top, t_bot=t_bot, r_top=r_top, r_bot=r_bot):
            # panel nodes never hit the endpoints 0 and 1
            t = -np.log(u)
            top, bot = t < t_top, t > t_bot
            mid = ~(top | bot)
            out = np.empty_like(u)
            out[top] = np.exp(-t[top] * r_top)
            out[bot] = np.exp(-t[bot] * r_bot)
            if mid.any():
                x = _player_quantile(family, i, u[mid], inv_cfg)
                m = _nu_at(family, x)[mask]
                with np.errstate(over="ignore", invalid="ignore"):
                    v = np.exp(-m.sum(axis=0))
                out[mid] = np.where(np.isnan(v), 0.0, v)
            return out[None, :]

        val, err, used = adaptive_gk(g, 0.0, 1.0, quad_cfg.tol, quad_cfg.max_panels)
        probs[i - 1] = val[0]
        # the true integrand is non-decreasing in u, as is u**R, so on each
        # edge region both lie in the same band
        top_err = -math.expm1(-t_top) * -math.expm1(-rest[0])
        bot_err = math.exp(-t_bot) * math.exp(-rest[1]) if np.isfinite(t_bot) else 0.0
        if isinstance(family, ProportionalFamily):
            top_err = bot_err = 0.0  # u**R is the exact integrand
        errs[i - 1] = err + top_err + bot_err
        panels.append(used)
    tol = float(errs.sum()) + n * (inv_cfg.abs_tol + inv_cfg.rel_tol)
    return WinnerDistribution(probs, "product-form", tol, {"panels": panels})
