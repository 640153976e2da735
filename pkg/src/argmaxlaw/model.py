"""Player families described through hazard exponents.

Every player ``i`` has a continuous distribution function on ``(0, inf)``
written as ``F_i(x) = exp(-nu_i(x))``. The hazard exponent ``nu_i`` is
non-increasing, blows up at ``0+`` and vanishes at infinity.

Player indices in the public API are 1-based (player ``1`` .. player ``n``);
arrays returned by the vectorised methods are ordinary 0-based numpy arrays
with one row per player.

All user supplied callables must be pure and must accept numpy arrays
(broadcasting like ufuncs).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import integrate

ArrayFn = Callable[[np.ndarray], np.ndarray]

#: log-spaced grid used for monotonicity spot checks
PROBE_GRID = np.logspace(-9, 9, 64)
#: extreme probe points for the limits at 0+ and infinity
ZERO_PROBE = 1e-300
INF_PROBE = 1e300
#: nu(ZERO_PROBE) must reach BLOWUP_LEVEL, nu(INF_PROBE) must drop below VANISH_LEVEL
BLOWUP_LEVEL = 100.0
VANISH_LEVEL = 1e-2

_MONO_RTOL = 1e-12


class FamilyError(ValueError):
    """Raised when a family or one of its ingredients is invalid."""


def _as_float_array(x) -> np.ndarray:
    return np.asarray(x, dtype=float)


def check_monotone(fn: ArrayFn, label: str = "function", grid=None,
                   zero_probe: float = ZERO_PROBE, inf_probe: float = INF_PROBE,
                   blowup: float = BLOWUP_LEVEL, vanish: float = VANISH_LEVEL,
                   check_limits: bool = True) -> None:
    """Spot-check that ``fn`` looks like a hazard exponent.

    The function is sampled on ``grid`` (default :data:`PROBE_GRID`) and must
    be non-negative and non-increasing there. With ``check_limits`` it must
    also exceed ``blowup`` at ``zero_probe`` and fall below ``vanish`` at
    ``inf_probe``.

    Raises
    ------
    FamilyError
        If any probe fails.
    """
    grid = PROBE_GRID if grid is None else _as_float_array(grid)
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        vals = _as_float_array(fn(grid)) * np.ones_like(grid)
    if np.any(np.isnan(vals)):
        raise FamilyError(f"{label}: NaN on the probe grid")
    if np.any(vals < 0):
        raise FamilyError(f"{label}: negative values on the probe grid")
    finite = np.isfinite(vals[:-1]) & np.isfinite(vals[1:])
    rises = vals[1:] > vals[:-1] * (1 + _MONO_RTOL) + 1e-300
    if np.any(rises & finite):
        k = int(np.argmax(rises & finite))
        raise FamilyError(
            f"{label}: not non-increasing between x={grid[k]:.3g} and x={grid[k + 1]:.3g}")
    if not check_limits:
        return
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        lo = float(np.asarray(fn(np.array([zero_probe])), dtype=float).ravel()[0])
        hi = float(np.asarray(fn(np.array([inf_probe])), dtype=float).ravel()[0])
    if not lo >= blowup:
        raise FamilyError(f"{label}: value {lo:.3g} at x={zero_probe:g} does not blow up")
    if not hi <= vanish:
        raise FamilyError(f"{label}: value {hi:.3g} at x={inf_probe:g} does not vanish")


@dataclass(frozen=True)
class TailFunction:
    """Shared tail shape ``r`` of a proportional family.

    ``inverse``, when given, is the generalized inverse
    ``r^{-1}(y) = sup{x : r(x) >= y}``; for a continuous ``r`` this is an
    exact preimage.
    """

    eval: ArrayFn
    inverse: Optional[ArrayFn] = None
    label: str = "r"
    trusted: bool = False

    def __call__(self, x):
        return self.eval(x)

    def validate(self, **probe_kw) -> None:
        # Builtin analytic tails skip the limit probes, their limits are exact.
        check_monotone(self.eval, self.label,
                       check_limits=not self.trusted and probe_kw.pop("check_limits", True),
                       **probe_kw)
        if self.inverse is not None:
            ys = np.logspace(-6, 6, 25)
            with np.errstate(over="ignore", divide="ignore"):
                xs = _as_float_array(self.inverse(ys))
                ok = np.isfinite(xs) & (xs > 0)
                back = _as_float_array(self.eval(xs[ok]))
            if not np.allclose(back, ys[ok], rtol=1e-8, atol=0):
                raise FamilyError(f"{self.label}: inverse round trip fails")


def power_tail(alpha: float) -> TailFunction:
    """``r(x) = x**(-alpha)``, the Weibull-type (Frechet) tail."""
    if not alpha > 0:
        raise FamilyError("alpha must be positive")
    alpha = float(alpha)
    return TailFunction(
        eval=lambda x: np.power(_as_float_array(x), -alpha),
        inverse=lambda y: np.power(_as_float_array(y), -1.0 / alpha),
        label=f"x^-{alpha:g}",
        trusted=True,
    )


def _log_tail_inverse(y):
    # y below 1/709.78 maps past the float range: inf is the honest answer
    with np.errstate(over="ignore"):
        return np.expm1(1.0 / _as_float_array(y))


def log_tail() -> TailFunction:
    """``r(x) = 1 / log(1 + x)``: a slowly vanishing tail."""
    return TailFunction(
        eval=lambda x: 1.0 / np.log1p(_as_float_array(x)),
        inverse=_log_tail_inverse,
        label="1/log(1+x)",
        trusted=True,
    )


def log_square_nu(x):
    """``exp(-ln(x) |ln(x)|)``: ``exp(-ln^2 x)`` mirrored below ``x = 1``.

    ``exp(-ln^2 x)`` itself peaks at ``x = 1``; mirroring the exponent on
    ``(0, 1)`` keeps it continuous, non-increasing and unbounded at ``0+``.
    """
    lx = np.log(_as_float_array(x))
    with np.errstate(over="ignore"):
        return np.exp(-lx * np.abs(lx))


def log_square_inverse(t):
    # solve -l|l| = ln t for l = ln x
    s = np.log(_as_float_array(t))
    return np.exp(-np.sign(s) * np.sqrt(np.abs(s)))


@dataclass(frozen=True)
class Perturbation:
    """Multiplicative perturbation ``1 + delta_i(x)`` of a proportional family.

    ``delta(i, x)`` is called with a 1-based integer array ``i`` and a float
    array ``x`` that broadcast against each other.
    """

    delta: Callable[[np.ndarray, np.ndarray], np.ndarray]
    lower_bound: float
    upper_bound: float

    def __post_init__(self):
        if not 0 <= self.lower_bound < 1:
            raise FamilyError("lower bound m must lie in [0, 1)")
        if not self.upper_bound >= 0:
            raise FamilyError("upper bound M must be non-negative")

    def values(self, players: np.ndarray, x: np.ndarray) -> np.ndarray:
        players = np.asarray(players)
        x = _as_float_array(x)
        out = self.delta(players[:, None], x[None, :])
        return np.broadcast_to(_as_float_array(out), (players.size, x.size))

    def validate(self, n: int, grid=None) -> None:
        grid = PROBE_GRID if grid is None else _as_float_array(grid)
        d = self.values(np.arange(1, n + 1), grid)
        tol = 1e-12
        if np.any(d < -self.lower_bound - tol) or np.any(d > self.upper_bound + tol):
            raise FamilyError(
                f"perturbation leaves [-{self.lower_bound:g}, {self.upper_bound:g}] "
                f"(observed [{d.min():.4g}, {d.max():.4g}])")


def rational_perturbation(d: Sequence[float]) -> Perturbation:
    """``delta_i(x) = d_i / (1 + x)`` with bounds taken from ``d``."""
    d = _as_float_array(d)
    return Perturbation(
        delta=lambda i, x: d[np.asarray(i) - 1] / (1.0 + x),
        lower_bound=max(0.0, -float(d.min())),
        upper_bound=max(0.0, float(d.max())),
    )


def golden_offsets(n: int, lo: float = -0.5, hi: float = 1.0) -> np.ndarray:
    """Deterministic, well spread offsets ``d_1..d_n`` in ``[lo, hi]``.

    Uses the fractional parts of ``i * golden ratio``; prefixes are stable
    in ``n``, so the same player keeps the same offset as ``n`` grows.
    """
    phi = (1 + 5 ** 0.5) / 2
    frac = np.mod(np.arange(1, n + 1) * phi, 1.0)
    return lo + (hi - lo) * frac


class PlayerFamily:
    """Base class for the collection ``{nu_1, ..., nu_n}``."""

    kind = "abstract"
    n: int
    weights: Optional[np.ndarray] = None

    def nu_matrix(self, x) -> np.ndarray:
        """All hazard exponents at the points ``x``; shape ``(n, len(x))``."""
        raise NotImplementedError

    def nu_player(self, i: int, x) -> np.ndarray:
        """Hazard exponent of player ``i`` (1-based) at the points ``x``."""
        raise NotImplementedError

    def sum_nu(self, x) -> np.ndarray:
        return self.nu_matrix(np.atleast_1d(_as_float_array(x))).sum(axis=0)

    def sum_inverse(self, y) -> Optional[np.ndarray]:
        """Analytic solution of ``sum_nu(x) = y`` or ``None`` if unavailable."""
        return None

    def player_inverse(self, i: int, t) -> Optional[np.ndarray]:
        """Analytic solution of ``nu_i(x) = t`` or ``None`` if unavailable."""
        return None

    def sum_bracket(self, y):
        """``(lo, hi)`` arrays known to enclose the solution of ``sum_nu(x) = y``, or None."""
        return None

    def player_bracket(self, i: int, t):
        """Like :meth:`sum_bracket` for ``nu_i(x) = t``."""
        return None

    def nu(self, i: int, x):
        """Scalar-friendly ``nu_i(x)`` with argument checks."""
        self._check_index(i)
        xa = _as_float_array(x)
        if np.any(xa <= 0):
            raise FamilyError("hazard exponents are only evaluated at x > 0")
        out = self.nu_player(i, np.atleast_1d(xa)).reshape(xa.shape)
        return float(out) if out.ndim == 0 else out

    def cdf(self, i: int, x):
        return np.exp(-self.nu(i, x))

    def _check_index(self, i):
        if not (isinstance(i, (int, np.integer)) and 1 <= i <= self.n):
            raise IndexError(f"player index {i!r} outside 1..{self.n}")


class ProportionalFamily(PlayerFamily):
    """``nu_i(x) = c_i r(x)``; Weibull-type families are the canonical case."""

    kind = "proportional"

    def __init__(self, weights, tail: TailFunction, validate: bool = True):
        w = _as_float_array(weights).ravel()
        if w.size < 1:
            raise FamilyError("need at least one player")
        if np.any(~np.isfinite(w)) or np.any(w < 0):
            raise FamilyError("weights must be finite and non-negative")
        if not w.sum() > 0:
            raise FamilyError("at least one weight must be positive")
        self.weights = w
        self.weights.setflags(write=False)
        self.n = w.size
        self.tail = tail
        if validate:
            tail.validate()

    @property
    def total_weight(self) -> float:
        return float(self.weights.sum())

    def nu_matrix(self, x):
        x = np.atleast_1d(_as_float_array(x))
        return self.weights[:, None] * _as_float_array(self.tail(x))[None, :]

    def nu_player(self, i, x):
        return self.weights[i - 1] * _as_float_array(self.tail(x))

    def sum_nu(self, x):
        return self.total_weight * _as_float_array(self.tail(np.atleast_1d(_as_float_array(x))))

    def sum_inverse(self, y):
        if self.tail.inverse is None:
            return None
        return _as_float_array(self.tail.inverse(_as_float_array(y) / self.total_weight))

    def player_inverse(self, i, t):
        if self.tail.inverse is None:
            return None
        c = self.weights[i - 1]
        if c == 0:
            # nu_i == 0: the player sits at the bottom of the support
            return np.zeros_like(_as_float_array(t))
        return _as_float_array(self.tail.inverse(_as_float_array(t) / c))


class TriangularFamily(ProportionalFamily):
    """Triangular-array weights ``c_in = g(i/n)`` on a shared tail."""

    kind = "triangular"

    def __init__(self, g: ArrayFn, n: int, tail: Optional[TailFunction] = None,
                 validate: bool = True):
        if n < 1:
            raise FamilyError("need at least one player")
        mass = integrate.quad(lambda t: float(g(np.array([t]))[0]), 0.0, 1.0, limit=200)[0]
        if not mass > 0:
            raise FamilyError("integral of g over [0, 1] must be positive")
        self.g = g
        self.g_mass = mass
        weights = _as_float_array(g(np.arange(1, n + 1) / n)) * np.ones(n)
        super().__init__(weights, tail if tail is not None else power_tail(1.0),
                         validate=validate)


class PerturbedFamily(PlayerFamily):
    """``nu_i(x) = c_i r(x) (1 + delta_i(x))`` with bounded ``delta``."""

    kind = "perturbed"

    def __init__(self, weights, tail: TailFunction, perturbation: Perturbation,
                 validate: bool = True):
        w = _as_float_array(weights).ravel()
        if w.size < 1:
            raise FamilyError("need at least one player")
        if np.any(~np.isfinite(w)) or np.any(w < 0):
            raise FamilyError("weights must be finite and non-negative")
        if not w.sum() > 0:
            raise FamilyError("at least one weight must be positive")
        self.weights = w
        self.weights.setflags(write=False)
        self.n = w.size
        self.tail = tail
        self.perturbation = perturbation
        if validate:
            tail.validate()
            perturbation.validate(self.n)
            rows = self.nu_matrix(PROBE_GRID)
            for k in np.flatnonzero(w > 0)[:256]:
                check_monotone(lambda x, k=k: self.nu_player(k + 1, x),
                               f"nu_{k + 1}", check_limits=False)
            if np.any(rows < 0):
                raise FamilyError("negative hazard exponent")

    def nu_matrix(self, x):
        x = np.atleast_1d(_as_float_array(x))
        players = np.arange(1, self.n + 1)
        d = self.perturbation.values(players, x)
        return self.weights[:, None] * _as_float_array(self.tail(x))[None, :] * (1.0 + d)

    def nu_player(self, i, x):
        x = np.atleast_1d(_as_float_array(x))
        d = self.perturbation.values(np.array([i]), x)[0]
        return self.weights[i - 1] * _as_float_array(self.tail(x)) * (1.0 + d)

    def _bracket(self, y, scale):
        # -m <= delta <= M pins the solution between r^-1(y/((1-m)c)) and r^-1(y/((1+M)c))
        if self.tail.inverse is None or scale <= 0:
            return None
        y = _as_float_array(y)
        lo = _as_float_array(self.tail.inverse(y / ((1 - self.perturbation.lower_bound) * scale)))
        hi = _as_float_array(self.tail.inverse(y / ((1 + self.perturbation.upper_bound) * scale)))
        return lo * (1 - 1e-9), hi * (1 + 1e-9)

    def sum_bracket(self, y):
        return self._bracket(y, float(self.weights.sum()))

    def player_bracket(self, i, t):
        return self._bracket(t, float(self.weights[i - 1]))


class GenericFamily(PlayerFamily):
    """Arbitrary per-player hazard exponents with optional analytic inverses."""

    kind = "generic"

    def __init__(self, nus: Sequence[ArrayFn], inverses: Optional[Sequence] = None,
                 labels: Optional[Sequence[str]] = None, validate: bool = True):
        if len(nus) < 1:
            raise FamilyError("need at least one player")
        self.nus = tuple(nus)
        self.n = len(self.nus)
        inverses = [None] * self.n if inverses is None else list(inverses)
        if len(inverses) != self.n:
            raise FamilyError("one inverse slot per player required")
        self.inverses = tuple(inverses)
        self.labels = tuple(labels) if labels else tuple(f"nu_{i + 1}" for i in range(self.n))
        self.weights = None
        if validate:
            for k, fn in enumerate(self.nus):
                TailFunction(fn, self.inverses[k], self.labels[k]).validate()

    def nu_matrix(self, x):
        x = np.atleast_1d(_as_float_array(x))
        with np.errstate(over="ignore"):
            return np.vstack([_as_float_array(fn(x)) * np.ones_like(x) for fn in self.nus])

    def nu_player(self, i, x):
        x = np.atleast_1d(_as_float_array(x))
        with np.errstate(over="ignore"):
            return _as_float_array(self.nus[i - 1](x)) * np.ones_like(x)

    def player_inverse(self, i, t):
        inv = self.inverses[i - 1]
        return None if inv is None else _as_float_array(inv(_as_float_array(t)))


# ---------------------------------------------------------------------------
# operations

def nu(family: PlayerFamily, i: int, x):
    """Hazard exponent ``nu_i(x)``; ``exp(-nu)`` recovers the cdf."""
    return family.nu(i, x)


def weibull_family(weights, alpha: float) -> ProportionalFamily:
    """Players with ``F_i(x) = exp(-c_i / x**alpha)``."""
    if not alpha > 0:
        raise FamilyError("alpha must be positive")
    return ProportionalFamily(weights, power_tail(alpha))


def _compose(fn, inner):
    return lambda x: fn(inner(x))


def transform_family(family: PlayerFamily, f: ArrayFn, f_inv: ArrayFn,
                     probes=None, rtol: float = 1e-9) -> PlayerFamily:
    """Family of ``f(X_i)`` for a continuous strictly increasing ``f``.

    The new hazard exponents are ``nu_i(f_inv(x))``. Both ``f`` and its
    inverse are needed: ``f_inv`` to evaluate, ``f`` to carry over analytic
    inverses.

    Raises
    ------
    FamilyError
        If ``f_inv(f(x))`` misses ``x`` on the probe points, or ``f`` is not
        increasing there.
    """
    probes = np.logspace(-6, 6, 49) if probes is None else _as_float_array(probes)
    fx = _as_float_array(f(probes))
    if np.any(np.diff(fx) <= 0) or np.any(fx <= 0):
        raise FamilyError("f must be positive and strictly increasing on the probes")
    back = _as_float_array(f_inv(fx))
    if not np.allclose(back, probes, rtol=rtol, atol=0):
        raise FamilyError("f_inv(f(x)) != x on the probe points")

    if isinstance(family, ProportionalFamily):
        tail = family.tail
        new_tail = TailFunction(
            eval=_compose(tail.eval, f_inv),
            inverse=None if tail.inverse is None else _compose(f, tail.inverse),
            label=f"{tail.label} o f^-1",
            trusted=tail.trusted,
        )
        return ProportionalFamily(family.weights, new_tail, validate=False)
    if isinstance(family, PerturbedFamily):
        tail, pert = family.tail, family.perturbation
        new_tail = TailFunction(_compose(tail.eval, f_inv), None,
                                f"{tail.label} o f^-1", tail.trusted)
        new_pert = Perturbation(lambda i, x: pert.delta(i, f_inv(x)),
                                pert.lower_bound, pert.upper_bound)
        return PerturbedFamily(family.weights, new_tail, new_pert, validate=False)
    if isinstance(family, GenericFamily):
        nus = [_compose(fn, f_inv) for fn in family.nus]
        invs = [None if inv is None else _compose(f, inv) for inv in family.inverses]
        return GenericFamily(nus, invs, [f"{lab} o f^-1" for lab in family.labels],
                             validate=False)
    raise FamilyError(f"cannot transform family of kind {family.kind!r}")


def permute_family(family: PlayerFamily, perm: Sequence[int]) -> PlayerFamily:
    """Relabel players: new player ``k`` is old player ``perm[k]`` (0-based perm)."""
    perm = np.asarray(perm, dtype=int)
    if sorted(perm.tolist()) != list(range(family.n)):
        raise FamilyError("perm must be a permutation of 0..n-1")
    if isinstance(family, ProportionalFamily):
        return ProportionalFamily(family.weights[perm], family.tail, validate=False)
    if isinstance(family, PerturbedFamily):
        old = perm + 1
        pert = family.perturbation
        new_pert = Perturbation(lambda i, x: pert.delta(old[np.asarray(i) - 1], x),
                                pert.lower_bound, pert.upper_bound)
        return PerturbedFamily(family.weights[perm], family.tail, new_pert, validate=False)
    if isinstance(family, GenericFamily):
        return GenericFamily([family.nus[k] for k in perm],
                             [family.inverses[k] for k in perm],
                             [family.labels[k] for k in perm], validate=False)
    raise FamilyError(f"cannot permute family of kind {family.kind!r}")


# ---------------------------------------------------------------------------
# weight rules and family spec files

def rule_log_weights(kind: str, param: float, n: int) -> np.ndarray:
    """``log c_i`` for ``i = 1..n`` under a builtin weight rule.

    ``power``: ``c_i = i**s``; ``geometric``: ``c_i = q**i``;
    ``harmonic``: ``c_i = 1/i`` (``param`` ignored).
    """
    i = np.arange(1, n + 1, dtype=float)
    if kind == "power":
        return float(param) * np.log(i)
    if kind == "geometric":
        if not param > 0:
            raise FamilyError("geometric ratio must be positive")
        return i * math.log(float(param))
    if kind == "harmonic":
        return -np.log(i)
    raise FamilyError(f"unknown weight rule {kind!r}")


def rule_weights(kind: str, param: float, n: int) -> np.ndarray:
    with np.errstate(over="raise"):
        try:
            return np.exp(rule_log_weights(kind, param, n))
        except FloatingPointError:
            raise FamilyError(f"weights of rule {kind!r} overflow at n={n}") from None


BUILTIN_G = {
    "const": lambda x: np.ones_like(np.asarray(x, dtype=float)),
    "linear": lambda x: np.asarray(x, dtype=float),
    "square": lambda x: np.asarray(x, dtype=float) ** 2,
    "sqrt": lambda x: np.sqrt(np.asarray(x, dtype=float)),
    "tent": lambda x: 1.0 - np.abs(2.0 * np.asarray(x, dtype=float) - 1.0),
}


def _tail_from_spec(spec) -> TailFunction:
    if spec is None:
        return power_tail(1.0)
    if isinstance(spec, str):
        spec = {"kind": spec}
    kind = spec.get("kind", "power")
    if kind == "power":
        return power_tail(spec.get("alpha", 1.0))
    if kind == "log":
        return log_tail()
    raise FamilyError(f"unknown tail {kind!r}")


def _generic_player(spec):
    kind = spec.get("kind")
    if kind == "power":
        c, a = float(spec.get("c", 1.0)), float(spec.get("alpha", 1.0))
        return (lambda x: c * np.power(_as_float_array(x), -a),
                lambda t: np.power(_as_float_array(t) / c, -1.0 / a), f"{c:g}/x^{a:g}")
    if kind == "log":
        c = float(spec.get("c", 1.0))
        return (lambda x: c / np.log1p(_as_float_array(x)),
                lambda t: _log_tail_inverse(_as_float_array(t) / c), f"{c:g}/log(1+x)")
    if kind == "log-square":
        return log_square_nu, log_square_inverse, "exp(-ln x |ln x|)"
    raise FamilyError(f"unknown generic player kind {kind!r}")


def _weights_from_spec(spec) -> np.ndarray:
    if "weights" in spec:
        return _as_float_array(spec["weights"])
    rule = spec.get("weights_rule")
    if rule is None:
        raise FamilyError("family spec needs 'weights' or 'weights_rule'")
    if "n" not in rule and "n" not in spec:
        raise FamilyError("weights_rule needs a player count 'n'")
    n = int(rule.get("n", spec.get("n")))
    return rule_weights(rule["kind"], rule.get("param", 0.0), n)


def family_from_spec(spec: dict) -> PlayerFamily:
    """Build a family from its JSON description (see README for the schema)."""
    if not isinstance(spec, dict):
        raise FamilyError("family spec must be a JSON object")
    variant = spec.get("variant")
    if variant == "weibull":
        if "alpha" not in spec:
            raise FamilyError("weibull family needs 'alpha'")
        return weibull_family(_weights_from_spec(spec), spec["alpha"])
    if variant == "proportional":
        tail = _tail_from_spec(spec.get("tail", {"kind": "power", "alpha": spec.get("alpha", 1.0)}))
        return ProportionalFamily(_weights_from_spec(spec), tail)
    if variant == "perturbed":
        w = _weights_from_spec(spec)
        tail = _tail_from_spec(spec.get("tail", {"kind": "power", "alpha": spec.get("alpha", 1.0)}))
        pspec = spec.get("perturbation", {"kind": "rational", "d_rule": "golden"})
        if "d" in pspec:
            d = _as_float_array(pspec["d"])
        elif pspec.get("d_rule") == "golden":
            d = golden_offsets(w.size, *pspec.get("range", (-0.5, 1.0)))
        else:
            raise FamilyError("perturbation needs 'd' or d_rule 'golden'")
        if d.size != w.size:
            raise FamilyError("one offset per player required")
        return PerturbedFamily(w, tail, rational_perturbation(d))
    if variant == "generic":
        players = spec.get("players")
        if not players:
            raise FamilyError("generic family needs a 'players' list")
        parts = [_generic_player(p) for p in players]
        return GenericFamily([p[0] for p in parts], [p[1] for p in parts],
                             [p[2] for p in parts])
    if variant == "triangular":
        g = spec.get("g", "const")
        if g not in BUILTIN_G:
            raise FamilyError(f"unknown builtin g {g!r}; choose from {sorted(BUILTIN_G)}")
        if "n" not in spec:
            raise FamilyError("triangular family needs 'n'")
        return TriangularFamily(BUILTIN_G[g], int(spec["n"]), _tail_from_spec(spec.get("tail")))
    raise FamilyError(f"unknown family variant {variant!r}")


def load_family(path) -> PlayerFamily:
    with open(Path(path)) as fh:
        return family_from_spec(json.load(fh))
