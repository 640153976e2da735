import math

import numpy as np
import pytest

from argmaxlaw.exact import (GK_NODES, GK_WEIGHTS, G_WEIGHTS, InversionConfig, InversionError,
                             NumericalError, QuadratureConfig, QuadratureError,
                             WinnerDistribution, adaptive_gk, invert_sum, solve_decreasing,
                             sum_nu, winner_probs_exact, winner_probs_product)
from argmaxlaw.model import (GenericFamily, PerturbedFamily, ProportionalFamily, TailFunction,
                             power_tail, rational_perturbation, transform_family, weibull_family)
from argmaxlaw.sim import estimate_winner_probs

from conftest import generic_mix, heterogeneous_families


def inv_x(x):
    return 1.0 / np.asarray(x, dtype=float)


def rational_family(c, d):
    return PerturbedFamily(c, power_tail(1.0), rational_perturbation(d))


def p1_inverse_vs_inverse_square():
    """P(X_1 > X_2) for nu_1 = 1/x, nu_2 = 2/x^2 in closed form.

    With t = 1/x the probability is int_0^inf exp(-t - 2 t^2) dt
    = exp(1/8) sqrt(pi/8) erfc(1/(2 sqrt 2)).
    """
    return math.exp(1 / 8) * math.sqrt(math.pi / 8) * math.erfc(1 / (2 * math.sqrt(2)))


class TestSumNu:
    def test_proportional(self):
        fam = ProportionalFamily([1, 2, 3], TailFunction(inv_x, inv_x, "1/x"))
        assert sum_nu(fam, 1.0) == pytest.approx(6.0)

    def test_perturbed(self):
        fam = rational_family([1, 1], [1, 1])
        assert sum_nu(fam, 1.0) == pytest.approx(3.0)

    @pytest.mark.parametrize("name", list(heterogeneous_families()))
    def test_monotone(self, name):
        fam = heterogeneous_families()[name]
        s = sum_nu(fam, np.logspace(-5, 5, 200))
        assert np.all(np.diff(s) <= 0)

    def test_rejects_non_positive(self, weibull123):
        with pytest.raises(ValueError):
            sum_nu(weibull123, 0.0)


class TestInvertSum:
    def test_weibull_analytic(self, weibull123):
        assert invert_sum(weibull123, 3.0) == pytest.approx(2.0, rel=1e-15)

    @pytest.mark.parametrize("name", list(heterogeneous_families()))
    @pytest.mark.parametrize("y", [0.1, 1.0, 10.0])
    def test_round_trip(self, name, y):
        fam = heterogeneous_families()[name]
        x = invert_sum(fam, y)
        assert sum_nu(fam, x) == pytest.approx(y, rel=1e-12)

    def test_perturbed_against_grid_scan(self):
        c = np.array([1.0, 2.0, 0.5])
        d = np.array([0.8, -0.4, 0.2])
        fam = rational_family(c, d)
        # oracle: scan S on 10^6 log-spaced points, interpolate the crossing
        xs = np.logspace(-2, 2, 10 ** 6)
        S = (c[:, None] / xs * (1 + d[:, None] / (1 + xs))).sum(axis=0)
        k = np.flatnonzero(S < 1.0)[0]
        x0, x1, s0, s1 = xs[k - 1], xs[k], S[k - 1], S[k]
        x_grid = x0 + (s0 - 1.0) * (x1 - x0) / (s0 - s1)
        assert invert_sum(fam, 1.0) == pytest.approx(x_grid, abs=1e-6)

    def test_solver_without_analytic_inverse(self):
        fam = GenericFamily([lambda x: 1.0 / x, lambda x: 2.0 / x ** 2])
        x = invert_sum(fam, 3.0)
        # 1/x + 2/x^2 = 3  <=>  x = 1
        assert x == pytest.approx(1.0, rel=1e-12)

    def test_rejects_non_positive(self, weibull123):
        with pytest.raises(ValueError):
            invert_sum(weibull123, 0.0)


class TestSolver:
    def test_extreme_targets(self):
        x = solve_decreasing(lambda z: 1.0 / z ** 2, np.logspace(-100, 100, 5))
        np.testing.assert_allclose(x, [1e50, 1e25, 1.0, 1e-25, 1e-50], rtol=1e-12)

    def test_flat_stretch_lands_inside(self):
        fn = lambda x: np.where(x < 1, 1 / x, np.where(x < 2, 1.0, 2 / x))  # noqa: E731
        x = solve_decreasing(fn, [1.0])[0]
        assert 1.0 <= x <= 2.0

    def test_bounded_function_exhausts_bracket(self):
        with pytest.raises(InversionError, match="bracket"):
            solve_decreasing(lambda x: 1.0 / (1.0 + x), [5.0])

    def test_max_iter(self):
        with pytest.raises(InversionError, match="max_iter"):
            solve_decreasing(lambda x: 1.0 / np.log1p(x), [np.pi], InversionConfig(max_iter=1))

    def test_config_validation(self):
        with pytest.raises(ValueError):
            InversionConfig(bracket_lo=2.0, bracket_hi=1.0)
        with pytest.raises(ValueError):
            InversionConfig(abs_tol=0.0)
        with pytest.raises(ValueError):
            QuadratureConfig(nodes=1)
        with pytest.raises(ValueError):
            QuadratureConfig(scheme="truncated-adaptive", y_max=10)


class TestGaussKronrod:
    def test_rule_exactness(self):
        for k in range(23):
            exact = 2 / (k + 1) if k % 2 == 0 else 0.0
            assert (GK_WEIGHTS * GK_NODES ** k).sum() == pytest.approx(exact, abs=1e-14)
        for k in range(14):
            exact = 2 / (k + 1) if k % 2 == 0 else 0.0
            assert (G_WEIGHTS * GK_NODES[1::2] ** k).sum() == pytest.approx(exact, abs=1e-14)

    def test_vector_integrand(self):
        f = lambda y: np.vstack([np.exp(-y), y * np.exp(-y)])  # noqa: E731
        val, err, _ = adaptive_gk(f, 0.0, 50.0, 1e-13)
        np.testing.assert_allclose(val, [1 - np.exp(-50), 1 - 51 * np.exp(-50)], atol=1e-13)
        assert err < 1e-12

    def test_budget(self):
        with pytest.raises(QuadratureError):
            adaptive_gk(lambda y: np.sign(np.sin(1 / (y + 1e-9)))[None, :], 0.0, 1.0, 1e-14,
                        max_panels=50)


class TestWinnerProbsExact:
    def test_weibull_closed_form(self, weibull123):
        d = winner_probs_exact(weibull123)
        np.testing.assert_allclose(d.probs, [1 / 6, 1 / 3, 1 / 2], atol=1e-13)
        assert d.method == "basic-formula"

    def test_single_player(self):
        assert winner_probs_exact(weibull_family([5], 2.0)).probs.tolist() == [1.0]

    @pytest.mark.parametrize("tail", [power_tail(0.7), power_tail(3.0)])
    def test_iid(self, tail):
        d = winner_probs_exact(ProportionalFamily([1, 1, 1, 1], tail))
        np.testing.assert_allclose(d.probs, 0.25, atol=1e-13)

    def test_iid_generic(self):
        fam = GenericFamily([lambda x: 1.0 / np.log1p(x)] * 4)
        np.testing.assert_allclose(winner_probs_exact(fam).probs, 0.25, atol=1e-12)

    def test_closed_form_pair(self):
        fam = GenericFamily([lambda x: 1.0 / x, lambda x: 2.0 / x ** 2])
        p1 = p1_inverse_vs_inverse_square()
        d = winner_probs_exact(fam)
        np.testing.assert_allclose(d.probs, [p1, 1 - p1], atol=1e-10)

    def test_adaptive_scheme(self, weibull123):
        d = winner_probs_exact(weibull123, quad_cfg=QuadratureConfig(scheme="truncated-adaptive"))
        np.testing.assert_allclose(d.probs, [1 / 6, 1 / 3, 1 / 2], atol=1e-12)
        assert d.tolerance_estimate >= 51 * np.exp(-50)

    def test_fallback_on_rough_integrand(self):
        d = winner_probs_exact(generic_mix())
        assert d.diagnostics["fallback_from"]["scheme"] == "gauss-laguerre"
        no_fb = winner_probs_exact(generic_mix(), quad_cfg=QuadratureConfig(fallback_tol=None))
        # the plain rule honestly reports its larger error
        assert no_fb.tolerance_estimate > 1e-7
        assert np.abs(no_fb.probs - d.probs).max() <= no_fb.tolerance_estimate

    def test_zero_weight_player_never_wins(self):
        d = winner_probs_exact(weibull_family([0.0, 1.0, 3.0], 1.0))
        np.testing.assert_allclose(d.probs, [0.0, 0.25, 0.75], atol=1e-14)

    def test_transform_invariance(self):
        fam = weibull_family([1, 2], 1.0)
        t = transform_family(fam, lambda x: x ** 3, np.cbrt)
        a, b = winner_probs_exact(fam), winner_probs_exact(t)
        np.testing.assert_allclose(a.probs, b.probs,
                                   atol=2 * max(a.tolerance_estimate, b.tolerance_estimate))

    def test_transform_invariance_without_analytic_inverse(self):
        fam = rational_family([1, 2, 3], [0.5, -0.2, 0.9])
        t = transform_family(fam, lambda x: 3 * x ** 2, lambda y: np.sqrt(y / 3))
        a, b = winner_probs_exact(fam), winner_probs_exact(t)
        np.testing.assert_allclose(a.probs, b.probs, atol=1e-10)

    def test_scaling_weights_only_invariant_for_shared_tail(self):
        w = np.array([1.0, 2.0])
        prop = [winner_probs_exact(weibull_family(k * w, 1.0)).probs for k in (1, 7)]
        np.testing.assert_allclose(prop[0], prop[1], atol=1e-14)
        pert = [winner_probs_exact(rational_family(k * w, [0.5, -0.3])).probs for k in (1, 7)]
        # F_i**7 is not an increasing transform of X_i: the law moves
        np.testing.assert_allclose(pert[1] - pert[0], [-0.0502005, 0.0502005], atol=1e-7)

    def test_negative_nu_detected(self):
        fam = GenericFamily([lambda x: 1.0 / x, lambda x: 1.0 / x - 0.1], validate=False)
        with pytest.raises(NumericalError):
            winner_probs_exact(fam)

    def test_inversion_contract_at_nodes(self):
        fam = rational_family([1, 2, 3], [0.3, 0.1, -0.2])
        d = winner_probs_exact(fam)
        assert d.diagnostics["max_scaled_residual"] <= 1.0

    def test_heavy_tail_beyond_float_range(self):
        # 1/log(1+x) puts about 0.14% of the mass above 1e300
        fam = heterogeneous_families()["mixed-tails"]
        a, b = winner_probs_exact(fam), winner_probs_product(fam)
        assert a.diagnostics["mass_beyond_x_max"] > 1e-3
        np.testing.assert_allclose(a.probs, b.probs, atol=1e-10)

    def test_log_tail_proportional_exact(self):
        fam = heterogeneous_families()["log-tail"]
        w = np.array([0.5, 1.0, 2.0, 4.0])
        for d in (winner_probs_exact(fam), winner_probs_product(fam)):
            np.testing.assert_allclose(d.probs, w / w.sum(), atol=1e-12)

    @pytest.mark.slow
    def test_perturbed_against_monte_carlo(self):
        fam = rational_family([1, 2], [0.5, -0.3])
        d = winner_probs_exact(fam)
        r = estimate_winner_probs(fam, 10 ** 7, seed=2024)
        assert np.abs(r.probs_hat - d.probs).max() < 1e-3


class TestWinnerProbsProduct:
    def test_weibull_closed_form(self, weibull123):
        d = winner_probs_product(weibull123)
        np.testing.assert_allclose(d.probs, [1 / 6, 1 / 3, 1 / 2], atol=1e-6)
        assert d.method == "product-form"

    def test_single_player(self):
        assert winner_probs_product(weibull_family([2], 1.0)).probs.tolist() == [1.0]

    def test_closed_form_pair(self):
        fam = GenericFamily([lambda x: 1.0 / x, lambda x: 2.0 / x ** 2])
        p1 = p1_inverse_vs_inverse_square()
        np.testing.assert_allclose(winner_probs_product(fam).probs, [p1, 1 - p1], atol=1e-10)

    def test_matches_basic_formula(self):
        fam = GenericFamily([lambda x: 1.0 / x, lambda x: 2.0 / x ** 2])
        a, b = winner_probs_exact(fam), winner_probs_product(fam)
        np.testing.assert_allclose(a.probs, b.probs, atol=1e-6)

    def test_zero_weight_player(self):
        d = winner_probs_product(weibull_family([0.0, 1.0], 1.0))
        np.testing.assert_allclose(d.probs, [0.0, 1.0], atol=1e-10)

    def test_refinement_budget(self):
        with pytest.raises(QuadratureError):
            winner_probs_product(weibull_family([1, 50], 1.0),
                                 QuadratureConfig(tol=1e-15, max_panels=10))


class TestWinnerDistribution:
    def test_check_accepts_valid(self):
        WinnerDistribution(np.array([0.5, 0.5]), "x").check()

    def test_check_rejects(self):
        with pytest.raises(NumericalError):
            WinnerDistribution(np.array([0.5, 0.6]), "x").check()
        with pytest.raises(NumericalError):
            WinnerDistribution(np.array([1.1, -0.1]), "x").check()
