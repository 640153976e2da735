import math

import numpy as np
import pytest

from argmaxlaw.exact import solve_decreasing, winner_probs_exact
from argmaxlaw.model import weibull_family
from argmaxlaw.sim import (RNG_LABEL, bernoulli_max_membership, bernoulli_membership_exact,
                           estimate_winner_probs, sample_player, transform_invariance_check,
                           uniform_block)

from conftest import heterogeneous_families


class TestUniformStream:
    def test_open_interval(self):
        u = uniform_block(3, 0, 10 ** 5)
        assert u.min() > 0 and u.max() < 1

    @pytest.mark.parametrize("start", [0, 1, 3, 4, 5, 1001])
    def test_blocks_are_chunk_independent(self, start):
        whole = uniform_block(11, 0, 2000)
        np.testing.assert_array_equal(uniform_block(11, start, 500), whole[start:start + 500])

    def test_seeds_differ(self):
        assert not np.array_equal(uniform_block(1, 0, 8), uniform_block(2, 0, 8))

    def test_moments(self):
        u = uniform_block(5, 0, 10 ** 6)
        assert u.mean() == pytest.approx(0.5, abs=2e-3)
        assert u.var() == pytest.approx(1 / 12, abs=2e-3)

    def test_large_seeds_stay_distinct(self):
        top = 2 ** 64 - 1
        assert not np.array_equal(uniform_block(top, 0, 4), uniform_block(top - 1, 0, 4))

    def test_bad_seed(self):
        with pytest.raises(ValueError):
            uniform_block(-1, 0, 3)


class TestSamplePlayer:
    def test_weibull_examples(self):
        assert sample_player(weibull_family([1], 1.0), 1, math.exp(-1)) == pytest.approx(1.0)
        assert sample_player(weibull_family([2], 2.0), 1, math.exp(-2)) == pytest.approx(1.0)

    @pytest.mark.parametrize("name", list(heterogeneous_families()))
    def test_round_trip(self, name):
        fam = heterogeneous_families()[name]
        u = np.array([0.1, 0.5, 0.9])
        for i in range(1, fam.n + 1):
            x = sample_player(fam, i, u)
            np.testing.assert_allclose(fam.cdf(i, x), u, rtol=1e-12)

    def test_beyond_float_range(self):
        fam = heterogeneous_families()["mixed-tails"]
        x = sample_player(fam, 1, np.array([0.5, 0.9999]))
        assert np.isfinite(x[0]) and np.isinf(x[1])

    @pytest.mark.parametrize("u", [0.0, 1.0, -0.2])
    def test_u_outside_open_interval(self, u):
        with pytest.raises(ValueError):
            sample_player(weibull_family([1], 1.0), 1, u)

    def test_scalar_and_vector_shapes(self):
        fam = weibull_family([1, 2], 1.0)
        assert isinstance(sample_player(fam, 2, 0.3), float)
        assert sample_player(fam, 2, np.full((2, 3), 0.3)).shape == (2, 3)


class TestEstimateWinnerProbs:
    def test_weibull_coverage(self, weibull123):
        r = estimate_winner_probs(weibull123, 10 ** 6, seed=42)
        assert r.counts.sum() == r.draws == 10 ** 6
        assert np.all(r.covers([1 / 6, 1 / 3, 1 / 2]))
        assert r.rng_label == RNG_LABEL

    def test_single_player(self):
        r = estimate_winner_probs(weibull_family([3], 1.0), 1000, seed=1)
        assert r.probs_hat.tolist() == [1.0]

    def test_deterministic(self):
        fam = heterogeneous_families()["perturbed"]
        a = estimate_winner_probs(fam, 5000, seed=9)
        b = estimate_winner_probs(fam, 5000, seed=9)
        np.testing.assert_array_equal(a.counts, b.counts)
        np.testing.assert_array_equal(a.ci_radius, b.ci_radius)

    def test_chunking_does_not_change_results(self, monkeypatch):
        import argmaxlaw.sim as sim
        fam = weibull_family([1, 2, 3], 0.5)
        a = estimate_winner_probs(fam, 3001, seed=4)
        monkeypatch.setattr(sim, "_CHUNK_VALUES", 7)
        b = estimate_winner_probs(fam, 3001, seed=4)
        np.testing.assert_array_equal(a.counts, b.counts)

    def test_ties_are_rare(self, weibull123):
        r = estimate_winner_probs(weibull123, 10 ** 6, seed=3)
        assert r.ties / r.draws < 1e-4

    def test_coverage_over_seeds(self):
        fam = weibull_family([1, 2, 3, 4], 1.5)
        alpha = np.arange(1, 5) / 10
        hits = total = 0
        for seed in range(40):
            r = estimate_winner_probs(fam, 20000, seed=seed)
            hits += int(r.covers(alpha).sum())
            total += fam.n
        assert hits / total >= 0.99

    @pytest.mark.parametrize("name", ["generic-mix", "mixed-tails", "log-tail"])
    def test_agrees_with_exact(self, name):
        fam = heterogeneous_families()[name]
        r = estimate_winner_probs(fam, 2 * 10 ** 5, seed=17)
        assert np.all(r.covers(winner_probs_exact(fam).probs))

    def test_draws_positive(self, weibull123):
        with pytest.raises(ValueError):
            estimate_winner_probs(weibull123, 0, seed=1)


def wiggle(x):
    return x + 0.5 * np.sin(x)


def wiggle_inverse(y):
    # 1/wiggle is decreasing, so the shared solver inverts it
    y = np.asarray(y, dtype=float)
    return solve_decreasing(lambda z: 1.0 / wiggle(z), 1.0 / y.ravel()).reshape(y.shape)


class TestTransformInvariance:
    def test_cube(self):
        assert transform_invariance_check(weibull_family([1, 2], 1.0), lambda x: x ** 3,
                                          np.cbrt, 10 ** 4, seed=5)

    def test_identity(self):
        ident = lambda x: np.asarray(x, dtype=float)  # noqa: E731
        assert transform_invariance_check(weibull_family([1, 2], 1.0), ident, ident,
                                          10 ** 4, seed=5)

    def test_wiggle(self):
        x = np.logspace(-6, 6, 10 ** 5)
        assert np.all(1 + 0.5 * np.cos(x) > 0)
        assert np.all(np.diff(wiggle(x)) > 0)
        assert transform_invariance_check(weibull_family([1, 2], 1.0), wiggle, wiggle_inverse,
                                          10 ** 4, seed=5)

    def test_consumes_draws_times_n(self, monkeypatch):
        import argmaxlaw.sim as sim
        used = []
        real = sim.uniform_block

        def spy(seed, start, count):
            used.append((start, count))
            return real(seed, start, count)

        monkeypatch.setattr(sim, "uniform_block", spy)
        fam = weibull_family([1, 2, 3], 1.0)
        transform_invariance_check(fam, lambda x: 2 * x, lambda y: y / 2, 1000, seed=1)
        # two paths, each reading the same draws * n uniforms
        assert sum(c for _, c in used) == 2 * 1000 * 3
        assert sorted(used[: len(used) // 2]) == sorted(used[len(used) // 2:])


class TestBernoulli:
    def test_three_tenths_five_players(self):
        p, n, draws = 0.3, 5, 10 ** 6
        expected = bernoulli_membership_exact(p, n)
        assert expected == pytest.approx(0.46807)
        sigma = math.sqrt(expected * (1 - expected) / draws)
        assert abs(bernoulli_max_membership(p, n, draws, seed=42) - expected) <= 3 * sigma

    def test_single_player(self):
        assert bernoulli_max_membership(0.4, 1, 1000, seed=1) == 1.0
        assert bernoulli_membership_exact(0.4, 1) == pytest.approx(1.0)

    def test_two_fair_coins(self):
        assert bernoulli_membership_exact(0.5, 2) == 0.75
        est = bernoulli_max_membership(0.5, 2, 10 ** 5, seed=2)
        assert abs(est - 0.75) <= 3 * math.sqrt(0.75 * 0.25 / 10 ** 5)

    @pytest.mark.parametrize("p", [0.0, 1.0])
    def test_p_range(self, p):
        with pytest.raises(ValueError):
            bernoulli_max_membership(p, 3, 10, seed=1)
