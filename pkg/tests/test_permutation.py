"""Tests for permutation-calibrated screening thresholds."""

import numpy as np
import pytest
from scipy import stats

from src.errors import InsufficientCandidates, UnknownIndex
from src.screening import (
    Dataset,
    PermutationConfig,
    conditional_permutation_threshold,
    fit_intercept_only,
    permutation_threshold,
    screen_all,
)
from src.spline import build_basis


@pytest.fixture
def noise_data(rng):
    w = rng.uniform(size=100)
    return Dataset(y=rng.standard_normal(100), w=w, x=rng.standard_normal((100, 50)))


class TestPermutationConfig:
    def test_rejects_bad_values(self):
        with pytest.raises(ValueError):
            PermutationConfig(q=0)
        with pytest.raises(ValueError):
            PermutationConfig(num_permutations=0)
        with pytest.raises(ValueError):
            PermutationConfig(K=-1)


class TestPermutationThreshold:
    """Unconditional thresholds from a permuted response."""

    def test_identity_permutation_reproduces_scores(self, varying_data, varying_basis):
        identity = [np.arange(varying_data.n)]
        result = permutation_threshold(varying_data, varying_basis, permutations=identity)
        observed = screen_all(varying_data, varying_basis)
        np.testing.assert_array_equal(result.null_scores, observed.scores)
        assert result.tau == observed.scores.max()

    def test_qth_largest_of_two(self, varying_data, varying_basis):
        result = permutation_threshold(varying_data, varying_basis, [3, 7], PermutationConfig(q=2))
        assert result.null_scores.size == 2
        assert result.tau == result.null_scores.min()

    def test_same_seed_same_bits(self, noise_data):
        basis = build_basis(noise_data.w)
        first = permutation_threshold(noise_data, basis, config=PermutationConfig(seed=99))
        second = permutation_threshold(noise_data, basis, config=PermutationConfig(seed=99))
        assert first.tau == second.tau
        assert first.null_scores.tobytes() == second.null_scores.tobytes()

    def test_monotone_in_q(self, noise_data):
        basis = build_basis(noise_data.w)
        taus = [
            permutation_threshold(noise_data, basis, config=PermutationConfig(q=q, seed=5)).tau
            for q in range(1, 6)
        ]
        assert all(a >= b for a, b in zip(taus, taus[1:]))

    def test_pooled_rounds(self, noise_data):
        basis = build_basis(noise_data.w)
        result = permutation_threshold(noise_data, basis, config=PermutationConfig(num_permutations=3))
        assert result.null_scores.size == 3 * noise_data.p

    def test_insufficient_candidates(self, varying_data, varying_basis):
        with pytest.raises(InsufficientCandidates):
            permutation_threshold(varying_data, varying_basis, [0], PermutationConfig(q=2))

    def test_exchangeable_under_null(self, rng):
        w = rng.uniform(size=80)
        data = Dataset(y=rng.standard_normal(80), w=w, x=rng.standard_normal((80, 60)))
        basis = build_basis(w, num_basis=5)
        rounds = 200
        observed = screen_all(data, basis).scores
        null = permutation_threshold(
            data, basis, config=PermutationConfig(num_permutations=rounds, seed=11)
        ).null_scores.reshape(rounds, data.p)
        ranks = (null < observed).sum(axis=0)
        # Randomized ranks on {0..rounds} mapped into (0, 1).
        u = (ranks + rng.uniform(size=ranks.size)) / (rounds + 1)
        assert stats.kstest(u, "uniform").pvalue > 0.01


class TestConditionalThreshold:
    """Thresholds from permuted partial residuals."""

    def test_empty_conditioning_set_reduces(self, varying_data, varying_basis):
        config = PermutationConfig(seed=3)
        conditional = conditional_permutation_threshold(varying_data, varying_basis, [], config)
        plain = permutation_threshold(varying_data, varying_basis, config=config)
        assert conditional.tau == plain.tau
        a0 = fit_intercept_only(varying_data, varying_basis).a0_fitted
        np.testing.assert_allclose(conditional.partial_residuals, varying_data.y - a0)
        assert conditional.candidates.tolist() == list(range(varying_data.p))

    def test_conditioning_excludes_members(self, varying_data, varying_basis):
        result = conditional_permutation_threshold(varying_data, varying_basis, [0, 1])
        assert 0 not in result.candidates and 1 not in result.candidates
        assert result.null_scores.size == varying_data.p - 2

    def test_conditioning_shrinks_null(self, rng):
        n = 200
        w = rng.uniform(size=n)
        x = rng.standard_normal((n, 40))
        y = 3 * x[:, 0] + 3 * (1 + w) * x[:, 1] + rng.standard_normal(n)
        data = Dataset(y=y, w=w, x=x)
        basis = build_basis(w, num_basis=5)
        config = PermutationConfig(seed=1)
        unconditional = conditional_permutation_threshold(data, basis, [], config)
        conditional = conditional_permutation_threshold(data, basis, [0, 1], config)
        assert conditional.tau < 0.6 * unconditional.tau
        assert np.var(conditional.partial_residuals) < 2.0

    def test_identity_permutation_scores_partial_residual(self, varying_data, varying_basis):
        identity = [np.arange(varying_data.n)]
        result = conditional_permutation_threshold(varying_data, varying_basis, [0], permutations=identity)
        star = screen_all(varying_data.with_response(result.partial_residuals), varying_basis, candidates=result.candidates)
        np.testing.assert_array_equal(result.null_scores, star.scores)

    def test_q_larger_than_complement(self, varying_data, varying_basis):
        with pytest.raises(InsufficientCandidates):
            conditional_permutation_threshold(
                varying_data, varying_basis, range(varying_data.p - 1), PermutationConfig(q=2)
            )

    @pytest.mark.parametrize("members", [[-1], [0, 99]])
    def test_conditioning_index_out_of_range(self, varying_data, varying_basis, members):
        with pytest.raises(UnknownIndex):
            conditional_permutation_threshold(varying_data, varying_basis, members)
