"""Tests for the B-spline basis and marginal design."""

import numpy as np
import pytest
from scipy.special import comb

from src.errors import DegenerateExposure, InvalidBasisSize, LengthMismatch, OutOfSupport
from src.spline import build_basis, eval_basis, marginal_design


def cox_de_boor(knots, degree, k, x):
    """Plain recursion; the right end of the support belongs to the last nonempty interval."""
    if degree == 0:
        left, right = knots[k], knots[k + 1]
        if left <= x < right:
            return 1.0
        last = np.flatnonzero(knots < knots[-1]).max()
        return 1.0 if x == knots[-1] and k == last else 0.0
    value = 0.0
    denom = knots[k + degree] - knots[k]
    if denom > 0:
        value += (x - knots[k]) / denom * cox_de_boor(knots, degree - 1, k, x)
    denom = knots[k + degree + 1] - knots[k + 1]
    if denom > 0:
        value += (knots[k + degree + 1] - x) / denom * cox_de_boor(knots, degree - 1, k + 1, x)
    return value


class TestBuildBasis:
    """Construction, knot placement and argument checks."""

    def test_default_cubic_setup(self, rng):
        w = rng.uniform(size=400)
        basis = build_basis(w, num_basis=7, degree=3)
        assert basis.num_basis == 7
        assert basis.knots.size == 7 + 3 + 1
        assert basis.interior_knots.size == 3
        lo, hi = basis.support
        assert np.all((basis.interior_knots > lo) & (basis.interior_knots < hi))

    def test_knots_read_only(self, rng):
        basis = build_basis(rng.uniform(size=50))
        with pytest.raises(ValueError):
            basis.knots[0] = 1.0

    def test_degenerate_exposure(self):
        with pytest.raises(DegenerateExposure):
            build_basis(np.full(30, 0.5))

    def test_basis_too_small(self, rng):
        with pytest.raises(InvalidBasisSize):
            build_basis(rng.uniform(size=50), num_basis=3, degree=3)

    def test_too_few_observations(self, rng):
        with pytest.raises(InvalidBasisSize):
            build_basis(rng.uniform(size=8), num_basis=7)

    def test_heavy_ties_fall_back_to_equal_spacing(self):
        w = np.concatenate([np.zeros(90), np.linspace(0.1, 1.0, 10)])
        basis = build_basis(w, num_basis=7)
        np.testing.assert_allclose(basis.interior_knots, [0.25, 0.5, 0.75])


class TestEvaluation:
    """Values of the basis functions."""

    def test_partition_of_unity(self, rng):
        basis = build_basis(rng.uniform(size=200), num_basis=9)
        lo, hi = basis.support
        values = basis.evaluate(rng.uniform(lo, hi, size=1000))
        assert np.max(np.abs(values.sum(axis=1) - 1.0)) < 1e-10
        assert np.all(values >= 0) and np.all(values <= 1)

    def test_local_support(self, rng):
        basis = build_basis(rng.uniform(size=200), num_basis=10, degree=3)
        values = basis.evaluate(np.linspace(*basis.support, 500))
        assert np.max((values > 0).sum(axis=1)) <= 4

    def test_matches_cox_de_boor(self, rng):
        basis = build_basis(rng.uniform(size=100), num_basis=7)
        points = np.concatenate([rng.uniform(*basis.support, size=25), list(basis.support)])
        values = basis.evaluate(points)
        oracle = np.array([[cox_de_boor(basis.knots, 3, k, x) for k in range(7)] for x in points])
        np.testing.assert_allclose(values, oracle, atol=1e-12)

    def test_bernstein_without_interior_knots(self, rng):
        w = np.concatenate([[0.0, 1.0], rng.uniform(size=20)])
        basis = build_basis(w, num_basis=4, degree=3)
        grid = np.linspace(0, 1, 21)
        bernstein = np.column_stack([comb(3, k) * grid**k * (1 - grid) ** (3 - k) for k in range(4)])
        np.testing.assert_allclose(basis.evaluate(grid), bernstein, atol=1e-12)

    def test_boundaries(self, rng):
        basis = build_basis(rng.uniform(size=60), num_basis=6)
        lo, hi = basis.support
        np.testing.assert_allclose(eval_basis(basis, lo), np.eye(6)[0], atol=1e-14)
        np.testing.assert_allclose(eval_basis(basis, hi), np.eye(6)[-1], atol=1e-14)

    def test_clamping_and_strict_mode(self, rng):
        basis = build_basis(rng.uniform(size=60))
        lo, hi = basis.support
        np.testing.assert_array_equal(eval_basis(basis, hi + 1.0), eval_basis(basis, hi))
        with pytest.raises(OutOfSupport):
            eval_basis(basis, lo - 0.5, clamp=False)

    def test_gram_diagonal_scaling(self, rng):
        w = rng.uniform(size=10_000)
        basis = build_basis(w, num_basis=7)
        b = basis.evaluate(w)
        diag = np.diag(b.T @ b / w.size)
        assert diag.max() / diag.min() < 10


class TestMarginalDesign:
    """The [B, X_j B] design of one covariate."""

    def test_blocks(self, rng):
        w = rng.uniform(size=5 + 40)
        basis = build_basis(w, num_basis=5)
        x = rng.standard_normal(w.size)
        design = marginal_design(basis, w, x)
        assert design.matrix.shape == (w.size, 10)
        for i in range(5):
            row = eval_basis(basis, w[i])
            np.testing.assert_allclose(design.matrix[i], np.concatenate([row, x[i] * row]))
        np.testing.assert_array_equal(design.intercept_design, design.matrix[:, :5])

    def test_zero_and_unit_covariate(self, rng):
        w = rng.uniform(size=30)
        basis = build_basis(w, num_basis=5)
        zero = marginal_design(basis, w, np.zeros(30)).matrix
        one = marginal_design(basis, w, np.ones(30)).matrix
        assert np.all(zero[:, 5:] == 0)
        np.testing.assert_array_equal(one[:, 5:], one[:, :5])

    def test_length_mismatch(self, rng):
        w = rng.uniform(size=30)
        basis = build_basis(w, num_basis=5)
        with pytest.raises(LengthMismatch):
            marginal_design(basis, w, np.zeros(29))
