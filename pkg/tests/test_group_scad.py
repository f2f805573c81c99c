"""Tests for the SCAD penalty and the group-SCAD LQA solver."""

import numpy as np
import pytest

from src.screening import Dataset, fit_intercept_only, fit_joint_unpenalized
from src.selection import (
    ScadConfig,
    fit_group_scad,
    group_norm_B,
    lambda_max,
    scad_penalty,
    scad_penalty_derivative,
)
from src.spline import build_basis


class TestScadPenalty:
    """Penalty and derivative values."""

    def test_derivative_values(self):
        lam = 0.8
        assert scad_penalty_derivative(0.0, lam) == lam
        assert scad_penalty_derivative(3.7 * lam, lam) == 0.0
        assert scad_penalty_derivative(2 * lam, lam) == pytest.approx((3.7 - 2) / 2.7 * lam)
        assert scad_penalty_derivative(10 * lam, lam) == 0.0

    def test_derivative_continuous_at_lambda(self):
        lam = 1.3
        below = scad_penalty_derivative(lam * (1 - 1e-9), lam)
        above = scad_penalty_derivative(lam * (1 + 1e-9), lam)
        assert below == pytest.approx(above, abs=1e-8)

    def test_vectorized(self):
        values = scad_penalty_derivative(np.array([0.0, 1.0, 5.0]), 1.0)
        np.testing.assert_allclose(values, [1.0, 1.0, 0.0])

    def test_penalty_pieces(self):
        lam, a = 1.0, 3.7
        assert scad_penalty(0.5, lam, a) == pytest.approx(0.5)
        assert scad_penalty(10.0, lam, a) == pytest.approx((a + 1) * lam**2 / 2)
        for knot in (lam, a * lam):
            assert scad_penalty(knot * (1 - 1e-12), lam, a) == pytest.approx(scad_penalty(knot * (1 + 1e-12), lam, a))

    def test_penalty_slope_matches_derivative(self):
        lam, a, x, h = 1.0, 3.7, 2.0, 1e-6
        slope = (scad_penalty(x + h, lam, a) - scad_penalty(x - h, lam, a)) / (2 * h)
        assert slope == pytest.approx(scad_penalty_derivative(x, lam, a), rel=1e-6)


class TestGroupNorm:
    def test_zero_and_constant(self, varying_data, varying_basis):
        w = varying_data.w
        assert group_norm_B(np.zeros(5), varying_basis, w) == 0.0
        assert group_norm_B(np.full(5, -1.7), varying_basis, w) == pytest.approx(1.7)

    def test_matches_loop(self, rng):
        w = rng.uniform(size=50)
        basis = build_basis(w, num_basis=5)
        gamma = rng.standard_normal(5)
        total = sum((basis.evaluate([wi])[0] @ gamma) ** 2 for wi in w)
        assert group_norm_B(gamma, basis, w) == pytest.approx(np.sqrt(total / 50))


class TestScadConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            ScadConfig(a=2.0)
        with pytest.raises(ValueError):
            ScadConfig(lambda_grid=(0.1, 0.3, 0.2))
        with pytest.raises(ValueError):
            ScadConfig(lambda_grid=())

    def test_grid_sorted_descending(self):
        assert ScadConfig(lambda_grid=(0.1, 0.2, 0.4)).lambda_grid == (0.4, 0.2, 0.1)


class TestFitGroupScad:
    """Penalized joint fits and BIC tuning."""

    def test_zero_lambda_is_least_squares(self, varying_data, varying_basis):
        model = fit_group_scad(varying_data, varying_basis, range(6), ScadConfig(lambda_grid=(0.0,)))
        joint = fit_joint_unpenalized(varying_data, varying_basis, range(6))
        np.testing.assert_allclose(model.fitted, joint.fitted, atol=1e-6)
        assert model.active_set == tuple(range(6))

    def test_recovers_signal(self, varying_data, varying_basis):
        model = fit_group_scad(varying_data, varying_basis, range(6))
        assert model.active_set == (0, 1)
        assert set(model.gammas) == {0, 1}
        np.testing.assert_allclose(model.predict(varying_data), model.fitted, atol=1e-10)

    def test_large_lambda_on_noise_gives_intercept_only(self, rng):
        w = rng.uniform(size=150)
        data = Dataset(y=rng.standard_normal(150), w=w, x=rng.standard_normal((150, 10)))
        basis = build_basis(w, num_basis=5)
        model = fit_group_scad(data, basis, range(10), ScadConfig(lambda_grid=(100.0,)))
        assert model.active_set == ()
        np.testing.assert_allclose(model.fitted, fit_intercept_only(data, basis).a0_fitted, atol=1e-3)

    def test_objective_non_increasing(self, varying_data, varying_basis):
        model = fit_group_scad(varying_data, varying_basis, range(8))
        assert model.path
        for fit in model.path:
            trace = np.asarray(fit.objective_trace)
            steps = np.diff(trace)
            assert np.all(steps <= 1e-9 * np.abs(trace[:-1])), f"lambda={fit.lam}"

    def test_huge_group_matches_oracle(self, rng):
        n = 200
        w = rng.uniform(size=n)
        x = rng.standard_normal((n, 3))
        y = 50 * (1 + w) * x[:, 0] + rng.standard_normal(n)
        data = Dataset(y=y, w=w, x=x)
        basis = build_basis(w, num_basis=5)
        model = fit_group_scad(data, basis, [0], ScadConfig(lambda_grid=(0.5,)))
        oracle = fit_joint_unpenalized(data, basis, [0])
        np.testing.assert_allclose(model.gammas[0], oracle.gammas[0], atol=1e-4)

    def test_bic_formula(self, varying_data, varying_basis):
        model = fit_group_scad(varying_data, varying_basis, range(4))
        n, L = varying_data.n, varying_basis.num_basis
        expected = n * np.log(model.sigma2_hat) + len(model.active_set) * L * np.log(n)
        assert model.bic == pytest.approx(expected)

    def test_empty_candidates(self, varying_data, varying_basis):
        model = fit_group_scad(varying_data, varying_basis, [])
        assert model.active_set == ()
        assert model.gammas == {}

    def test_coefficient_functions(self, varying_data, varying_basis):
        model = fit_group_scad(varying_data, varying_basis, range(4))
        grid = np.linspace(0.05, 0.95, 10)
        np.testing.assert_allclose(model.coefficient_function(0, grid), 2 + np.sin(2 * np.pi * grid), atol=0.5)
        assert np.all(model.coefficient_function(3, grid) == 0)

    def test_workers_do_not_change_result(self, varying_data, varying_basis):
        one = fit_group_scad(varying_data, varying_basis, range(6), ScadConfig(workers=1))
        three = fit_group_scad(varying_data, varying_basis, range(6), ScadConfig(workers=3))
        assert one.lambda_star == three.lambda_star
        assert one.fitted.tobytes() == three.fitted.tobytes()

    def test_lambda_max(self, varying_data, varying_basis):
        assert lambda_max(varying_data, varying_basis, []) == 0.0
        assert lambda_max(varying_data, varying_basis, [0, 1]) > lambda_max(varying_data, varying_basis, [5, 6])

    def test_active_groups_exceed_drop_threshold(self, varying_data, varying_basis):
        members = list(range(8))
        config = ScadConfig()
        model = fit_group_scad(varying_data, varying_basis, members, config)
        initial = fit_joint_unpenalized(varying_data, varying_basis, members)
        w, L = varying_data.w, varying_basis.num_basis
        cutoff = {j: config.drop_threshold * group_norm_B(initial.gammas[j], varying_basis, w) for j in members}

        def kept(coef):
            return tuple(
                j for k, j in enumerate(members)
                if group_norm_B(coef[L * (k + 1) : L * (k + 2)], varying_basis, w) > cutoff[j]
            )

        fits = [fit for fit in model.path if not fit.failed]
        assert fits
        for fit in fits:
            assert fit.active == kept(fit.coef), f"lambda={fit.lam}"
        best = next(fit for fit in fits if fit.lam == model.lambda_star)
        assert model.active_set == kept(best.coef)
        assert any(len(fit.active) < len(members) for fit in fits)
