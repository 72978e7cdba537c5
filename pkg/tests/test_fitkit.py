import math

import numpy as np
import pytest

from fibermem import fitkit
from fibermem.ensemble import AbsorptionModel, lorentzian_transmission

TRUTH = {
    "saturation": (8.0 / 1.3, 1.3e-9, 1.0),
    "lorentzian_od": (3.0, 2 * math.pi * 6.8e6),
    "decay_lifetime": (4.72e-6, 3.58e-6),
    "eit_spectrum": (3.0, 2 * math.pi * 6.8e6, 4.4e6, 3.3e7),
}

GRIDS = {
    "saturation": np.logspace(-11, -7.3, 100),
    "lorentzian_od": np.linspace(-2 * math.pi * 25e6, 2 * math.pi * 25e6, 100),
    "decay_lifetime": np.linspace(0.05e-6, 12e-6, 100),
    "eit_spectrum": np.linspace(-2 * math.pi * 30e6, 2 * math.pi * 30e6, 100),
}


def clean_problem(model_id):
    x = GRIDS[model_id]
    y = fitkit.evaluate_model(model_id, TRUTH[model_id], x)
    return fitkit.FitProblem(model_id=model_id, data=list(zip(x, y)))


class TestEvaluateModel:
    def test_lorentzian_center_is_beer_lambert(self):
        y = fitkit.evaluate_model("lorentzian_od", (3.0, 2 * math.pi * 6.8e6),
                                  np.array([0.0]))
        assert y[0] == pytest.approx(math.exp(-3.0), rel=1e-12)

    def test_decay_starts_at_unity(self):
        y = fitkit.evaluate_model("decay_lifetime", (4.72e-6, 3.58e-6),
                                  np.array([0.0]))
        assert y[0] == 1.0

    def test_eit_without_control_matches_lorentzian(self):
        delta = GRIDS["lorentzian_od"]
        # omega_c at its lower bound is effectively off
        y_eit = fitkit.evaluate_model(
            "eit_spectrum", (3.0, 2 * math.pi * 6.8e6, 1e2, 1e4), delta)
        model = AbsorptionModel(od=3.0)
        y_lor = lorentzian_transmission(delta, model)
        assert np.max(np.abs(y_eit - y_lor)) < 1e-6

    def test_unknown_model_rejected(self):
        with pytest.raises(ValueError):
            fitkit.evaluate_model("parabola", (1.0,), np.array([0.0]))

    def test_out_of_bounds_parameters_rejected(self):
        with pytest.raises(ValueError):
            fitkit.evaluate_model("lorentzian_od", (-1.0, 1e7), np.array([0.0]))
        with pytest.raises(ValueError):
            fitkit.evaluate_model("lorentzian_od", (1.0,), np.array([0.0]))


class TestProblemValidation:
    def test_too_few_points(self):
        x = GRIDS["lorentzian_od"][:2]
        y = np.ones(2)
        with pytest.raises(ValueError):
            fitkit.fit(fitkit.FitProblem("lorentzian_od", list(zip(x, y))))

    def test_guess_outside_bounds(self):
        prob = clean_problem("lorentzian_od")
        bad = fitkit.FitProblem("lorentzian_od", prob.data,
                                initial_guess=(2e3, 2 * math.pi * 6e6))
        with pytest.raises(ValueError):
            fitkit.fit(bad)

    def test_unknown_frozen_name(self):
        prob = clean_problem("lorentzian_od")
        bad = fitkit.FitProblem("lorentzian_od", prob.data,
                                frozen=frozenset({"bogus"}))
        with pytest.raises(ValueError):
            fitkit.fit(bad)

    def test_nonpositive_sigma_rejected(self):
        x = GRIDS["lorentzian_od"]
        y = np.ones_like(x)
        rows = [(xi, yi, 0.0) for xi, yi in zip(x, y)]
        with pytest.raises(ValueError):
            fitkit.fit(fitkit.FitProblem("lorentzian_od", rows))


class TestZeroNoiseRecovery:
    @pytest.mark.parametrize("model_id", sorted(TRUTH))
    def test_exact_fixed_point(self, model_id):
        res = fitkit.fit(clean_problem(model_id))
        assert res.converged
        truth = np.array(TRUTH[model_id])
        assert np.max(np.abs(res.parameters - truth) / truth) < 1e-6
        assert res.reduced_chi2 < 1e-20


class TestNoisyRecovery:
    @pytest.mark.parametrize("model_id", sorted(TRUTH))
    def test_three_sigma_round_trip(self, model_id):
        x = GRIDS[model_id]
        truth = TRUTH[model_id]
        y0 = fitkit.evaluate_model(model_id, truth, x)
        for seed in range(5):
            rng = np.random.default_rng(seed)
            sig = 0.01 * np.abs(y0)
            y = y0 + rng.normal(0.0, sig)
            res = fitkit.fit(fitkit.FitProblem(model_id, list(zip(x, y, sig))))
            assert res.converged
            for i, tv in enumerate(truth):
                err = math.sqrt(res.covariance[i, i])
                assert abs(res.parameters[i] - tv) < 3.0 * err


class TestFitContract:
    def test_deterministic(self):
        r1 = fitkit.fit(clean_problem("lorentzian_od"))
        r2 = fitkit.fit(clean_problem("lorentzian_od"))
        assert np.array_equal(r1.parameters, r2.parameters)
        assert r1.n_iterations == r2.n_iterations

    def test_reorder_invariance(self):
        prob = clean_problem("lorentzian_od")
        rows = list(prob.data)
        shuffled = rows[::2] + rows[1::2][::-1]
        r1 = fitkit.fit(prob)
        r2 = fitkit.fit(fitkit.FitProblem("lorentzian_od", shuffled))
        assert np.max(np.abs(r1.parameters - r2.parameters)
                      / r1.parameters) < 1e-9

    def test_sigma_scaling_leaves_parameters(self):
        x = GRIDS["lorentzian_od"]
        y0 = fitkit.evaluate_model("lorentzian_od", TRUTH["lorentzian_od"], x)
        rng = np.random.default_rng(3)
        y = y0 + rng.normal(0.0, 0.01 * np.abs(y0))
        rows1 = [(xi, yi, 0.01) for xi, yi in zip(x, y)]
        rows5 = [(xi, yi, 0.05) for xi, yi in zip(x, y)]
        r1 = fitkit.fit(fitkit.FitProblem("lorentzian_od", rows1))
        r5 = fitkit.fit(fitkit.FitProblem("lorentzian_od", rows5))
        assert np.max(np.abs(r1.parameters - r5.parameters)
                      / r1.parameters) < 1e-9

    def test_cost_history_nonincreasing(self):
        res = fitkit.fit(clean_problem("decay_lifetime"))
        hist = np.array(res.cost_history)
        assert np.all(np.diff(hist) <= 0.0)

    def test_covariance_symmetric_psd(self):
        x = GRIDS["lorentzian_od"]
        y0 = fitkit.evaluate_model("lorentzian_od", TRUTH["lorentzian_od"], x)
        rng = np.random.default_rng(11)
        sig = 0.01 * np.abs(y0)
        y = y0 + rng.normal(0.0, sig)
        res = fitkit.fit(fitkit.FitProblem("lorentzian_od", list(zip(x, y, sig))))
        cov = res.covariance
        assert np.allclose(cov, cov.T)
        assert np.min(np.linalg.eigvalsh(cov)) > -1e-12

    def test_frozen_parameter_stays_put(self):
        x = GRIDS["lorentzian_od"]
        y = fitkit.evaluate_model("lorentzian_od", TRUTH["lorentzian_od"], x)
        guess = (1.5, 2 * math.pi * 6.8e6)
        res = fitkit.fit(fitkit.FitProblem(
            "lorentzian_od", list(zip(x, y)), initial_guess=guess,
            frozen=frozenset({"gamma_rad_per_s"})))
        assert res.parameters[1] == guess[1]
        assert res.parameters[0] == pytest.approx(3.0, rel=1e-8)
        assert res.covariance[1, 1] == 0.0

    def test_max_iteration_cap_returns_unconverged(self, monkeypatch):
        monkeypatch.setattr(fitkit, "_MAX_ITER", 1)
        x = GRIDS["eit_spectrum"]
        y0 = fitkit.evaluate_model("eit_spectrum", TRUTH["eit_spectrum"], x)
        res = fitkit.fit(fitkit.FitProblem("eit_spectrum", list(zip(x, y0))))
        assert not res.converged
        assert res.n_iterations == 1

    def test_singular_jacobian_flags_unidentifiable(self):
        # sampled only at line center, where the width drops out exactly
        x = np.zeros(10)
        y = fitkit.evaluate_model(
            "lorentzian_od", TRUTH["lorentzian_od"], x)
        res = fitkit.fit(fitkit.FitProblem(
            "lorentzian_od", list(zip(x, y)),
            initial_guess=(2.0, 2 * math.pi * 6.8e6)))
        assert "gamma_rad_per_s" in res.unidentifiable

    def test_unweighted_flagged_unitless(self):
        res = fitkit.fit(clean_problem("lorentzian_od"))
        assert res.chi2_unitless
        x = GRIDS["lorentzian_od"]
        y = fitkit.evaluate_model("lorentzian_od", TRUTH["lorentzian_od"], x)
        rows = [(xi, yi, 0.01) for xi, yi in zip(x, y)]
        res_w = fitkit.fit(fitkit.FitProblem("lorentzian_od", rows))
        assert not res_w.chi2_unitless

    def test_format_result_mentions_every_parameter(self):
        res = fitkit.fit(clean_problem("saturation"))
        text = fitkit.format_result(res)
        for name in res.param_names:
            assert name in text
        assert "reduced_chi2" in text
