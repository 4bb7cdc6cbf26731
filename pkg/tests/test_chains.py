"""Kernels and local-error machinery: hand arithmetic, exact OU laws,
coupled Monte Carlo against the exact Gaussian path."""

import math

import numpy as np
import pytest

from klbounds import gauss
from klbounds.chains import (
    PotentialSpec,
    SamplerConfig,
    auxiliary_process_sim,
    dump_samples_csv,
    estimate_local_errors,
    exact_diffusion_kernel,
    exact_kernel_1d,
    gaussian_drift_kernel,
    lmc_kernel_1d,
    lmc_step,
    propagate_law,
    rmlmc_increments,
    rmlmc_step,
    simulate_chain,
    toy_kernel_pair,
)
from klbounds.shifts import optimal_shifts_L1

UNIT = PotentialSpec.quadratic_potential(1.0)


class TestSteps:
    def test_lmc_drift_only(self):
        assert lmc_step(UNIT, 1.0, 0.1, 0.0)[0] == pytest.approx(0.9)

    def test_lmc_with_noise(self):
        got = lmc_step(UNIT, 1.0, 0.1, 1.0)[0]
        assert got == pytest.approx(0.9 + math.sqrt(0.2), rel=1e-15)

    def test_lmc_zero_gradient_random_walk(self):
        flat = PotentialSpec(1, lambda x: np.zeros_like(np.atleast_1d(x)), 0.0, 0.0)
        assert lmc_step(flat, 2.0, 0.3, 1.5)[0] == pytest.approx(
            2.0 + math.sqrt(0.6) * 1.5
        )

    def test_lmc_nonfinite_gradient(self):
        bad = PotentialSpec(1, lambda x: np.full(1, np.nan), 0.0, 1.0)
        with pytest.raises(ValueError, match="gradient"):
            lmc_step(bad, 1.0, 0.1, 0.0)

    def test_rmlmc_reduces_to_lmc_drift_at_u0(self):
        assert rmlmc_step(UNIT, 1.0, 0.1, 0.0, 0.0, 0.0)[0] == pytest.approx(0.9)

    def test_rmlmc_midpoint_arithmetic(self):
        # x+ = 1 - 0.05 = 0.95, out = 1 - 0.1*0.95
        assert rmlmc_step(UNIT, 1.0, 0.1, 0.5, 0.0, 0.0)[0] == pytest.approx(0.905)

    def test_rmlmc_full_lookahead(self):
        got = rmlmc_step(UNIT, 1.0, 0.1, 1.0, 0.0, 0.0)[0]
        assert got == pytest.approx(1.0 - 0.1 * 0.9)

    def test_rmlmc_input_validation(self):
        with pytest.raises(ValueError):
            rmlmc_step(UNIT, 1.0, 0.1, 1.5, 0.0, 0.0)
        with pytest.raises(ValueError, match="increments"):
            rmlmc_step(UNIT, np.zeros(2), 0.1, 0.5, np.zeros(3), np.zeros(2))

    def test_rmlmc_increment_covariance(self):
        rng = np.random.default_rng(0)
        u, h, n = 0.3, 0.5, 400_000
        b_uh, b_h = rmlmc_increments(u, h, rng.standard_normal(n), rng.standard_normal(n))
        cov = np.cov(b_uh, b_h)
        np.testing.assert_allclose(
            cov, [[u * h, u * h], [u * h, h]], atol=4.0 * h / math.sqrt(n)
        )


class TestExactLaws:
    def test_ou_kernel_spot(self):
        g = exact_diffusion_kernel(UNIT, 1.0, 0.1)
        assert g.mean[0] == pytest.approx(math.exp(-0.1), rel=1e-15)
        assert g.cov[0, 0] == pytest.approx(1.0 - math.exp(-0.2), rel=1e-15)

    def test_ou_kernel_limits(self):
        short = exact_diffusion_kernel(UNIT, 1.0, 1e-9)
        assert short.mean[0] == pytest.approx(1.0, abs=1e-8)
        assert short.cov[0, 0] == pytest.approx(0.0, abs=1e-8)
        long = exact_diffusion_kernel(UNIT, 1.0, 60.0)
        assert long.mean[0] == pytest.approx(0.0, abs=1e-12)
        assert long.cov[0, 0] == pytest.approx(1.0, rel=1e-12)

    def test_ou_requires_positive_definite(self):
        degenerate = PotentialSpec.quadratic_potential(np.array([[0.0]]))
        with pytest.raises(ValueError, match="positive-definite"):
            exact_diffusion_kernel(degenerate, 1.0, 0.1)

    def test_propagate_identity_at_zero_steps(self):
        init = gauss.Gaussian(2.0, 0.5)
        out = propagate_law(UNIT, init, "LMC", 0.1, 0)
        assert out is init

    def test_propagate_one_lmc_step_from_dirac(self):
        out = propagate_law(UNIT, gauss.Gaussian(0.0, 0.0), "LMC", 0.1, 1)
        assert out.cov[0, 0] == pytest.approx(0.2)

    def test_lmc_variance_fixed_point(self):
        # S = (1-h)^2 S + 2h  =>  S = 2h / (1 - (1-h)^2)
        out = propagate_law(UNIT, gauss.Gaussian(0.0, 0.0), "LMC", 0.1, 4000)
        assert out.cov[0, 0] == pytest.approx(0.2 / 0.19, rel=1e-12)

    def test_exact_diffusion_composition(self):
        one = propagate_law(UNIT, gauss.Gaussian(1.0, 0.3), "ExactDiffusion", 0.25, 1)
        kern = exact_diffusion_kernel(UNIT, 1.0, 0.25)
        assert one.mean[0] == pytest.approx(kern.mean[0])
        many = propagate_law(UNIT, gauss.Gaussian(1.0, 0.0), "ExactDiffusion", 0.25, 8)
        direct = exact_diffusion_kernel(UNIT, 1.0, 2.0)
        np.testing.assert_allclose(many.mean, direct.mean, rtol=1e-12)
        np.testing.assert_allclose(many.cov, direct.cov, rtol=1e-12)

    def test_contraction_rates(self):
        h, x, y = 0.07, 3.0, -1.0
        for n in (1, 5, 20):
            a = propagate_law(UNIT, gauss.Gaussian(x, 0.0), "LMC", h, n)
            b = propagate_law(UNIT, gauss.Gaussian(y, 0.0), "LMC", h, n)
            assert gauss.w2_gaussian(a, b) == pytest.approx(
                abs(1 - h) ** n * abs(x - y), rel=1e-10
            )
            a = propagate_law(UNIT, gauss.Gaussian(x, 0.0), "ExactDiffusion", h, n)
            b = propagate_law(UNIT, gauss.Gaussian(y, 0.0), "ExactDiffusion", h, n)
            assert gauss.w2_gaussian(a, b) == pytest.approx(
                math.exp(-n * h) * abs(x - y), rel=1e-10
            )


class TestLocalErrors:
    def test_lmc_weak_exact(self):
        for h in (0.2, 0.1, 0.05):
            for x in (0.5, 1.0, 4.0):
                est = estimate_local_errors(UNIT, "LMC", x, h)
                assert est.exact
                assert est.weak == pytest.approx(
                    abs(math.exp(-h) - (1 - h)) * abs(x), rel=1e-12
                )

    def test_weak_never_exceeds_strong(self):
        for scheme in ("LMC", "RMLMC"):
            for x in (0.0, 1.0, 8.0):
                est = estimate_local_errors(UNIT, scheme, x, 0.1)
                assert est.weak <= est.strong + 1e-15

    def test_zero_gradient_errors_vanish(self):
        flat = PotentialSpec(
            1, lambda x: np.zeros_like(np.atleast_1d(np.asarray(x, float))), 0.0, 0.0
        )
        est = estimate_local_errors(flat, "LMC", 1.0, 0.1, samples=4000)
        assert est.weak == pytest.approx(0.0, abs=1e-12)
        assert est.strong == pytest.approx(0.0, abs=1e-12)
        assert est.underpowered  # indistinguishable from zero, flagged

    def test_mc_agrees_with_exact_quadratic(self):
        # same potential presented as a black box; inner-grid bias ~ 1e-4
        black_box = PotentialSpec(1, lambda x: np.asarray(x, dtype=float), 1.0, 1.0)
        for scheme in ("LMC", "RMLMC"):
            want = estimate_local_errors(UNIT, scheme, 1.0, 0.1)
            got = estimate_local_errors(
                black_box, scheme, 1.0, 0.1, samples=400_000, seed=5, inner_steps=256
            )
            assert not got.exact
            assert got.strong == pytest.approx(
                want.strong, abs=4 * got.strong_stderr + 3e-4
            )
            assert got.weak == pytest.approx(want.weak, abs=4 * got.weak_stderr + 3e-4)

    def test_mc_weak_le_strong_nonquadratic(self):
        quartic = PotentialSpec(
            1,
            lambda x: np.asarray(x, float) ** 3 + np.asarray(x, float),
            1.0, 4.0,
        )
        for scheme in ("LMC", "RMLMC"):
            est = estimate_local_errors(quartic, scheme, 0.7, 0.05, samples=100_000, seed=3)
            assert est.weak <= est.strong + 3 * (est.weak_stderr + est.strong_stderr)

    def test_rmlmc_conditional_mean_is_affine(self):
        # E[X_hat | u] = x - h P (I - u h P)(x - m): affine in x
        h, u = 0.1, 0.37
        xs = np.array([-2.0, 0.0, 1.0, 3.0])
        outs = np.array([rmlmc_step(UNIT, x, h, u, 0.0, 0.0)[0] for x in xs])
        slope = 1.0 - h * (1.0 - u * h)
        np.testing.assert_allclose(outs, slope * xs, rtol=1e-12, atol=1e-12)

    def test_inner_grid_floor(self):
        black_box = PotentialSpec(1, lambda x: np.asarray(x, float), 1.0, 1.0)
        with pytest.raises(ValueError, match="inner_steps"):
            estimate_local_errors(black_box, "LMC", 1.0, 0.1, inner_steps=16)


class TestSimulateChain:
    def test_zero_steps_returns_initialization(self):
        cfg = SamplerConfig("LMC", 0.1, 0, seed=1, samples=64)
        res = simulate_chain(UNIT, cfg, np.array([2.0]))
        assert res.iterates.shape == (64, 1, 1)
        assert np.all(res.iterates == 2.0)

    def test_seed_determinism(self):
        cfg = SamplerConfig("RMLMC", 0.1, 20, seed=11, samples=500)
        a = simulate_chain(UNIT, cfg, np.array([0.0]))
        b = simulate_chain(UNIT, cfg, np.array([0.0]))
        assert np.array_equal(a.iterates, b.iterates)
        c = simulate_chain(UNIT, SamplerConfig("RMLMC", 0.1, 20, seed=12, samples=500),
                           np.array([0.0]))
        assert not np.array_equal(a.iterates, c.iterates)

    def test_moments_match_exact_law(self):
        cfg = SamplerConfig("LMC", 0.1, 40, seed=2, samples=120_000)
        res = simulate_chain(UNIT, cfg, np.array([1.0]))
        law = propagate_law(UNIT, gauss.Gaussian(1.0, 0.0), "LMC", 0.1, 40)
        var = law.cov[0, 0]
        mean_se = math.sqrt(var / cfg.samples)
        var_se = var * math.sqrt(2.0 / (cfg.samples - 1))
        assert res.empirical_mean()[0] == pytest.approx(law.mean[0], abs=4 * mean_se)
        assert res.empirical_cov()[0, 0] == pytest.approx(var, abs=4 * var_se)

    def test_gaussian_initialization(self):
        cfg = SamplerConfig("ExactDiffusion", 0.5, 3, seed=4, samples=50_000)
        res = simulate_chain(UNIT, cfg, gauss.Gaussian(0.0, 1.0))
        # stationary start stays stationary
        assert res.empirical_cov()[0, 0] == pytest.approx(1.0, abs=0.03)

    def test_divergence_reports_step(self):
        cfg = SamplerConfig("LMC", 11.0, 400, seed=0, samples=4)
        with pytest.raises(ValueError, match="step"):
            simulate_chain(UNIT, cfg, np.array([1.0]))

    def test_csv_dump(self, tmp_path):
        cfg = SamplerConfig("LMC", 0.1, 2, seed=0, samples=3)
        res = simulate_chain(UNIT, cfg, np.array([0.0]))
        path = tmp_path / "samples.csv"
        dump_samples_csv(path, res)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "replica,step,coord_0"
        assert len(lines) == 1 + 3 * 3
        replica, step, coord = lines[1].split(",")
        assert (replica, step) == ("0", "0")
        assert float(coord) == 0.0


class TestAuxiliaryProcess:
    def test_all_one_schedule_identical_kernels(self):
        hat = gaussian_drift_kernel(0.0, 1.0)
        trace = auxiliary_process_sim(hat, hat, np.ones(5), 0.0, 0.0,
                                      replicas=40_000, seed=0)
        # true distances are 0; the empirical-W2 quantile-noise floor at
        # group size m leaves O(sqrt(V/m)) residue, a few % of the cloud sd
        assert trace.distances[0] == 0.0
        for k in range(1, 6):
            assert trace.distances[k] <= 0.08 * math.sqrt(k)

    def test_distance_recursion_upper_bound(self):
        # generic toy kernels: empirical d_{n+1} <= (1-eta) d_n + a within noise
        w, sigma = 0.1, 1.0
        hat, ref = toy_kernel_pair(w, sigma)
        a = math.sqrt(w**2 + (math.sqrt(1 + sigma**2) - 1) ** 2)
        schedule, _ = optimal_shifts_L1(8, a, 2.0)
        trace = auxiliary_process_sim(hat, ref, schedule, 0.0, -2.0,
                                      replicas=60_000, seed=1)
        for k in range(7):  # last step switches kernels; recursion covers the rest
            bound = (1 - schedule.eta[k]) * trace.distances[k] + a
            assert trace.distances[k + 1] <= bound + 3 * trace.stderrs[k + 1] + 1e-3

    def test_pure_bias_kernel_matches_analytic_trace(self):
        # sigma = 0: the one-step Wasserstein bias is exactly w and the
        # recursion d_{k+1} = (1 - eta_k) d_k + w holds with equality
        w, d0, n = 0.25, 2.0, 8
        hat, ref = toy_kernel_pair(w, 0.0)
        schedule, analytic = optimal_shifts_L1(n, w, d0)
        trace = auxiliary_process_sim(hat, ref, schedule, 0.0, -d0,
                                      replicas=100_000, seed=2)
        for k in range(n):
            tol = 3 * trace.stderrs[k] + 2e-3  # cushion: estimator finite-cloud bias
            assert abs(trace.distances[k] - analytic[k]) <= tol

    def test_dimension_guard(self):
        hat = gaussian_drift_kernel(0.0, 1.0)
        with pytest.raises(ValueError, match="dimension"):
            auxiliary_process_sim(hat, hat, np.ones(3), np.zeros(2), 0.0)


class TestPotentialSpec:
    def test_quadratic_tag_consistency_checked(self):
        with pytest.raises(ValueError, match="quadratic"):
            PotentialSpec(
                1, lambda x: 2.0 * np.atleast_1d(x), 1.0, 1.0,
                quadratic=__import__("klbounds.chains", fromlist=["QuadraticTag"]).QuadraticTag(
                    np.eye(1), np.zeros(1)
                ),
            )

    def test_alpha_beta_ordering(self):
        with pytest.raises(ValueError):
            PotentialSpec(1, lambda x: x, 2.0, 1.0)

    def test_factory_sets_curvature_bounds(self):
        pot = PotentialSpec.quadratic_potential(np.diag([0.5, 2.0]))
        assert pot.alpha == pytest.approx(0.5)
        assert pot.beta == pytest.approx(2.0)

    def test_kernel_views(self):
        rng = np.random.default_rng(0)
        x = np.linspace(-1, 1, 11)
        lk = lmc_kernel_1d(UNIT, 0.1)(x, rng)
        ek = exact_kernel_1d(UNIT, 0.1)(x, rng)
        assert lk.shape == ek.shape == x.shape
