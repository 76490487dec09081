import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lrdlab.arfima_figarch import (
    ArfimaFigarchParams,
    FracDiffKernel,
    default_init,
    figarch_weights,
    fit,
    fracdiff_weights,
    hurst_from_d,
    loglik,
    loglik_gradient,
    simulate,
)


def params(**overrides) -> ArfimaFigarchParams:
    base = dict(mu=0.0, phi=0.0, theta=0.0, d_m=0.0, omega=1e-5,
                alpha=0.15, beta=0.45, d_v=0.4, nu=6.0)
    base.update(overrides)
    return ArfimaFigarchParams(**base)


class TestFracdiffWeights:
    def test_identity(self):
        np.testing.assert_array_equal(fracdiff_weights(0.0, 5).weights,
                                      [1, 0, 0, 0, 0, 0])

    def test_first_difference(self):
        np.testing.assert_allclose(fracdiff_weights(1.0, 4).weights,
                                   [1, -1, 0, 0, 0], atol=1e-15)

    def test_d_04_hand_recursion(self):
        np.testing.assert_allclose(fracdiff_weights(0.4, 3).weights,
                                   [1.0, -0.4, -0.12, -0.064], rtol=1e-14)

    @given(st.floats(min_value=0.01, max_value=0.99))
    @settings(max_examples=50, deadline=None)
    def test_negative_weights_and_partial_sums(self, d):
        w = fracdiff_weights(d, 400).weights
        assert np.all(w[1:] < 0.0)
        partial = np.cumsum(w)
        assert np.all(partial > 0.0)
        assert np.all(partial <= 1.0)
        assert np.all(np.diff(partial) < 0.0)  # decreasing in L

    def test_recursion_invariant(self):
        d = 0.27
        w = fracdiff_weights(d, 50).weights
        for k in range(1, 51):
            assert w[k] == pytest.approx(w[k - 1] * (k - 1 - d) / k, rel=1e-13)


class TestFigarchWeights:
    def test_garch_nesting_geometric(self):
        # d_v = 0 kills the fractional part; ratios collapse to beta
        lam = figarch_weights(alpha=0.0, beta=0.6, d_v=0.0, truncation=20)
        ratios = lam[1:] / lam[:-1]
        np.testing.assert_allclose(ratios, 0.6, rtol=1e-12)

    def test_constant_variance_nesting(self):
        lam = figarch_weights(alpha=0.0, beta=0.0, d_v=0.0, truncation=10)
        np.testing.assert_array_equal(lam, np.zeros(10))

    def test_weights_sum_below_one(self):
        lam = figarch_weights(0.15, 0.45, 0.4, 1000)
        assert lam.min() >= 0.0
        assert lam.sum() < 1.0


class TestParamsValidation:
    def test_valid(self):
        params().validate()

    @pytest.mark.parametrize("bad", [
        dict(phi=1.0), dict(theta=-1.2), dict(d_m=0.6), dict(omega=0.0),
        dict(beta=1.0), dict(d_v=1.0), dict(nu=2.0),
    ])
    def test_domain_violations(self, bad):
        with pytest.raises(ValueError):
            params(**bad).validate()

    def test_negative_lambda_rejected(self):
        with pytest.raises(ValueError, match="lambda"):
            params(alpha=0.05, beta=0.6, d_v=0.3).validate()


class TestSimulate:
    def test_deterministic(self):
        p = params()
        a = simulate(p, n=500, burn_in=1000, seed=11)
        b = simulate(p, n=500, burn_in=1000, seed=11)
        np.testing.assert_array_equal(a.values, b.values)

    def test_seed_changes_output(self):
        p = params()
        a = simulate(p, n=200, burn_in=1000, seed=1)
        b = simulate(p, n=200, burn_in=1000, seed=2)
        assert not np.array_equal(a.values, b.values)

    def test_white_noise_reduction(self):
        # all dynamics off, nu = 200 ~ gaussian: mean ~ mu, var ~ omega
        p = params(mu=5e-4, d_m=0.0, alpha=0.0, beta=0.0, d_v=0.0,
                   omega=4e-4, nu=200.0)
        r = simulate(p, n=100_000, burn_in=1000, seed=3)
        assert r.values.mean() == pytest.approx(5e-4, abs=4 * np.sqrt(4e-4 / 1e5))
        assert r.values.var() == pytest.approx(4e-4, rel=0.02)

    def test_burn_in_below_truncation_rejected(self):
        with pytest.raises(ValueError, match="burn_in"):
            simulate(params(), n=100, burn_in=10, seed=0, truncation=100)

    def test_invalid_params_rejected(self):
        with pytest.raises(ValueError):
            simulate(params(omega=-1.0), n=100, burn_in=1000, seed=0)

    def test_standardized_t_unit_variance(self):
        nu = 6.0
        z = np.random.default_rng(0).standard_t(nu, 1_000_000) * np.sqrt((nu - 2) / nu)
        assert z.var() == pytest.approx(1.0, rel=0.01)

    def test_length_and_frequency(self):
        r = simulate(params(), n=300, burn_in=1000, seed=5)
        assert len(r) == 300


def interior_points(n_points=10, seed=99):
    rng = np.random.default_rng(seed)
    pts = []
    while len(pts) < n_points:
        beta = rng.uniform(0.1, 0.6)
        d_v = rng.uniform(0.2, 0.6)
        alpha = rng.uniform(max(0.02, beta - d_v + 0.05), 0.7)
        cand = np.array([
            rng.uniform(-5e-4, 5e-4),         # mu
            rng.uniform(-0.3, 0.3),           # phi
            rng.uniform(-0.3, 0.3),           # theta
            rng.uniform(0.05, 0.3),           # d_m
            10 ** rng.uniform(-6, -4.5),      # omega
            alpha, beta, d_v,
            rng.uniform(4.0, 12.0),           # nu
        ])
        lam = figarch_weights(cand[5], cand[6], cand[7], 200)
        if lam.min() >= 0.0:
            pts.append(cand)
    return pts


class TestLikelihood:
    def test_gradient_matches_central_difference_oracle(self):
        y = simulate(params(d_m=0.1), n=500, burn_in=400, seed=21,
                     truncation=400).values
        sd = y.std()
        floors = np.array([sd, 1, 1, 1, sd * sd, 1, 1, 1, 1])
        for point in interior_points():
            g = loglik_gradient(y, point, truncation=200, step=1e-6)
            oracle = np.empty_like(g)
            for i in range(point.size):
                h = 1e-4 * max(abs(point[i]), floors[i])
                xp, xm = point.copy(), point.copy()
                xp[i] += h
                xm[i] -= h
                oracle[i] = (loglik(y, xp, 200) - loglik(y, xm, 200)) / (2 * h)
            # relative agreement, with tiny components judged against the
            # gradient's overall magnitude
            scale = np.maximum(np.abs(oracle), 1e-3 * np.max(np.abs(oracle)))
            assert np.all(np.abs(g - oracle) / scale < 1e-4)

    def test_rejects_negative_lambda_point(self):
        y = np.random.default_rng(0).standard_normal(300) * 0.01
        bad = params(alpha=0.05, beta=0.6, d_v=0.3).as_array()
        assert loglik(y, bad) == -np.inf


class TestFit:
    @pytest.fixture(scope="class")
    def fitted(self):
        # nonzero ARMA terms keep the phi/theta pair identified, so the
        # Hessian is regular and standard errors exist
        r = simulate(params(phi=0.25, theta=-0.15, d_m=0.08, d_v=0.4, omega=1e-6),
                     n=8000, burn_in=1000, seed=17)
        return fit(r)

    def test_round_trip_dv(self, fitted):
        assert abs(fitted.params.d_v - 0.4) < 0.08

    def test_converged_and_se_available(self, fitted):
        assert fitted.converged
        assert fitted.se is not None
        assert fitted.iterations <= 2000

    def test_cis_contain_estimates(self, fitted):
        assert fitted.ci_dm[0] <= fitted.params.d_m <= fitted.ci_dm[1]
        assert fitted.ci_dv[0] <= fitted.params.d_v <= fitted.ci_dv[1]

    def test_unidentified_arma_ridge_flags_se_unavailable(self):
        # a phi = theta = 0 generating process leaves the likelihood flat
        # along phi = -theta; when the Hessian degenerates the fit must
        # still converge, flag SEs unavailable, and keep boundary p-values
        r = simulate(params(d_m=0.0, d_v=0.4, omega=1e-6), n=8000,
                     burn_in=1000, seed=17)
        res = fit(r)
        assert res.converged
        if res.se is None:
            assert res.ci_dm is None
            assert res.p_dm == 0.5  # pinned at the boundary, SE-free

    def test_monotone_accepted_objective(self):
        r = simulate(params(d_m=0.1), n=1200, burn_in=600, seed=23,
                     truncation=600).values
        trace = []
        fit(r, truncation=300, callback=trace.append)
        diffs = np.diff(np.array(trace))
        assert np.all(diffs <= 1e-12)

    def test_too_short(self):
        with pytest.raises(ValueError, match="at least 200"):
            fit(np.random.default_rng(0).standard_normal(100))

    def test_spec_default_init_is_repaired(self):
        # the textbook start (alpha=0.1, beta=0.5, d_v=0.3) implies a
        # negative lambda_1; fit must survive it
        y = np.random.default_rng(1).standard_normal(250)
        start = default_init(y)
        lam = figarch_weights(start.alpha, start.beta, start.d_v, 100)
        assert lam.min() < 0.0  # documents the infeasibility
        result = fit(y, truncation=100, max_iterations=400)
        assert np.isfinite(result.log_likelihood)


class TestHurstFromD:
    @pytest.mark.parametrize("d,h", [(0.0, 0.5), (0.4, 0.9), (-0.1, 0.4)])
    def test_values(self, d, h):
        assert hurst_from_d(d) == pytest.approx(h)
