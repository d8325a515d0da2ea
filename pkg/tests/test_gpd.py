"""Distribution functions and estimators against hand values and oracles.

Expected values are either hand evaluations of the closed forms or come
from independent oracles computed here (inverse-CDF Monte Carlo samples,
brute-force likelihood grids, central finite differences) — never from
the code under test.
"""

import math

import numpy as np
import pytest

from tailrisk.gpd import (
    DegenerateSampleError,
    GpdFit,
    GpdParams,
    fit_profile_mle,
    fit_zhang_lm,
    gpd_cdf,
    gpd_log_likelihood,
    gpd_quantile,
    gpd_score_sigma,
)


def inverse_cdf_sample(k, sigma, n, seed):
    """Independent GPD sampler: inverse-CDF transform of seeded uniforms."""
    u = np.random.default_rng(seed).uniform(size=n)
    if k == 0.0:
        return -sigma * np.log1p(-u)
    return (sigma / k) * (1.0 - (1.0 - u) ** k)


def profile_grid_argmax(x, lo, hi, n_points):
    """Brute-force argmax of the profile log-likelihood over a b-grid.

    Direct formula evaluation (log-likelihood at k(b), sigma(b) = k(b)/b),
    restricted to b with k(b) <= 1 since no MLE exists above that.
    """
    x = np.asarray(x, dtype=np.float64)
    n = x.size
    best_b, best_ll = None, -np.inf
    for chunk in np.array_split(np.linspace(lo, hi, n_points), 100):
        w = 1.0 - chunk[:, None] * x[None, :]
        ok = np.all(w > 0.0, axis=1) & (chunk != 0.0)
        s = np.sum(np.log(np.where(w > 0.0, w, 1.0)), axis=1)
        k = -s / n
        with np.errstate(divide="ignore", invalid="ignore"):
            sigma = k / chunk
            ll = -n * np.log(sigma) + (1.0 / k - 1.0) * s
        ll[~(ok & (sigma > 0.0) & (k <= 1.0))] = -np.inf
        i = int(np.argmax(ll))
        if ll[i] > best_ll:
            best_ll, best_b = float(ll[i]), float(chunk[i])
    return best_b, best_ll


class TestGpdParams:
    def test_b_ratio_consistent(self):
        params = GpdParams(k=0.3, sigma=7.0)
        assert params.b * params.sigma == pytest.approx(params.k, abs=2 * math.ulp(0.3))

    def test_rejects_bad_scale(self):
        with pytest.raises(ValueError):
            GpdParams(k=0.1, sigma=0.0)
        with pytest.raises(ValueError):
            GpdParams(k=0.1, sigma=-1.0)

    def test_support(self):
        assert GpdParams(k=0.5, sigma=1.0).upper_support == 2.0
        assert GpdParams(k=-0.5, sigma=1.0).upper_support == math.inf
        assert GpdParams(k=0.0, sigma=1.0).upper_support == math.inf


class TestCdf:
    def test_lower_endpoint(self):
        assert gpd_cdf(0.0, GpdParams(0.3, 2.0)) == 0.0

    def test_exponential_branch_hand_value(self):
        assert gpd_cdf(1.0, GpdParams(0.0, 1.0)) == pytest.approx(
            1.0 - math.exp(-1.0), abs=1e-10
        )

    def test_bounded_branch_hand_value(self):
        # 1 - (1 - 0.5)^(1/0.5) = 1 - 0.25
        assert gpd_cdf(1.0, GpdParams(0.5, 1.0)) == pytest.approx(0.75, abs=1e-10)

    def test_upper_endpoint(self):
        params = GpdParams(0.5, 1.0)
        assert gpd_cdf(params.upper_support, params) == 1.0

    def test_outside_support_raises(self):
        with pytest.raises(ValueError):
            gpd_cdf(2.0 + 1e-9, GpdParams(0.5, 1.0))
        with pytest.raises(ValueError):
            gpd_cdf(-0.1, GpdParams(0.0, 1.0))

    def test_branch_continuity(self):
        for sigma in (0.5, 1.0, 3.0):
            for x in np.linspace(0.0, 5 * sigma, 101):
                base = gpd_cdf(float(x), GpdParams(0.0, sigma))
                for k in (1e-9, -1e-9):
                    assert gpd_cdf(float(x), GpdParams(k, sigma)) == pytest.approx(
                        base, abs=1e-7
                    )


class TestQuantile:
    def test_zero_level(self):
        assert gpd_quantile(0.0, GpdParams(-0.3, 2.0)) == 0.0

    def test_hand_values(self):
        assert gpd_quantile(0.75, GpdParams(0.5, 1.0)) == pytest.approx(1.0, abs=1e-10)
        assert gpd_quantile(0.6321206, GpdParams(0.0, 1.0)) == pytest.approx(
            1.0, abs=1e-6
        )

    def test_rejects_unit_level(self):
        with pytest.raises(ValueError):
            gpd_quantile(1.0, GpdParams(0.0, 1.0))

    def test_round_trip_random_triples(self):
        rng = np.random.default_rng(1234)
        for _ in range(1000):
            k = rng.uniform(-1.0, 1.0)
            sigma = rng.uniform(1e-6, 10.0)
            q = rng.uniform(0.0, 0.999999)
            params = GpdParams(k, sigma)
            assert gpd_cdf(gpd_quantile(q, params), params) == pytest.approx(
                q, abs=1e-10
            )


class TestLogLikelihood:
    def test_exponential_hand_value(self):
        assert gpd_log_likelihood([1.0, 2.0], GpdParams(0.0, 1.0)) == pytest.approx(
            -3.0, abs=1e-10
        )

    def test_bounded_hand_value(self):
        assert gpd_log_likelihood([1.0], GpdParams(0.5, 1.0)) == pytest.approx(
            math.log(0.5), abs=1e-10
        )

    def test_support_violation_is_minus_inf(self):
        assert gpd_log_likelihood([3.0], GpdParams(0.5, 1.0)) == -math.inf
        assert gpd_log_likelihood([-0.5], GpdParams(0.0, 1.0)) == -math.inf

    def test_sigma_score_matches_finite_differences(self):
        rng = np.random.default_rng(77)
        checked = 0
        while checked < 100:
            k = rng.uniform(-1.0, 1.0)
            if abs(k) < 0.01:
                continue
            sigma = rng.uniform(0.5, 5.0)
            x = inverse_cdf_sample(k, sigma * 0.9, 50, seed=checked)
            params = GpdParams(k, sigma)
            if k > 0 and x.max() >= params.upper_support * 0.999:
                continue
            h = sigma * 1e-6
            fd = (
                gpd_log_likelihood(x, GpdParams(k, sigma + h))
                - gpd_log_likelihood(x, GpdParams(k, sigma - h))
            ) / (2 * h)
            assert gpd_score_sigma(x, params) == pytest.approx(fd, rel=1e-5)
            checked += 1


class TestProfileMle:
    def test_recovers_synthetic_truth(self):
        x = inverse_cdf_sample(0.3, 1.0, 5000, seed=42)
        fit = fit_profile_mle(x)
        assert fit.converged
        assert fit.params.k == pytest.approx(0.3, abs=0.05)
        assert fit.params.sigma == pytest.approx(1.0, rel=0.07)

    def test_matches_brute_force_grid(self):
        # constrained boundary case: the likelihood of {1,2,3} rises
        # monotonically to the k=1 cap, and the grid agrees there
        x = np.array([1.0, 2.0, 3.0])
        fit = fit_profile_mle(x)
        grid_b, _ = profile_grid_argmax(x, -10.0, (1.0 / 3.0) * (1 - 1e-9), 10**6)
        assert fit.params.b == pytest.approx(grid_b, abs=1e-4)

    def test_degenerate_sample(self):
        with pytest.raises(DegenerateSampleError):
            fit_profile_mle([2.0, 2.0, 2.0])

    def test_too_small(self):
        with pytest.raises(ValueError):
            fit_profile_mle([1.0, 2.0])

    def test_fit_metadata(self):
        x = inverse_cdf_sample(-0.2, 1.0, 400, seed=5)
        fit = fit_profile_mle(x, mu=0.25, n=2000)
        assert fit.mu == 0.25
        assert fit.n == 2000
        assert fit.n_u == 400
        assert fit.estimator == "profile_mle"

    def test_bounded_fit_contains_sample(self):
        x = inverse_cdf_sample(0.4, 2.0, 800, seed=8)
        fit = fit_profile_mle(x)
        assert fit.params.k > 0
        assert x.max() < fit.params.sigma / fit.params.k

    def test_scale_equivariance(self):
        x = inverse_cdf_sample(0.25, 1.0, 600, seed=21)
        base = fit_profile_mle(x)
        for c in (0.5, 3.0):
            scaled = fit_profile_mle(c * x)
            assert scaled.params.k == pytest.approx(base.params.k, abs=1e-8)
            assert scaled.params.sigma == pytest.approx(c * base.params.sigma, rel=1e-8)


class TestZhangLm:
    def test_theorem_sign_limits(self):
        # direct g evaluation at the bracket ends for X={1,2,3}, r=-0.5
        x = np.array([1.0, 2.0, 3.0])
        r = -0.5
        for b, expect_negative in ((-1e6, True), ((1.0 / 3.0) * (1 - 1e-9), False)):
            logs = np.log1p(-b * x)
            p = r * x.size / logs.sum()
            g = float(np.mean(np.exp(p * logs))) - 1.0 / (1.0 - r)
            assert (g < 0.0) == expect_negative

    def test_recovers_synthetic_truth(self):
        x = inverse_cdf_sample(0.3, 1.0, 5000, seed=42)
        fit = fit_zhang_lm(x, -0.5)
        assert fit.converged
        assert fit.params.k == pytest.approx(0.3, abs=0.05)
        assert fit.params.sigma == pytest.approx(1.0, rel=0.07)

    def test_degenerate_sample(self):
        with pytest.raises(DegenerateSampleError):
            fit_zhang_lm([4.0, 4.0, 4.0])

    def test_rejects_bad_r(self):
        x = [1.0, 2.0, 3.0]
        for r in (0.0, 0.5, 0.7):
            with pytest.raises(ValueError):
                fit_zhang_lm(x, r)

    def test_positive_r_allowed(self):
        x = inverse_cdf_sample(-0.2, 1.0, 500, seed=3)
        fit = fit_zhang_lm(x, 0.25)
        assert fit.converged
        assert fit.params.k == pytest.approx(-0.2, abs=0.1)

    def test_scale_equivariance(self):
        x = inverse_cdf_sample(-0.3, 1.0, 600, seed=9)
        base = fit_zhang_lm(x)
        for c in (0.5, 3.0):
            scaled = fit_zhang_lm(c * x)
            assert scaled.params.k == pytest.approx(base.params.k, abs=1e-8)
            assert scaled.params.sigma == pytest.approx(c * base.params.sigma, rel=1e-8)


def test_estimators_agree_on_large_samples():
    for seed, k in ((100, -0.3), (101, 0.0), (102, 0.3)):
        x = inverse_cdf_sample(k, 1.0, 2000, seed=seed)
        kp = fit_profile_mle(x).params.k
        kz = fit_zhang_lm(x).params.k
        assert abs(kp - kz) <= 0.05


def test_gpd_fit_validates_counts():
    params = GpdParams(0.1, 1.0)
    with pytest.raises(ValueError):
        GpdFit(params, mu=0.0, n=10, n_u=0, estimator="profile_mle",
               converged=True, iterations=1)
    with pytest.raises(ValueError):
        GpdFit(params, mu=0.0, n=10, n_u=11, estimator="profile_mle",
               converged=True, iterations=1)
