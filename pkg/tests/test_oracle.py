import numpy as np
import pytest
from numpy.testing import assert_allclose
from pysgdct import (
    ModelSpec, QuadraticTruth, UsageError, fd_tangent_check, finite_n_objective_quadratic,
    mf_objective_quadratic, pseudo_targets, stationary_moments_quadratic
)
from pysgdct.dynamics import InitialLaw
from pysgdct.oracle import OracleReport, discrete_stationary_moments_quadratic

TRUTH = QuadraticTruth(1.2, 0.5)


class TestObjectives:

    def test_minimum_at_truth(self):
        assert mf_objective_quadratic((1.2, 0.5), TRUTH) == 0.0

    def test_value(self):
        assert_allclose(mf_objective_quadratic((3.4, 0.0), TRUTH), 0.425)

    def test_only_the_sum_is_identified(self):
        for theta in ((1.0, 0.7), (0.0, 1.7), (2.2, -0.5)):
            assert mf_objective_quadratic(theta, TRUTH) < 1e-15

    def test_finite_n_vanishes_for_large_n(self):
        assert finite_n_objective_quadratic((1.2, 0.5), TRUTH, 10 ** 6) < 1e-6

    def test_finite_n_floor(self):
        alpha_star, _, _ = pseudo_targets(TRUTH, 2)
        assert_allclose(finite_n_objective_quadratic((alpha_star, 0.0), TRUTH, 2), 0.25 / 23.2, rtol = 1e-12)
        assert_allclose(0.25 / 23.2, 0.010776, rtol = 1e-4)

    def test_without_interaction(self):
        truth = QuadraticTruth(1.3, 0.0)
        for N in (1, 2, 50):
            for theta in ((0.3, 0.2), (2.0, 0.1)):
                assert_allclose(
                    finite_n_objective_quadratic(theta, truth, N), mf_objective_quadratic(theta, truth), rtol = 1e-14
                )

    def test_minimised_at_pseudo_target(self):
        generator = np.random.default_rng(0)
        for _ in range(20):
            truth = QuadraticTruth(generator.uniform(0.2, 3.0), generator.uniform(0.0, 3.0))
            N = int(generator.integers(1, 200))
            alpha_star, _, _ = pseudo_targets(truth, N)
            grid = alpha_star + np.arange(-500, 501) * 1e-4
            values = [finite_n_objective_quadratic((alpha, 0.0), truth, N) for alpha in grid]
            assert abs(grid[int(np.argmin(values))] - alpha_star) <= 1e-4


class TestPseudoTargets:

    def test_examples(self):
        alpha_star, _, _ = pseudo_targets(TRUTH, 100)
        assert_allclose(alpha_star, 204 / 120.5, rtol = 1e-14)
        assert_allclose(alpha_star, 1.692946, rtol = 1e-6)
        _, _, theta2_star = pseudo_targets(TRUTH, 2)
        assert_allclose(theta2_star, 0.6 / 2.9, rtol = 1e-14)
        assert_allclose(theta2_star, 0.206897, rtol = 1e-5)

    def test_no_interaction_no_bias(self):
        truth = QuadraticTruth(0.8, 0.0)
        for N in (1, 3, 1000):
            alpha_star, theta1_star, theta2_star = pseudo_targets(truth, N)
            assert_allclose([alpha_star, theta1_star, theta2_star], [0.8, 0.8, 0.0], atol = 1e-15)

    def test_identities(self):
        generator = np.random.default_rng(1)
        for _ in range(1000):
            truth = QuadraticTruth(generator.uniform(0.1, 3.0), generator.uniform(0.1, 3.0))
            N = int(generator.integers(1, 10 ** 4))
            alpha_star, theta1_star, theta2_star = pseudo_targets(truth, N)
            scale = max(abs(alpha_star), truth.theta01, truth.theta02)
            assert_allclose(alpha_star - truth.theta02, theta1_star, rtol = 1e-14, atol = 1e-14 * scale)
            assert_allclose(alpha_star - truth.theta01, theta2_star, rtol = 1e-14, atol = 1e-14 * scale)

    def test_converge_to_truth(self):
        alpha_star, theta1_star, theta2_star = pseudo_targets(TRUTH, 10 ** 9)
        assert_allclose([alpha_star, theta1_star, theta2_star], [1.7, 1.2, 0.5], rtol = 1e-8)

    def test_invalid(self):
        with pytest.raises(UsageError):
            pseudo_targets(TRUTH, 0)
        with pytest.raises(UsageError):
            QuadraticTruth(0.0, 0.5)
        with pytest.raises(UsageError):
            QuadraticTruth(1.0, -1.5)


class TestStationaryMoments:

    def test_single_particle(self):
        variance, covariance = stationary_moments_quadratic(TRUTH, 1)
        assert_allclose([variance, covariance], [1 / 2.4, 1 / 2.4], rtol = 1e-14)

    def test_two_particles(self):
        variance, covariance = stationary_moments_quadratic(TRUTH, 2)
        assert_allclose(variance, 0.355392, rtol = 1e-5)
        assert_allclose(covariance, 0.208333, rtol = 1e-5)

    def test_mean_field_limit(self):
        variance, covariance = stationary_moments_quadratic(TRUTH, 10 ** 9)
        assert_allclose(variance, 1 / 3.4, rtol = 1e-8)
        assert covariance < 1e-9

    def test_noise_scaling(self):
        base = np.array(stationary_moments_quadratic(TRUTH, 7))
        scaled = np.array(stationary_moments_quadratic(QuadraticTruth(1.2, 0.5, sigma = 3.0), 7))
        assert_allclose(scaled, 9.0 * base, rtol = 1e-14)

    def test_euler_chain_approaches_continuous(self):
        assert_allclose(
            discrete_stationary_moments_quadratic(TRUTH, 10, 1e-6),
            stationary_moments_quadratic(TRUTH, 10),
            rtol = 1e-5
        )

    def test_euler_chain_inflates_variance(self):
        continuous = stationary_moments_quadratic(TRUTH, 10)
        discrete = discrete_stationary_moments_quadratic(TRUTH, 10, 0.1)
        assert discrete[0] > continuous[0] and discrete[1] > continuous[1]

    def test_unstable_chain(self):
        with pytest.raises(UsageError):
            discrete_stationary_moments_quadratic(TRUTH, 10, 2.0)


class TestFiniteDifferenceTangent:

    @pytest.mark.parametrize("name, theta", [("quadratic", (1.2, 0.5)), ("kuramoto", (1.5,))])
    def test_matches(self, name, theta):
        report = fd_tangent_check(ModelSpec.get(name), theta, M = 3, dt = 0.05, steps = 200, epsilon = 1e-5)
        assert report.passed(1e-3), report.lines()

    def test_fitzhugh_nagumo(self, fhn):
        report = fd_tangent_check(fhn, (0.9, 0.4, 0.1, 1.0), M = 3, dt = 0.05, steps = 200, seed = 3)
        assert report.passed(1e-3), report.lines()

    def test_kuramoto_uniform_start(self, kuramoto):
        law = InitialLaw(kind = "uniform", low = [-3.14], high = [3.14])
        report = fd_tangent_check(kuramoto, (0.8,), M = 5, dt = 0.05, steps = 100, initial_law = law)
        assert report.passed(1e-3), report.lines()

    def test_zero_horizon(self, quadratic):
        report = fd_tangent_check(quadratic, (1.2, 0.5), M = 3, dt = 0.05, steps = 0)
        assert report.abs_error == 0.0 and report.rel_error == 0.0

    @pytest.mark.parametrize("epsilon", [0.0, 1e-30])
    def test_degenerate_epsilon(self, quadratic, epsilon):
        with pytest.raises(UsageError):
            fd_tangent_check(quadratic, (1.2, 0.5), M = 3, dt = 0.05, steps = 10, epsilon = epsilon)


class TestOracleReport:

    def test_lines(self):
        report = OracleReport("x", 1.0, 1.5, 0.5, 0.25)
        assert report.lines().splitlines() == [
            "x.value=1.0", "x.reference=1.5", "x.abs_error=0.5", "x.rel_error=0.25"
        ]
        assert report.passed(0.25) and not report.passed(0.2)
