import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal
from pysgdct import (
    DivergenceError, EstimatorState, EstimatorVariant, InitialLaw, LearningRate, ModelSpec,
    NumericInputError, RobbinsMonroWarning, UsageError, averaged_increment, estimator_step, learning_rate,
    particlewise_increment, rao_blackwell_check
)
from pysgdct.enums import IndexPolicy, LearningRateKind, RateClock, StreamId
from pysgdct.dynamics import RngStream, TruthSchedule, euler_ips_step, simulate_observed
from pysgdct.model import mean_drift
from pysgdct.estimators import apply_free_mask, particlewise_increment_table

THETAS = {
    "quadratic": np.array([1.2, 0.5]),
    "kuramoto": np.array([1.5]),
    "fitzhugh-nagumo": np.array([0.9, 0.4, 0.1, 1.0])
}


def random_state(model, M, generator):
    """
    Arguments of the increment functions at a random point.
    """
    return dict(
        theta = THETAS[model.name] + 0.1 * generator.standard_normal(model.p),
        x_obs = model.wrap(generator.standard_normal(model.d)),
        dx_obs = 0.1 * generator.standard_normal(model.d),
        hat = model.wrap(generator.standard_normal((M, model.d))),
        hat_tangent = generator.standard_normal((M, model.p, model.d)),
        tilde = model.wrap(generator.standard_normal((M, model.d)))
    )


class TestLearningRate:

    def test_polynomial(self):
        schedule = LearningRate(c = 1.0, beta = 0.55)
        assert learning_rate(schedule, 0) == 1.0
        assert_allclose(learning_rate(schedule, 999), 1000 ** -0.55)
        assert_allclose(learning_rate(schedule, 999), 0.022387, rtol = 1e-4)

    def test_constant(self):
        schedule = LearningRate(kind = "constant", c = 0.02)
        for t in (0, 1, 10_000):
            assert learning_rate(schedule, t) == 0.02

    def test_negative_clock(self):
        with pytest.raises(UsageError):
            learning_rate(LearningRate(), -1.0)

    def test_non_increasing(self):
        schedule = LearningRate(c = 0.5, beta = 0.8)
        values = [learning_rate(schedule, t) for t in range(100)]
        assert all(a >= b for a, b in zip(values, values[1:]))

    @pytest.mark.parametrize("beta", [0.3, 0.5, 1.5])
    def test_exponent_outside_range_warns(self, beta):
        with pytest.warns(RobbinsMonroWarning):
            schedule = LearningRate(beta = beta)
        assert not schedule.robbins_monro

    def test_defaults(self):
        schedule = LearningRate()
        assert schedule.kind is LearningRateKind.POLYNOMIAL
        assert schedule.clock is RateClock.ITERATION
        assert schedule.robbins_monro


class TestAveragedIncrement:

    def test_zero_gamma(self, fhn, rng):
        args = random_state(fhn, 5, rng)
        assert_array_equal(averaged_increment(fhn, dt = 0.1, gamma = 0.0, **args), np.zeros(4))

    def test_zero_residual(self, quadratic):
        delta = averaged_increment(
            quadratic, (1.2, 0.5), [1.0], [-0.17], [[0.0]], np.zeros((1, 2, 1)), [[0.0]], 0.1, 1.0
        )
        assert_allclose(delta, [0.0, 0.0], atol = 1e-15)

    def test_linear_in_gamma(self, kuramoto, rng):
        args = random_state(kuramoto, 7, rng)
        one = averaged_increment(kuramoto, dt = 0.1, gamma = 1.0, **args)
        assert_allclose(averaged_increment(kuramoto, dt = 0.1, gamma = 0.25, **args), 0.25 * one, rtol = 1e-14)

    def test_descends_residual(self, quadratic):
        # Observed particle moved less than the drift predicts, so the pull must weaken.
        delta = averaged_increment(
            quadratic, (1.2, 0.5), [1.0], [0.0], [[0.0]], np.zeros((1, 2, 1)), [[0.0]], 0.1, 0.5
        )
        assert_allclose(delta, [-0.085, -0.085], rtol = 1e-12)

    @pytest.mark.parametrize("name", ["quadratic", "kuramoto", "fitzhugh-nagumo"])
    def test_linear_in_residual(self, name, rng):
        model = ModelSpec.get(name)
        args = random_state(model, 6, rng)
        drift = mean_drift(model, args["theta"], args["x_obs"], args["tilde"])
        first, second = 0.05 * rng.standard_normal(model.d), 0.05 * rng.standard_normal(model.d)

        def increment(residual):
            return averaged_increment(model, dt = 0.1, gamma = 0.8, **{**args, "dx_obs": drift * 0.1 - residual})

        assert_allclose(increment(first + second), increment(first) + increment(second), rtol = 1e-10, atol = 1e-13)

    def test_several_observations_are_averaged(self, quadratic, rng):
        args = random_state(quadratic, 4, rng)
        second_x, second_dx = np.array([0.7]), np.array([-0.05])
        first = averaged_increment(quadratic, dt = 0.1, gamma = 1.0, **args)
        other = averaged_increment(quadratic, dt = 0.1, gamma = 1.0, **{**args, "x_obs": second_x, "dx_obs": second_dx})
        both = averaged_increment(quadratic, dt = 0.1, gamma = 1.0, **{
            **args,
            "x_obs": np.stack([args["x_obs"], second_x]),
            "dx_obs": np.stack([args["dx_obs"], second_dx])
        })
        assert_allclose(both, (first + other) / 2, rtol = 1e-14)

    def test_shape_errors(self, quadratic):
        with pytest.raises(UsageError):
            averaged_increment(quadratic, (1.2, 0.5), [1.0], [0.0], [[0.0]], np.zeros((2, 2, 1)), [[0.0]], 0.1, 1.0)
        with pytest.raises(UsageError):
            averaged_increment(quadratic, (1.2, 0.5), [1.0, 2.0], [0.0], [[0.0]], np.zeros((1, 2, 1)), [[0.0]], 0.1, 1.0)


class TestParticlewiseIncrement:

    def test_zero_gamma(self, quadratic, rng):
        args = random_state(quadratic, 5, rng)
        assert_array_equal(particlewise_increment(quadratic, j = 2, k = 4, dt = 0.1, gamma = 0.0, **args), np.zeros(2))

    @pytest.mark.parametrize("name", ["quadratic", "kuramoto", "fitzhugh-nagumo"])
    def test_single_particle_equals_averaged(self, name, rng):
        model = ModelSpec.get(name)
        args = random_state(model, 1, rng)
        assert_allclose(
            particlewise_increment(model, j = 0, k = 0, dt = 0.1, gamma = 0.7, **args),
            averaged_increment(model, dt = 0.1, gamma = 0.7, **args),
            rtol = 1e-15
        )

    def test_table_entries(self, fhn, rng):
        args = random_state(fhn, 3, rng)
        table = particlewise_increment_table(fhn, dt = 0.1, gamma = 1.0, **args)
        assert table.shape == (3, 3, 4)
        for j in range(3):
            for k in range(3):
                assert_allclose(
                    table[j, k],
                    particlewise_increment(fhn, j = j, k = k, dt = 0.1, gamma = 1.0, **args),
                    rtol = 1e-12, atol = 1e-15
                )

    @pytest.mark.parametrize("indices", [(3, 0), (0, 3), (-1, 0)])
    def test_index_out_of_range(self, quadratic, rng, indices):
        args = random_state(quadratic, 3, rng)
        with pytest.raises(UsageError):
            particlewise_increment(quadratic, j = indices[0], k = indices[1], dt = 0.1, gamma = 1.0, **args)


class TestRaoBlackwell:

    @pytest.mark.parametrize("name", ["quadratic", "kuramoto", "fitzhugh-nagumo"])
    @pytest.mark.parametrize("M", [1, 2, 5, 20])
    def test_averaged_is_mean_of_particlewise(self, name, M):
        model = ModelSpec.get(name)
        generator = np.random.default_rng(M)
        for _ in range(25):
            args = random_state(model, M, generator)
            table = particlewise_increment_table(model, dt = 0.1, gamma = 1.0, **args)
            averaged = averaged_increment(model, dt = 0.1, gamma = 1.0, **args)
            scale = np.max(np.abs(averaged))
            assert np.max(np.abs(table.mean(axis = (0, 1)) - averaged)) <= 1e-12 * scale

    def test_check_report(self, kuramoto):
        state = EstimatorState.initial(kuramoto, (1.5,), 20, seed = 4)
        state.hat_tangent = np.random.default_rng(4).standard_normal(state.hat_tangent.shape)
        report = rao_blackwell_check(kuramoto, state, [0.4], [0.02], 0.1)
        assert report.passed(1e-12)

    def test_single_particle_is_exact(self, quadratic):
        state = EstimatorState.initial(quadratic, (1.2, 0.5), 1, seed = 0)
        report = rao_blackwell_check(quadratic, state, [0.4], [0.02], 0.1)
        assert report.abs_error == 0.0

    def test_zero_gamma(self, fhn):
        state = EstimatorState.initial(fhn, (0.9, 0.4, 0.1, 1.0), 5, seed = 0)
        report = rao_blackwell_check(fhn, state, [0.4, 0.1], [0.02, 0.0], 0.1, gamma = 0.0)
        assert report.abs_error == 0.0 and report.rel_error == 0.0


class TestApplyFreeMask:

    def test_examples(self):
        assert_array_equal(apply_free_mask([0.3, -0.2], [True, True]), [0.3, -0.2])
        assert_array_equal(apply_free_mask([0.3, -0.2], [False, False]), [0.0, 0.0])
        assert_array_equal(apply_free_mask([0.3, -0.2], [True, False]), [0.3, 0.0])

    def test_size(self):
        with pytest.raises(UsageError):
            apply_free_mask([0.3, -0.2], [True])


class TestEstimatorStep:

    def test_clock_advances(self, quadratic):
        state = EstimatorState.initial(quadratic, (2.0, 1.0), 4, seed = 0)
        after = estimator_step(state, [0.5], [-0.1], 0.1)
        assert after.step == 1
        assert_allclose(after.t, 0.1)
        assert state.step == 0
        assert not np.array_equal(after.theta, state.theta)

    def test_frozen_mask(self, quadratic):
        state = EstimatorState.initial(quadratic, (2.0, 1.0), 4, seed = 0, mask = [False, False])
        current = state
        for _ in range(20):
            current = estimator_step(current, [0.5], [-0.1], 0.1)
        assert_array_equal(current.theta, [2.0, 1.0])
        assert not np.array_equal(current.hat, state.hat)
        assert not np.array_equal(current.tilde, state.tilde)

    def test_partial_mask(self, fhn):
        state = EstimatorState.initial(fhn, (0.5, 0.5, 0.5, 1.0), 4, seed = 1, mask = [True, True, True, False])
        for _ in range(10):
            state = estimator_step(state, [0.5, 0.1], [0.05, 0.01], 0.1)
        assert state.theta[3] == 1.0

    def test_equilibrium_is_preserved(self):
        model = ModelSpec.get("quadratic", sigma = 0.0, weight = "identity")
        state = EstimatorState.initial(
            model, (1.2, 0.5), 5, seed = 0, initial_law = InitialLaw(kind = "explicit", value = [0.0])
        )
        for _ in range(10):
            state = estimator_step(state, [0.0], [0.0], 0.1)
        assert_array_equal(state.theta, [1.2, 0.5])

    def test_virtual_systems_use_pre_update_theta(self, quadratic):
        state = EstimatorState.initial(quadratic, (2.0, 1.0), 3, seed = 5)
        after = estimator_step(state, [0.5], [-0.1], 0.1)
        replay = EstimatorState.initial(quadratic, (2.0, 1.0), 3, seed = 5)
        assert_array_equal(after.hat, euler_ips_step(quadratic, (2.0, 1.0), replay.hat, 0.1, rng = replay.hat_rng))

    def test_variants_use_their_own_streams(self, quadratic):
        averaged = EstimatorState.initial(quadratic, (2.0, 1.0), 3, seed = 5)
        particlewise = EstimatorState.initial(quadratic, (2.0, 1.0), 3, seed = 5, variant = EstimatorVariant.PARTICLEWISE)
        assert not np.array_equal(averaged.hat, particlewise.hat)

    def test_resampled_indices(self, quadratic):
        def run():
            state = EstimatorState.initial(
                quadratic, (2.0, 1.0), 10, seed = 2,
                variant = EstimatorVariant.PARTICLEWISE, index_policy = IndexPolicy.RESAMPLE
            )
            seen = set()
            for _ in range(20):
                state = estimator_step(state, [0.5], [-0.1], 0.1)
                seen.add(state.indices)
            return state, seen

        first, seen = run()
        second, _ = run()
        assert len(seen) > 1
        assert_array_equal(first.theta, second.theta)

    def test_projection(self, quadratic):
        state = EstimatorState.initial(
            quadratic, (2.0, 1.0), 3, seed = 0,
            schedule = LearningRate(kind = "constant", c = 50.0),
            projection = (np.array([0.0, 0.0]), np.array([3.0, 3.0]))
        )
        for _ in range(5):
            state = estimator_step(state, [2.0], [1.0], 0.1)
            assert np.all((state.theta >= 0.0) & (state.theta <= 3.0))

    def test_divergence_keeps_last_state(self, quadratic):
        state = EstimatorState.initial(
            quadratic, (1.2, 0.5), 2, seed = 0,
            schedule = LearningRate(kind = "constant", c = 1e308),
            initial_law = InitialLaw(kind = "explicit", value = [0.0])
        )
        with pytest.raises(DivergenceError) as info:
            with np.errstate(over = "ignore", invalid = "ignore"):
                estimator_step(state, [1.0], [10.0], 0.1)
        assert info.value.last_state is state
        assert info.value.step == 0
        assert_array_equal(info.value.theta, [1.2, 0.5])

    def test_non_finite_ensemble_is_divergence(self, quadratic):
        # The estimate stays finite but both virtual ensembles overflow.
        state = EstimatorState.initial(
            quadratic, (1e300, 0.0), 2, seed = 0,
            initial_law = InitialLaw(kind = "explicit", value = [1e10])
        )
        with pytest.raises(DivergenceError) as info:
            with np.errstate(over = "ignore", invalid = "ignore"):
                estimator_step(state, [0.0], [0.0], 0.1)
        assert info.value.last_state is state
        assert np.all(np.isfinite(info.value.last_state.hat))
        assert np.all(np.isfinite(info.value.last_state.tilde))

    def test_non_finite_observation_is_input_error(self, quadratic):
        state = EstimatorState.initial(quadratic, (2.0, 1.0), 3, seed = 0)
        with pytest.raises(NumericInputError) as info:
            estimator_step(state, [np.nan], [0.0], 0.1)
        assert not isinstance(info.value, DivergenceError)
        with pytest.raises(NumericInputError):
            estimator_step(state, [0.5], [np.inf], 0.1)

    def test_invalid_arguments(self, quadratic):
        state = EstimatorState.initial(quadratic, (2.0, 1.0), 3, seed = 0)
        with pytest.raises(UsageError):
            estimator_step(state, [0.5], [-0.1], 0.0)
        with pytest.raises(UsageError):
            EstimatorState.initial(quadratic, (2.0, 1.0), 3, seed = 0, indices = (3, 0))
        with pytest.raises(UsageError):
            EstimatorState.initial(quadratic, (2.0, 1.0), 0, seed = 0)


class TestQuadraticUpdateByHand:
    """
    One step of both estimators on the quadratic model (N=100, M=20, dt=0.1, c=1) against
    the update written out with plain arrays.
    """

    def advanced_state(self, quadratic, variant):
        observed = simulate_observed(
            quadratic, TruthSchedule.constant([1.2, 0.5], 6), N = 100, steps = 6, dt = 0.1,
            rng = RngStream(7, StreamId.OBSERVED)
        )
        state = EstimatorState.initial(quadratic, (2.0, 1.2), 20, seed = 7, variant = variant, indices = (3, 11))
        for k in range(5):
            state = estimator_step(state, observed.positions[k], observed.increments[k], 0.1)
        return state, observed.positions[5, 0, 0], observed.increments[5, 0, 0]

    def test_averaged(self, quadratic):
        state, x, dx = self.advanced_state(quadratic, EstimatorVariant.AVERAGED)
        theta_1, theta_2 = state.theta
        hat, tilde, tangent = state.hat[:, 0], state.tilde[:, 0], state.hat_tangent[:, :, 0]
        gamma = 1.0 / 6.0 ** 0.55
        residual = dx - (-theta_1 * x - theta_2 * (x - tilde.mean())) * 0.1
        gradient = np.array([-x + theta_2 * tangent[:, 0].mean(), -(x - hat.mean()) + theta_2 * tangent[:, 1].mean()])
        updated = estimator_step(state, [x], [dx], 0.1)
        assert_allclose(updated.theta, state.theta + gamma * gradient * residual, rtol = 1e-12, atol = 1e-14)

    def test_particlewise(self, quadratic):
        state, x, dx = self.advanced_state(quadratic, EstimatorVariant.PARTICLEWISE)
        theta_1, theta_2 = state.theta
        hat, tilde, tangent = state.hat[:, 0], state.tilde[:, 0], state.hat_tangent[:, :, 0]
        gamma = 1.0 / 6.0 ** 0.55
        residual = dx - (-theta_1 * x - theta_2 * (x - tilde[11])) * 0.1
        gradient = np.array([-x + theta_2 * tangent[3, 0], -(x - hat[3]) + theta_2 * tangent[3, 1]])
        updated = estimator_step(state, [x], [dx], 0.1)
        assert_allclose(updated.theta, state.theta + gamma * gradient * residual, rtol = 1e-12, atol = 1e-14)
