# MIT License
# 
# Copyright (c) 2026 pysgdct contributors
# 
# Permission is hereby granted, free of charge, to any person obtaining a copy
# of this software and associated documentation files (the "Software"), to deal
# in the Software without restriction, including without limitation the rights
# to use, copy, modify, merge, publish, distribute, sublicense, and/or sell
# copies of the Software, and to permit persons to whom the Software is
# furnished to do so, subject to the following conditions:
#
# The above copyright notice and this permission notice shall be included in all
# copies or substantial portions of the Software.
#
# THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
# IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY,
# FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL THE
# AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER
# LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE, ARISING FROM,
# OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER DEALINGS IN THE
# SOFTWARE.

__all__ = [
    "LearningRate",
    "EstimatorState",
    "learning_rate",
    "averaged_increment",
    "particlewise_increment",
    "particlewise_increment_table",
    "apply_free_mask",
    "estimator_step"
]

from dataclasses import dataclass, replace
from typing import Any, Optional, Sequence, Tuple
import logging
import warnings
import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from pysgdct.dynamics import InitialLaw, RngStream, euler_ips_step, euler_tangent_step
from pysgdct.enums import EstimatorVariant, IndexPolicy, LearningRateKind, RateClock, StreamId
from pysgdct.errors import DivergenceError, NumericInputError, RobbinsMonroWarning, UsageError
from pysgdct.model import Ensemble, ModelSpec, ParamVec, TangentEnsemble, as_ensemble, as_param_vec

logger = logging.getLogger(__name__)


class LearningRate(BaseModel):
    """
    Learning rate schedule `γ`.

    * `polynomial`: `γ(t) = c / (1 + t)^β`;
    * `constant`: `γ(t) = c`.

    The convergence theory wants a positive non-increasing `γ` with divergent integral and
    convergent squared integral, which for the polynomial kind means `0.5 < β <= 1`.
    Other exponents are accepted but emit a [`RobbinsMonroWarning`][pysgdct.errors.RobbinsMonroWarning].

    Attributes:
        clock:
            Whether `t` counts iterations or elapsed time `step·dt`.
    """
    model_config = ConfigDict(extra = "forbid", frozen = True)

    kind : LearningRateKind = LearningRateKind.POLYNOMIAL
    c : float = Field(default = 1.0, gt = 0)
    beta : float = 0.55
    clock : RateClock = RateClock.ITERATION

    @model_validator(mode = "after")
    def _flag_exponent(self) -> "LearningRate":
        if self.kind is LearningRateKind.POLYNOMIAL and not self.robbins_monro:
            warnings.warn(
                f"learning rate exponent beta={self.beta} is outside (0.5, 1]",
                RobbinsMonroWarning,
                stacklevel = 2
            )
        return self

    @property
    def robbins_monro(self) -> bool:
        """
        `True` if the schedule satisfies the divergent / square-integrable pair of conditions.
        """
        return self.kind is LearningRateKind.POLYNOMIAL and 0.5 < self.beta <= 1.0

    def scaled(self, factor : float) -> "LearningRate":
        return self.model_copy(update = {"c": self.c * factor})


def learning_rate(schedule : LearningRate, t : float) -> float:
    """
    Evaluates the learning rate at clock value `t`.

    Raises:
        UsageError: if `t < 0`.
    """
    if t < 0:
        raise UsageError(f"learning rate clock must be non-negative, got {t!r}")
    if schedule.kind is LearningRateKind.CONSTANT:
        return schedule.c
    return schedule.c / (1.0 + t) ** schedule.beta


def _observations(model : ModelSpec, x_obs : Any, dx_obs : Any) -> Tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x_obs, dtype = float)
    dx = np.asarray(dx_obs, dtype = float)
    if model.d == 1 and x.ndim == 0:
        x, dx = x.reshape(1), dx.reshape(1)
    if x.ndim == 1:
        x, dx = x[None, :], dx.reshape(1, -1)
    if x.ndim != 2 or x.shape[1] != model.d or dx.shape != x.shape:
        raise UsageError(f"observations must have shape (d,) or (n_obs, d) with d={model.d}, got {x.shape} and {dx.shape}")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(dx))):
        raise NumericInputError("observations must be finite")
    return x, dx


def _virtual(model : ModelSpec, hat : Any, hat_tangent : Any, tilde : Any) -> Tuple[Ensemble, TangentEnsemble, Ensemble]:
    hat = as_ensemble(hat, model.d, "hat ensemble")
    tilde = as_ensemble(tilde, model.d, "tilde ensemble")
    hat_tangent = np.asarray(hat_tangent, dtype = float)
    if hat_tangent.shape != (hat.shape[0], model.p, model.d):
        raise UsageError(f"hat tangent must have shape {(hat.shape[0], model.p, model.d)}, got {hat_tangent.shape}")
    return hat, hat_tangent, tilde


def _gradient_terms(model : ModelSpec, theta : ParamVec, x : np.ndarray, hat : Ensemble, hat_tangent : TangentEnsemble) -> np.ndarray:
    """
    Per virtual particle gradient `g_j = ∂θ b(x, x̂_j) + ŷ_j ∇y b(x, x̂_j)`, shape `(M, p, d)`.
    """
    x = x[None, :]
    return model.drift_dtheta(theta, x, hat) + np.einsum("jpa,jac->jpc", hat_tangent, model.drift_dy(theta, x, hat))


def _finite_or_raise(delta : np.ndarray, theta : ParamVec) -> np.ndarray:
    if not np.all(np.isfinite(delta)):
        raise DivergenceError(None, None, theta, delta)
    return delta


def averaged_increment(
    model : ModelSpec,
    theta : Any,
    x_obs : Any,
    dx_obs : Any,
    hat : Any,
    hat_tangent : Any,
    tilde : Any,
    dt : float,
    gamma : float
) -> ParamVec:
    """
    Parameter increment of the averaged virtual-particle estimator,

        Δθ = -γ G W (B dt - Δx),

    where `G` averages the gradient terms over the hat ensemble and `B` averages the drift over
    the tilde ensemble. With several observed trajectories the increments are averaged.
    This is a pure function, none of the ensembles are advanced.

    Raises:
        DivergenceError: if the increment is not finite.
    """
    theta = as_param_vec(theta, model.p)
    xs, dxs = _observations(model, x_obs, dx_obs)
    hat, hat_tangent, tilde = _virtual(model, hat, hat_tangent, tilde)
    if gamma < 0:
        raise UsageError(f"gamma must be non-negative, got {gamma!r}")
    deltas = []
    for x, dx in zip(xs, dxs):
        gradient = _gradient_terms(model, theta, x, hat, hat_tangent).mean(axis = 0)
        drift = model.drift(theta, x[None, :], tilde).mean(axis = 0)
        deltas.append(-gamma * (gradient @ (model.weight @ (drift * dt - dx))))
    delta = deltas[0] if len(deltas) == 1 else np.mean(deltas, axis = 0)
    return _finite_or_raise(delta, theta)


def particlewise_increment(
    model : ModelSpec,
    theta : Any,
    x_obs : Any,
    dx_obs : Any,
    hat : Any,
    hat_tangent : Any,
    tilde : Any,
    j : int,
    k : int,
    dt : float,
    gamma : float
) -> ParamVec:
    """
    Parameter increment of the particlewise virtual-particle estimator,

        Δθ = -γ g_j W (b(θ, x, x̃_k) dt - Δx),

    using hat particle `j` for the gradient and tilde particle `k` for the drift.
    Indices are zero-based.

    Raises:
        UsageError: if `j` or `k` is out of range.
        DivergenceError: if the increment is not finite.
    """
    theta = as_param_vec(theta, model.p)
    xs, dxs = _observations(model, x_obs, dx_obs)
    hat, hat_tangent, tilde = _virtual(model, hat, hat_tangent, tilde)
    m = hat.shape[0]
    if not (0 <= j < m and 0 <= k < tilde.shape[0]):
        raise UsageError(f"particle indices must be within [0, {m}), got j={j}, k={k}")
    if gamma < 0:
        raise UsageError(f"gamma must be non-negative, got {gamma!r}")
    deltas = []
    for x, dx in zip(xs, dxs):
        gradient = _gradient_terms(model, theta, x, hat[j:j + 1], hat_tangent[j:j + 1])[0]
        drift = model.drift(theta, x, tilde[k])
        deltas.append(-gamma * (gradient @ (model.weight @ (drift * dt - dx))))
    delta = deltas[0] if len(deltas) == 1 else np.mean(deltas, axis = 0)
    return _finite_or_raise(delta, theta)


def particlewise_increment_table(
    model : ModelSpec,
    theta : Any,
    x_obs : Any,
    dx_obs : Any,
    hat : Any,
    hat_tangent : Any,
    tilde : Any,
    dt : float,
    gamma : float
) -> np.ndarray:
    """
    Every particlewise increment at once, shape `(M, M, p)` indexed by `(j, k)`.
    Its mean over both indices is the averaged increment.
    """
    theta = as_param_vec(theta, model.p)
    xs, dxs = _observations(model, x_obs, dx_obs)
    hat, hat_tangent, tilde = _virtual(model, hat, hat_tangent, tilde)
    tables = []
    for x, dx in zip(xs, dxs):
        gradients = _gradient_terms(model, theta, x, hat, hat_tangent)
        residuals = (model.drift(theta, x[None, :], tilde) * dt - dx) @ model.weight.T
        tables.append(-gamma * np.einsum("jpc,kc->jkp", gradients, residuals))
    return tables[0] if len(tables) == 1 else np.mean(tables, axis = 0)


def apply_free_mask(delta : Any, mask : Sequence[bool]) -> ParamVec:
    """
    Zeroes the coordinates of `delta` whose mask entry is `False`.
    """
    delta = np.asarray(delta, dtype = float)
    mask = np.asarray(mask, dtype = bool)
    if mask.shape != delta.shape:
        raise UsageError(f"mask must have {delta.shape[0]} entries, got {mask.shape}")
    return np.where(mask, delta, 0.0)


@dataclass
class EstimatorState:
    """
    Full state of one online estimator: the estimate, the two virtual ensembles, the
    tangent of the hat ensemble, the clock and the random number streams.

    Attributes:
        model:
            The drift model.
        schedule:
            The learning rate schedule.
        theta:
            Current estimate `θ_t`.
        hat:
            Hat virtual ensemble `(M, d)`, used for gradients.
        hat_tangent:
            Tangent `∂θ x̂`, shape `(M, p, d)`.
        tilde:
            Tilde virtual ensemble `(M, d)`, used for the drift residual.
        variant:
            Which update rule drives `theta`.
        mask:
            `True` for estimated coordinates, `False` for coordinates frozen at their value.
        indices:
            Zero-based `(j, k)` of the particlewise update.
        index_policy:
            Keep `indices` fixed or resample them every step.
        projection:
            Optional `(low, high)` box the free coordinates are clipped to after each update.
    """
    model : ModelSpec
    schedule : LearningRate
    theta : ParamVec
    hat : Ensemble
    hat_tangent : TangentEnsemble
    tilde : Ensemble
    hat_rng : RngStream
    tilde_rng : RngStream
    index_rng : RngStream
    variant : EstimatorVariant = EstimatorVariant.AVERAGED
    mask : np.ndarray = None
    indices : Tuple[int, int] = (0, 0)
    index_policy : IndexPolicy = IndexPolicy.FIXED
    projection : Optional[Tuple[np.ndarray, np.ndarray]] = None
    t : float = 0.0
    step : int = 0

    def __post_init__(self) -> None:
        self.theta = as_param_vec(self.theta, self.model.p)
        if self.mask is None:
            self.mask = np.ones(self.model.p, dtype = bool)
        self.mask = np.asarray(self.mask, dtype = bool)
        if self.mask.shape != (self.model.p,):
            raise UsageError(f"mask must have {self.model.p} entries, got {self.mask.shape}")
        m = self.hat.shape[0]
        j, k = self.indices
        if not (0 <= j < m and 0 <= k < m):
            raise UsageError(f"particle indices must be within [0, {m}), got {self.indices}")

    @property
    def M(self) -> int:
        return self.hat.shape[0]

    @classmethod
    def initial(
        cls,
        model : ModelSpec,
        theta : Any,
        M : int,
        seed : int,
        schedule : Optional[LearningRate] = None,
        variant : EstimatorVariant = EstimatorVariant.AVERAGED,
        initial_law : Optional[InitialLaw] = None,
        **kwargs
    ) -> "EstimatorState":
        """
        Creates a fresh estimator. The virtual ensembles are drawn from `initial_law` on the
        variant's own streams and the tangent starts at zero, the exact sensitivity of a
        parameter-free initial condition.
        """
        if M < 1:
            raise UsageError(f"M must be at least 1, got {M}")
        hat_id, tilde_id, index_id = StreamId.for_variant(variant)
        hat_rng, tilde_rng = RngStream(seed, hat_id), RngStream(seed, tilde_id)
        law = initial_law or InitialLaw()
        return cls(
            model = model,
            schedule = schedule or LearningRate(),
            theta = theta,
            hat = law.sample(hat_rng, M, model),
            hat_tangent = np.zeros((M, model.p, model.d)),
            tilde = law.sample(tilde_rng, M, model),
            hat_rng = hat_rng,
            tilde_rng = tilde_rng,
            index_rng = RngStream(seed, index_id),
            variant = variant,
            **kwargs
        )


def estimator_step(state : EstimatorState, x_obs : Any, dx_obs : Any, dt : float) -> EstimatorState:
    """
    Advances an estimator by one observation increment:

    1. evaluate `γ` on the state's clock;
    2. compute the variant's increment from the current estimate and virtual state;
    3. zero the frozen coordinates and apply the increment (and the optional box projection);
    4. advance both virtual ensembles and the tangent with the pre-update estimate;
    5. move the clock by `dt`.

    Raises:
        UsageError: if `dt <= 0`.
        NumericInputError: if the observations are not finite.
        DivergenceError: if the estimate or the virtual state becomes non-finite. The error
            carries the last good state.
    """
    if not dt > 0:
        raise UsageError(f"time step must be positive, got {dt!r}")
    model = state.model
    x_obs, dx_obs = _observations(model, x_obs, dx_obs)
    clock = state.step if state.schedule.clock is RateClock.ITERATION else state.t
    gamma = learning_rate(state.schedule, clock)
    indices = state.indices
    if state.variant is EstimatorVariant.PARTICLEWISE and state.index_policy is IndexPolicy.RESAMPLE:
        indices = (state.index_rng.index(state.M), state.index_rng.index(state.M))
    try:
        if state.variant is EstimatorVariant.AVERAGED:
            delta = averaged_increment(
                model, state.theta, x_obs, dx_obs, state.hat, state.hat_tangent, state.tilde, dt, gamma
            )
        else:
            delta = particlewise_increment(
                model, state.theta, x_obs, dx_obs, state.hat, state.hat_tangent, state.tilde,
                indices[0], indices[1], dt, gamma
            )
        delta = apply_free_mask(delta, state.mask)
        theta = np.where(state.mask, state.theta + delta, state.theta)
        if state.projection is not None:
            theta = np.where(state.mask, np.clip(theta, *state.projection), theta)
        hat = euler_ips_step(model, state.theta, state.hat, dt, rng = state.hat_rng)
        tilde = euler_ips_step(model, state.theta, state.tilde, dt, rng = state.tilde_rng)
        hat_tangent = euler_tangent_step(model, state.theta, state.hat, state.hat_tangent, dt)
    except (DivergenceError, NumericInputError) as exc:
        delta = getattr(exc, "delta", np.full(model.p, np.nan))
        raise DivergenceError(state.step, state.t, state.theta, delta, last_state = state) from exc
    if not all(np.all(np.isfinite(x)) for x in (theta, hat, tilde, hat_tangent)):
        raise DivergenceError(state.step, state.t, state.theta, theta - state.theta, last_state = state)
    return replace(
        state,
        theta = theta,
        hat = hat,
        hat_tangent = hat_tangent,
        tilde = tilde,
        indices = indices,
        t = state.t + dt,
        step = state.step + 1
    )
