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
    "RngStream",
    "InitialLaw",
    "TruthPiece",
    "TruthSchedule",
    "ObservedPath",
    "pair_mean_drift",
    "euler_ips_increment",
    "euler_ips_step",
    "euler_tangent_step",
    "simulate_observed"
]

from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple
import logging
import math
import warnings
import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from typing_extensions import Literal
from pysgdct.errors import StabilityWarning, UsageError
from pysgdct.model import Ensemble, ModelSpec, ParamVec, TangentEnsemble, as_ensemble, as_param_vec

logger = logging.getLogger(__name__)


class RngStream:
    """
    A reproducible stream of random numbers identified by `(seed, stream_id)`.

    Streams are built from `numpy.random.SeedSequence(seed, spawn_key=(stream_id,))`, so two
    streams with different pairs are statistically independent and the same pair always
    reproduces the same sequence. Gaussian draws are returned particle-major, coordinate-minor.

    Attributes:
        seed:
            The 64-bit experiment seed.
        stream_id:
            Identifier of the stream within the seed, see [`StreamId`][pysgdct.enums.StreamId].
        generator:
            The underlying `numpy.random.Generator`.
    """

    def __init__(self, seed : int, stream_id : int) -> None:
        if seed < 0 or stream_id < 0:
            raise UsageError("seed and stream id must be non-negative integers")
        self.seed : int = int(seed)
        self.stream_id : int = int(stream_id)
        sequence = np.random.SeedSequence(self.seed, spawn_key = (self.stream_id,))
        self.generator : np.random.Generator = np.random.Generator(np.random.PCG64(sequence))

    def __repr__(self) -> str:
        return f"<RngStream seed={self.seed} stream={self.stream_id}>"

    @property
    def state(self) -> Dict[str, Any]:
        """
        The counter state of the bit generator.
        """
        return self.generator.bit_generator.state

    def normal(self, shape : Tuple[int, ...]) -> np.ndarray:
        return self.generator.standard_normal(shape)

    def uniform(self, low : Any, high : Any) -> np.ndarray:
        return self.generator.uniform(low, high)

    def index(self, size : int) -> int:
        return int(self.generator.integers(0, size))


class InitialLaw(BaseModel):
    """
    Law of the initial particle positions, with one entry per state coordinate.

    * `gaussian`: independent normals with the given `mean` and `sd`;
    * `uniform`: independent uniforms on `[low, high)`;
    * `explicit`: every particle starts at `value`.
    """
    model_config = ConfigDict(extra = "forbid", frozen = True)

    kind : Literal["gaussian", "uniform", "explicit"] = "gaussian"
    mean : Optional[List[float]] = None
    sd : Optional[List[float]] = None
    low : Optional[List[float]] = None
    high : Optional[List[float]] = None
    value : Optional[List[float]] = None

    @model_validator(mode = "after")
    def _check(self) -> "InitialLaw":
        if self.kind == "uniform":
            if self.low is None or self.high is None or len(self.low) != len(self.high):
                raise ValueError("uniform initial law needs 'low' and 'high' of equal length")
            if any(lo >= hi for lo, hi in zip(self.low, self.high)):
                raise ValueError("uniform bounds must satisfy low < high")
        elif self.kind == "explicit" and self.value is None:
            raise ValueError("explicit initial law needs 'value'")
        elif self.kind == "gaussian" and self.sd is not None and any(s < 0 for s in self.sd):
            raise ValueError("standard deviations must be non-negative")
        return self

    def sample(self, rng : RngStream, count : int, model : ModelSpec) -> Ensemble:
        """
        Draws `count` i.i.d. initial positions, wrapped onto the model's geometry.
        """
        d = model.d
        if self.kind == "explicit":
            value = self._coordinates(self.value, d, "value")
            return model.wrap(np.tile(value, (count, 1)))
        if self.kind == "uniform":
            low = self._coordinates(self.low, d, "low")
            high = self._coordinates(self.high, d, "high")
            return model.wrap(low + (high - low) * rng.generator.random((count, d)))
        mean = self._coordinates(self.mean, d, "mean", default = 0.0)
        sd = self._coordinates(self.sd, d, "sd", default = 1.0)
        return model.wrap(mean + sd * rng.normal((count, d)))

    @staticmethod
    def _coordinates(values : Optional[List[float]], d : int, label : str, default : float = 0.0) -> np.ndarray:
        if values is None:
            return np.full(d, default)
        if len(values) == 1:
            return np.full(d, float(values[0]))
        if len(values) != d:
            raise UsageError(f"initial law '{label}' needs 1 or {d} entries, got {len(values)}")
        return np.asarray(values, dtype = float)


class TruthPiece(BaseModel):
    """
    The true parameter used for every step index below `until_step`.
    """
    model_config = ConfigDict(extra = "forbid", frozen = True)

    until_step : int = Field(ge = 1)
    theta : List[float]


class TruthSchedule:
    """
    Piecewise-constant true parameter, indexed by step. Step `k` uses the first piece
    whose `until_step` is greater than `k`.
    """

    def __init__(self, pieces : Sequence[Tuple[int, Any]]) -> None:
        if not pieces:
            raise UsageError("truth schedule must contain at least one piece")
        self.pieces : List[Tuple[int, np.ndarray]] = []
        previous = 0
        for until, theta in pieces:
            if until <= previous:
                raise UsageError(f"truth schedule steps must be strictly increasing, got {until} after {previous}")
            self.pieces.append((int(until), np.atleast_1d(np.asarray(theta, dtype = float))))
            previous = until
        if len({theta.shape for _, theta in self.pieces}) != 1:
            raise UsageError("all truth schedule pieces must have the same length")

    @classmethod
    def constant(cls, theta : Any, steps : int) -> "TruthSchedule":
        return cls([(steps, theta)])

    @classmethod
    def from_pieces(cls, pieces : Sequence[TruthPiece]) -> "TruthSchedule":
        return cls([(x.until_step, x.theta) for x in pieces])

    @property
    def end(self) -> int:
        return self.pieces[-1][0]

    @property
    def p(self) -> int:
        return self.pieces[0][1].shape[0]

    def covers(self, steps : int) -> bool:
        return self.end >= steps

    def theta_at(self, step : int) -> np.ndarray:
        for until, theta in self.pieces:
            if step < until:
                return theta
        raise UsageError(f"truth schedule ends at step {self.end}, step {step} is not covered")

    def final(self) -> np.ndarray:
        return self.pieces[-1][1]

    def __repr__(self) -> str:
        return f"<TruthSchedule {[(u, t.tolist()) for u, t in self.pieces]}>"


@dataclass
class ObservedPath:
    """
    Output of [`simulate_observed`][pysgdct.dynamics.simulate_observed].

    Attributes:
        positions:
            Positions of the observed particles at steps `0..steps`, shape `(steps + 1, n_obs, d)`.
            Torus coordinates are wrapped.
        increments:
            Per-step increments, shape `(steps, n_obs, d)`. Torus coordinates are left unwrapped.
        dt:
            The time step.
    """
    positions : np.ndarray
    increments : np.ndarray
    dt : float

    @property
    def steps(self) -> int:
        return self.increments.shape[0]

    @property
    def path(self) -> np.ndarray:
        """
        Path of the first observed particle, shape `(steps + 1, d)`.
        """
        return self.positions[:, 0, :]


def pair_mean_drift(model : ModelSpec, theta : ParamVec, ensemble : Ensemble) -> np.ndarray:
    """
    Drift of every particle against the ensemble's own empirical measure, shape `(count, d)`.
    """
    return model.drift(theta, ensemble[:, None, :], ensemble[None, :, :]).mean(axis = 1)


def _check_time_step(dt : float) -> float:
    if not dt > 0:
        raise UsageError(f"time step must be positive, got {dt!r}")
    return float(dt)


def _check_stability(model : ModelSpec, theta : ParamVec, dt : float) -> None:
    rate = model.stability_rate(theta)
    if rate is not None and rate * dt >= 2.0:
        warnings.warn(
            f"explicit Euler step is not mean-square stable for model '{model.name}': rate*dt = {rate * dt:.3g} >= 2",
            StabilityWarning,
            stacklevel = 3
        )


def euler_ips_increment(
    model : ModelSpec,
    theta : Any,
    ensemble : Any,
    dt : float,
    rng : Optional[RngStream] = None,
    noise : Optional[np.ndarray] = None
) -> np.ndarray:
    """
    Euler-Maruyama increment `B(θ, x_i, μ)·dt + σ ξ_i √dt` of every particle, before any wrapping.

    Args:
        model:
            The drift model.
        theta:
            Parameter at which the drift is evaluated.
        ensemble:
            Pre-step positions, shape `(count, d)`.
        dt:
            Time step.
        rng:
            Stream that provides the standard Gaussian draws `ξ`.
        noise:
            Explicit standard Gaussian draws of shape `(count, d)`; takes precedence over `rng`.
    """
    dt = _check_time_step(dt)
    theta = as_param_vec(theta, model.p)
    ensemble = as_ensemble(ensemble, model.d)
    _check_stability(model, theta, dt)
    if noise is None:
        if rng is None:
            raise UsageError("either an rng stream or explicit noise is required")
        noise = rng.normal(ensemble.shape)
    elif np.shape(noise) != ensemble.shape:
        raise UsageError(f"noise must have shape {ensemble.shape}, got {np.shape(noise)}")
    return pair_mean_drift(model, theta, ensemble) * dt + (noise @ model.sigma.T) * math.sqrt(dt)


def euler_ips_step(
    model : ModelSpec,
    theta : Any,
    ensemble : Any,
    dt : float,
    rng : Optional[RngStream] = None,
    noise : Optional[np.ndarray] = None
) -> Ensemble:
    """
    Advances an interacting particle system by one synchronous Euler-Maruyama step.
    Every particle sees the pre-step ensemble. Torus coordinates are wrapped afterwards.

    Raises:
        UsageError: if `dt <= 0`.
    """
    ensemble = as_ensemble(ensemble, model.d)
    return model.wrap(ensemble + euler_ips_increment(model, theta, ensemble, dt, rng = rng, noise = noise))


def euler_tangent_step(
    model : ModelSpec,
    theta : Any,
    hat_ensemble : Any,
    tangent : Any,
    dt : float
) -> TangentEnsemble:
    """
    Advances the tangent system `ŷ = ∂θ x̂` of a virtual ensemble by one explicit Euler step,

        ŷ'_i = ŷ_i + mean_j [∂θ b(x̂_i, x̂_j) + ŷ_i ∇x b(x̂_i, x̂_j) + ŷ_j ∇y b(x̂_i, x̂_j)] dt,

    using the pre-step positions and tangents for every pair. Tangents are never wrapped.

    Raises:
        UsageError: if the shapes of the ensemble and the tangent don't agree.
    """
    dt = _check_time_step(dt)
    theta = as_param_vec(theta, model.p)
    hat = as_ensemble(hat_ensemble, model.d, "hat ensemble")
    tangent = np.asarray(tangent, dtype = float)
    m = hat.shape[0]
    if tangent.shape != (m, model.p, model.d):
        raise UsageError(f"tangent must have shape {(m, model.p, model.d)}, got {tangent.shape}")
    xi, xj = hat[:, None, :], hat[None, :, :]
    direct = model.drift_dtheta(theta, xi, xj).mean(axis = 1)
    own = np.einsum("ipa,iac->ipc", tangent, model.drift_dx(theta, xi, xj).mean(axis = 1))
    partner = np.einsum("jpa,ijac->ipc", tangent, model.drift_dy(theta, xi, xj)) / m
    return tangent + (direct + own + partner) * dt


def simulate_observed(
    model : ModelSpec,
    theta_schedule : TruthSchedule,
    N : int,
    steps : int,
    dt : float,
    rng : RngStream,
    initial_law : Optional[InitialLaw] = None,
    observed_count : int = 1
) -> ObservedPath:
    """
    Simulates the data-generating N-particle system under a piecewise-constant true
    parameter and records the first `observed_count` particles.

    The initial positions are drawn first, then one Gaussian block per step, all from `rng`,
    so the result equals repeated [`euler_ips_step`][pysgdct.dynamics.euler_ips_step] calls
    on the same stream.

    Raises:
        UsageError: if `N < 1`, `observed_count` is out of range or the schedule doesn't cover `steps`.
    """
    if N < 1:
        raise UsageError(f"N must be at least 1, got {N}")
    if not 1 <= observed_count <= N:
        raise UsageError(f"observed_count must be within [1, N], got {observed_count}")
    if steps < 0:
        raise UsageError(f"steps must be non-negative, got {steps}")
    if not theta_schedule.covers(steps):
        raise UsageError(f"truth schedule ends at step {theta_schedule.end} but {steps} steps were requested")
    if theta_schedule.p != model.p:
        raise UsageError(f"truth schedule has {theta_schedule.p} parameters, model '{model.name}' needs {model.p}")
    dt = _check_time_step(dt)
    law = initial_law or InitialLaw()
    ensemble = law.sample(rng, N, model)
    positions = np.empty((steps + 1, observed_count, model.d))
    increments = np.empty((steps, observed_count, model.d))
    positions[0] = ensemble[:observed_count]
    for k in range(steps):
        increment = euler_ips_increment(model, theta_schedule.theta_at(k), ensemble, dt, rng = rng)
        ensemble = model.wrap(ensemble + increment)
        increments[k] = increment[:observed_count]
        positions[k + 1] = ensemble[:observed_count]
    logger.debug("simulated %d steps of model '%s' with N=%d", steps, model.name, N)
    return ObservedPath(positions = positions, increments = increments, dt = dt)
