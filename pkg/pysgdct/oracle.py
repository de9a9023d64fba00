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

"""
Closed-form quantities of the quadratic model and numerical cross-checks
used as ground truth by the tests and the `check` command.
"""

__all__ = [
    "QuadraticTruth",
    "OracleReport",
    "mf_objective_quadratic",
    "finite_n_objective_quadratic",
    "pseudo_targets",
    "stationary_moments_quadratic",
    "discrete_stationary_moments_quadratic",
    "empirical_stationary_moments",
    "fd_tangent_check",
    "rao_blackwell_check"
]

from dataclasses import dataclass
from typing import Any, Optional, Tuple
import logging
import numpy as np
from pysgdct.dynamics import InitialLaw, RngStream, euler_ips_step, euler_tangent_step
from pysgdct.estimators import EstimatorState, averaged_increment, particlewise_increment_table
from pysgdct.errors import UsageError
from pysgdct.model import ModelSpec, as_param_vec
from pysgdct.utils import relative_error, wrap_angle

logger = logging.getLogger(__name__)


@dataclass(frozen = True)
class QuadraticTruth:
    """
    True parameters of the quadratic model.

    Attributes:
        theta01:
            True confinement `θ₀₁ > 0`.
        theta02:
            True interaction `θ₀₂`, with `θ₀₁ + θ₀₂ > 0`.
        sigma:
            Noise intensity.
    """
    theta01 : float
    theta02 : float
    sigma : float = 1.0

    def __post_init__(self) -> None:
        if not self.theta01 > 0:
            raise UsageError(f"theta01 must be positive, got {self.theta01!r}")
        if not self.alpha0 > 0:
            raise UsageError(f"theta01 + theta02 must be positive, got {self.alpha0!r}")
        if not self.sigma > 0:
            raise UsageError(f"sigma must be positive, got {self.sigma!r}")

    @property
    def alpha0(self) -> float:
        return self.theta01 + self.theta02


@dataclass(frozen = True)
class OracleReport:
    """
    Comparison of a computed quantity against its reference value.
    """
    name : str
    value : float
    reference : float
    abs_error : float
    rel_error : float

    def passed(self, tolerance : float) -> bool:
        return self.rel_error <= tolerance

    def lines(self) -> str:
        """
        The report as machine readable `name=value` lines.
        """
        return "\n".join(
            f"{self.name}.{key}={value!r}" for key, value in (
                ("value", self.value),
                ("reference", self.reference),
                ("abs_error", self.abs_error),
                ("rel_error", self.rel_error)
            )
        )


def _check_n(N : int) -> None:
    if N < 1:
        raise UsageError(f"N must be at least 1, got {N}")


def mf_objective_quadratic(theta : Any, truth : QuadraticTruth) -> float:
    """
    Mean-field objective `J(θ) = (α - α₀)² / (4α₀)` with `α = θ₁ + θ₂`.
    """
    alpha = float(np.sum(as_param_vec(theta, 2)))
    return (alpha - truth.alpha0) ** 2 / (4.0 * truth.alpha0)


def finite_n_objective_quadratic(theta : Any, truth : QuadraticTruth, N : int) -> float:
    """
    Finite-N surrogate objective of the single observed particle. It doesn't depend on
    the number of virtual particles and is minimised at `α*_N`.
    """
    _check_n(N)
    alpha = float(np.sum(as_param_vec(theta, 2)))
    t1, t2, a0 = truth.theta01, truth.theta02, truth.alpha0
    alpha_star, _, _ = pseudo_targets(truth, N)
    curvature = (N * t1 + t2) / (4.0 * N * a0 * t1)
    floor = (N - 1) * t2 ** 2 / (4.0 * N * (N * t1 + t2))
    return curvature * (alpha - alpha_star) ** 2 + floor


def pseudo_targets(truth : QuadraticTruth, N : int) -> Tuple[float, float, float]:
    """
    Pseudo-true values for N data particles.

    Returns:
        `(α*_N, θ*₁,N, θ*₂,N)`: the minimising sum when both parameters are free, and the
        minimisers of each parameter when the other one is known.
    """
    _check_n(N)
    t1, t2, a0 = truth.theta01, truth.theta02, truth.alpha0
    denominator = N * t1 + t2
    alpha_star = N * t1 * a0 / denominator
    theta1_star = (N * t1 ** 2 - t2 ** 2) / denominator
    theta2_star = (N - 1) * t1 * t2 / denominator
    return alpha_star, theta1_star, theta2_star


def stationary_moments_quadratic(truth : QuadraticTruth, N : int) -> Tuple[float, float]:
    """
    Stationary moments of the continuous-time quadratic IPS.

    Returns:
        `(V_N, C_N)`: the variance of one particle and its covariance with the empirical mean
        (which equals the variance of the empirical mean).
    """
    _check_n(N)
    s2 = truth.sigma ** 2
    c = s2 / (2.0 * N * truth.theta01)
    v = c + (N - 1) / N * s2 / (2.0 * truth.alpha0)
    return v, c


def discrete_stationary_moments_quadratic(truth : QuadraticTruth, N : int, dt : float) -> Tuple[float, float]:
    """
    Stationary moments of the explicit Euler-Maruyama chain of the quadratic IPS. The empirical
    mean is an AR(1) chain with factor `1 - θ₀₁ dt` and the deviations from it are AR(1)
    chains with factor `1 - α₀ dt`, so both variances are `σ² dt w / (1 - ρ²)`.

    Raises:
        UsageError: if the chain is not stable for this `dt`.
    """
    _check_n(N)
    rho_mean = 1.0 - truth.theta01 * dt
    rho_dev = 1.0 - truth.alpha0 * dt
    if not (abs(rho_mean) < 1.0 and abs(rho_dev) < 1.0):
        raise UsageError(f"the Euler chain has no stationary law for dt={dt}")
    s2dt = truth.sigma ** 2 * dt
    c = s2dt / N / (1.0 - rho_mean ** 2)
    deviation = s2dt * (N - 1) / N / (1.0 - rho_dev ** 2)
    return c + deviation, c


def empirical_stationary_moments(
    truth : QuadraticTruth,
    N : int,
    dt : float,
    steps : int,
    burn_in : int = 0,
    seed : int = 0
) -> Tuple[float, float]:
    """
    Long-run sample moments of a simulated quadratic IPS.

    Returns:
        `(var_x1, var_mean)`: the sample variance of the first particle and of the empirical mean
        over `steps` recorded steps after `burn_in` discarded ones.
    """
    model = ModelSpec.get("quadratic", sigma = truth.sigma)
    theta = np.array([truth.theta01, truth.theta02])
    rng = RngStream(seed, 0)
    ensemble = InitialLaw().sample(rng, N, model)
    first = np.empty(steps)
    mean = np.empty(steps)
    for k in range(burn_in + steps):
        ensemble = euler_ips_step(model, theta, ensemble, dt, rng = rng)
        if k >= burn_in:
            first[k - burn_in] = ensemble[0, 0]
            mean[k - burn_in] = ensemble[:, 0].mean()
    return float(np.var(first)), float(np.var(mean))


def _virtual_run(
    model : ModelSpec,
    theta : np.ndarray,
    start : np.ndarray,
    noise : np.ndarray,
    dt : float,
    with_tangent : bool
) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    positions = start
    tangent = np.zeros((start.shape[0], model.p, model.d)) if with_tangent else None
    for block in noise:
        if with_tangent:
            tangent = euler_tangent_step(model, theta, positions, tangent, dt)
        positions = euler_ips_step(model, theta, positions, dt, noise = block)
    return positions, tangent


def fd_tangent_check(
    model : ModelSpec,
    theta : Any,
    M : int,
    dt : float,
    steps : int,
    epsilon : float = 1e-5,
    seed : int = 0,
    initial_law : Optional[InitialLaw] = None
) -> OracleReport:
    """
    Compares the integrated tangent ensemble against central finite differences of the
    virtual system in θ, computed with common random numbers. Differences of torus
    coordinates are taken on the circle.

    Returns:
        A report whose relative error is the max-norm error over particles, parameters and
        coordinates, relative to the largest tangent entry.

    Raises:
        UsageError: if `epsilon` is not positive or is lost against θ in floating point.
    """
    theta = as_param_vec(theta, model.p)
    if steps < 0:
        raise UsageError(f"steps must be non-negative, got {steps}")
    if not epsilon > 0 or np.any((theta + epsilon) - theta == 0.0):
        raise UsageError(f"finite difference step {epsilon!r} is degenerate for theta={theta.tolist()}")
    rng = RngStream(seed, 0)
    start = (initial_law or InitialLaw()).sample(rng, M, model)
    noise = rng.normal((steps, M, model.d))
    _, tangent = _virtual_run(model, theta, start, noise, dt, with_tangent = True)
    finite = np.zeros_like(tangent)
    for index in range(model.p):
        shift = np.zeros(model.p)
        shift[index] = epsilon
        upper, _ = _virtual_run(model, theta + shift, start, noise, dt, with_tangent = False)
        lower, _ = _virtual_run(model, theta - shift, start, noise, dt, with_tangent = False)
        difference = np.where(model.torus, wrap_angle(upper - lower), upper - lower)
        finite[:, index, :] = difference / (2.0 * epsilon)
    error = float(np.max(np.abs(finite - tangent), initial = 0.0))
    report = OracleReport(
        name = f"fd_tangent.{model.name}",
        value = float(np.max(np.abs(finite), initial = 0.0)),
        reference = float(np.max(np.abs(tangent), initial = 0.0)),
        abs_error = error,
        rel_error = relative_error(finite, tangent)
    )
    logger.debug("finite difference tangent check for '%s': rel error %.3g", model.name, report.rel_error)
    return report


def rao_blackwell_check(
    model : ModelSpec,
    state : EstimatorState,
    x_obs : Any,
    dx_obs : Any,
    dt : float,
    gamma : Optional[float] = None
) -> OracleReport:
    """
    Compares the averaged increment against the mean of the particlewise increments over
    every `(j, k)` pair. Both are evaluated on the same state, with `gamma` defaulting to 1.
    """
    gamma = 1.0 if gamma is None else gamma
    averaged = averaged_increment(model, state.theta, x_obs, dx_obs, state.hat, state.hat_tangent, state.tilde, dt, gamma)
    table = particlewise_increment_table(model, state.theta, x_obs, dx_obs, state.hat, state.hat_tangent, state.tilde, dt, gamma)
    exhaustive = table.mean(axis = (0, 1))
    return OracleReport(
        name = f"rao_blackwell.{model.name}",
        value = float(np.linalg.norm(exhaustive)),
        reference = float(np.linalg.norm(averaged)),
        abs_error = float(np.max(np.abs(exhaustive - averaged), initial = 0.0)),
        rel_error = relative_error(exhaustive, averaged)
    )
