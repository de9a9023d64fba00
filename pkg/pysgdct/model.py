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
    "ModelSpec",
    "ParamVec",
    "Ensemble",
    "TangentEnsemble",
    "as_param_vec",
    "as_state",
    "as_ensemble",
    "drift_kernel",
    "drift_kernel_dtheta",
    "drift_kernel_dx",
    "drift_kernel_dy",
    "mean_drift",
    "wrap_state"
]

from typing import Any, Callable, ClassVar, Dict, List, Optional, Sequence, Tuple, Type, Union
import logging
import numpy as np
import wrapt
from typing_extensions import TypeAlias
from pysgdct.collection import Registry
from pysgdct.enums import Geometry, WeightMode
from pysgdct.errors import NumericInputError, UsageError
from pysgdct.utils import wrap_angle

logger = logging.getLogger(__name__)

# θ, shape (p,).
ParamVec : TypeAlias = np.ndarray
# Particle positions, shape (count, d).
Ensemble : TypeAlias = np.ndarray
# Sensitivities ∂θ x̂, shape (M, p, d).
TangentEnsemble : TypeAlias = np.ndarray


class ModelSpec:
    """
    Base class of every drift model. A model is a pair-drift kernel `b(θ, x, y)`
    with its three analytic derivatives, a constant diffusion matrix, the weight
    matrix of the parameter updates and the state-space geometry.

    Concrete models derive from this class, implement the four vectorized kernel
    methods and register themselves with the [`ModelSpec.register`][pysgdct.model.ModelSpec.register]
    decorator, so they can be created by name:

    ```py
    model = ModelSpec.get("quadratic", sigma = 1.0)
    ```

    The kernel methods receive arrays that broadcast against each other, with the state
    coordinate on the last axis. `drift_dtheta` appends a `(p, d)` block and `drift_dx` /
    `drift_dy` append a `(d, d)` block whose entry `[a, c]` is `∂b_c / ∂x_a`, so that a
    tangent `ŷ` of shape `(p, d)` is pushed through with `ŷ @ drift_dx(...)`.

    Model instances are immutable once constructed.

    Attributes:
        name:
            Registered name of the model.
        d:
            State dimension.
        p:
            Parameter dimension.
        sigma:
            Constant `(d, d)` diffusion matrix. It may be singular for degenerate models.
        weight:
            Symmetric `(d, d)` inner-product weight used in the parameter updates.
        weight_mode:
            How the weight has been derived from `sigma`.
        torus:
            Boolean flags, one per coordinate, marking the coordinates that live on the circle.
    """
    name : ClassVar[str] = ""
    d : ClassVar[int] = 1
    p : ClassVar[int] = 1
    parameter_names : ClassVar[Tuple[str, ...]] = ()
    # Diffusion matrix for unit noise intensity.
    noise_pattern : ClassVar[Tuple[Tuple[float, ...], ...]] = ((1.0,),)
    torus_flags : ClassVar[Tuple[bool, ...]] = (False,)
    default_weight : ClassVar[WeightMode] = WeightMode.LIKELIHOOD

    _models : ClassVar[Registry] = Registry()

    def __init__(
        self,
        sigma : Union[None, float, Sequence[Sequence[float]]] = None,
        weight : Union[None, str, WeightMode] = None
    ) -> None:
        """
        Args:
            sigma:
                Either a noise intensity that scales the model's noise pattern, or a full
                `(d, d)` diffusion matrix. Defaults to unit intensity.
            weight:
                One of the [`WeightMode`][pysgdct.enums.WeightMode] values. Defaults to the
                model's own choice.
        """
        self.sigma : np.ndarray = self._build_sigma(sigma)
        self.weight_mode : WeightMode = WeightMode(weight) if weight is not None else self.default_weight
        self.weight : np.ndarray = self._build_weight(self.sigma, self.weight_mode)
        self.torus : np.ndarray = np.array(self.torus_flags, dtype = bool)
        for array in (self.sigma, self.weight, self.torus):
            array.setflags(write = False)
        self._frozen = True

    def __setattr__(self, key : str, value : Any) -> None:
        if getattr(self, "_frozen", False):
            raise AttributeError(f"{self.__class__.__name__} is immutable")
        super().__setattr__(key, value)

    def __repr__(self) -> str:
        return f"<{self.__class__.__name__} '{self.name}' d={self.d} p={self.p} weight={self.weight_mode.value}>"

    def _build_sigma(self, sigma : Union[None, float, Sequence[Sequence[float]]]) -> np.ndarray:
        pattern = np.array(self.noise_pattern, dtype = float)
        if sigma is None:
            return pattern.copy()
        if np.isscalar(sigma):
            value = float(sigma)
            if not np.isfinite(value) or value < 0:
                raise UsageError(f"sigma must be a finite non-negative number, got {sigma!r}")
            return value * pattern
        matrix = np.array(sigma, dtype = float)
        if matrix.shape != (self.d, self.d):
            raise UsageError(f"sigma must be a {self.d}x{self.d} matrix for model '{self.name}', got shape {matrix.shape}")
        if not np.all(np.isfinite(matrix)):
            raise NumericInputError("sigma must be finite")
        return matrix

    @staticmethod
    def _build_weight(sigma : np.ndarray, mode : WeightMode) -> np.ndarray:
        d = sigma.shape[0]
        if mode is WeightMode.IDENTITY:
            return np.eye(d)
        if mode is WeightMode.NOISE_SUPPORT:
            return np.diag(np.any(sigma != 0.0, axis = 1).astype(float))
        covariance = sigma @ sigma.T
        if np.linalg.matrix_rank(covariance) < d:
            raise UsageError("the likelihood weight needs an invertible sigma, use weight 'identity' or 'noise-support'")
        weight = np.linalg.inv(covariance)
        return 0.5 * (weight + weight.T)

    @property
    def geometry(self) -> Geometry:
        return Geometry.TORUS if bool(np.any(self.torus)) else Geometry.FLAT

    @property
    def degenerate(self) -> bool:
        """
        `True` if some coordinate receives no noise.
        """
        return bool(np.linalg.matrix_rank(self.sigma @ self.sigma.T) < self.d)

    def drift(self, theta : ParamVec, x : np.ndarray, y : np.ndarray) -> np.ndarray:
        """
        Vectorized `b(θ, x, y)`, shape `broadcast(x, y)`.
        """
        raise NotImplementedError

    def drift_dtheta(self, theta : ParamVec, x : np.ndarray, y : np.ndarray) -> np.ndarray:
        """
        Vectorized `∂θ b`, shape `broadcast(x, y)[:-1] + (p, d)`.
        """
        raise NotImplementedError

    def drift_dx(self, theta : ParamVec, x : np.ndarray, y : np.ndarray) -> np.ndarray:
        """
        Vectorized `∇x b`, shape `broadcast(x, y)[:-1] + (d, d)`.
        """
        raise NotImplementedError

    def drift_dy(self, theta : ParamVec, x : np.ndarray, y : np.ndarray) -> np.ndarray:
        """
        Vectorized `∇y b`, shape `broadcast(x, y)[:-1] + (d, d)`.
        """
        raise NotImplementedError

    def stability_rate(self, theta : ParamVec) -> Optional[float]:
        """
        Returns the decay rate `a` for which the explicit Euler step is mean-square stable
        when `a·dt < 2`, or `None` if the model has no such closed-form guard.
        """
        return None

    def wrap(self, x : np.ndarray) -> np.ndarray:
        """
        Maps torus coordinates of `x` (last axis) into [-π, π). Returns `x` itself on flat models.
        """
        if not self.torus.any():
            return x
        return np.where(self.torus, wrap_angle(x), x)

    @classmethod
    def register(cls, name : str) -> Callable[[Type["ModelSpec"]], Type["ModelSpec"]]:
        """
        Class decorator that registers a model under `name`.

        ```py
        @ModelSpec.register("quadratic")
        class QuadraticModel(ModelSpec):
            ...
        ```
        """
        def prefilled_register(model_cls : Type["ModelSpec"]) -> Type["ModelSpec"]:
            if name in cls._models:
                raise ValueError(f"the model named '{name}' already exists, you can't define it multiple times")
            model_cls.name = name
            cls._models[name] = model_cls
            return model_cls
        return prefilled_register

    @classmethod
    def get(cls, name : str, **options) -> "ModelSpec":
        """
        Creates a registered model by its name.

        Args:
            name:
                The model name, for example `"kuramoto"`.
            **options:
                Keyword options passed to the model, `sigma` and `weight`.

        Raises:
            UsageError: if there is no model with that name.
        """
        return cls.lookup(name)(**options)

    @classmethod
    def lookup(cls, name : str) -> Type["ModelSpec"]:
        """
        Returns the registered model class, without creating an instance.

        Raises:
            UsageError: if there is no model with that name.
        """
        if name not in cls._models:
            raise UsageError(f"unknown model '{name}', available: {', '.join(cls.names())}")
        return cls._models[name]

    @classmethod
    def names(cls) -> List[str]:
        return cls._models.names()


def as_param_vec(theta : Any, p : int) -> ParamVec:
    """
    Validates and converts `theta` to a float vector of length `p`.
    """
    vec = np.atleast_1d(np.asarray(theta, dtype = float))
    if vec.shape != (p,):
        raise UsageError(f"theta must have {p} entries, got shape {vec.shape}")
    if not np.all(np.isfinite(vec)):
        raise NumericInputError(f"theta must be finite, got {vec.tolist()}")
    return vec


def as_state(x : Any, d : int, label : str = "x") -> np.ndarray:
    """
    Validates and converts a single state vector of length `d`.
    """
    vec = np.atleast_1d(np.asarray(x, dtype = float))
    if vec.shape != (d,):
        raise UsageError(f"{label} must have {d} entries, got shape {vec.shape}")
    if not np.all(np.isfinite(vec)):
        raise NumericInputError(f"{label} must be finite, got {vec.tolist()}")
    return vec


def as_ensemble(positions : Any, d : int, label : str = "ensemble") -> Ensemble:
    """
    Validates and converts particle positions to a `(count, d)` array. A flat
    sequence is accepted for one-dimensional models.
    """
    arr = np.asarray(positions, dtype = float)
    if arr.ndim == 1 and d == 1:
        arr = arr[:, None]
    if arr.ndim != 2 or arr.shape[1] != d:
        raise UsageError(f"{label} must have shape (count, {d}), got {arr.shape}")
    if arr.shape[0] == 0:
        raise UsageError(f"{label} must not be empty")
    if not np.all(np.isfinite(arr)):
        raise NumericInputError(f"{label} must be finite")
    return arr


@wrapt.decorator
def kernel_operation(wrapped, instance, args, kwargs):
    """
    Validates the `(model, theta, x, y)` arguments of a single point kernel operation.
    """
    def _unpack(model : ModelSpec, theta : Any, x : Any, y : Any) -> Tuple[ModelSpec, ParamVec, np.ndarray, np.ndarray]:
        return model, as_param_vec(theta, model.p), as_state(x, model.d, "x"), as_state(y, model.d, "y")
    return wrapped(*_unpack(*args, **kwargs))


@kernel_operation
def drift_kernel(model : ModelSpec, theta : ParamVec, x : np.ndarray, y : np.ndarray) -> np.ndarray:
    """
    Evaluates the pair drift `b(θ, x, y)`, shape `(d,)`.
    """
    return model.drift(theta, x, y)


@kernel_operation
def drift_kernel_dtheta(model : ModelSpec, theta : ParamVec, x : np.ndarray, y : np.ndarray) -> np.ndarray:
    """
    Evaluates the Jacobian of the pair drift in θ, shape `(p, d)`.
    """
    return model.drift_dtheta(theta, x, y)


@kernel_operation
def drift_kernel_dx(model : ModelSpec, theta : ParamVec, x : np.ndarray, y : np.ndarray) -> np.ndarray:
    """
    Evaluates the Jacobian of the pair drift in its first state argument, shape `(d, d)`.
    """
    return model.drift_dx(theta, x, y)


@kernel_operation
def drift_kernel_dy(model : ModelSpec, theta : ParamVec, x : np.ndarray, y : np.ndarray) -> np.ndarray:
    """
    Evaluates the Jacobian of the pair drift in its second (partner) argument, shape `(d, d)`.
    """
    return model.drift_dy(theta, x, y)


def mean_drift(model : ModelSpec, theta : Any, x : Any, ensemble : Any) -> np.ndarray:
    """
    Evaluates `B(θ, x, μ) = mean over the ensemble of b(θ, x, y)`.

    Args:
        model:
            The drift model.
        theta:
            Parameter vector.
        x:
            The state at which the drift is evaluated.
        ensemble:
            Positions of the particles that make up the empirical measure μ.

    Raises:
        UsageError: if the ensemble is empty or shapes don't match.
    """
    theta = as_param_vec(theta, model.p)
    x = as_state(x, model.d)
    ensemble = as_ensemble(ensemble, model.d)
    return model.drift(theta, x[None, :], ensemble).mean(axis = 0)


def wrap_state(model : ModelSpec, x : Any) -> np.ndarray:
    """
    Maps every torus coordinate into [-π, π) and leaves flat coordinates unchanged.
    Works on a single state or on a whole ensemble.
    """
    return model.wrap(np.asarray(x, dtype = float))
