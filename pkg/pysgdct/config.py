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
    "ModelConfig",
    "ThetaInitConfig",
    "ProjectionConfig",
    "ExperimentConfig",
    "load_config",
    "dump_config",
    "config_hash"
]

from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union
import hashlib
import json
import logging
import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator
from typing_extensions import Literal
from pysgdct.dynamics import InitialLaw, RngStream, TruthPiece, TruthSchedule
from pysgdct.enums import EstimatorVariant, IndexPolicy, WeightMode
from pysgdct.errors import ConfigError, UsageError
from pysgdct.estimators import LearningRate
from pysgdct.model import ModelSpec, ParamVec
from pysgdct.utils import field_path

logger = logging.getLogger(__name__)


class ModelConfig(BaseModel):
    """
    Which drift model to use and its options.
    """
    model_config = ConfigDict(extra = "forbid", frozen = True)

    name : str
    sigma : Union[None, float, List[List[float]]] = None
    weight : Optional[WeightMode] = None

    @field_validator("name")
    @classmethod
    def _known(cls, value : str) -> str:
        ModelSpec.lookup(value)
        return value

    @property
    def p(self) -> int:
        return ModelSpec.lookup(self.name).p

    def build(self) -> ModelSpec:
        return ModelSpec.get(self.name, sigma = self.sigma, weight = self.weight)


class ThetaInitConfig(BaseModel):
    """
    How the initial estimate of each seed is chosen.

    * `uniform`: independent uniforms on `[low, high)` per coordinate;
    * `explicit`: the same `value` for every seed.
    """
    model_config = ConfigDict(extra = "forbid", frozen = True)

    kind : Literal["uniform", "explicit"] = "explicit"
    low : Optional[List[float]] = None
    high : Optional[List[float]] = None
    value : Optional[List[float]] = None

    @model_validator(mode = "after")
    def _check(self) -> "ThetaInitConfig":
        if self.kind == "uniform":
            if self.low is None or self.high is None or len(self.low) != len(self.high):
                raise ConfigError("theta_init", "uniform initialisation needs 'low' and 'high' of equal length")
            if any(lo > hi for lo, hi in zip(self.low, self.high)):
                raise ConfigError("theta_init", "uniform bounds must satisfy low <= high")
        elif self.value is None:
            raise ConfigError("theta_init.value", "explicit initialisation needs 'value'")
        return self

    @property
    def size(self) -> int:
        return len(self.low if self.kind == "uniform" else self.value)

    def sample(self, rng : RngStream) -> ParamVec:
        if self.kind == "explicit":
            return np.asarray(self.value, dtype = float)
        return rng.uniform(np.asarray(self.low, dtype = float), np.asarray(self.high, dtype = float))


class ProjectionConfig(BaseModel):
    """
    Box the free coordinates of the estimate are clipped to after each update.
    Bounds with a single entry apply to every coordinate.
    """
    model_config = ConfigDict(extra = "forbid", frozen = True)

    low : List[float]
    high : List[float]

    @model_validator(mode = "after")
    def _check(self) -> "ProjectionConfig":
        if len(self.low) != len(self.high):
            raise ConfigError("projection", "'low' and 'high' must have the same length")
        if any(lo > hi for lo, hi in zip(self.low, self.high)):
            raise ConfigError("projection", "bounds must satisfy low <= high")
        return self

    def bounds(self, p : int) -> Tuple[np.ndarray, np.ndarray]:
        return (
            np.broadcast_to(np.asarray(self.low, dtype = float), (p,)).copy(),
            np.broadcast_to(np.asarray(self.high, dtype = float), (p,)).copy()
        )


class ExperimentConfig(BaseModel):
    """
    A complete, validated experiment description. Configurations are JSON documents
    with the same keys; see the configuration page of the documentation for the schema.

    Attributes:
        model:
            Drift model and its options.
        N:
            Number of particles of the data-generating system.
        M:
            Number of particles of each virtual system.
        dt:
            Time step of the simulation and of the estimator.
        steps:
            Number of observation increments.
        truth:
            Piecewise-constant true parameter. The last piece must reach `steps`.
        initial_law:
            Law of the initial positions of the data and virtual particles.
        theta_init:
            Initial estimate.
        mask:
            Per coordinate, `True` if estimated and `False` if known, in which case it is frozen
            at the true value of the first step.
        variants:
            Estimators that run on the same observed path.
        learning_rate:
            Learning rate schedule.
        index_policy:
            Particle index policy of the particlewise estimator.
        indices:
            Zero-based `(j, k)` used with the `fixed` index policy.
        projection:
            Optional box projection of the estimate.
        seeds:
            One run per seed.
        record_stride:
            The estimate is recorded every `record_stride` steps (and at the last step).
        observed_count:
            Number of observed particles; their increments are averaged.
        target:
            Reference point of the L² error: the true parameter at the last step, the
            finite-N pseudo-true value (quadratic model only) or `target_value`.
        window:
            Fraction of the trace averaged by the L² error; `None` uses the final iterate.
        output:
            Default output directory.
    """
    model_config = ConfigDict(extra = "forbid", frozen = True)

    name : Optional[str] = None
    model : ModelConfig
    N : int = Field(ge = 1)
    M : int = Field(ge = 1)
    dt : float = Field(gt = 0)
    steps : int = Field(ge = 1)
    truth : List[TruthPiece] = Field(min_length = 1)
    initial_law : InitialLaw = InitialLaw()
    theta_init : ThetaInitConfig
    mask : Optional[List[bool]] = None
    variants : List[EstimatorVariant] = Field(
        default = [EstimatorVariant.AVERAGED, EstimatorVariant.PARTICLEWISE],
        min_length = 1
    )
    learning_rate : LearningRate = LearningRate()
    index_policy : IndexPolicy = IndexPolicy.FIXED
    indices : Tuple[int, int] = (0, 0)
    projection : Optional[ProjectionConfig] = None
    seeds : List[int] = Field(default = [0], min_length = 1)
    record_stride : int = Field(default = 1, ge = 1)
    observed_count : int = Field(default = 1, ge = 1)
    target : Literal["truth", "pseudo", "explicit"] = "truth"
    target_value : Optional[List[float]] = None
    window : Optional[float] = Field(default = None, gt = 0, le = 1)
    output : Optional[str] = None

    @field_validator("seeds")
    @classmethod
    def _non_negative_seeds(cls, value : List[int]) -> List[int]:
        if any(x < 0 for x in value):
            raise ValueError("seeds must be non-negative integers")
        return value

    @field_validator("variants")
    @classmethod
    def _unique_variants(cls, value : List[EstimatorVariant]) -> List[EstimatorVariant]:
        if len(set(value)) != len(value):
            raise ValueError("variants must not repeat")
        return value

    @model_validator(mode = "after")
    def _check(self) -> "ExperimentConfig":
        p = self.model.p
        previous = 0
        for position, piece in enumerate(self.truth):
            if piece.until_step <= previous:
                raise ConfigError(f"truth.{position}.until_step", "steps must be strictly increasing")
            if len(piece.theta) != p:
                raise ConfigError(f"truth.{position}.theta", f"model '{self.model.name}' has {p} parameters")
            previous = piece.until_step
        if previous < self.steps:
            raise ConfigError("truth", f"schedule ends at step {previous} but steps is {self.steps}")
        if self.theta_init.size != p:
            raise ConfigError("theta_init", f"model '{self.model.name}' has {p} parameters")
        if self.mask is not None and len(self.mask) != p:
            raise ConfigError("mask", f"model '{self.model.name}' has {p} parameters")
        if self.observed_count > self.N:
            raise ConfigError("observed_count", "can't observe more particles than N")
        if not all(0 <= x < self.M for x in self.indices):
            raise ConfigError("indices", f"particle indices must be within [0, {self.M})")
        if self.projection is not None and len(self.projection.low) not in (1, p):
            raise ConfigError("projection", f"bounds need 1 or {p} entries")
        if self.target == "explicit" and (self.target_value is None or len(self.target_value) != p):
            raise ConfigError("target_value", f"an explicit target needs {p} entries")
        if self.target == "pseudo" and self.model.name != "quadratic":
            raise ConfigError("target", "pseudo-true targets are only known for the quadratic model")
        if self.target == "pseudo" and int(self.free_mask.sum()) != 1:
            raise ConfigError("target", "pseudo-true targets need exactly one free coordinate")
        return self

    @property
    def p(self) -> int:
        return self.model.p

    @property
    def free_mask(self) -> np.ndarray:
        if self.mask is None:
            return np.ones(self.p, dtype = bool)
        return np.asarray(self.mask, dtype = bool)

    def truth_schedule(self) -> TruthSchedule:
        return TruthSchedule.from_pieces(self.truth)

    @classmethod
    def from_dict(cls, data : Dict[str, Any]) -> "ExperimentConfig":
        """
        Validates a configuration dictionary.

        Raises:
            ConfigError: naming the first offending field.
        """
        try:
            return cls.model_validate(data)
        except ValidationError as exc:
            raise _config_error(exc) from None

    def to_dict(self) -> Dict[str, Any]:
        return self.model_dump(mode = "json")

    def scaled(self, factor : float) -> "ExperimentConfig":
        """
        Returns a smaller (or larger) copy for desk-scale runs: the number of steps, the
        switch points of the truth schedule and the number of seeds are multiplied by `factor`.
        """
        if not factor > 0:
            raise UsageError(f"scale factor must be positive, got {factor!r}")
        if factor == 1:
            return self
        steps = max(1, round(self.steps * factor))
        pieces = []
        previous = 0
        for piece in self.truth:
            until = max(previous + 1, round(piece.until_step * factor))
            pieces.append({"until_step": until, "theta": piece.theta})
            previous = until
        pieces[-1]["until_step"] = max(pieces[-1]["until_step"], steps)
        seeds = self.seeds[:max(1, round(len(self.seeds) * factor))]
        data = self.to_dict()
        data.update(steps = steps, truth = pieces, seeds = seeds)
        return ExperimentConfig.from_dict(data)


def _config_error(exc : ValidationError) -> ConfigError:
    error = exc.errors()[0]
    original = error.get("ctx", {}).get("error")
    if isinstance(original, ConfigError):
        return original
    return ConfigError(field_path(error["loc"]), error["msg"])


def load_config(path : Union[str, Path]) -> ExperimentConfig:
    """
    Reads and validates a JSON configuration file.

    Raises:
        ConfigError: if the file can't be read, isn't valid JSON or doesn't validate.
    """
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding = "utf-8"))
    except OSError as exc:
        raise ConfigError("", f"can't read configuration '{path}': {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError("", f"'{path}' is not valid JSON: {exc.msg} (line {exc.lineno})") from None
    if not isinstance(data, dict):
        raise ConfigError("", f"'{path}' must contain a JSON object")
    config = ExperimentConfig.from_dict(data)
    logger.info("loaded configuration '%s' (hash %s)", path, config_hash(config))
    return config


def dump_config(config : ExperimentConfig, path : Union[str, Path]) -> None:
    Path(path).write_text(json.dumps(config.to_dict(), indent = 2, sort_keys = True) + "\n", encoding = "utf-8")


def config_hash(config : ExperimentConfig) -> str:
    """
    First 16 hexadecimal digits of the SHA-256 digest of the canonical JSON dump.
    """
    canonical = json.dumps(config.to_dict(), sort_keys = True, separators = (",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]
