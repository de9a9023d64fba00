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

__all__ = ["RunTrace", "EstimationRun"]

from dataclasses import dataclass
from typing import Any, Dict, List, Optional, TYPE_CHECKING
import logging
import math
import numpy as np
from pysgdct.config import ExperimentConfig, config_hash
from pysgdct.dynamics import RngStream, simulate_observed
from pysgdct.enums import EstimatorVariant, RunStatus, StreamId
from pysgdct.errors import DivergenceError, SgdctError, UsageError
from pysgdct.estimators import EstimatorState, estimator_step

if TYPE_CHECKING:
    from pysgdct.experiment import Experiment

logger = logging.getLogger(__name__)


@dataclass
class RunTrace:
    """
    Recorded estimates of one seed.

    Attributes:
        seed:
            The seed of the run.
        config_hash:
            Hash of the configuration that produced the trace.
        variants:
            The estimators of the run, in column order.
        steps:
            Recorded step indices, strictly increasing.
        times:
            Elapsed time at every record.
        thetas:
            Per variant, the recorded estimates with shape `(records, p)`.
        status:
            `DONE`, or `DIVERGED` if the trace has been truncated.
        diverged:
            The variant that diverged, if any.
        divergence_step:
            The step whose update was non-finite, if any.
    """
    seed : int
    config_hash : str
    variants : List[EstimatorVariant]
    steps : np.ndarray
    times : np.ndarray
    thetas : Dict[EstimatorVariant, np.ndarray]
    status : RunStatus = RunStatus.DONE
    diverged : Optional[EstimatorVariant] = None
    divergence_step : Optional[int] = None

    @property
    def p(self) -> int:
        return self.thetas[self.variants[0]].shape[1]

    @property
    def records(self) -> int:
        return self.steps.shape[0]

    @property
    def columns(self) -> List[str]:
        """
        CSV header: `step`, `time` and `p` columns per variant.
        """
        names = ["step", "time"]
        for variant in self.variants:
            names.extend(f"{variant.column_prefix}_{index + 1}" for index in range(self.p))
        return names

    @property
    def metadata(self) -> Dict[str, Any]:
        data = {"config_hash": self.config_hash, "seed": self.seed, "status": self.status.name}
        if self.status is RunStatus.DIVERGED:
            data["diverged"] = self.diverged.value
            data["divergence_step"] = self.divergence_step
        return data

    def rows(self) -> List[List[Any]]:
        table = [self.thetas[x] for x in self.variants]
        return [
            [int(self.steps[index]), float(self.times[index])] + [float(v) for block in table for v in block[index]]
            for index in range(self.records)
        ]

    def final(self, variant : EstimatorVariant) -> np.ndarray:
        return self.thetas[variant][-1]

    def window_mean(self, variant : EstimatorVariant, window : Optional[float] = None) -> np.ndarray:
        """
        Mean of the last `window` fraction of the records, or the final record if `window` is `None`.
        """
        if window is None:
            return self.final(variant)
        if not 0 < window <= 1:
            raise UsageError(f"window must be within (0, 1], got {window!r}")
        count = max(1, math.ceil(window * self.records))
        return self.thetas[variant][-count:].mean(axis = 0)

    def step_range_mean(self, variant : EstimatorVariant, start : int, stop : int) -> np.ndarray:
        """
        Mean of the records whose step index lies in `[start, stop)`.
        """
        selected = (self.steps >= start) & (self.steps < stop)
        if not selected.any():
            raise UsageError(f"no records between steps {start} and {stop}")
        return self.thetas[variant][selected].mean(axis = 0)


class EstimationRun:
    """
    A single seed of an experiment. It generates the observed path, draws the initial
    estimate, runs every configured estimator variant over the same increments and
    records the estimates.

    Runs are created by an [`Experiment`][pysgdct.experiment.Experiment], one per seed.

    Attributes:
        experiment:
            The experiment that owns this run.
        seed:
            Seed of every random number stream of the run.
        position:
            Position of the run in the experiment, starting from 1.
        status:
            Status of the run, `NONE` before it has executed.
        trace:
            The recorded trace, `None` until the run has executed or if it failed
            before recording anything.
        error:
            The exception that stopped the run, if any.
    """

    def __init__(self, experiment : "Experiment", seed : int) -> None:
        self.experiment = experiment
        self.seed : int = int(seed)
        self._position : int = len(self.experiment.runs) + 1
        self.status : RunStatus = RunStatus.NONE
        self.trace : Optional[RunTrace] = None
        self.error : Optional[BaseException] = None
        self.experiment.runs.append(self)

    @property
    def position(self) -> int:
        return self._position

    @property
    def config(self) -> ExperimentConfig:
        return self.experiment.config

    def execute(self) -> RunStatus:
        """
        Executes the run, storing the trace and mapping any exception to a status.
        It never raises.
        """
        try:
            self.trace = self._estimate()
        except SgdctError as exc:
            self.status = exc.status
            self.error = exc
        except ValueError as exc:
            self.status = RunStatus.INVALID_ARGUMENT
            self.error = exc
        except Exception as exc:
            logger.exception("run %d (seed %d) failed", self.position, self.seed)
            self.status = RunStatus.UNHANDLED_EXCEPTION
            self.error = exc
        else:
            self.status = self.trace.status
        return self.status

    def _estimate(self) -> RunTrace:
        config = self.config
        model = config.model.build()
        observed = simulate_observed(
            model,
            config.truth_schedule(),
            config.N,
            config.steps,
            config.dt,
            RngStream(self.seed, StreamId.OBSERVED),
            initial_law = config.initial_law,
            observed_count = config.observed_count
        )
        theta_init = config.theta_init.sample(RngStream(self.seed, StreamId.THETA_INIT))
        # Known coordinates are frozen at the truth.
        theta_init = np.where(config.free_mask, theta_init, config.truth_schedule().theta_at(0))
        projection = config.projection.bounds(model.p) if config.projection else None
        states = {
            variant : EstimatorState.initial(
                model,
                theta_init,
                config.M,
                self.seed,
                schedule = config.learning_rate,
                variant = variant,
                initial_law = config.initial_law,
                mask = config.free_mask,
                indices = tuple(config.indices),
                index_policy = config.index_policy,
                projection = projection
            ) for variant in config.variants
        }
        steps : List[int] = []
        times : List[float] = []
        thetas : Dict[EstimatorVariant, List[np.ndarray]] = {x : [] for x in config.variants}

        def record(step : int) -> None:
            steps.append(step)
            times.append(step * config.dt)
            for variant, state in states.items():
                thetas[variant].append(state.theta)

        record(0)
        status, diverged, divergence_step = RunStatus.DONE, None, None
        for k in range(config.steps):
            try:
                for variant in config.variants:
                    states[variant] = estimator_step(states[variant], observed.positions[k], observed.increments[k], config.dt)
            except DivergenceError as exc:
                logger.warning(
                    "seed %d: %s estimator diverged at step %s (t=%s), theta=%s",
                    self.seed, variant.value, exc.step, exc.time, exc.theta.tolist()
                )
                status, diverged, divergence_step = RunStatus.DIVERGED, variant, exc.step
                break
            if (k + 1) % config.record_stride == 0 or k + 1 == config.steps:
                record(k + 1)
        return RunTrace(
            seed = self.seed,
            config_hash = config_hash(config),
            variants = list(config.variants),
            steps = np.asarray(steps, dtype = int),
            times = np.asarray(times, dtype = float),
            thetas = {x : np.asarray(y) for x, y in thetas.items()},
            status = status,
            diverged = diverged,
            divergence_step = divergence_step
        )

    def __repr__(self) -> str:
        return f"<{self.__class__.__name__} seed={self.seed} status={self.status.name}>"
