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
    "Experiment",
    "SweepRow",
    "run_experiment",
    "resolve_target",
    "l2_error",
    "bootstrap_interval",
    "sweep",
    "summarize"
]

from dataclasses import dataclass
from typing import Any, Callable, Coroutine, List, Optional, Sequence, Tuple, Union
import asyncio
import inspect
import logging
import numpy as np
from pysgdct.config import ExperimentConfig, config_hash
from pysgdct.enums import EstimatorVariant, RunStatus
from pysgdct.errors import ConfigError, UsageError
from pysgdct.oracle import QuadraticTruth, pseudo_targets
from pysgdct.run import EstimationRun, RunTrace

logger = logging.getLogger(__name__)


class Experiment:
    """
    Experiments hold one [`EstimationRun`][pysgdct.run.EstimationRun] per seed of a configuration
    and execute them concurrently in worker threads.

    To execute all runs, await the `run()` coroutine, or call `execute()` from synchronous code.

    Attributes:
        config:
            The validated configuration.
        name:
            A name that is used to identify the experiment in logs.
        runs:
            The runs of the experiment, in seed order.
        on_run_update:
            A callable or coroutine function that is called with the experiment and the run
            every time a run finishes (fail or success).
        on_experiment_finish:
            A callable or coroutine function that is called with the experiment and the first
            failed run (or `None`) when every run has finished.
        concurrency:
            Maximum number of runs executing at the same time. `None` leaves it to the
            default thread pool.
    """

    def __init__(
        self,
        config : ExperimentConfig,
        name : Optional[str] = None,
        on_run_update : Union[Coroutine, Callable, None] = None,
        on_experiment_finish : Union[Coroutine, Callable, None] = None,
        concurrency : Optional[int] = None
    ) -> None:
        if concurrency is not None and concurrency < 1:
            raise UsageError(f"concurrency must be at least 1, got {concurrency}")
        self.config : ExperimentConfig = config
        self.name : Optional[str] = name or config.name
        self.runs : List[EstimationRun] = []
        self.on_run_update : Union[Coroutine, Callable, None] = on_run_update
        self.on_experiment_finish : Union[Coroutine, Callable, None] = on_experiment_finish
        self.concurrency : Optional[int] = concurrency
        # None if the experiment has never executed.
        self._success : Optional[bool] = None
        for seed in config.seeds:
            EstimationRun(self, seed)

    @property
    def success(self) -> Optional[bool]:
        """
        `True` if every run finished with `DONE`, `False` if any run failed and
        `None` if the experiment has never executed.
        """
        return self._success

    @property
    def traces(self) -> List[RunTrace]:
        """
        Traces of the runs that recorded one, in seed order. Diverged runs are included
        with their truncated trace.
        """
        return [x.trace for x in self.runs if x.trace is not None]

    @property
    def failed_runs(self) -> List[EstimationRun]:
        return [x for x in self.runs if x.status is not RunStatus.DONE]

    async def _notify(self, listener : Union[Coroutine, Callable, None], *args) -> None:
        if listener:
            if inspect.iscoroutinefunction(listener):
                await listener(self, *args)
            else:
                listener(self, *args)

    async def run(self) -> None:
        """
        Executes every run. A run that fails doesn't stop the others; its status records why.
        """
        self._success = None
        limit = asyncio.Semaphore(self.concurrency or len(self.runs))

        async def execute(item : EstimationRun) -> EstimationRun:
            async with limit:
                await asyncio.to_thread(item.execute)
            await self._notify(self.on_run_update, item)
            return item

        await asyncio.gather(*(execute(x) for x in self.runs))
        failed = self.failed_runs
        self._success = not failed
        logger.info(
            "experiment '%s' finished: %d runs, %d failed",
            self, len(self.runs), len(failed)
        )
        await self._notify(self.on_experiment_finish, failed[0] if failed else None)

    def execute(self) -> None:
        """
        Synchronous shortcut for `asyncio.run(experiment.run())`.
        """
        asyncio.run(self.run())

    def raise_for_status(self) -> None:
        """
        Re-raises the error of the first run that failed for a reason other than divergence.
        """
        for item in self.runs:
            if item.status not in (RunStatus.DONE, RunStatus.DIVERGED, RunStatus.NONE):
                raise item.error

    def __len__(self) -> int:
        return len(self.runs)

    def __iter__(self):
        return iter(self.runs)

    def __bool__(self) -> bool:
        return bool(self.success)

    def __str__(self) -> str:
        return self.name or "Unnamed Experiment"

    def __repr__(self) -> str:
        return f"<{self.__class__.__name__} '{str(self)}' runs={len(self.runs)}>"


def run_experiment(config : ExperimentConfig, concurrency : Optional[int] = None) -> List[RunTrace]:
    """
    Runs every seed of a configuration.

    Both estimator variants of a seed see the same observed path and the same initial
    estimate, and use independent virtual noise streams.

    Returns:
        One trace per seed, in seed order. Diverged runs have a truncated trace
        with `DIVERGED` status.

    Raises:
        SgdctError: if a run failed for any reason other than divergence.
    """
    experiment = Experiment(config, concurrency = concurrency)
    experiment.execute()
    experiment.raise_for_status()
    return experiment.traces


def resolve_target(config : ExperimentConfig) -> np.ndarray:
    """
    The reference point of the L² error of a configuration.

    * `truth`: the true parameter at the last step;
    * `pseudo`: the finite-N pseudo-true value of the quadratic model, which needs
      exactly one free coordinate;
    * `explicit`: `target_value`.
    """
    if config.target == "explicit":
        return np.asarray(config.target_value, dtype = float)
    truth = config.truth_schedule().theta_at(config.steps - 1).copy()
    if config.target == "truth":
        return truth
    mask = config.free_mask
    if mask.sum() != 1:
        raise ConfigError("target", "pseudo-true targets need exactly one free coordinate")
    _, theta1_star, theta2_star = pseudo_targets(QuadraticTruth(truth[0], truth[1]), config.N)
    truth[int(np.argmax(mask))] = theta1_star if mask[0] else theta2_star
    return truth


def _endpoints(traces : Sequence[RunTrace], variant : Optional[EstimatorVariant], window : Optional[float]) -> np.ndarray:
    if not traces:
        raise UsageError("at least one trace is needed")
    if window is not None and not 0 < window <= 1:
        raise UsageError(f"window must be within (0, 1], got {window!r}")
    variant = variant or traces[0].variants[0]
    return np.stack([x.window_mean(variant, window) for x in traces])


def l2_error(
    traces : Sequence[RunTrace],
    target : Any,
    window : Optional[float] = None,
    variant : Optional[EstimatorVariant] = None
) -> np.ndarray:
    """
    Per-coordinate root-mean-square error over seeds.

    Args:
        traces:
            One trace per seed.
        target:
            The reference parameter.
        window:
            Fraction of each trace that is time-averaged before comparing. `None`
            compares the final iterate.
        variant:
            Which estimator's columns to use, by default the first variant of the traces.

    Raises:
        UsageError: if `traces` is empty or `window` is outside (0, 1].
    """
    errors = _endpoints(traces, variant, window) - np.asarray(target, dtype = float)
    return np.sqrt(np.mean(errors ** 2, axis = 0))


def bootstrap_interval(
    traces : Sequence[RunTrace],
    target : Any,
    window : Optional[float] = None,
    variant : Optional[EstimatorVariant] = None,
    level : float = 0.95,
    resamples : int = 2000,
    seed : int = 0
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Percentile bootstrap interval of the L² error, resampling seeds with replacement.

    Returns:
        `(low, high)` arrays with one entry per coordinate.
    """
    if not 0 < level < 1:
        raise UsageError(f"confidence level must be within (0, 1), got {level!r}")
    squared = (_endpoints(traces, variant, window) - np.asarray(target, dtype = float)) ** 2
    rng = np.random.default_rng(seed)
    picks = rng.integers(0, squared.shape[0], size = (resamples, squared.shape[0]))
    samples = np.sqrt(squared[picks].mean(axis = 1))
    tail = (1.0 - level) / 2.0
    return np.quantile(samples, tail, axis = 0), np.quantile(samples, 1.0 - tail, axis = 0)


@dataclass
class SweepRow:
    """
    One line of a sweep summary: the L² error of one variant at one axis value.
    """
    axis : str
    value : int
    variant : EstimatorVariant
    seeds : int
    diverged : int
    target : np.ndarray
    error : np.ndarray
    ci_low : np.ndarray
    ci_high : np.ndarray

    def as_row(self) -> List[Any]:
        return [self.axis, self.value, self.variant.value, self.seeds, self.diverged] + [
            float(x) for block in (self.target, self.error, self.ci_low, self.ci_high) for x in block
        ]

    @staticmethod
    def header(p : int) -> List[str]:
        names = ["axis", "value", "variant", "seeds", "diverged"]
        for prefix in ("target", "l2", "ci_low", "ci_high"):
            names.extend(f"{prefix}_{index + 1}" for index in range(p))
        return names


def summarize(config : ExperimentConfig, traces : Sequence[RunTrace], axis : str = "", value : int = 0) -> List[SweepRow]:
    """
    L² error rows, one per variant, of the traces of a single configuration.
    """
    target = resolve_target(config)
    rows = []
    for variant in config.variants:
        low, high = bootstrap_interval(traces, target, config.window, variant)
        rows.append(SweepRow(
            axis = axis,
            value = value,
            variant = variant,
            seeds = len(traces),
            diverged = sum(x.status is RunStatus.DIVERGED for x in traces),
            target = target,
            error = l2_error(traces, target, config.window, variant),
            ci_low = low,
            ci_high = high
        ))
    return rows


def _with_axis(config : ExperimentConfig, axis : str, value : int) -> ExperimentConfig:
    data = config.to_dict()
    data[axis] = value
    return ExperimentConfig.from_dict(data)


def sweep(
    config : ExperimentConfig,
    axis : str,
    values : Sequence[int],
    concurrency : Optional[int] = None,
    traces_out : Optional[dict] = None
) -> List[SweepRow]:
    """
    Runs the configuration once per axis value and summarises the L² error of each variant
    against the configured target (resolved per value, since pseudo-true values depend on N).

    Args:
        config:
            The base configuration.
        axis:
            `"N"` or `"M"`.
        values:
            Positive integers, in the order the rows are emitted.
        traces_out:
            If given, receives the traces of each value keyed by the value.

    Returns:
        One row per value and variant, ordered by value then by variant.

    Raises:
        UsageError: if the axis is unknown or `values` is empty or not positive.
    """
    if axis not in ("N", "M"):
        raise UsageError(f"sweep axis must be 'N' or 'M', got {axis!r}")
    if not values or any(int(x) < 1 for x in values):
        raise UsageError("sweep values must be a non-empty list of positive integers")
    configs = [_with_axis(config, axis, int(x)) for x in values]
    experiments = [
        Experiment(item, name = f"{config.name or 'sweep'}[{axis}={value}]", concurrency = concurrency)
        for value, item in zip(values, configs)
    ]

    async def execute() -> None:
        await asyncio.gather(*(x.run() for x in experiments))

    asyncio.run(execute())
    rows = []
    for value, item, experiment in zip(values, configs, experiments):
        experiment.raise_for_status()
        if traces_out is not None:
            traces_out[int(value)] = experiment.traces
        logger.info("sweep %s=%d done (config %s)", axis, value, config_hash(item))
        rows.extend(summarize(item, experiment.traces, axis, int(value)))
    return rows
