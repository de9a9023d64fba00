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
Configurations of the published numerical studies, one preset per figure panel.
Trajectory figures run 5 seeds; L² error sweeps run 20 seeds per axis value.
"""

__all__ = ["Preset", "FigureResult", "PRESETS", "get_preset", "match_presets", "replicate_figure"]

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union
import copy
import logging
from pysgdct.collection import Registry
from pysgdct.config import ExperimentConfig, config_hash, dump_config
from pysgdct.enums import RunStatus
from pysgdct.errors import UsageError
from pysgdct.experiment import SweepRow, run_experiment, summarize, sweep
from pysgdct.output import write_long_csv, write_summary_csv, write_trace_csv

logger = logging.getLogger(__name__)


@dataclass(frozen = True)
class Preset:
    """
    A figure panel: its configuration and, for L² error panels, the swept axis.
    """
    id : str
    description : str
    data : Dict[str, Any]
    axis : Optional[str] = None
    values : Tuple[int, ...] = ()

    def config(self, scale : float = 1.0) -> ExperimentConfig:
        data = copy.deepcopy(self.data)
        data.setdefault("name", self.id)
        return ExperimentConfig.from_dict(data).scaled(scale)


@dataclass
class FigureResult:
    figure : str
    directory : Path
    rows : List[SweepRow] = field(default_factory = list)
    diverged : int = 0


PRESETS : Registry = Registry()


def _register(preset : Preset) -> None:
    PRESETS[preset.id] = preset


QUADRATIC_TRUTH = [1.2, 0.5]
FHN_TRUTH = [0.9, 0.4, 0.1, 1.0]


def _quadratic(free : Tuple[bool, bool], **overrides) -> Dict[str, Any]:
    # Known coordinates start (and stay) at their true value.
    low = [1.5 if free[0] else QUADRATIC_TRUTH[0], 1.0 if free[1] else QUADRATIC_TRUTH[1]]
    high = [2.5 if free[0] else QUADRATIC_TRUTH[0], 1.5 if free[1] else QUADRATIC_TRUTH[1]]
    data = {
        "model": {"name": "quadratic", "sigma": 1.0},
        "N": 100,
        "M": 20,
        "dt": 0.1,
        "steps": 2000,
        "truth": [{"until_step": 2000, "theta": QUADRATIC_TRUTH}],
        "initial_law": {"kind": "gaussian", "mean": [0.0], "sd": [1.0]},
        "theta_init": {"kind": "uniform", "low": low, "high": high},
        "mask": list(free),
        "learning_rate": {"kind": "polynomial", "c": 1.0, "beta": 0.55},
        "seeds": list(range(5))
    }
    data.update(overrides)
    if data["steps"] != data["truth"][-1]["until_step"]:
        data["truth"] = [{"until_step": data["steps"], "theta": QUADRATIC_TRUTH}]
    return data


for panel, free, label in (("a", (True, False), "theta_1 only"), ("b", (False, True), "theta_2 only"), ("c", (True, True), "both parameters")):
    _register(Preset(f"fig1{panel}", f"quadratic model, N=100, {label}", _quadratic(free)))

for panel, n in zip("abcd", (2, 5, 10, 100)):
    _register(Preset(
        f"fig2{panel}",
        f"quadratic model, theta_2 only, N={n}",
        _quadratic((False, True), N = n, target = "pseudo")
    ))

for panel, free in (("a", (True, False)), ("b", (False, True))):
    _register(Preset(
        f"fig3{panel}",
        f"quadratic model, L2 error against N, theta_{1 if free[0] else 2} only",
        _quadratic(free, N = 3, steps = 50000, seeds = list(range(20)), record_stride = 50),
        axis = "N",
        values = (3, 5, 10, 25, 50)
    ))
    _register(Preset(
        f"fig4{panel}",
        f"quadratic model, L2 error against M, theta_{1 if free[0] else 2} only",
        _quadratic(free, M = 5, steps = 50000, seeds = list(range(20)), record_stride = 50),
        axis = "M",
        values = (5, 10, 20, 30, 40, 50)
    ))

for panel, n in zip("abcdef", (3, 5, 10, 20, 50, 100)):
    _register(Preset(f"fig5{panel}", f"FitzHugh-Nagumo model, N={n}, theta_4 known", {
        "model": {"name": "fitzhugh-nagumo", "sigma": 1.0},
        "N": n,
        "M": 20,
        "dt": 0.1,
        "steps": 5000,
        "truth": [{"until_step": 5000, "theta": FHN_TRUTH}],
        "initial_law": {"kind": "gaussian", "mean": [0.0, 0.0], "sd": [1.0, 1.0]},
        "theta_init": {"kind": "uniform", "low": [0.0, 0.5, 0.0, 1.0], "high": [0.5, 1.0, 0.5, 1.0]},
        "mask": [True, True, True, False],
        "learning_rate": {"kind": "polynomial", "c": 0.5, "beta": 0.55},
        "seeds": list(range(5))
    }))

for panel, n in zip("abc", (3, 10, 50)):
    _register(Preset(f"fig6{panel}", f"Kuramoto model, N={n}, coupling switches from 1.5 to 0.2", {
        "model": {"name": "kuramoto", "sigma": 1.0},
        "N": n,
        "M": 20,
        "dt": 0.1,
        "steps": 10000,
        "truth": [{"until_step": 5000, "theta": [1.5]}, {"until_step": 10000, "theta": [0.2]}],
        "initial_law": {"kind": "gaussian", "mean": [0.0], "sd": [1.0]},
        "theta_init": {"kind": "uniform", "low": [2.0], "high": [3.0]},
        "learning_rate": {"kind": "constant", "c": 0.02},
        "seeds": list(range(5))
    }))


def get_preset(figure : str) -> Preset:
    """
    Raises:
        UsageError: if there is no preset with that id.
    """
    if figure not in PRESETS:
        raise UsageError(f"unknown figure '{figure}', available: {', '.join(PRESETS.names())}")
    return PRESETS[figure]


def match_presets(pattern : str) -> List[Preset]:
    """
    Presets whose id matches a wildcard pattern such as `fig2*`.

    Raises:
        UsageError: if nothing matches.
    """
    matched = PRESETS.match_all(pattern)
    if not matched:
        raise UsageError(f"no figure matches '{pattern}', available: {', '.join(PRESETS.names())}")
    return matched


def replicate_figure(
    figure : str,
    out_dir : Union[str, Path],
    scale : float = 1.0,
    concurrency : Optional[int] = None
) -> List[FigureResult]:
    """
    Runs the presets matching `figure` and writes, per preset, into `out_dir/<id>/`:
    the effective configuration, one trace CSV per seed (and per axis value for
    sweeps), an L² summary and a plot-ready long-format file.

    Args:
        figure:
            A preset id such as `fig1c`, or a wildcard pattern such as `fig2*`.
        out_dir:
            Output directory, created if missing.
        scale:
            Multiplies the number of steps, the truth switch points and the number of seeds.

    Raises:
        UsageError: if the figure is unknown or the directory can't be written.
    """
    results = []
    for preset in match_presets(figure):
        config = preset.config(scale)
        directory = Path(out_dir) / preset.id
        try:
            directory.mkdir(parents = True, exist_ok = True)
            dump_config(config, directory / "config.json")
        except OSError as exc:
            raise UsageError(f"can't write '{directory}': {exc.strerror}") from None
        meta = {"figure": preset.id, "config_hash": config_hash(config), "scale": scale}
        logger.info("replicating %s (%s)", preset.id, preset.description)
        if preset.axis is None:
            traces = run_experiment(config, concurrency = concurrency)
            groups = {"": traces}
            for trace in traces:
                write_trace_csv(trace, directory / f"trace_seed{trace.seed}.csv")
            rows = summarize(config, traces)
        else:
            groups = {}
            rows = sweep(config, preset.axis, preset.values, concurrency = concurrency, traces_out = groups)
            for value, traces in groups.items():
                for trace in traces:
                    write_trace_csv(trace, directory / f"trace_{preset.axis}{value}_seed{trace.seed}.csv")
        write_summary_csv(rows, directory / "summary.csv", meta)
        write_long_csv(groups, directory / "long.csv", meta)
        diverged = sum(x.status is RunStatus.DIVERGED for traces in groups.values() for x in traces)
        results.append(FigureResult(preset.id, directory, rows, diverged))
    return results
