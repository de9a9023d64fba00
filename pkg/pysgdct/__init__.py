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
    "RunStatus", "ExitCode", "EstimatorVariant", "WeightMode", "StreamId",
    "SgdctError", "UsageError", "NumericInputError", "ConfigError", "DivergenceError",
    "StabilityWarning", "RobbinsMonroWarning",
    "ModelSpec", "drift_kernel", "drift_kernel_dtheta", "drift_kernel_dx", "drift_kernel_dy",
    "RngStream", "InitialLaw", "TruthSchedule", "euler_ips_step", "euler_tangent_step", "simulate_observed",
    "LearningRate", "EstimatorState", "learning_rate", "averaged_increment", "particlewise_increment", "estimator_step",
    "QuadraticTruth", "OracleReport", "mf_objective_quadratic", "finite_n_objective_quadratic", "pseudo_targets",
    "stationary_moments_quadratic", "fd_tangent_check", "rao_blackwell_check",
    "ExperimentConfig", "load_config", "config_hash", "RunTrace", "Experiment",
    "run_experiment", "l2_error", "sweep", "write_trace_csv", "replicate_figure"
]

from pysgdct.enums import RunStatus, ExitCode, EstimatorVariant, WeightMode, StreamId
from pysgdct.errors import (
    SgdctError, UsageError, NumericInputError, ConfigError, DivergenceError,
    StabilityWarning, RobbinsMonroWarning
)
from pysgdct.model import ModelSpec, drift_kernel, drift_kernel_dtheta, drift_kernel_dx, drift_kernel_dy
# Registers the built-in models.
import pysgdct.models
from pysgdct.dynamics import RngStream, InitialLaw, TruthSchedule, euler_ips_step, euler_tangent_step, simulate_observed
from pysgdct.estimators import (
    LearningRate, EstimatorState, learning_rate, averaged_increment, particlewise_increment, estimator_step
)
from pysgdct.oracle import (
    QuadraticTruth, OracleReport, mf_objective_quadratic, finite_n_objective_quadratic, pseudo_targets,
    stationary_moments_quadratic, fd_tangent_check, rao_blackwell_check
)
from pysgdct.config import ExperimentConfig, load_config, config_hash
from pysgdct.run import RunTrace
from pysgdct.experiment import Experiment, run_experiment, l2_error, sweep
from pysgdct.output import write_trace_csv
from pysgdct.presets import replicate_figure
