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
    "SgdctError",
    "UsageError",
    "NumericInputError",
    "ConfigError",
    "DivergenceError",
    "StabilityWarning",
    "RobbinsMonroWarning"
]

from typing import Any, Optional, Sequence, TYPE_CHECKING
import numpy as np
from pysgdct.enums import RunStatus

if TYPE_CHECKING:
    from pysgdct.estimators import EstimatorState


class SgdctError(Exception):
    """
    Base class of every error raised by pysgdct. Like the status codes of a run,
    each error carries a [`RunStatus`][pysgdct.enums.RunStatus] so that the
    harness can record why a run stopped.
    """
    status : RunStatus = RunStatus.UNHANDLED_EXCEPTION

    def __init__(self, message : str, *args) -> None:
        self.message = message
        super().__init__(message, *args)

    @property
    def text(self) -> str:
        return f"{self.status.name} ({self.status.value})" + "\n" + self.message

    def __str__(self) -> str:
        return self.message


class UsageError(SgdctError, ValueError):
    """
    Raised when an operation is called with arguments that break its contract:
    mismatching shapes, out of range indices, non-positive time steps and so on.
    """
    status = RunStatus.INVALID_ARGUMENT


class NumericInputError(SgdctError, ValueError):
    """
    Raised when a kernel receives NaN or infinite inputs.
    """
    status = RunStatus.INVALID_ARGUMENT


class ConfigError(UsageError):
    """
    Raised when an experiment configuration can't be loaded.

    Attributes:
        field:
            Dotted path of the offending field, for example `learning_rate.c`.
    """

    def __init__(self, field : str, message : str) -> None:
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)


class DivergenceError(SgdctError, ArithmeticError):
    """
    Raised when the parameter estimate becomes non-finite.

    Attributes:
        step:
            Index of the step that produced the non-finite value.
        time:
            Elapsed time of the estimator at that step.
        theta:
            The (finite) estimate before the failing update.
        delta:
            The non-finite increment.
        last_state:
            The last good [`EstimatorState`][pysgdct.estimators.EstimatorState], if known.
    """
    status = RunStatus.DIVERGED

    def __init__(
        self,
        step : Optional[int],
        time : Optional[float],
        theta : Sequence[float],
        delta : Sequence[float],
        last_state : Optional["EstimatorState"] = None
    ) -> None:
        self.step = step
        self.time = time
        self.theta = np.asarray(theta, dtype = float)
        self.delta = np.asarray(delta, dtype = float)
        self.last_state = last_state
        super().__init__(
            f"non-finite parameter increment{_where(step, time)}: "
            f"theta={self.theta.tolist()} delta={self.delta.tolist()}"
        )

    def with_state(self, state : Any) -> "DivergenceError":
        self.last_state = state
        return self


class StabilityWarning(RuntimeWarning):
    """
    Emitted when the explicit Euler step is outside its mean-square stability region.
    """


class RobbinsMonroWarning(UserWarning):
    """
    Emitted when a polynomial learning rate exponent is outside (0.5, 1].
    """


def _where(step : Optional[int], time : Optional[float]) -> str:
    if step is None:
        return ""
    return f" at step {step}" + ("" if time is None else f" (t={time:g})")
