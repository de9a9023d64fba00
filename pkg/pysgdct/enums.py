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
    "RunStatus",
    "ExitCode",
    "Geometry",
    "WeightMode",
    "EstimatorVariant",
    "LearningRateKind",
    "RateClock",
    "IndexPolicy",
    "StreamId"
]

from enum import Enum, IntEnum


class RunStatus(Enum):
    # The run has not executed yet.
    NONE = -1
    # Exited without any errors.
    DONE = 0
    # θ became non-finite, the trace has been truncated.
    DIVERGED = 100
    # All general unexpected errors.
    UNHANDLED_EXCEPTION = 101
    # Invalid argument, configuration or shape.
    INVALID_ARGUMENT = 103


class ExitCode(IntEnum):
    OK = 0
    DIVERGED = 1
    USAGE = 2


class Geometry(str, Enum):
    FLAT = "flat"
    TORUS = "torus"


class WeightMode(str, Enum):
    # W = (σσᵀ)⁻¹, requires an invertible σ.
    LIKELIHOOD = "likelihood"
    IDENTITY = "identity"
    # Diagonal indicator of the coordinates driven by noise.
    NOISE_SUPPORT = "noise-support"


class EstimatorVariant(str, Enum):
    AVERAGED = "averaged"
    PARTICLEWISE = "particlewise"

    @property
    def column_prefix(self) -> str:
        """
        Prefix of the trace CSV columns holding this variant's estimate.
        """
        return "theta" if self is EstimatorVariant.AVERAGED else "vartheta"


class LearningRateKind(str, Enum):
    POLYNOMIAL = "polynomial"
    CONSTANT = "constant"


class RateClock(str, Enum):
    # γ is evaluated at the step count.
    ITERATION = "iteration"
    # γ is evaluated at the elapsed time step·dt.
    TIME = "time"


class IndexPolicy(str, Enum):
    FIXED = "fixed"
    RESAMPLE = "resample"


class StreamId(IntEnum):
    """
    Stream identifiers of the random number streams used by one seed. Each
    variant owns its own three virtual streams, so both variants share the
    observed path and the initial estimate but never their virtual noise.
    """
    OBSERVED = 0
    THETA_INIT = 1
    AVERAGED_HAT = 2
    AVERAGED_TILDE = 3
    AVERAGED_INDEX = 4
    PARTICLEWISE_HAT = 5
    PARTICLEWISE_TILDE = 6
    PARTICLEWISE_INDEX = 7

    @classmethod
    def for_variant(cls, variant : EstimatorVariant) -> "tuple[StreamId, StreamId, StreamId]":
        """
        Returns the (hat, tilde, index) stream ids of an estimator variant.
        """
        if variant is EstimatorVariant.AVERAGED:
            return cls.AVERAGED_HAT, cls.AVERAGED_TILDE, cls.AVERAGED_INDEX
        return cls.PARTICLEWISE_HAT, cls.PARTICLEWISE_TILDE, cls.PARTICLEWISE_INDEX
