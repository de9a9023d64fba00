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

__all__ = ["QuadraticModel"]

from typing import Optional
import numpy as np
from pysgdct.model import ModelSpec, ParamVec


@ModelSpec.register("quadratic")
class QuadraticModel(ModelSpec):
    """
    One-dimensional particles with quadratic confinement and quadratic interaction,

        b(θ, x, y) = -θ₁ x - θ₂ (x - y),

    so `θ₁` pulls every particle towards zero and `θ₂` towards the others.
    Only the sum `θ₁ + θ₂` is identified by the mean-field objective.
    """
    d = 1
    p = 2
    parameter_names = ("confinement", "interaction")

    def drift(self, theta : ParamVec, x : np.ndarray, y : np.ndarray) -> np.ndarray:
        return -theta[0] * x - theta[1] * (x - y)

    def drift_dtheta(self, theta : ParamVec, x : np.ndarray, y : np.ndarray) -> np.ndarray:
        x, y = np.broadcast_arrays(x, y)
        return np.stack([-x, -(x - y)], axis = -2)

    def drift_dx(self, theta : ParamVec, x : np.ndarray, y : np.ndarray) -> np.ndarray:
        shape = np.broadcast_shapes(np.shape(x), np.shape(y))[:-1]
        return np.full(shape + (1, 1), -(theta[0] + theta[1]))

    def drift_dy(self, theta : ParamVec, x : np.ndarray, y : np.ndarray) -> np.ndarray:
        shape = np.broadcast_shapes(np.shape(x), np.shape(y))[:-1]
        return np.full(shape + (1, 1), float(theta[1]))

    def stability_rate(self, theta : ParamVec) -> Optional[float]:
        return float(theta[0] + theta[1])
