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

__all__ = ["KuramotoModel"]

import numpy as np
from pysgdct.model import ModelSpec, ParamVec


@ModelSpec.register("kuramoto")
class KuramotoModel(ModelSpec):
    """
    Noisy phase oscillators on the circle coupled through their phase differences,

        b(θ, x, y) = -θ sin(x - y),

    with `θ` the coupling strength. For unit noise the mean-field limit synchronises
    once `θ` exceeds the critical value `σ²`.
    """
    d = 1
    p = 1
    parameter_names = ("coupling",)
    torus_flags = (True,)

    def drift(self, theta : ParamVec, x : np.ndarray, y : np.ndarray) -> np.ndarray:
        return -theta[0] * np.sin(x - y)

    def drift_dtheta(self, theta : ParamVec, x : np.ndarray, y : np.ndarray) -> np.ndarray:
        return (-np.sin(x - y))[..., None, :]

    def drift_dx(self, theta : ParamVec, x : np.ndarray, y : np.ndarray) -> np.ndarray:
        return (-theta[0] * np.cos(x - y))[..., None, :]

    def drift_dy(self, theta : ParamVec, x : np.ndarray, y : np.ndarray) -> np.ndarray:
        return (theta[0] * np.cos(x - y))[..., None, :]
