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

__all__ = ["FitzHughNagumoModel"]

import numpy as np
from pysgdct.enums import WeightMode
from pysgdct.model import ModelSpec, ParamVec


@ModelSpec.register("fitzhugh-nagumo")
class FitzHughNagumoModel(ModelSpec):
    """
    FitzHugh-Nagumo neurons with state `(v, w)` (voltage, recovery) coupled through
    their voltages by electrical synapses:

        b₁ = θ₁ (v - v³/3 - w) - θ₂ (v - v')
        b₂ = v + θ₃ - θ₄ w

    where `v'` is the partner's voltage. Only the voltage is driven by noise, so the
    model is degenerate and the updates use the identity weight by default, which lets
    the recovery residual inform `θ₃` and `θ₄` directly. Use `weight="noise-support"`
    for a voltage-only residual.
    """
    d = 2
    p = 4
    parameter_names = ("excitability", "coupling", "offset", "recovery")
    noise_pattern = ((1.0, 0.0), (0.0, 0.0))
    torus_flags = (False, False)
    default_weight = WeightMode.IDENTITY

    def drift(self, theta : ParamVec, x : np.ndarray, y : np.ndarray) -> np.ndarray:
        x, y = np.broadcast_arrays(x, y)
        v, w = x[..., 0], x[..., 1]
        voltage = theta[0] * (v - v ** 3 / 3.0 - w) - theta[1] * (v - y[..., 0])
        recovery = v + theta[2] - theta[3] * w
        return np.stack([voltage, recovery], axis = -1)

    def drift_dtheta(self, theta : ParamVec, x : np.ndarray, y : np.ndarray) -> np.ndarray:
        x, y = np.broadcast_arrays(x, y)
        v, w = x[..., 0], x[..., 1]
        out = np.zeros(v.shape + (4, 2))
        out[..., 0, 0] = v - v ** 3 / 3.0 - w
        out[..., 1, 0] = -(v - y[..., 0])
        out[..., 2, 1] = 1.0
        out[..., 3, 1] = -w
        return out

    def drift_dx(self, theta : ParamVec, x : np.ndarray, y : np.ndarray) -> np.ndarray:
        x, _ = np.broadcast_arrays(x, y)
        v = x[..., 0]
        out = np.zeros(v.shape + (2, 2))
        out[..., 0, 0] = theta[0] * (1.0 - v ** 2) - theta[1]
        out[..., 0, 1] = 1.0
        out[..., 1, 0] = -theta[0]
        out[..., 1, 1] = -theta[3]
        return out

    def drift_dy(self, theta : ParamVec, x : np.ndarray, y : np.ndarray) -> np.ndarray:
        shape = np.broadcast_shapes(np.shape(x), np.shape(y))[:-1]
        out = np.zeros(shape + (2, 2))
        out[..., 0, 0] = theta[1]
        return out
