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
    "pattern_match",
    "parse_values",
    "field_path",
    "wrap_angle",
    "relative_error",
    "is_finite"
]

from typing import Any, List, Sequence, Union
import math
import re
import numpy as np


def pattern_match(item : str, pattern : str, strict : bool = True) -> bool:
    """
    Check if item matches with the pattern that contains
    "*" wildcards and "?" question marks.

    Args:
        item:
            The string that pattern will be applied to.
        pattern:
            A wildcard (glob) pattern.
        strict:
            If `True`, then the whole `item` must match. So applying "fig?" pattern
            on "fig1a" will result in `False`. Default is `True`.

    Returns:
        A boolean value.
    """
    _ptn = re.escape(pattern).replace(r"\*", ".*").replace(r"\?", ".")
    _match = re.match(_ptn, item)
    if strict and bool(_match):
        return _match.group(0) == item
    return bool(_match)


def parse_values(value : str) -> List[int]:
    """
    Parses a comma separated list of positive integers, like `5,10,20`.

    Args:
        value:
            The string given on the command line.

    Returns:
        The list of integers, in the given order.

    Raises:
        ValueError: if the string is empty or contains non positive integers.
    """
    items = [x.strip() for x in value.split(",") if x.strip()]
    if not items:
        raise ValueError("expected a comma separated list of integers")
    values = [int(x) for x in items]
    if any(x < 1 for x in values):
        raise ValueError(f"values must be positive integers, got {value!r}")
    return values


def field_path(loc : Sequence[Union[str, int]]) -> str:
    """
    Joins a validation error location into a dotted path, so `("truth", 0, "theta")`
    becomes `truth.0.theta`.
    """
    return ".".join(str(x) for x in loc)


def wrap_angle(x : Any) -> np.ndarray:
    """
    Maps angles into the half-open interval [-π, π).
    """
    wrapped = np.mod(np.asarray(x, dtype = float) + math.pi, 2.0 * math.pi) - math.pi
    # np.mod may round a value just below 2π up to 2π.
    return np.where(wrapped >= math.pi, wrapped - 2.0 * math.pi, wrapped)


def relative_error(value : Any, reference : Any) -> float:
    """
    Max-norm relative error of `value` against `reference`. Two zero arrays have zero error.
    """
    value = np.asarray(value, dtype = float)
    reference = np.asarray(reference, dtype = float)
    diff = float(np.max(np.abs(value - reference), initial = 0.0))
    scale = float(np.max(np.abs(reference), initial = 0.0))
    if diff == 0.0:
        return 0.0
    if scale == 0.0:
        return math.inf
    return diff / scale


def is_finite(value : Any) -> bool:
    return bool(np.all(np.isfinite(value)))
