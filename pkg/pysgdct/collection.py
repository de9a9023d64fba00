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

__all__ = ["Registry"]

from collections import UserDict
from typing import Generic, List, TypeVar
from pysgdct.utils import pattern_match

T = TypeVar("T")


class Registry(UserDict, Generic[T]):
    """
    A dict object that based on UserDict with name lookups. Keys are always
    stored in lowercase, so lookups are case insensitive.
    """
    def __setitem__(self, key : str, value : T) -> None:
        self.data[key.lower()] = value

    def __getitem__(self, key : str) -> T:
        return self.data[key.lower()]

    def __contains__(self, key : object) -> bool:
        return isinstance(key, str) and key.lower() in self.data

    def match_all(self, pattern : str, strict : bool = True) -> List[T]:
        """
        Returns a list of items whose names match the specified wildcard (glob) pattern,
        in registration order.
        """
        return [v for k, v in self.data.items() if pattern_match(k, pattern.lower(), strict = strict)]

    def names(self) -> List[str]:
        return list(self.data.keys())
