# -*- coding: utf-8 -*-
# cython: language_level=3
# Copyright (c) 2023-present the kakeya-lab developers
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
# SOFTWARE

import numpy as np
from attrs import define, field

from ..errors import DomainError

__all__ = ['BumpProfile', 'phi_hat']


def _transition(u: np.ndarray) -> np.ndarray:
    # exp(-1/u) for u > 0, zero otherwise
    out = np.zeros_like(u)
    positive = u > 0
    out[positive] = np.exp(-1.0 / u[positive])
    return out


def _check_radii(instance: 'BumpProfile', attribute, value: float) -> None:
    if not 0 < instance.inner < instance.outer:
        raise DomainError(f'profile needs 0 < inner < outer, got {instance.inner} and {instance.outer}')


@define(frozen=True)
class BumpProfile:
    """Smooth radial cut-off equal to 1 on ``[0, inner]`` and 0 on ``[outer, inf)``.

    The bridge is ``g(b - r) / (g(b - r) + g(r - a))`` with ``g(u) = exp(-1/u)`` after
    mapping ``[inner, outer]`` onto ``[0, 1]``. It is symmetric about the midpoint, where
    it takes the value 1/2, and every derivative vanishes at both ends.
    """

    inner: float = field(default=1.0, converter=float)
    outer: float = field(default=2.0, converter=float, validator=_check_radii)

    def __call__(self, r) -> np.ndarray:
        u = (np.asarray(r, dtype=np.float64) - self.inner) / (self.outer - self.inner)
        u = np.atleast_1d(u)
        rising = _transition(u)
        falling = _transition(1.0 - u)
        value = falling / (falling + rising)
        return value.reshape(np.shape(r))

    def symbol(self, xi: np.ndarray) -> np.ndarray:
        """``psi(|xi|)`` for frequency vectors stored along the last axis."""
        return self(np.linalg.norm(xi, axis=-1))


DEFAULT_PROFILE = BumpProfile()


def phi_hat(xi: np.ndarray) -> np.ndarray:
    """The radial bump symbol: 1 on the unit ball, 0 outside the ball of radius 2."""
    return DEFAULT_PROFILE.symbol(np.asarray(xi, dtype=np.float64))
