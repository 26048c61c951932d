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

"""Littlewood-Paley families and their tube adapted (anisotropic) variants.

Two radial families are built from the bump profile ``psi``:

* ``dyadic``: ``Phi_0 = phi``, ``Phi_k(xi) = phi(2^-k xi) - phi(2^(1-k) xi)``
* ``eps_scaled``: ``Psi_0 = phi``, ``Psi_k(xi) = phi(delta^(k eps) xi) - phi(delta^((k-1) eps) xi)``

Both telescope to one. The bold variant of a symbol ``S`` is ``S(delta xi_1, ..., delta xi_(n-1), xi_n)``.
"""
import logging
import math
from typing import Callable, Literal

import numpy as np
from attrs import define, field

from ..errors import DomainError, RegimeError
from ..grid import GridShape
from .profile import BumpProfile

__all__ = ['Family', 'FilterBank', 'anisotropic_symbol', 'TRUNCATION_FLOOR']

_log = logging.getLogger(__name__)

Family = Literal['dyadic', 'eps_scaled']

TRUNCATION_FLOOR = 1e-6


def _check_delta(_, attribute, value: float) -> None:
    if not 0 < value < 1:
        raise DomainError(f'{attribute.name} must lie in (0, 1), got {value}')


def _check_eps(_, attribute, value: float) -> None:
    if not (math.isfinite(value) and value > 0):
        raise DomainError(f'{attribute.name} must be positive, got {value}')


@define(frozen=True)
class FilterBank:
    """Frequency symbols for fixed ``(delta, eps)`` on one grid.

    The bank itself accepts any ``delta`` and ``eps``; the reconstruction machinery
    calls :meth:`require_regime` to insist on ``delta^eps <= 1/2``.
    """

    delta: float = field(converter=float, validator=_check_delta)
    eps: float = field(converter=float, validator=_check_eps)
    grid: GridShape
    profile: BumpProfile = field(factory=BumpProfile)

    @property
    def dim(self) -> int:
        return self.grid.dim

    @property
    def base(self) -> float:
        """``delta^eps``, the ratio between consecutive ``eps_scaled`` annuli."""
        return self.delta**self.eps

    @property
    def in_regime(self) -> bool:
        return self.base <= 0.5 + 1e-15

    def require_regime(self) -> None:
        if not self.in_regime:
            raise RegimeError(f'delta^eps = {self.base:.6g} exceeds 1/2 (delta={self.delta}, eps={self.eps})')

    @property
    def s(self) -> int:
        """The integer with ``2^s < delta^(-2 eps) <= 2^(s+1)``."""
        target = self.delta ** (-2 * self.eps)
        s = max(int(math.floor(math.log2(target))), 0)
        while s > 0 and 2.0**s >= target:
            s -= 1
        while 2.0 ** (s + 1) < target:
            s += 1
        return s

    @property
    def eta0_top(self) -> int:
        """Last dyadic index of the low frequency sum.

        ``phi(2^-k xi)`` must cover ``supp(Psi_0 + Psi_1) = {|xi| <= 2 delta^-eps}``, which
        ``k = s`` alone does not guarantee near the regime edge.
        """
        cover = 2.0 / self.base
        top = 0
        while 2.0**top < cover * (1 - 1e-12):
            top += 1
        return max(self.s, top)

    @property
    def max_frequency(self) -> float:
        """Largest ``|xi|`` over the grid frequencies, which bounds ``|A xi|`` for any rotation."""
        return math.sqrt(self.dim) * self.grid.nyquist

    def k_cover(self, radius: float) -> int:
        """Smallest ``k >= 2`` past which ``Psi_k`` vanishes up to ``radius`` or drops below the floor."""
        k = 2
        while True:
            if self.base ** (k * 1.0) < TRUNCATION_FLOOR:
                return k
            if self.base ** (-(k - 1)) > radius:
                return k
            k += 1

    @property
    def k_max(self) -> int:
        return self.k_cover(self.max_frequency)

    # symbols

    def _scaled_profile(self, scale: float, radius: np.ndarray) -> np.ndarray:
        return self.profile(scale * radius)

    def radial_symbol(self, family: Family, k: int, radius: np.ndarray) -> np.ndarray:
        """Family member ``k`` as a function of the (possibly anisotropic) radius."""
        if k < 0:
            raise DomainError(f'k must be nonnegative, got {k}')
        radius = np.asarray(radius, dtype=np.float64)
        if k == 0:
            return self._scaled_profile(1.0, radius)
        if family == 'dyadic':
            return self._scaled_profile(2.0**-k, radius) - self._scaled_profile(2.0 ** (1 - k), radius)
        if family == 'eps_scaled':
            return self._scaled_profile(self.base**k, radius) - self._scaled_profile(self.base ** (k - 1), radius)
        raise DomainError(f'unknown family {family!r}')

    def lp_symbol(self, family: Family, k: int, xi: np.ndarray) -> np.ndarray:
        return self.radial_symbol(family, k, np.linalg.norm(xi, axis=-1))

    def anisotropic(self, xi: np.ndarray) -> np.ndarray:
        """``(delta xi_1, ..., delta xi_(n-1), xi_n)``."""
        weights = np.full(np.shape(xi)[-1], self.delta)
        weights[-1] = 1.0
        return np.asarray(xi, dtype=np.float64) * weights

    def bold_symbol(self, family: Family, k: int, xi: np.ndarray) -> np.ndarray:
        return self.radial_symbol(family, k, np.linalg.norm(self.anisotropic(xi), axis=-1))

    def support(self, family: Family, k: int) -> tuple[float, float]:
        """Inner and outer radius of member ``k``; the inner radius of ``k = 0`` is 0."""
        inner, outer = self.profile.inner, self.profile.outer
        if k == 0:
            return 0.0, outer
        if family == 'dyadic':
            return inner * 2.0 ** (k - 1), outer * 2.0**k
        return inner * self.base ** (-(k - 1)), outer * self.base ** (-k)

    def phi_at_scale(self, scale: float, xi: np.ndarray) -> np.ndarray:
        """``phi(scale xi)``."""
        return self.profile(scale * np.linalg.norm(xi, axis=-1))


def anisotropic_symbol(
    bank: FilterBank, base: Callable[[np.ndarray], np.ndarray], xi: np.ndarray
) -> np.ndarray:
    """Evaluate ``base`` at ``(delta xi_1, ..., delta xi_(n-1), xi_n)``."""
    return base(bank.anisotropic(xi))
