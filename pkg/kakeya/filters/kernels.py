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

"""Band kernels of the anisotropic decomposition and their resummation.

``eta1[k] = Psi_k(bold) * Upsilon_I`` for ``k >= 2`` and
``eta0[k] = (Psi_0 + Psi_1)(bold) * Phi_k(bold) * Upsilon_I`` for ``0 <= k <= eta0_top``, where
``Upsilon_I(xi) = Upsilon(delta xi_1, ..., delta xi_(n-1), xi_n)``. Each kernel comes with a
smoothing scale ``c`` such that ``phi(c xi) = 1`` on its support, so

    Upsilon_I = sum_k eta0[k] phi(2^-(k+1) delta xi) + sum_k eta1[k] phi(delta^(1+(k+3) eps) xi)

holds exactly on the grid.
"""
import logging
import warnings
from typing import Callable, Literal

import numpy as np
from attrs import define, field

from ..errors import DomainError, ResolutionWarning, ToleranceError
from ..grid import Field, GridShape, inverse_transform, SpectralField
from .bank import Family, FilterBank
from .dictionary import TestFunction

__all__ = [
    'BandKernel',
    'ReconstructionReport',
    'phi_field',
    'eta1_kernel',
    'eta0_kernel',
    'reconstruct',
    'tube_test_symbol',
    'tube_test_kernel',
    'check_resolved',
    'eta0_symbol',
    'eta1_symbol',
    'eta0_scale',
    'eta1_scale',
    'kernel_mass',
    'kernel_l1_mass',
    'BandRow',
    'BAND_COLUMNS',
    'band_top',
    'band_field',
    'band_table',
    'SUPPORT_THRESHOLD',
    'DIVISOR_TOLERANCE',
]

_log = logging.getLogger(__name__)

SUPPORT_THRESHOLD = 1e-12
DIVISOR_TOLERANCE = 1e-10
RESOLUTION_THRESHOLD = 1e-8
RECONSTRUCTION_TOLERANCE = 1e-8

Evaluator = Callable[[np.ndarray], np.ndarray]


def check_resolved(values: np.ndarray, grid: GridShape, what: str, *, warn: bool = True) -> bool:
    """Whether a sampled symbol is negligible on the Nyquist shell; warns unless told not to."""
    peak = float(np.max(np.abs(values), initial=0.0))
    edge = float(np.max(np.abs(values[grid.nyquist_shell()]), initial=0.0))
    if peak > 0 and edge > RESOLUTION_THRESHOLD * peak:
        if not warn:
            return False
        warnings.warn(
            f'{what} is not resolved below the Nyquist frequency {grid.nyquist:g} '
            f'(relative edge value {edge / peak:.2e})',
            ResolutionWarning,
            stacklevel=3,
        )
        return False
    return True


def phi_field(bank: FilterBank, t: float, grid: GridShape | None = None) -> Field:
    """``phi_t``, the inverse transform of ``phi(t xi)``."""
    if not t > 0:
        raise DomainError(f'phi_field needs t > 0, got {t}')
    grid = grid or bank.grid
    values = bank.phi_at_scale(t, grid.frequencies())
    check_resolved(values, grid, f'phi at scale {t:g}')
    return inverse_transform(SpectralField(values, grid.side_length))


@define(frozen=True, eq=False)
class BandKernel:
    """One band kernel: symbol evaluator, grid samples and the spatial field."""

    family: Literal['eta0', 'eta1']
    k: int
    symbol: Evaluator = field(repr=False)
    values: np.ndarray = field(repr=False)
    spatial: Field = field(repr=False)
    smoothing_scale: float
    """Scale ``c`` of the bump ``phi(c xi)`` that equals one on the kernel's support."""
    resolved: bool = True

    @property
    def empty(self) -> bool:
        return not np.any(np.abs(self.values) > SUPPORT_THRESHOLD)

    @property
    def l1_mass(self) -> float:
        return kernel_l1_mass(self.spatial)


def _upsilon_i(bank: FilterBank, upsilon: TestFunction) -> Evaluator:
    return lambda xi: upsilon.symbol(bank.anisotropic(xi))


def _assert_divisor(bank: FilterBank, values: np.ndarray, scale: float, label: str) -> None:
    xi = bank.grid.frequencies()
    support = np.abs(values) > SUPPORT_THRESHOLD
    if not np.any(support):
        return
    divisor = bank.phi_at_scale(scale, xi[support])
    worst = float(np.max(np.abs(divisor - 1.0)))
    if worst > DIVISOR_TOLERANCE:
        raise ToleranceError(
            f'{label}: divisor phi({scale:.6g} xi) deviates from 1 by {worst:.3e} on the kernel support',
            [{'kernel': label, 'scale': scale, 'deviation': worst}],
        )


def _materialize(bank: FilterBank, family: str, k: int, symbol: Evaluator, scale: float) -> BandKernel:
    grid = bank.grid
    values = symbol(grid.frequencies())
    label = f'{family}[{k}]'
    _assert_divisor(bank, values, scale, label)
    resolved = check_resolved(values, grid, label)
    spatial = inverse_transform(SpectralField(values, grid.side_length))
    return BandKernel(family, k, symbol, values, spatial, scale, resolved)


def eta1_symbol(bank: FilterBank, upsilon: TestFunction, k: int) -> Evaluator:
    upsilon_i = _upsilon_i(bank, upsilon)
    return lambda xi: bank.bold_symbol('eps_scaled', k, xi) * upsilon_i(xi)


def eta0_symbol(bank: FilterBank, upsilon: TestFunction, k: int) -> Evaluator:
    upsilon_i = _upsilon_i(bank, upsilon)

    def symbol(xi: np.ndarray) -> np.ndarray:
        low = bank.bold_symbol('eps_scaled', 0, xi) + bank.bold_symbol('eps_scaled', 1, xi)
        return low * bank.bold_symbol('dyadic', k, xi) * upsilon_i(xi)

    return symbol


def eta1_scale(bank: FilterBank, k: int) -> float:
    return bank.delta ** (1 + (k + 3) * bank.eps)


def eta0_scale(bank: FilterBank, k: int) -> float:
    return 2.0 ** -(k + 1) * bank.delta


def eta1_kernel(bank: FilterBank, upsilon: TestFunction, k: int) -> BandKernel:
    if k < 2:
        raise DomainError(f'eta1 kernels start at k = 2, got {k}')
    bank.require_regime()
    return _materialize(bank, 'eta1', k, eta1_symbol(bank, upsilon, k), eta1_scale(bank, k))


def eta0_kernel(bank: FilterBank, upsilon: TestFunction, k: int) -> BandKernel:
    if not 0 <= k <= bank.eta0_top:
        raise DomainError(f'eta0 kernels run over 0..{bank.eta0_top}, got {k}')
    bank.require_regime()
    return _materialize(bank, 'eta0', k, eta0_symbol(bank, upsilon, k), eta0_scale(bank, k))


@define(frozen=True)
class ReconstructionReport:
    member: str
    error: float
    """Sup over the grid of the resummed symbol minus ``Upsilon_I(A xi)``."""
    residual: float
    """Sup of the dropped tail ``Upsilon_I (1 - phi(delta^(k_max eps) xi~))``."""
    tolerance: float
    k_max: int
    eta0_top: int

    @property
    def passed(self) -> bool:
        return self.error <= self.tolerance + self.residual


def reconstruct(
    bank: FilterBank,
    upsilon: TestFunction,
    rotation: np.ndarray | None = None,
    *,
    tolerance: float = RECONSTRUCTION_TOLERANCE,
    raise_on_failure: bool = True,
) -> ReconstructionReport:
    """Resum the band kernels at ``A xi`` and compare against ``Upsilon_I(A xi)``."""
    bank.require_regime()
    xi = bank.grid.frequencies()
    points = xi if rotation is None else xi @ np.asarray(rotation, dtype=np.float64).T

    total = np.zeros(xi.shape[:-1], dtype=np.complex128)
    for k in range(bank.eta0_top + 1):
        total += eta0_symbol(bank, upsilon, k)(points) * bank.phi_at_scale(eta0_scale(bank, k), xi)
    k_max = bank.k_max
    for k in range(2, k_max + 1):
        total += eta1_symbol(bank, upsilon, k)(points) * bank.phi_at_scale(eta1_scale(bank, k), xi)

    target = _upsilon_i(bank, upsilon)(points)
    error = float(np.max(np.abs(total - target)))
    tail = 1.0 - bank.profile(bank.base**k_max * np.linalg.norm(bank.anisotropic(points), axis=-1))
    residual = float(np.max(np.abs(target * tail)))

    report = ReconstructionReport(upsilon.name, error, residual, tolerance, k_max, bank.eta0_top)
    _log.debug(f'reconstruction of {upsilon.name}: error={error:.3e} residual={residual:.3e}')
    if raise_on_failure and not report.passed:
        raise ToleranceError(
            f'reconstruction of {upsilon.name} misses by {error:.3e}',
            [{'member': upsilon.name, 'error': error, 'residual': residual, 'tolerance': tolerance}],
        )
    return report


def tube_test_symbol(
    bank: FilterBank, upsilon: TestFunction, t: float, rotation: np.ndarray | None, xi: np.ndarray
) -> np.ndarray:
    """Symbol of ``y -> t^-n Upsilon_I(A^-1 y / t)``, i.e. ``Upsilon_I(t A^T xi)``."""
    if not t > 0:
        raise DomainError(f'tube test kernels need t > 0, got {t}')
    points = xi if rotation is None else xi @ np.asarray(rotation, dtype=np.float64)
    return upsilon.symbol(bank.anisotropic(t * points))


def tube_test_kernel(
    bank: FilterBank, upsilon: TestFunction, t: float, rotation: np.ndarray | None = None
) -> Field:
    grid = bank.grid
    values = tube_test_symbol(bank, upsilon, t, rotation, grid.frequencies())
    check_resolved(values, grid, f'{upsilon.name} tube kernel at t={t:g}')
    return inverse_transform(SpectralField(values, grid.side_length))


def kernel_mass(kernel: Field) -> float:
    return float(kernel.grid.cell_volume * np.sum(kernel.values))


def kernel_l1_mass(kernel: Field) -> float:
    return float(kernel.grid.cell_volume * np.sum(np.abs(kernel.values)))


# Littlewood-Paley bands as a table

BAND_COLUMNS = ('k', 'family', 'inner_radius', 'outer_radius', 'l1_mass')


@define(frozen=True)
class BandRow:
    k: int
    family: str
    inner_radius: float
    outer_radius: float
    l1_mass: float

    def as_tuple(self) -> tuple:
        return tuple(getattr(self, name) for name in BAND_COLUMNS)


def band_top(bank: FilterBank, family: Family) -> int:
    """Last index whose annulus reaches into the grid frequencies."""
    if family == 'eps_scaled':
        return bank.k_max
    k = 0
    while bank.support(family, k + 1)[0] <= bank.max_frequency:
        k += 1
    return k


def band_field(bank: FilterBank, family: Family, k: int, *, bold: bool = False) -> Field:
    """Spatial kernel of ``Phi_k`` or ``Psi_k`` (or its bold variant) on the bank's grid."""
    xi = bank.grid.frequencies()
    values = bank.bold_symbol(family, k, xi) if bold else bank.lp_symbol(family, k, xi)
    return inverse_transform(SpectralField(values, bank.grid.side_length))


def band_table(bank: FilterBank, *, bold: bool = False) -> list[BandRow]:
    rows = []
    for family in ('dyadic', 'eps_scaled'):
        label = f'bold_{family}' if bold else family
        for k in range(band_top(bank, family) + 1):
            inner, outer = bank.support(family, k)
            rows.append(BandRow(k, label, inner, outer, kernel_l1_mass(band_field(bank, family, k, bold=bold))))
    _log.debug(f'band table with {len(rows)} rows at delta={bank.delta:g}, eps={bank.eps:g}')
    return rows
