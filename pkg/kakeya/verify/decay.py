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

"""Weighted L1 integrals of the band kernels against their decay bounds."""
import logging
import math
import warnings
from typing import Callable, Iterable, Sequence

import numpy as np
from attrs import define, evolve, field

from ..errors import DomainError, PeriodizationWarning
from ..filters import (
    FilterBank,
    TestFunction,
    eta0_kernel,
    eta1_kernel,
    eta1_scale,
)
from ..grid import Field, SpectralField, inverse_transform

__all__ = [
    'DecayRow',
    'RefinementRow',
    'weighted_kernel_integral',
    'lemma31_table',
    'lemma32_table',
    'ratio_spread',
    'refinement_study',
    'DECAY_COLUMNS',
    'PERIODIZATION_THRESHOLD',
]

_log = logging.getLogger(__name__)

PERIODIZATION_THRESHOLD = 1e-8


def _nan() -> float:
    return math.nan


@define(frozen=True)
class DecayRow:
    """One ``k`` of a decay table.

    ``lemma32`` rows carry a second weight scale (``2^(k+1)`` instead of ``2^(k+1) delta``)
    in the ``unit_*`` columns, and the Young bound on the unweighted mass.
    """

    table: str
    k: int
    scale: float
    integral: float
    bound: float
    ratio: float
    truncated: bool = False
    mass: float = field(factory=_nan)
    mass_bound: float = field(factory=_nan)
    unit_scale: float = field(factory=_nan)
    unit_integral: float = field(factory=_nan)
    unit_bound: float = field(factory=_nan)
    unit_ratio: float = field(factory=_nan)

    def to_dict(self) -> dict[str, float | int | str | bool]:
        return {name: getattr(self, name) for name in DECAY_COLUMNS}


DECAY_COLUMNS = tuple(a.name for a in DecayRow.__attrs_attrs__)


def weighted_kernel_integral(kernel: Field, scale: float, N: float) -> float:
    """``int (1 + |x| / scale)^N |kernel(x)| dx`` with ``|x|`` the torus-minimal distance.

    Warns with :class:`PeriodizationWarning` when the weighted kernel on the outermost
    cells exceeds ``1e-8`` of its peak, i.e. the tail wraps around the torus.
    """
    if not scale > 0:
        raise DomainError(f'weight scale must be positive, got {scale}')
    if N < 0:
        raise DomainError(f'weight power must be nonnegative, got {N}')

    grid = kernel.grid
    magnitude = np.abs(kernel.values)
    weighted = (1.0 + grid.radius() / scale) ** N * magnitude

    peak = float(np.max(magnitude, initial=0.0))
    edge = float(np.max(weighted[grid.nyquist_shell()], initial=0.0))
    if peak > 0 and edge > PERIODIZATION_THRESHOLD * peak:
        warnings.warn(
            f'weighted kernel tail at the torus boundary is {edge / peak:.2e} of its peak (scale {scale:.4g}, N={N:g})',
            PeriodizationWarning,
            stacklevel=2,
        )
    return float(grid.cell_volume * np.sum(weighted))


def _check_weight_power(N: float) -> None:
    if not N > 1:
        raise DomainError(f'decay tables need N > 1, got {N}')


def lemma31_table(
    bank: FilterBank, upsilon: TestFunction, N: float, k_range: Iterable[int] | None = None
) -> list[DecayRow]:
    """Rows ``I_k = int (1 + |x| / delta^(1 + (k+3) eps))^N |eta1[k]|`` against ``delta^(k eps)``."""
    _check_weight_power(N)
    bank.require_regime()
    ks = range(2, bank.k_max + 1) if k_range is None else k_range

    rows = []
    for k in ks:
        kernel = eta1_kernel(bank, upsilon, k)
        scale = eta1_scale(bank, k)
        integral = 0.0 if kernel.empty else weighted_kernel_integral(kernel.spatial, scale, N)
        bound = bank.delta ** (k * bank.eps)
        rows.append(
            DecayRow('lemma31', k, scale, integral, bound, integral / bound, kernel.empty, mass=kernel.l1_mass)
        )
        _log.debug(f'lemma31 {upsilon.name} k={k}: integral={integral:.4e} ratio={integral / bound:.4e}')
    return rows


def _l1(values: np.ndarray, bank: FilterBank) -> float:
    spatial = inverse_transform(SpectralField(values, bank.grid.side_length))
    return float(bank.grid.cell_volume * np.sum(np.abs(spatial.values)))


def _young_factors(bank: FilterBank, upsilon: TestFunction) -> tuple[float, float]:
    xi = bank.grid.frequencies()
    low = bank.bold_symbol('eps_scaled', 0, xi) + bank.bold_symbol('eps_scaled', 1, xi)
    return _l1(low, bank), _l1(upsilon.symbol(bank.anisotropic(xi)), bank)


def lemma32_table(
    bank: FilterBank, upsilon: TestFunction, N: float, k_range: Iterable[int] | None = None
) -> list[DecayRow]:
    """Rows for ``eta0[k]`` at the weight scales ``2^(k+1) delta`` and ``2^(k+1)``.

    Bounds are ``delta^(-2(N+1) eps) delta^-N 2^-k`` and ``delta^(-2(N+1) eps) 2^-k``. The
    unweighted mass is compared with ``|Psi_0 + Psi_1|_1 |Phi_k|_1 |Upsilon_I|_1``.
    """
    _check_weight_power(N)
    bank.require_regime()
    ks = range(0, bank.s + 1) if k_range is None else k_range
    xi = bank.grid.frequencies()
    low_l1, upsilon_l1 = _young_factors(bank, upsilon)
    prefactor = bank.delta ** (-2 * (N + 1) * bank.eps)

    rows = []
    for k in ks:
        kernel = eta0_kernel(bank, upsilon, k)
        scale = 2.0 ** (k + 1) * bank.delta
        unit_scale = 2.0 ** (k + 1)
        if kernel.empty:
            integral = unit_integral = 0.0
        else:
            integral = weighted_kernel_integral(kernel.spatial, scale, N)
            unit_integral = weighted_kernel_integral(kernel.spatial, unit_scale, N)
        bound = prefactor * bank.delta**-N * 2.0**-k
        unit_bound = prefactor * 2.0**-k
        mass_bound = low_l1 * _l1(bank.bold_symbol('dyadic', k, xi), bank) * upsilon_l1
        rows.append(
            DecayRow(
                'lemma32',
                k,
                scale,
                integral,
                bound,
                integral / bound,
                kernel.empty,
                mass=kernel.l1_mass,
                mass_bound=mass_bound,
                unit_scale=unit_scale,
                unit_integral=unit_integral,
                unit_bound=unit_bound,
                unit_ratio=unit_integral / unit_bound,
            )
        )
        _log.debug(f'lemma32 {upsilon.name} k={k}: integral={integral:.4e} unit={unit_integral:.4e}')
    return rows


def ratio_spread(rows: Sequence[DecayRow]) -> float:
    """Largest over smallest ratio among rows that are not truncated; ``nan`` if none are left."""
    ratios = [row.ratio for row in rows if not row.truncated and row.ratio > 0]
    if not ratios:
        return math.nan
    return max(ratios) / min(ratios)


@define(frozen=True)
class RefinementRow:
    k: int
    coarse: float
    fine: float

    @property
    def change(self) -> float:
        """Relative change of the integral under grid doubling; 0 when both are zero."""
        if self.coarse == self.fine:
            return 0.0
        return abs(self.fine - self.coarse) / max(abs(self.coarse), abs(self.fine))


Table = Callable[[FilterBank, TestFunction, float, Iterable[int] | None], list[DecayRow]]


def refinement_study(
    table: Table, bank: FilterBank, upsilon: TestFunction, N: float, k_range: Iterable[int] | None = None
) -> list[RefinementRow]:
    """Recompute a table on the grid with twice the samples and compare the integrals per ``k``."""
    fine_bank = evolve(bank, grid=bank.grid.refined())
    coarse = {row.k: row.integral for row in table(bank, upsilon, N, k_range)}
    fine = {row.k: row.integral for row in table(fine_bank, upsilon, N, list(coarse) if k_range is None else k_range)}
    return [RefinementRow(k, coarse[k], fine[k]) for k in coarse if k in fine]
