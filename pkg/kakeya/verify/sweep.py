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

"""Operator norm ratios across a range of ``delta`` and their log-log exponents."""
import logging
import math
import warnings
from typing import Any, Literal, Sequence

import numpy as np
from attrs import define, field

from ..errors import ConfigError, DomainError, FitError, FitWarning, RegimeWarning
from ..filters import FilterBank, TestDictionary, TestFunction, build_dictionary
from ..grid import GridShape, lp_norm
from ..maximal import (
    DirectionSet,
    RotationSet,
    default_t_grid,
    direction_lq_norm,
    kakeya_maximal,
    nikodym_maximal,
    nontangential_maximal,
    smoothed_frozen_t,
    smoothed_kakeya,
)
from ..pool import Orchestrator
from ..testsets import TestSpec

__all__ = [
    'Operator',
    'OPERATORS',
    'SweepSettings',
    'SweepRow',
    'SweepReport',
    'ExponentFit',
    'fit_exponent',
    'bound_slope',
    'norm_ratio_sweep',
    'smoothing_context',
    'TUBE_OPERATORS',
    'SWEEP_COLUMNS',
    'RESIDUAL_LIMIT',
]

_log = logging.getLogger(__name__)

Operator = Literal['kakeya', 'nikodym', 'smoothed', 'smoothed_first', 'frozen']
OPERATORS = ('kakeya', 'nikodym', 'smoothed', 'smoothed_first', 'frozen')
TUBE_OPERATORS = ('kakeya', 'nikodym')

SWEEP_COLUMNS = ('delta', 'p', 'q', 'in_norm', 'out_norm', 'ratio')
RESIDUAL_LIMIT = 0.2


@define(frozen=True)
class ExponentFit:
    slope: float
    intercept: float
    residual: float
    """Root mean square of the log residuals."""

    @property
    def reliable(self) -> bool:
        return self.residual <= RESIDUAL_LIMIT


def fit_exponent(deltas: Sequence[float], ratios: Sequence[float]) -> ExponentFit:
    """Least squares slope of ``log(ratio)`` against ``log(1 / delta)``."""
    deltas = np.asarray(deltas, dtype=np.float64)
    ratios = np.asarray(ratios, dtype=np.float64)
    if deltas.shape != ratios.shape or deltas.ndim != 1:
        raise FitError(f'deltas and ratios must be matching 1-D sequences, got {deltas.shape} and {ratios.shape}')
    if deltas.size < 3:
        raise FitError(f'need >= 3 points for an exponent fit, got {deltas.size}')
    if not (np.all(np.isfinite(deltas)) and np.all(np.isfinite(ratios))):
        raise FitError('exponent fits need finite deltas and ratios')
    if np.any(deltas <= 0) or np.any(ratios <= 0):
        raise FitError('exponent fits need positive deltas and ratios')

    x = np.log(1.0 / deltas)
    if np.ptp(x) < 1e-12:
        raise FitError('exponent fit has degenerate abscissae (all deltas equal)')
    y = np.log(ratios)
    slope, intercept = np.polyfit(x, y, deg=1)
    residual = float(np.sqrt(np.mean((y - np.polyval((slope, intercept), x)) ** 2)))
    fit = ExponentFit(float(slope), float(intercept), residual)
    if not fit.reliable:
        warnings.warn(f'exponent fit residual {residual:.3f} exceeds {RESIDUAL_LIMIT}', FitWarning, stacklevel=2)
    return fit


def bound_slope(op: Operator, n: int, p: float, eps: float, r: float | None = None) -> float:
    """Exponent of ``1 / delta`` in the bound each operator is audited against.

    ``kakeya`` / ``nikodym``: ``max(0, n/p - 1)`` (``0`` at ``p = n``, the ``delta^-eps`` claim);
    ``smoothed``: ``n/p + eps``; ``smoothed_first``: ``eps``; ``frozen``: ``4 (n/r + 1) eps``.
    """
    if not p > 0:
        raise DomainError(f'p must be positive, got {p}')
    if op in TUBE_OPERATORS:
        return max(0.0, n / p - 1.0)
    if op == 'smoothed':
        return n / p + eps
    if op == 'smoothed_first':
        return eps
    if op == 'frozen':
        r = p / 2 if r is None else r
        if not 0 < r < p:
            raise DomainError(f'r must lie in (0, p) = (0, {p}), got {r}')
        return 4 * (n / r + 1) * eps
    raise ConfigError(f'unknown operator {op!r}, expected one of {", ".join(OPERATORS)}')


@define(frozen=True)
class SweepSettings:
    """Grid and operator parameters shared by every cell of a sweep."""

    dim: int = 2
    samples: int = 256
    tube_length: float = 1.0
    """Side length of the torus for tube operators."""
    kernel_length: float = 8.0
    """Side length of the torus for the smoothed operators."""
    eps: float = 0.25
    r: float | None = None
    t: float | None = None
    """Frozen scale; ``None`` means ``delta^-eps``."""
    t_low: float = 0.5
    max_rotations: int = 8
    normalization: str = 'mass'
    slack: float = 0.2
    threads: int | None = None

    def grid_for(self, op: Operator) -> GridShape:
        length = self.tube_length if op in TUBE_OPERATORS else self.kernel_length
        return GridShape(self.dim, self.samples, length)


@define(frozen=True)
class SweepRow:
    delta: float
    p: float
    q: float
    in_norm: float
    out_norm: float
    ratio: float

    def as_tuple(self) -> tuple[float, ...]:
        return tuple(getattr(self, name) for name in SWEEP_COLUMNS)


@define(frozen=True)
class SweepReport:
    operator: str
    family: str
    rows: tuple[SweepRow, ...] = field(converter=tuple)
    fit: ExponentFit
    bound: float
    slack: float
    dim: int = 2

    @property
    def slope(self) -> float:
        return self.fit.slope

    @property
    def passed(self) -> bool:
        return self.fit.slope <= self.bound + self.slack

    @property
    def within_trivial_bounds(self) -> bool:
        """Tube operator exponents lie in ``[0, n]`` (up to the fit slack)."""
        if self.operator not in TUBE_OPERATORS:
            return True
        return -self.slack <= self.fit.slope <= self.dim + self.slack

    def summary(self) -> dict[str, Any]:
        return {
            'operator': self.operator,
            'family': self.family,
            'fitted_exponent': self.fit.slope,
            'intercept': self.fit.intercept,
            'residual': self.fit.residual,
            'reliable': self.fit.reliable,
            'bound': self.bound,
            'slack': self.slack,
            'passed': self.passed,
        }


def smoothing_context(delta: float, grid: GridShape, settings: SweepSettings) -> tuple[FilterBank, RotationSet, list[float]]:
    bank = FilterBank(delta, settings.eps, grid)
    if not bank.in_regime:
        warnings.warn(
            f'delta^eps = {bank.base:.4g} exceeds 1/2 at delta={delta:g}; smoothing without the band decomposition',
            RegimeWarning,
            stacklevel=2,
        )
    directions = DirectionSet.for_delta(grid.dim, delta, max(settings.max_rotations, 2))
    rotations = RotationSet.from_directions(directions).subsample(settings.max_rotations)
    ceiling = delta**-settings.eps
    return bank, rotations, default_t_grid(min(settings.t_low, ceiling), ceiling)


def _phi_member(dictionary: TestDictionary, bank: FilterBank) -> TestFunction:
    try:
        return dictionary['phi']
    except KeyError:
        return TestFunction('phi', bank.dim, bank.profile.symbol)


def _cell(
    op: Operator,
    family: TestSpec,
    delta: float,
    p: float,
    q: float,
    settings: SweepSettings,
    dictionary: TestDictionary | None,
) -> SweepRow:
    grid = settings.grid_for(op)
    spec = family.adapted(delta) if family.delta is None else family
    f = spec.generate(grid)
    in_norm = lp_norm(f, p)

    if op in TUBE_OPERATORS:
        directions = DirectionSet.for_delta(grid.dim, delta)
        if op == 'kakeya':
            out_norm = direction_lq_norm(kakeya_maximal(f, delta, directions), directions, q)
        else:
            out_norm = lp_norm(nikodym_maximal(f, delta, directions), p)
    else:
        assert dictionary is not None
        bank, rotations, t_grid = smoothing_context(delta, grid, settings)
        if op == 'frozen':
            t = delta**-settings.eps if settings.t is None else settings.t
            out_norm = lp_norm(smoothed_frozen_t(f, bank, dictionary, rotations, t), p)
        else:
            out_norm = lp_norm(smoothed_kakeya(f, bank, dictionary, rotations, t_grid), p)
        if op == 'smoothed_first':
            phi_delta = _phi_member(dictionary, bank).dilate(delta)
            in_norm = lp_norm(nontangential_maximal(f, phi_delta, t_grid), p)

    ratio = out_norm / in_norm if in_norm > 0 else math.nan
    _log.debug(f'{op} {spec.kind} delta={delta:g}: in={in_norm:.6g} out={out_norm:.6g} ratio={ratio:.6g}')
    return SweepRow(delta, p, q, in_norm, out_norm, ratio)


def norm_ratio_sweep(
    op: Operator,
    family: TestSpec,
    deltas: Sequence[float],
    p: float,
    q: float | None = None,
    settings: SweepSettings | None = None,
    dictionary: TestDictionary | None = None,
) -> SweepReport:
    """Ratios ``|T f| / |f|`` over ``deltas`` for one operator and one input family.

    Tube operators measure the output in ``L^q`` over directions (``kakeya``) or ``L^p``
    (``nikodym``); smoothed operators in ``L^p``. ``smoothed_first`` divides by the ``L^p``
    norm of the nontangential maximal function of ``f * phi_delta`` instead of ``|f|_p``.
    """
    if op not in OPERATORS:
        raise ConfigError(f'unknown operator {op!r}, expected one of {", ".join(OPERATORS)}')
    deltas = [float(d) for d in deltas]
    if len(deltas) < 3:
        raise FitError(f'need >= 3 points for an exponent fit, got {len(deltas)}')
    settings = settings or SweepSettings()
    q = p if q is None else q
    if op not in TUBE_OPERATORS and dictionary is None:
        dictionary = build_dictionary(settings.dim, normalization=settings.normalization)

    jobs = [lambda delta=delta: _cell(op, family, delta, p, q, settings, dictionary) for delta in deltas]
    rows = Orchestrator(settings.threads).run(jobs)

    fit = fit_exponent([row.delta for row in rows], [row.ratio for row in rows])
    bound = bound_slope(op, settings.dim, p, settings.eps, settings.r)
    report = SweepReport(op, family.kind, rows, fit, bound, settings.slack, settings.dim)
    _log.info(f'{op} on {family.kind}: exponent {fit.slope:.4f} (bound {bound:.4f} + {settings.slack})')
    return report
