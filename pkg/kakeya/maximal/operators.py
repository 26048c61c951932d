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

"""The maximal operators.

Every operator works on ``|f|`` or on ``|f * K|`` for a family of kernels ``K`` and
reduces with an exact ``max``, so results do not depend on evaluation order.
"""
import logging
import math
import warnings
from typing import Iterable, Sequence

import numpy as np
import scipy.fft

from ..errors import DomainError, GridError, RegimeError, ResolutionWarning
from ..filters import FilterBank, TestDictionary, TestFunction, check_resolved, tube_test_symbol
from ..grid import Field, GridShape
from .dilation import dilate, weighted_dilate
from .geometry import DirectionSet, RotationSet, tube_core, tube_indicator

__all__ = [
    'kakeya_maximal',
    'nikodym_maximal',
    'hl_radii',
    'hl_maximal',
    'hl_maximal_r',
    'nontangential_maximal',
    'tangential_maximal',
    'smoothed_kakeya',
    'smoothed_frozen_t',
    'direction_lq_norm',
    'dual_direction_exponent',
    'default_t_grid',
    'disc_mask',
    'T_RATIO',
]

_log = logging.getLogger(__name__)

T_RATIO = math.sqrt(2.0)
POINT_CHUNK = 64


def _spectrum(values: np.ndarray) -> np.ndarray:
    return scipy.fft.fftn(values)


def _circular(spectrum: np.ndarray, kernel: np.ndarray, grid: GridShape) -> np.ndarray:
    # spectrum of f (unnormalized) convolved with a spatial kernel sampled on the grid
    return scipy.fft.ifftn(spectrum * scipy.fft.fftn(kernel)).real * grid.cell_volume


def _check_directions(f: Field, dirs: DirectionSet) -> None:
    if dirs.dim != f.dim:
        raise GridError(f'{dirs.dim} dimensional directions for a {f.dim} dimensional field')


def kakeya_maximal(f: Field, delta: float, dirs: DirectionSet) -> np.ndarray:
    """Largest tube average of ``|f|`` over all grid translates, one value per direction."""
    _check_directions(f, dirs)
    grid = f.grid
    spectrum = _spectrum(np.abs(f.values))
    values = np.empty(len(dirs))
    for i, omega in enumerate(dirs):
        tube = tube_indicator(omega, delta, grid)
        values[i] = np.max(_circular(spectrum, tube.values, grid))
    _log.debug(f'kakeya maximal over {len(dirs)} directions at delta={delta:g}')
    return values


def nikodym_maximal(f: Field, delta: float, dirs: DirectionSet) -> Field:
    """Largest average of ``|f|`` over tubes whose core contains the point."""
    _check_directions(f, dirs)
    grid = f.grid
    spectrum = _spectrum(np.abs(f.values))
    result = np.zeros(grid.shape)
    for omega in dirs:
        averages = _circular(spectrum, tube_indicator(omega, delta, grid).values, grid)
        np.maximum(result, dilate(averages, tube_core(omega, delta, grid)), out=result)
    return Field(result, f.side_length)


def hl_radii(grid: GridShape) -> list[float]:
    """``0`` (the cell itself) followed by ``h 2^j`` up to ``L / 2``."""
    radii = [0.0]
    radius = grid.spacing
    while radius <= grid.side_length / 2 * (1 + 1e-12):
        radii.append(radius)
        radius *= 2
    return radii


def disc_mask(grid: GridShape, radius: float) -> np.ndarray:
    """FFT-ordered mask of the offsets within torus-minimal distance ``radius``."""
    return grid.radius() <= radius * (1 + 1e-12)


def hl_maximal(f: Field) -> Field:
    """Centred Hardy-Littlewood maximal function of ``|f|`` over :func:`hl_radii`."""
    grid = f.grid
    magnitude = np.abs(f.values)
    spectrum = _spectrum(magnitude)
    result = magnitude.copy()
    for radius in hl_radii(grid)[1:]:
        ball = disc_mask(grid, radius).astype(np.float64)
        ball /= grid.cell_volume * np.sum(ball)
        np.maximum(result, _circular(spectrum, ball, grid), out=result)
    return Field(result, f.side_length)


def hl_maximal_r(f: Field, r: float) -> Field:
    """``M(|f|^r)^(1/r)``."""
    if not r > 0:
        raise DomainError(f'hl_maximal_r needs r > 0, got {r}')
    powered = hl_maximal(Field(np.abs(f.values) ** r, f.side_length))
    return Field(np.maximum(powered.values, 0.0) ** (1.0 / r), f.side_length)


def _check_t_grid(t_grid: Sequence[float]) -> list[float]:
    values = [float(t) for t in t_grid]
    if not values:
        raise DomainError('t_grid must not be empty')
    if any(not t > 0 for t in values):
        raise DomainError(f't_grid must be positive, got {values}')
    return values


def default_t_grid(low: float, high: float, ratio: float = T_RATIO) -> list[float]:
    """Geometric grid from ``low`` to ``high`` inclusive with the given ratio."""
    if not 0 < low <= high:
        raise DomainError(f't grid needs 0 < low <= high, got {low} and {high}')
    values = [low]
    while values[-1] * ratio < high * (1 - 1e-12):
        values.append(values[-1] * ratio)
    if values[-1] < high * (1 - 1e-12):
        values.append(high)
    return values


def _smoothed_magnitudes(f: Field, upsilon: TestFunction, t_grid: Iterable[float]) -> Iterable[tuple[float, np.ndarray]]:
    grid = f.grid
    spectrum = _spectrum(f.values)
    xi = grid.frequencies()
    for t in t_grid:
        symbol = upsilon.symbol(t * xi)
        yield t, np.abs(scipy.fft.ifftn(spectrum * symbol))


def nontangential_maximal(f: Field, upsilon: TestFunction, t_grid: Sequence[float]) -> Field:
    """``max over t, |x - y| <= t of |f * Upsilon_t (y)|``."""
    grid = f.grid
    result = np.zeros(grid.shape)
    for t, magnitude in _smoothed_magnitudes(f, upsilon, _check_t_grid(t_grid)):
        np.maximum(result, dilate(magnitude, disc_mask(grid, t)), out=result)
    return Field(result, f.side_length)


def tangential_maximal(
    f: Field,
    upsilon: TestFunction,
    weight_power: float,
    t_grid: Sequence[float],
    points: np.ndarray | None = None,
) -> Field | np.ndarray:
    """``max over t, s of |f * Upsilon_t (x - s)| (1 + |s| / t)^-N``.

    The supremum runs over every grid shift ``s``. With ``points`` (integer index rows)
    the values at those cells are returned; otherwise the whole field.
    """
    if not weight_power > 0:
        raise DomainError(f'tangential maximal needs N > 0, got {weight_power}')
    grid = f.grid
    t_values = _check_t_grid(t_grid)

    if points is not None:
        points = np.atleast_2d(np.asarray(points, dtype=np.int64))
        result = np.zeros(points.shape[0])
        for t, magnitude in _smoothed_magnitudes(f, upsilon, t_values):
            for start in range(0, points.shape[0], POINT_CHUNK):
                chunk = points[start : start + POINT_CHUNK]
                weight = (1.0 + grid.distances_from(chunk) / t) ** -weight_power
                best = np.max((weight * magnitude).reshape(chunk.shape[0], -1), axis=1)
                np.maximum(result[start : start + POINT_CHUNK], best, out=result[start : start + POINT_CHUNK])
        return result

    offsets = grid.index_vectors().reshape(-1, grid.dim)
    radius = grid.radius().reshape(-1)
    result = np.zeros(grid.shape)
    for t, magnitude in _smoothed_magnitudes(f, upsilon, t_values):
        weights = (1.0 + radius / t) ** -weight_power
        np.maximum(result, weighted_dilate(magnitude, offsets, weights), out=result)
    return Field(result, f.side_length)


def smoothed_kakeya(
    f: Field,
    bank: FilterBank,
    dictionary: TestDictionary,
    rotations: RotationSet,
    t_grid: Sequence[float],
) -> Field:
    """``max over (t, A, Upsilon) of |f * Upsilon_{I,t}(A^-1 .)|`` on the grid."""
    grid = f.grid
    if grid != bank.grid:
        raise GridError(f'field grid {grid} differs from the filter bank grid {bank.grid}')
    if rotations.dim != grid.dim or dictionary.dim != grid.dim:
        raise GridError('rotations, dictionary and field must share a dimension')
    t_values = _check_t_grid(t_grid)

    spectrum = _spectrum(f.values)
    xi = grid.frequencies()
    result = np.zeros(grid.shape)
    unresolved = 0
    for t in t_values:
        for rotation in rotations:
            for upsilon in dictionary:
                symbol = tube_test_symbol(bank, upsilon, t, rotation, xi)
                product = spectrum * symbol
                if not check_resolved(product, grid, 'smoothed kernel product', warn=False):
                    unresolved += 1
                np.maximum(result, np.abs(scipy.fft.ifftn(product)), out=result)

    count = len(t_values) * len(rotations) * len(dictionary)
    if unresolved:
        warnings.warn(
            f'{unresolved} of {count} smoothed kernels are not resolved against the input spectrum',
            ResolutionWarning,
            stacklevel=2,
        )
    _log.debug(f'smoothed maximal over {count} kernels, {unresolved} unresolved')
    return Field(result, f.side_length)


def smoothed_frozen_t(
    f: Field,
    bank: FilterBank,
    dictionary: TestDictionary,
    rotations: RotationSet,
    t: float,
) -> Field:
    """The smoothed maximal function at a single scale ``0 < t <= delta^-eps``."""
    ceiling = bank.delta**-bank.eps
    if not 0 < t <= ceiling * (1 + 1e-12):
        raise RegimeError(f'frozen scale t={t} must lie in (0, delta^-eps = {ceiling:g}]')
    return smoothed_kakeya(f, bank, dictionary, rotations, [t])


def direction_lq_norm(values: np.ndarray, dirs: DirectionSet, q: float) -> float:
    """``(sum w |v|^q)^(1/q)`` over the direction set; ``max |v|`` for ``q = inf``."""
    if not q > 0:
        raise DomainError(f'direction_lq_norm needs q > 0, got {q}')
    values = np.abs(np.asarray(values, dtype=np.float64))
    if values.shape != (len(dirs),):
        raise GridError(f'expected {len(dirs)} direction values, got shape {values.shape}')
    if math.isinf(q):
        return float(np.max(values))
    return float(np.sum(dirs.weights * values**q) ** (1.0 / q))


def dual_direction_exponent(dim: int, p: float) -> float:
    """``q = (n - 1) p'`` with ``1/p + 1/p' = 1``."""
    if not p > 1:
        raise DomainError(f'the dual exponent needs p > 1, got {p}')
    if math.isinf(p):
        return float(dim - 1)
    return (dim - 1) * p / (p - 1)
