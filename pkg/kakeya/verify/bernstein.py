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

"""Pointwise Bernstein-type bounds for band-limited fields."""
import logging
import math

import numpy as np
import scipy.fft
from attrs import define

from ..errors import BandLimitError, DomainError
from ..grid import Field, spectral_gradient
from ..maximal import hl_maximal_r
from .sampling import sample_points

__all__ = ['BernsteinReport', 'bernstein_check', 'check_band_limit', 'BAND_TOLERANCE']

_log = logging.getLogger(__name__)

BAND_TOLERANCE = 1e-8
POINT_CHUNK = 64


def check_band_limit(u: Field, radius: float) -> None:
    """Raise :class:`BandLimitError` when ``u`` has spectral mass beyond ``|xi| <= radius``."""
    spectrum = np.abs(scipy.fft.fftn(u.values))
    outside = np.linalg.norm(u.grid.frequencies(), axis=-1) > radius * (1 + 1e-12)
    peak = float(np.max(spectrum, initial=0.0))
    leak = float(np.max(spectrum[outside], initial=0.0))
    if peak > 0 and leak > BAND_TOLERANCE * peak:
        raise BandLimitError(f'field is not band limited to |xi| <= {radius:g} (relative leak {leak / peak:.2e})')


@define(frozen=True)
class BernsteinReport:
    """Largest ``LHS / RHS`` over the sampled points for the value and gradient forms."""

    value_ratio: float
    gradient_ratio: float
    t: float
    r: float
    points: int
    skipped: int
    """Points where the right-hand side vanishes."""


def _weighted_sup(magnitude: np.ndarray, u: Field, points: np.ndarray, t: float, power: float) -> np.ndarray:
    # sup over z of magnitude(x - z) / (1 + t |z|)^power for every sampled x
    grid = u.grid
    result = np.empty(points.shape[0])
    for start in range(0, points.shape[0], POINT_CHUNK):
        chunk = points[start : start + POINT_CHUNK]
        weight = (1.0 + t * grid.distances_from(chunk)) ** -power
        result[start : start + POINT_CHUNK] = np.max((weight * magnitude).reshape(chunk.shape[0], -1), axis=1)
    return result


def bernstein_check(
    u: Field,
    t: float,
    r: float,
    points: np.ndarray | int = 1000,
    c0: float = 1.0,
    *,
    seed: int = 0,
) -> BernsteinReport:
    """Compare ``sup_z |u(x - z)| / (1 + t|z|)^(n/r)`` with ``M(|u|^r)(x)^(1/r)``.

    The gradient form replaces ``|u|`` on the left by ``|grad u| / t``. ``u`` must be band
    limited to ``|xi| <= c0 t``.
    """
    if not t > 0:
        raise DomainError(f'bernstein_check needs t > 0, got {t}')
    if not r > 0:
        raise DomainError(f'bernstein_check needs r > 0, got {r}')
    check_band_limit(u, c0 * t)

    grid = u.grid
    if isinstance(points, (int, np.integer)):
        points = sample_points(grid, int(points), seed)
    points = np.atleast_2d(np.asarray(points, dtype=np.int64))
    power = grid.dim / r

    rhs = hl_maximal_r(u, r).values[tuple(points.T)]
    value = _weighted_sup(np.abs(u.values), u, points, t, power)
    gradient = np.sqrt(sum(component.values**2 for component in spectral_gradient(u))) / t
    slope = _weighted_sup(gradient, u, points, t, power)

    scale = float(np.max(np.abs(u.values), initial=0.0))
    usable = rhs > 1e-14 * max(scale, 1e-300)
    if not np.any(usable):
        return BernsteinReport(math.nan, math.nan, t, r, points.shape[0], points.shape[0])

    value_ratio = float(np.max(value[usable] / rhs[usable]))
    gradient_ratio = float(np.max(slope[usable] / rhs[usable]))
    _log.debug(f'bernstein t={t:g} r={r:g}: value {value_ratio:.4f}, gradient {gradient_ratio:.4f}')
    return BernsteinReport(
        value_ratio, gradient_ratio, t, r, points.shape[0], int(np.count_nonzero(~usable))
    )
