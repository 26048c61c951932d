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

"""Grey-scale dilation on the torus by a flat structuring element.

``dilate(values, mask)(x) = max over offsets o in mask of values(x - o)``.

The offsets are grouped into runs that are contiguous along the last axis; each distinct
run is a sliding window maximum (:func:`scipy.ndimage.maximum_filter1d`) and each group is
a cyclic shift of that window over the leading axes.
"""
import logging
from collections import defaultdict

import numpy as np
import scipy.ndimage

from ..errors import GridError
from ..grid import minimal_indices

__all__ = ['offset_runs', 'dilate', 'weighted_dilate']

_log = logging.getLogger(__name__)

Run = tuple[tuple[int, ...], int, int]


def offset_runs(mask: np.ndarray) -> list[Run]:
    """Decompose an FFT-ordered offset mask into ``(leading offsets, lo, hi)`` runs.

    Offsets are torus-minimal integers; each run covers ``lo..hi`` along the last axis.
    """
    m = minimal_indices(mask.shape[0])
    coords = np.nonzero(mask)
    if len(coords[0]) == 0:
        return []
    offsets = np.stack([m[c] for c in coords], axis=1)

    groups: dict[tuple[int, ...], list[int]] = defaultdict(list)
    for row in offsets.tolist():
        groups[tuple(row[:-1])].append(row[-1])

    runs: list[Run] = []
    for key in sorted(groups):
        last = sorted(groups[key])
        start = previous = last[0]
        for value in last[1:]:
            if value != previous + 1:
                runs.append((key, start, previous))
                start = value
            previous = value
        runs.append((key, start, previous))
    return runs


def dilate(values: np.ndarray, mask: np.ndarray) -> np.ndarray:
    if values.shape != mask.shape:
        raise GridError(f'structuring element of shape {mask.shape} for values of shape {values.shape}')
    runs = offset_runs(mask)
    if not runs:
        raise GridError('structuring element is empty')

    dim = values.ndim
    leading = tuple(range(dim - 1))
    windows: dict[tuple[int, int], np.ndarray] = {}
    result = None
    for key, lo, hi in runs:
        window = windows.get((lo, hi))
        if window is None:
            width = hi - lo + 1
            # the filter covers [i - width//2, i - width//2 + width - 1]; shift it onto [i - hi, i - lo]
            window = scipy.ndimage.maximum_filter1d(values, size=width, axis=-1, mode='wrap')
            window = np.roll(window, hi - width // 2, axis=-1)
            windows[(lo, hi)] = window
        shifted = np.roll(window, key, axis=leading) if any(key) else window
        result = shifted.copy() if result is None else np.maximum(result, shifted, out=result)

    _log.debug(f'dilation with {len(runs)} runs and {len(windows)} distinct windows')
    return result


def weighted_dilate(values: np.ndarray, offsets: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """``max over i of weights[i] * values(x - offsets[i])`` for nonnegative ``values``.

    Offsets are processed in order of decreasing weight and the scan stops once no
    remaining offset can raise any cell.
    """
    order = np.argsort(-weights, kind='stable')
    ceiling = float(np.max(values))
    axes = tuple(range(values.ndim))
    result = np.zeros_like(values)
    floor = 0.0
    for count, i in enumerate(order):
        weight = float(weights[i])
        if weight * ceiling <= floor:
            break
        shift = tuple(int(o) for o in offsets[i])
        np.maximum(result, weight * np.roll(values, shift, axis=axes), out=result)
        if count % 64 == 63:
            floor = float(np.min(result))
    return result
