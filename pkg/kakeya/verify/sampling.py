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
import scipy.stats

from ..errors import DomainError
from ..grid import GridShape

__all__ = ['sample_points']


def sample_points(grid: GridShape, count: int, seed: int = 0) -> np.ndarray:
    """Distinct cells drawn from a scrambled Halton sequence, as integer index rows ``(P, dim)``.

    Asking for at least as many points as the grid has cells returns every cell.
    """
    if count < 1:
        raise DomainError(f'point count must be positive, got {count}')
    total = grid.samples**grid.dim
    if count >= total:
        return np.stack(np.unravel_index(np.arange(total), grid.shape), axis=1)

    sampler = scipy.stats.qmc.Halton(d=grid.dim, scramble=True, seed=seed)
    cells = np.floor(sampler.random(count) * grid.samples).astype(np.int64)
    cells = np.minimum(cells, grid.samples - 1)
    _, first = np.unique(np.ravel_multi_index(cells.T, grid.shape), return_index=True)
    return cells[np.sort(first)]
