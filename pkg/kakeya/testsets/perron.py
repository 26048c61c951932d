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

"""Perron trees: bisect-and-slide unions of triangles with small area.

The tree starts from one triangle of base ``b`` and height ``H`` with its apex on top
(long axis along ``x_2``). Every stage splits each triangle at the midpoint of its base
and slides the right half to the left by a whole number of cells, chosen to minimize the
area of the union. Shifts are whole cells, so a shifted raster is a cyclic roll of the
unshifted one and the area can only shrink from stage to stage.
"""
import logging
import math

import numpy as np
from attrs import define, field

from ..errors import DomainError, GridError, ResolutionError
from ..grid import Field, GridShape

__all__ = ['PerronTree', 'perron_tree', 'adapted_levels']

_log = logging.getLogger(__name__)


def _segment_distance(points: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    ab = b - a
    t = np.clip(((points - a) @ ab) / float(ab @ ab), 0.0, 1.0)
    closest = a + t[..., np.newaxis] * ab
    return np.linalg.norm(points - closest, axis=-1)


def _cross(o: np.ndarray, a: np.ndarray, points: np.ndarray) -> np.ndarray:
    return (a[0] - o[0]) * (points[..., 1] - o[1]) - (a[1] - o[1]) * (points[..., 0] - o[0])


def _triangle_raster(points: np.ndarray, vertices: np.ndarray, thickness: float) -> np.ndarray:
    """Cells within ``thickness / 2`` of the closed triangle."""
    a, b, c = vertices
    signs = np.stack([_cross(a, b, points), _cross(b, c, points), _cross(c, a, points)])
    inside = np.all(signs >= 0, axis=0) | np.all(signs <= 0, axis=0)
    distance = np.minimum(
        np.minimum(_segment_distance(points, a, b), _segment_distance(points, b, c)),
        _segment_distance(points, c, a),
    )
    return inside | (distance <= thickness / 2)


@define
class _Piece:
    vertices: np.ndarray
    """Apex, left and right base corners in unshifted coordinates."""
    raster: np.ndarray
    """Unshifted raster; the current one is ``roll(raster, -shift, axis=0)``."""
    shift: int = 0

    def current(self) -> np.ndarray:
        return np.roll(self.raster, -self.shift, axis=0)


@define(frozen=True, eq=False)
class PerronTree:
    image: Field = field(repr=False)
    triangles: np.ndarray = field(repr=False)
    """Final triangles ``(K, 3, 2)``: apex, left and right base corner."""
    measures: tuple[float, ...]
    """Area of the union after each stage, starting with the single triangle."""
    delta: float
    raster: np.ndarray = field(repr=False)

    @property
    def levels(self) -> int:
        return len(self.measures)

    @property
    def measure(self) -> float:
        return self.measures[-1]

    def coverage(self, rays_per_triangle: int = 4) -> float:
        """Fraction of sampled directions whose full apex-to-base segment lies in the tree.

        Rays start at the apex of each final triangle and end at the midpoints of equal
        subdivisions of its base.
        """
        grid = self.image.grid
        h = grid.spacing
        hits = total = 0
        for apex, left, right in self.triangles:
            for j in range(rays_per_triangle):
                target = left + (j + 0.5) / rays_per_triangle * (right - left)
                length = float(np.linalg.norm(target - apex))
                steps = max(2, int(math.ceil(2 * length / h)) + 1)
                samples = apex + np.linspace(0.0, 1.0, steps)[:, np.newaxis] * (target - apex)
                index = np.mod(np.round(samples / h).astype(np.int64), grid.samples)
                total += 1
                hits += bool(np.all(self.raster[index[:, 0], index[:, 1]]))
        return hits / total


def adapted_levels(delta: float, grid: GridShape, base: float | None = None) -> int:
    """Stages that bring the finest base down to about ``delta`` (and no finer than two cells)."""
    base = grid.side_length / 2 if base is None else base
    finest = max(delta, 2 * grid.spacing)
    return 1 + max(0, int(math.floor(math.log2(base / finest))))


def perron_tree(
    levels: int,
    delta: float,
    grid: GridShape,
    *,
    base: float | None = None,
    height: float | None = None,
) -> PerronTree:
    if grid.dim != 2:
        raise GridError(f'perron trees are built in 2 dimensions, got {grid.dim}')
    if levels < 1:
        raise DomainError(f'levels must be at least 1, got {levels}')
    if not delta > 0:
        raise DomainError(f'delta must be positive, got {delta}')

    base = grid.side_length / 2 if base is None else base
    height = grid.side_length / 2 if height is None else height
    h = grid.spacing
    if delta < 2 * h:
        raise ResolutionError(f'thickening {delta:g} is below two cells ({2 * h:g})')
    if base / 2 ** (levels - 1) < 2 * h:
        raise ResolutionError(f'finest base {base / 2 ** (levels - 1):g} is below two cells ({2 * h:g})')

    points = grid.coordinates()
    apex = np.array([0.0, height / 2])
    vertices = np.array([apex, [-base / 2, -height / 2], [base / 2, -height / 2]])
    pieces = [_Piece(vertices, _triangle_raster(points, vertices, delta))]
    measures = [h**2 * float(np.count_nonzero(pieces[0].raster))]

    for stage in range(1, levels):
        children: list[_Piece] = []
        for piece in pieces:
            top, left, right = piece.vertices
            middle = (left + right) / 2
            for corners in ((top, left, middle), (top, middle, right)):
                corners = np.array(corners)
                raster = _triangle_raster(points, corners, delta) & piece.raster
                children.append(_Piece(corners, raster, piece.shift))

        counts = np.zeros(grid.shape, dtype=np.int32)
        for child in children:
            counts += child.current()

        for right_child in children[1::2]:
            counts -= right_child.current()
            others = counts > 0
            width = float(right_child.vertices[2, 0] - right_child.vertices[1, 0])
            candidates = range(int(math.ceil(2 * width / h)) + 1)
            current = right_child.current()
            areas = [np.count_nonzero(others | np.roll(current, -tau, axis=0)) for tau in candidates]
            right_child.shift += int(np.argmin(areas))
            counts += right_child.current()

        pieces = children
        measures.append(h**2 * float(np.count_nonzero(counts)))
        _log.debug(f'perron stage {stage}: {len(pieces)} triangles, measure {measures[-1]:.6f}')

    union = np.zeros(grid.shape, dtype=bool)
    triangles = []
    for piece in pieces:
        union |= piece.current()
        offset = np.array([piece.shift * h, 0.0])
        triangles.append(piece.vertices - offset)

    return PerronTree(
        Field(union.astype(np.float64), grid.side_length),
        np.stack(triangles),
        tuple(measures),
        float(delta),
        union,
    )
