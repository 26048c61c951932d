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

"""Deterministic test inputs.

Randomness comes from numpy's ``PCG64`` bit generator seeded with the spec's seed, so a
spec reproduces the same field bit for bit on a given numpy version.
"""
import logging
import math
from typing import Any, Literal

import numpy as np
import scipy.fft
from attrs import asdict, define, evolve, field

from ..errors import ConfigError, DomainError, GridError, ResolutionError
from ..filters import BumpProfile
from ..grid import Field, GridShape, lp_norm
from ..maximal import DirectionSet, TubeSpec, tube_weights
from ..utils import PathLike, write_json
from .perron import adapted_levels, perron_tree

__all__ = [
    'Kind',
    'KINDS',
    'TestSpec',
    'ball_indicator',
    'single_tube',
    'union_directions',
    'rotated_tube_union',
    'bandlimited_random',
    'bump_sum',
    'describe',
    'write_manifest',
]

_log = logging.getLogger(__name__)

Kind = Literal['constant', 'ball', 'tube', 'tube_union', 'perron_tree', 'bandlimited_random', 'bump_sum']
KINDS = ('constant', 'ball', 'tube', 'tube_union', 'perron_tree', 'bandlimited_random', 'bump_sum')


def _generator(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def ball_indicator(radius: float, center: np.ndarray | None, grid: GridShape) -> Field:
    """Ball indicator with a one-cell linear feather at the boundary."""
    h = grid.spacing
    if radius < 2 * h:
        raise ResolutionError(f'ball radius {radius:g} is below two cells ({2 * h:g})')
    x = grid.coordinates()
    if center is not None:
        x = x - np.asarray(center, dtype=np.float64)
        x -= grid.side_length * np.round(x / grid.side_length)
    distance = np.linalg.norm(x, axis=-1)
    return Field(np.clip((radius - distance) / h + 0.5, 0.0, 1.0), grid.side_length)


def single_tube(delta: float, grid: GridShape, direction: np.ndarray | None = None) -> Field:
    """Unnormalized tube weights through the origin, along ``e_n`` unless told otherwise."""
    if direction is None:
        direction = np.eye(grid.dim)[-1]
    return Field(tube_weights(TubeSpec(direction, delta), grid), grid.side_length)


def _random_rotation(rng: np.random.Generator, dim: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((dim, dim)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def union_directions(count: int, dim: int, seed: int) -> np.ndarray:
    """Directions of :func:`rotated_tube_union`: equispaced lines with a seeded offset."""
    if count < 1:
        raise DomainError(f'count must be at least 1, got {count}')
    rng = _generator(seed)
    if dim == 2:
        offset = rng.uniform(0.0, math.pi / count)
        angles = offset + np.arange(count) * math.pi / count
        return np.stack([np.cos(angles), np.sin(angles)], axis=1)
    if dim == 3:
        if count == 1:
            return _random_rotation(rng, 3)[:, -1][np.newaxis]
        directions = DirectionSet.fibonacci(1.0 / 2, count).directions @ _random_rotation(rng, 3).T
        return directions / np.linalg.norm(directions, axis=1, keepdims=True)
    raise GridError(f'tube unions are built in 2 or 3 dimensions, got {dim}')


def rotated_tube_union(count: int, delta: float, grid: GridShape, seed: int = 0) -> Field:
    """Pointwise maximum of ``count`` tubes through the origin at equispaced angles."""
    values = np.zeros(grid.shape)
    for direction in union_directions(count, grid.dim, seed):
        np.maximum(values, tube_weights(TubeSpec(direction, delta), grid), out=values)
    return Field(values, grid.side_length)


def bandlimited_random(seed: int, cutoff: float, grid: GridShape) -> Field:
    """White noise projected onto ``|xi| <= cutoff`` and scaled to unit L2 norm."""
    if not 0 < cutoff <= grid.nyquist:
        raise DomainError(f'cutoff must lie in (0, {grid.nyquist:g}], got {cutoff}')
    rng = _generator(seed)
    spectrum = scipy.fft.fftn(rng.standard_normal(grid.shape))
    mask = np.linalg.norm(grid.frequencies(), axis=-1) <= cutoff
    values = scipy.fft.ifftn(spectrum * mask).real
    raw = Field(values, grid.side_length)
    return Field(values / lp_norm(raw, 2), grid.side_length)


def _squared_bump(width: float, grid: GridShape, profile: BumpProfile) -> np.ndarray:
    symbol = profile(width * np.linalg.norm(grid.frequencies(), axis=-1))
    bump = scipy.fft.ifftn(symbol).real / grid.cell_volume
    squared = bump**2
    return squared / (grid.cell_volume * np.sum(squared))


def bump_sum(seed: int, count: int, grid: GridShape) -> Field:
    """Sum of ``count`` squared bumps of unit mass at random cells with positive amplitudes."""
    if count < 0:
        raise DomainError(f'count must be nonnegative, got {count}')
    rng = _generator(seed)
    profile = BumpProfile()
    low = 8 * grid.spacing
    high = max(low, grid.side_length / 8)
    values = np.zeros(grid.shape)
    axes = tuple(range(grid.dim))
    for _ in range(count):
        position = tuple(int(p) for p in rng.integers(0, grid.samples, size=grid.dim))
        width = float(rng.uniform(low, high))
        amplitude = float(rng.uniform(0.5, 1.5))
        values += amplitude * np.roll(_squared_bump(width, grid, profile), position, axis=axes)
    return Field(values, grid.side_length)


def _check_kind(_, attribute, value: str) -> None:
    if value not in KINDS:
        raise ConfigError(f'unknown test set kind {value!r}, expected one of {", ".join(KINDS)}')


@define(frozen=True)
class TestSpec:
    """A reproducible recipe for one test input.

    Unset parameters take defaults that depend on ``delta`` and the grid when the field is
    generated, so one spec describes a whole delta-adapted family.
    """

    __test__ = False

    kind: Kind = field(validator=_check_kind)
    seed: int = 0
    delta: float | None = None
    radius: float | None = None
    count: int | None = None
    levels: int | None = None
    cutoff: float | None = None

    def adapted(self, delta: float) -> 'TestSpec':
        return evolve(self, delta=delta)

    def _delta(self, grid: GridShape) -> float:
        if self.delta is not None:
            return self.delta
        return max(2 * grid.spacing, 1.0 / 16)

    def generate(self, grid: GridShape) -> Field:
        if self.kind == 'constant':
            return Field.constant(grid, 1.0)
        if self.kind == 'ball':
            radius = self.radius if self.radius is not None else grid.side_length / 4
            return ball_indicator(radius, None, grid)
        if self.kind == 'tube':
            return single_tube(self._delta(grid), grid)
        if self.kind == 'tube_union':
            delta = self._delta(grid)
            count = self.count if self.count is not None else int(math.ceil(math.pi / delta))
            return rotated_tube_union(count, delta, grid, self.seed)
        if self.kind == 'perron_tree':
            delta = self._delta(grid)
            levels = self.levels if self.levels is not None else adapted_levels(delta, grid)
            return perron_tree(levels, delta, grid).image
        if self.kind == 'bandlimited_random':
            return bandlimited_random(self.seed, self.cutoff if self.cutoff is not None else 1.0, grid)
        return bump_sum(self.seed, self.count if self.count is not None else 8, grid)

    def to_dict(self) -> dict[str, Any]:
        return {key: value for key, value in asdict(self).items() if value is not None}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> 'TestSpec':
        unknown = set(data) - {a.name for a in cls.__attrs_attrs__}
        if unknown:
            raise ConfigError(f'unknown test set parameters: {", ".join(sorted(unknown))}')
        return cls(**data)


def describe(spec: TestSpec, sample: Field) -> dict[str, Any]:
    """Manifest entry: the spec, the measure of the support and the usual norms."""
    return {
        'spec': spec.to_dict(),
        'grid': {'dim': sample.dim, 'N': sample.samples, 'L': sample.side_length},
        'measure': sample.grid.cell_volume * float(np.count_nonzero(sample.values)),
        'norms': {
            'l1': lp_norm(sample, 1),
            'l2': lp_norm(sample, 2),
            'linf': lp_norm(sample, math.inf),
        },
    }


def write_manifest(path: PathLike, entries: list[dict[str, Any]]) -> None:
    write_json(path, {'entries': entries})
