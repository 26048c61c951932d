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

"""Tube geometry, direction samples and rotation families."""
import itertools
import logging
import math
from typing import Iterator

import numpy as np
import scipy.spatial
import typing_extensions
from attrs import define, field

from ..errors import DomainError, GridError, ResolutionError
from ..grid import Field, GridShape

__all__ = [
    'TubeSpec',
    'DirectionSet',
    'RotationSet',
    'sphere_measure',
    'frame_for',
    'tube_weights',
    'tube_indicator',
    'tube_core',
]

_log = logging.getLogger(__name__)

UNIT_TOLERANCE = 1e-12


def sphere_measure(dim: int) -> float:
    """Surface measure of the unit sphere in ``R^dim``."""
    return 2 * math.pi ** (dim / 2) / math.gamma(dim / 2)


def frame_for(direction: np.ndarray) -> np.ndarray:
    """A rotation ``R`` whose last column is ``direction`` (``R e_n = omega``)."""
    omega = np.asarray(direction, dtype=np.float64)
    if omega.shape == (2,):
        c, s = omega
        return np.array([[s, c], [-c, s]])
    if omega.shape != (3,):
        raise GridError(f'directions must have 2 or 3 components, got {omega.shape}')

    cosine = omega[2]
    if cosine < -1 + 1e-12:
        return np.diag([1.0, -1.0, -1.0])
    # Rodrigues rotation taking e_3 onto omega
    axis = np.array([-omega[1], omega[0], 0.0])
    cross = np.array([[0.0, -axis[2], axis[1]], [axis[2], 0.0, -axis[0]], [-axis[1], axis[0], 0.0]])
    return np.eye(3) + cross + cross @ cross / (1.0 + cosine)


def _as_direction(value) -> np.ndarray:
    array = np.array(value, dtype=np.float64)
    array.flags.writeable = False
    return array


def _check_unit(_, attribute, value: np.ndarray) -> None:
    if value.ndim != 1 or value.shape[0] not in (2, 3):
        raise GridError(f'{attribute.name} must be a 2 or 3 component vector, got shape {value.shape}')
    if abs(float(np.linalg.norm(value)) - 1.0) > UNIT_TOLERANCE:
        raise DomainError(f'{attribute.name} must be a unit vector, got norm {np.linalg.norm(value)!r}')


def _check_width(_, attribute, value: float) -> None:
    if not 0 < value < 1:
        raise DomainError(f'tube {attribute.name} must lie in (0, 1), got {value}')


@define(frozen=True, eq=False)
class TubeSpec:
    """A ``1 x delta^(n-1)`` box with its long axis along ``direction``."""

    direction: np.ndarray = field(converter=_as_direction, validator=_check_unit)
    width: float = field(converter=float, validator=_check_width)
    center: np.ndarray | None = field(default=None)

    length = 1.0

    @property
    def dim(self) -> int:
        return self.direction.shape[0]

    @property
    def half_extents(self) -> np.ndarray:
        half = np.full(self.dim, self.width / 2)
        half[-1] = self.length / 2
        return half


def _feather(distance: np.ndarray, half: float, spacing: float) -> np.ndarray:
    return np.clip((half - distance) / spacing + 0.5, 0.0, 1.0)


def _image_offsets(spec: TubeSpec, grid: GridShape) -> Iterator[np.ndarray]:
    # lattice translates of the box that can reach the fundamental domain
    reach = float(np.linalg.norm(spec.half_extents)) + grid.spacing
    count = int(math.floor(reach / grid.side_length + 0.5))
    for shift in itertools.product(range(-count, count + 1), repeat=grid.dim):
        yield np.array(shift, dtype=np.float64) * grid.side_length


def _local_coordinates(spec: TubeSpec, grid: GridShape) -> np.ndarray:
    x = grid.coordinates()
    if spec.center is not None:
        x = x - np.asarray(spec.center, dtype=np.float64)
        x -= grid.side_length * np.round(x / grid.side_length)
    return x


def tube_weights(spec: TubeSpec, grid: GridShape, *, core: bool = False) -> np.ndarray:
    """Feathered tube weights in ``[0, 1]``, periodized over the torus.

    With ``core=True`` returns the boolean mask of cells whose feather weight is one
    along every local axis.
    """
    if spec.dim != grid.dim:
        raise GridError(f'tube of dimension {spec.dim} on a {grid.dim} dimensional grid')
    h = grid.spacing
    if spec.width < 2 * h:
        raise ResolutionError(f'tube width {spec.width:g} is below two cells ({2 * h:g})')

    frame = frame_for(spec.direction)
    half = spec.half_extents
    x = _local_coordinates(spec, grid)

    total = np.zeros(grid.shape, dtype=bool if core else np.float64)
    for offset in _image_offsets(spec, grid):
        distance = np.abs((x + offset) @ frame)
        if core:
            total |= np.all(distance <= half - h / 2, axis=-1)
        else:
            weight = np.ones(grid.shape)
            for axis in range(grid.dim):
                weight *= _feather(distance[..., axis], half[axis], h)
            total += weight
    return total if core else np.minimum(total, 1.0)


def tube_indicator(direction: np.ndarray, width: float, grid: GridShape) -> Field:
    """Tube averaging kernel centred at the origin, normalized to discrete mass one."""
    weights = tube_weights(TubeSpec(direction, width), grid)
    return Field(weights / (grid.cell_volume * np.sum(weights)), grid.side_length)


def tube_core(direction: np.ndarray, width: float, grid: GridShape) -> np.ndarray:
    """Offsets (as an FFT-ordered mask) of the cells inside the unfeathered tube core."""
    return tube_weights(TubeSpec(direction, width), grid, core=True)


def _as_matrix_stack(value) -> np.ndarray:
    array = np.array(value, dtype=np.float64)
    array.flags.writeable = False
    return array


def _check_directions(instance: 'DirectionSet', attribute, value: np.ndarray) -> None:
    if value.ndim != 2 or value.shape[1] not in (2, 3) or value.shape[0] == 0:
        raise GridError(f'directions must be a non-empty (M, n) array, got shape {value.shape}')
    norms = np.linalg.norm(value, axis=1)
    if np.max(np.abs(norms - 1.0)) > UNIT_TOLERANCE:
        raise DomainError('every direction must be a unit vector')


def _check_weights(instance: 'DirectionSet', attribute, value: np.ndarray) -> None:
    if value.shape != (instance.directions.shape[0],):
        raise GridError(f'expected one weight per direction, got {value.shape}')
    if np.any(value <= 0):
        raise DomainError('quadrature weights must be positive')
    measure = sphere_measure(instance.directions.shape[1])
    if abs(float(np.sum(value)) - measure) > 1e-6:
        raise DomainError(f'quadrature weights sum to {np.sum(value):.8f}, expected {measure:.8f}')


@define(frozen=True, eq=False)
class DirectionSet:
    """Quadrature-weighted directions on the unit sphere.

    Directions stand for the unoriented line they span: ``omega`` and ``-omega`` give
    the same tube.
    """

    directions: np.ndarray = field(converter=_as_matrix_stack, validator=_check_directions)
    weights: np.ndarray = field(converter=_as_matrix_stack, validator=_check_weights)
    separation: float = field(converter=float)
    """Smallest angle between two distinct lines of the set, in radians."""

    @classmethod
    def circle(cls, delta: float, count: int | None = None) -> typing_extensions.Self:
        """Equispaced angles ``j pi / M`` on ``[0, pi)`` with ``M`` the largest even integer ``<= pi / delta``."""
        if count is None:
            if not 0 < delta < 1:
                raise DomainError(f'delta must lie in (0, 1), got {delta}')
            count = max(2, 2 * int(math.floor(math.pi / delta / 2)))
        if count < 1:
            raise DomainError(f'direction count must be positive, got {count}')
        angles = np.arange(count) * math.pi / count
        directions = np.stack([np.cos(angles), np.sin(angles)], axis=1)
        return cls(directions, np.full(count, 2 * math.pi / count), math.pi / count)

    @classmethod
    def fibonacci(cls, delta: float, count: int | None = None) -> typing_extensions.Self:
        """Fibonacci lattice on the sphere with ``ceil(4 pi / delta^2)`` nodes."""
        if count is None:
            if not 0 < delta < 1:
                raise DomainError(f'delta must lie in (0, 1), got {delta}')
            count = int(math.ceil(4 * math.pi / delta**2))
        if count < 2:
            raise DomainError(f'a spherical lattice needs at least two nodes, got {count}')
        index = np.arange(count) + 0.5
        z = 1.0 - 2.0 * index / count
        radius = np.sqrt(1.0 - z**2)
        azimuth = math.pi * (3.0 - math.sqrt(5.0)) * index
        directions = np.stack([radius * np.cos(azimuth), radius * np.sin(azimuth), z], axis=1)
        directions /= np.linalg.norm(directions, axis=1, keepdims=True)
        return cls(directions, np.full(count, 4 * math.pi / count), _line_separation(directions))

    @classmethod
    def for_delta(cls, dim: int, delta: float, count: int | None = None) -> typing_extensions.Self:
        if dim == 2:
            return cls.circle(delta, count)
        if dim == 3:
            return cls.fibonacci(delta, count)
        raise GridError(f'directions are sampled in 2 or 3 dimensions, got {dim}')

    @property
    def dim(self) -> int:
        return self.directions.shape[1]

    def __len__(self) -> int:
        return self.directions.shape[0]

    def __iter__(self) -> Iterator[np.ndarray]:
        return iter(self.directions)

    def match(self, direction: np.ndarray) -> int:
        """Index of the sampled line closest to the line spanned by ``direction``."""
        return int(np.argmax(np.abs(self.directions @ np.asarray(direction, dtype=np.float64))))


def _line_separation(directions: np.ndarray) -> float:
    # lines: compare each point against the set and its antipodes
    points = np.concatenate([directions, -directions])
    tree = scipy.spatial.cKDTree(points)
    distances, _ = tree.query(directions, k=3)
    chords = distances[:, 1:]
    # the antipode of a point is its own line
    chords = np.where(np.isclose(chords, 2.0), np.inf, chords)
    chord = float(np.min(chords))
    return 2 * math.asin(min(chord / 2, 1.0))


def _check_rotations(_, attribute, value: np.ndarray) -> None:
    if value.ndim != 3 or value.shape[1] != value.shape[2] or value.shape[0] == 0:
        raise GridError(f'{attribute.name} must be a non-empty (K, n, n) array, got shape {value.shape}')
    eye = np.eye(value.shape[1])
    gram = np.einsum('kji,kjl->kil', value, value)
    if np.max(np.abs(gram - eye)) > 1e-12:
        raise DomainError('every matrix of a rotation set must be orthogonal')


@define(frozen=True, eq=False)
class RotationSet:
    """A finite family of orthogonal matrices."""

    matrices: np.ndarray = field(converter=_as_matrix_stack, validator=_check_rotations)

    @classmethod
    def identity(cls, dim: int) -> typing_extensions.Self:
        return cls(np.eye(dim)[np.newaxis])

    @classmethod
    def from_directions(cls, directions: DirectionSet) -> typing_extensions.Self:
        """Rotations mapping ``e_n`` onto every sampled direction."""
        return cls(np.stack([frame_for(omega) for omega in directions]))

    @classmethod
    def quarter_turns(cls, dim: int) -> typing_extensions.Self:
        """Signed permutation matrices of determinant one (exact on the grid)."""
        matrices = []
        for permutation in itertools.permutations(range(dim)):
            for signs in itertools.product((1.0, -1.0), repeat=dim):
                matrix = np.zeros((dim, dim))
                matrix[np.arange(dim), permutation] = signs
                if np.linalg.det(matrix) > 0:
                    matrices.append(matrix)
        return cls(np.stack(matrices))

    @property
    def dim(self) -> int:
        return self.matrices.shape[1]

    def __len__(self) -> int:
        return self.matrices.shape[0]

    def __iter__(self) -> Iterator[np.ndarray]:
        return iter(self.matrices)

    def subsample(self, limit: int | None) -> typing_extensions.Self:
        """At most ``limit`` matrices, evenly spread over the family (the first is always kept)."""
        if limit is None or limit >= len(self):
            return self
        if limit < 1:
            raise DomainError(f'rotation limit must be positive, got {limit}')
        picks = np.unique(np.floor(np.arange(limit) * len(self) / limit).astype(int))
        return type(self)(self.matrices[picks])

    def union(self, other: 'RotationSet') -> 'RotationSet':
        return RotationSet(np.concatenate([self.matrices, other.matrices]))
