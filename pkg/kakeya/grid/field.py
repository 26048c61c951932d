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

"""Sampled fields on the n-torus [0, L)^n and their spectral transforms.

Frequencies follow the convention ``f^(xi) = int f(t) exp(-2 pi i <xi, t>) dt`` with
physical frequency ``xi = m / L`` for the integer index ``m`` in ``[-N/2, N/2)``.
Arrays are stored in FFT order: index ``j`` holds the cell at ``x = j h`` and the
frequency ``m = j`` for ``j < N/2`` and ``m = j - N`` otherwise.
"""
import functools
import logging
import math
import warnings
from typing import Callable

import numpy as np
import scipy.fft
import typing_extensions
from attrs import define, field

from ..errors import DomainError, GridError, ResolutionWarning

__all__ = [
    'GridShape',
    'Field',
    'SpectralField',
    'forward_transform',
    'inverse_transform',
    'lp_norm',
    'spectral_l2_norm',
    'convolve',
    'apply_multiplier',
    'spectral_gradient',
    'apply_grid_map',
    'cyclic_shift',
    'spectral_refine',
    'minimal_indices',
]

_log = logging.getLogger(__name__)

IMAGINARY_TOLERANCE = 1e-8


def _is_power_of_two(value: int) -> bool:
    return value >= 2 and value & (value - 1) == 0


@functools.lru_cache(maxsize=32)
def minimal_indices(samples: int) -> np.ndarray:
    """Integer torus-minimal indices ``[0, 1, ..., N/2 - 1, -N/2, ..., -1]``."""
    m = np.arange(samples, dtype=np.int64)
    m[m >= samples // 2] -= samples
    m.flags.writeable = False
    return m


@functools.lru_cache(maxsize=16)
def _index_vectors(dim: int, samples: int) -> np.ndarray:
    m = minimal_indices(samples)
    vectors = np.stack(np.meshgrid(*([m] * dim), indexing='ij'), axis=-1)
    vectors.flags.writeable = False
    return vectors


@functools.lru_cache(maxsize=16)
def _nyquist_shell(dim: int, samples: int) -> np.ndarray:
    shell = np.any(_index_vectors(dim, samples) == -(samples // 2), axis=-1)
    shell.flags.writeable = False
    return shell


def _check_samples(_, attribute, value: int) -> None:
    if not _is_power_of_two(value):
        raise GridError(f'{attribute.name} must be a power of two, got {value}')


def _check_dim(_, attribute, value: int) -> None:
    if value not in (2, 3):
        raise GridError(f'{attribute.name} must be 2 or 3, got {value}')


def _check_length(_, attribute, value: float) -> None:
    if not (math.isfinite(value) and value > 0):
        raise GridError(f'{attribute.name} must be a positive finite number, got {value}')


@define(frozen=True)
class GridShape:
    """Shape metadata shared by every field on one torus."""

    dim: int = field(validator=_check_dim)
    samples: int = field(validator=_check_samples)
    side_length: float = field(converter=float, validator=_check_length)

    @property
    def spacing(self) -> float:
        return self.side_length / self.samples

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.samples,) * self.dim

    @property
    def cell_volume(self) -> float:
        return self.spacing**self.dim

    @property
    def nyquist(self) -> float:
        """Largest physical frequency per axis, ``N / (2 L)``."""
        return self.samples / (2 * self.side_length)

    def index_vectors(self) -> np.ndarray:
        """Torus-minimal integer index vectors, shape ``(*shape, dim)`` (read-only)."""
        return _index_vectors(self.dim, self.samples)

    def coordinates(self) -> np.ndarray:
        """Torus-minimal positions ``m h``, shape ``(*shape, dim)``."""
        return self.index_vectors() * self.spacing

    def radius(self) -> np.ndarray:
        """Torus-minimal Euclidean distance to the origin cell."""
        return np.linalg.norm(self.coordinates(), axis=-1)

    def frequencies(self) -> np.ndarray:
        """Physical frequency vectors ``m / L``, shape ``(*shape, dim)``."""
        return self.index_vectors() / self.side_length

    def nyquist_shell(self) -> np.ndarray:
        """Boolean mask of the frequencies with some component at ``-N/2``."""
        return _nyquist_shell(self.dim, self.samples)

    def refined(self, factor: int = 2) -> 'GridShape':
        return GridShape(self.dim, self.samples * factor, self.side_length)

    def distances_from(self, points: np.ndarray) -> np.ndarray:
        """Torus-minimal distance from each index row of ``points`` to every cell, shape ``(P, *shape)``."""
        points = np.atleast_2d(np.asarray(points, dtype=np.int64))
        m = minimal_indices(self.samples)
        index = np.arange(self.samples)
        squared = np.zeros((points.shape[0],) + self.shape)
        for axis in range(self.dim):
            diff = np.mod(index[np.newaxis, :] - points[:, axis, np.newaxis], self.samples)
            shape = [points.shape[0]] + [1] * self.dim
            shape[axis + 1] = self.samples
            squared = squared + ((m[diff] * self.spacing) ** 2).reshape(shape)
        return np.sqrt(squared)


def _as_real_array(values) -> np.ndarray:
    array = np.array(values, dtype=np.float64)
    array.flags.writeable = False
    return array


def _check_values(_, attribute, value: np.ndarray) -> None:
    if value.ndim not in (2, 3):
        raise GridError(f'{attribute.name} must be a 2 or 3 dimensional array, got {value.ndim} dimensions')
    if len(set(value.shape)) != 1:
        raise GridError(f'{attribute.name} must have equal axes, got shape {value.shape}')
    if not _is_power_of_two(value.shape[0]):
        raise GridError(f'samples per axis must be a power of two, got {value.shape[0]}')
    if not np.all(np.isfinite(value)):
        raise GridError(f'{attribute.name} contains NaN or Inf')


@define(frozen=True, eq=False)
class Field:
    """A real scalar field sampled on a uniform grid of the torus ``[0, L)^n``."""

    values: np.ndarray = field(converter=_as_real_array, validator=_check_values)
    side_length: float = field(converter=float, validator=_check_length)

    @property
    def grid(self) -> GridShape:
        return GridShape(self.values.ndim, self.values.shape[0], self.side_length)

    @property
    def dim(self) -> int:
        return self.values.ndim

    @property
    def samples(self) -> int:
        return self.values.shape[0]

    @property
    def spacing(self) -> float:
        return self.side_length / self.samples

    @classmethod
    def zeros(cls, grid: GridShape) -> typing_extensions.Self:
        return cls(np.zeros(grid.shape), grid.side_length)

    @classmethod
    def constant(cls, grid: GridShape, value: float) -> typing_extensions.Self:
        return cls(np.full(grid.shape, float(value)), grid.side_length)

    @classmethod
    def from_function(cls, grid: GridShape, func: Callable[[np.ndarray], np.ndarray]) -> typing_extensions.Self:
        """Sample ``func`` at torus-minimal coordinates (last axis holds the vector)."""
        return cls(func(grid.coordinates()), grid.side_length)

    def same_grid(self, other: 'Field | SpectralField') -> bool:
        return self.grid == other.grid

    def map(self, func: Callable[[np.ndarray], np.ndarray]) -> 'Field':
        return Field(func(self.values), self.side_length)

    def __abs__(self) -> 'Field':
        return Field(np.abs(self.values), self.side_length)

    def __add__(self, other: 'Field') -> 'Field':
        _require_same_grid(self, other)
        return Field(self.values + other.values, self.side_length)

    def __mul__(self, scalar: float) -> 'Field':
        return Field(self.values * scalar, self.side_length)

    __rmul__ = __mul__


def _check_coefficients(_, attribute, value: np.ndarray) -> None:
    if value.ndim not in (2, 3) or len(set(value.shape)) != 1 or not _is_power_of_two(value.shape[0]):
        raise GridError(f'{attribute.name} must be a cube with a power of two side, got shape {value.shape}')


def _as_complex_array(values) -> np.ndarray:
    array = np.array(values, dtype=np.complex128)
    array.flags.writeable = False
    return array


@define(frozen=True, eq=False)
class SpectralField:
    """Fourier coefficients of a field, indexed by integer frequency in FFT order."""

    coefficients: np.ndarray = field(converter=_as_complex_array, validator=_check_coefficients)
    side_length: float = field(converter=float, validator=_check_length)

    @property
    def grid(self) -> GridShape:
        return GridShape(self.coefficients.ndim, self.coefficients.shape[0], self.side_length)

    def frequencies(self) -> np.ndarray:
        return self.grid.frequencies()

    def is_hermitian(self, tolerance: float = 1e-12) -> bool:
        """Whether ``F(-m) = conj(F(m))``, i.e. whether the spatial field is real."""
        flipped = self.coefficients
        for axis in range(flipped.ndim):
            flipped = np.roll(np.flip(flipped, axis=axis), 1, axis=axis)
        scale = max(1.0, float(np.max(np.abs(self.coefficients))))
        return bool(np.max(np.abs(flipped - np.conj(self.coefficients))) <= tolerance * scale)


def _require_same_grid(f: Field | SpectralField, g: Field | SpectralField) -> None:
    if f.grid != g.grid:
        raise GridError(f'grid mismatch: {f.grid} versus {g.grid}')


def forward_transform(f: Field) -> SpectralField:
    """Coefficient at ``m`` approximates ``int f(t) exp(-2 pi i <m/L, t>) dt``."""
    return SpectralField(scipy.fft.fftn(f.values) * f.grid.cell_volume, f.side_length)


def _to_real(values: np.ndarray) -> np.ndarray:
    scale = max(1.0, float(np.max(np.abs(values.real), initial=0.0)))
    imaginary = float(np.max(np.abs(values.imag), initial=0.0))
    if imaginary > IMAGINARY_TOLERANCE * scale:
        warnings.warn(
            f'inverse transform carries an imaginary part of {imaginary:.3e}; '
            'the symbol is not Hermitian at the Nyquist shell',
            ResolutionWarning,
            stacklevel=3,
        )
    return values.real


def inverse_transform(spectrum: SpectralField) -> Field:
    values = scipy.fft.ifftn(spectrum.coefficients) / spectrum.grid.cell_volume
    return Field(_to_real(values), spectrum.side_length)


def lp_norm(f: Field, p: float) -> float:
    """``(h^n sum |f|^p)^(1/p)``, or ``max |f|`` for ``p = inf``."""
    if not p > 0:
        raise DomainError(f'lp_norm needs p > 0, got {p}')
    magnitude = np.abs(f.values)
    if math.isinf(p):
        return float(np.max(magnitude))
    return float((f.grid.cell_volume * np.sum(magnitude**p)) ** (1.0 / p))


def spectral_l2_norm(spectrum: SpectralField) -> float:
    """``(L^-n sum |F|^2)^(1/2)``, equal to the spatial L2 norm by Parseval."""
    grid = spectrum.grid
    return float(math.sqrt(np.sum(np.abs(spectrum.coefficients) ** 2) / grid.side_length**grid.dim))


def convolve(f: Field, g: Field) -> Field:
    """Circular convolution on the torus, computed spectrally."""
    _require_same_grid(f, g)
    product = forward_transform(f).coefficients * forward_transform(g).coefficients
    return inverse_transform(SpectralField(product, f.side_length))


def apply_multiplier(f: Field, symbol: np.ndarray) -> Field:
    """Apply the Fourier multiplier sampled at the grid frequencies (FFT order)."""
    if symbol.shape != f.values.shape:
        raise GridError(f'symbol shape {symbol.shape} does not match field shape {f.values.shape}')
    values = scipy.fft.ifftn(scipy.fft.fftn(f.values) * symbol)
    return Field(_to_real(values), f.side_length)


def spectral_gradient(f: Field) -> list[Field]:
    """Partial derivatives through the multipliers ``2 pi i xi_j``."""
    spectrum = scipy.fft.fftn(f.values)
    xi = f.grid.frequencies()
    gradient = []
    for axis in range(f.dim):
        # the Nyquist component of an odd multiplier has no partner
        nyquist = minimal_indices(f.samples)[_axis_selector(f.dim, axis)] == -(f.samples // 2)
        multiplier = np.where(nyquist, 0.0, 2j * np.pi * xi[..., axis])
        gradient.append(Field(scipy.fft.ifftn(spectrum * multiplier).real, f.side_length))
    return gradient


def _axis_selector(dim: int, axis: int) -> tuple:
    return tuple(slice(None) if i == axis else np.newaxis for i in range(dim))


def apply_grid_map(f: Field, matrix: np.ndarray) -> Field:
    """``g(x) = f(A^-1 x)`` for a signed permutation matrix ``A`` (exact on the grid)."""
    matrix = np.asarray(matrix)
    if matrix.shape != (f.dim, f.dim):
        raise GridError(f'map must be {f.dim}x{f.dim}, got {matrix.shape}')
    if not (np.all(np.isin(matrix, (-1, 0, 1))) and np.all(np.abs(matrix).sum(axis=0) == 1)):
        raise DomainError('only signed permutation matrices are exact on the grid')
    if not np.all(np.abs(matrix).sum(axis=1) == 1):
        raise DomainError('only signed permutation matrices are exact on the grid')
    index = f.grid.index_vectors()
    source = np.mod(index @ matrix.astype(np.int64), f.samples)
    return Field(f.values[tuple(np.moveaxis(source, -1, 0))], f.side_length)


def cyclic_shift(f: Field, shift: tuple[int, ...]) -> Field:
    return Field(np.roll(f.values, shift, axis=tuple(range(f.dim))), f.side_length)


def spectral_refine(f: Field, factor: int = 2) -> Field:
    """Trigonometric interpolation of ``f`` onto a grid with ``factor`` times the samples.

    Exact for fields whose spectrum vanishes on the Nyquist shell.
    """
    if not _is_power_of_two(factor):
        raise GridError(f'refinement factor must be a power of two >= 2, got {factor}')
    grid = f.grid
    fine = grid.refined(factor)
    coefficients = np.zeros(fine.shape, dtype=np.complex128)
    target = tuple(np.moveaxis(np.mod(grid.index_vectors(), fine.samples), -1, 0))
    coefficients[target] = scipy.fft.fftn(f.values)
    values = scipy.fft.ifftn(coefficients) * factor**grid.dim
    return Field(_to_real(values), f.side_length)
