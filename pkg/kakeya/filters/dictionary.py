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

"""A finite, normalized family of Schwartz test functions.

Every member carries a closed-form spectral evaluator; members with a closed-form
spatial expression carry that as well. Hermite members use the Fourier eigenfunctions
``h_k(u) = H_k(sqrt(2 pi) u) exp(-pi u^2)`` whose transform is ``(-i)^k h_k``.
"""
import itertools
import logging
import math
from typing import Callable, Iterator, Literal, Sequence

import numpy as np
import scipy.fft
import typing_extensions
from attrs import define, evolve, field

from ..errors import ConfigError, DomainError
from ..grid import Field, GridShape, inverse_transform, SpectralField
from .profile import BumpProfile

__all__ = [
    'TestFunction',
    'TestDictionary',
    'Normalization',
    'MEMBER_NAMES',
    'build_dictionary',
    'estimate_seminorm',
    'reference_grid',
]

_log = logging.getLogger(__name__)

Normalization = Literal['mass', 'seminorm']
Evaluator = Callable[[np.ndarray], np.ndarray]

MEMBER_NAMES = ('phi', 'gaussian', 'hermite_1', 'hermite_n', 'hermite_2', 'hermite_11', 'cosine_bump')

ZERO_MASS = 1e-9


@define(frozen=True, eq=False)
class TestFunction:
    """One dictionary member ``scale * Upsilon(x / dilation) / dilation^n``."""

    __test__ = False

    name: str
    dim: int
    raw_symbol: Evaluator = field(repr=False)
    raw_spatial: Evaluator | None = field(default=None, repr=False)
    scale: float = 1.0
    dilation: float = 1.0
    l1_mass: float = math.nan
    """L1 norm of the normalized member, estimated on the reference grid."""
    seminorm: float = math.nan
    """Largest grid-estimated seminorm of the normalized member, if it was measured."""

    def symbol(self, xi: np.ndarray) -> np.ndarray:
        return self.scale * self.raw_symbol(self.dilation * np.asarray(xi, dtype=np.float64))

    def spatial(self, x: np.ndarray) -> np.ndarray:
        if self.raw_spatial is None:
            raise DomainError(f'{self.name} has no closed-form spatial expression; sample it on a grid instead')
        x = np.asarray(x, dtype=np.float64)
        n = x.shape[-1]
        return self.scale * self.raw_spatial(x / self.dilation) / self.dilation**n

    @property
    def mass(self) -> float:
        """``Upsilon^(0)``, the integral of the member."""
        origin = np.zeros((1, self.dim))
        return float(np.real(self.symbol(origin))[0])

    def sample(self, grid: GridShape) -> Field:
        """Synthesize the (periodized) member from its symbol."""
        spectrum = SpectralField(self.symbol(grid.frequencies()), grid.side_length)
        return inverse_transform(spectrum)

    def dilate(self, factor: float) -> typing_extensions.Self:
        """``Upsilon_t(x) = t^-n Upsilon(x / t)``; the L1 norm is unchanged."""
        if not factor > 0:
            raise DomainError(f'dilation must be positive, got {factor}')
        return evolve(self, dilation=self.dilation * factor)

    def rescaled(self, scale: float, **measured: float) -> typing_extensions.Self:
        return evolve(self, scale=scale, **measured)


def _hermite(degree: int, u: np.ndarray) -> np.ndarray:
    gauss = np.exp(-np.pi * u**2)
    if degree == 0:
        return gauss
    if degree == 1:
        return 2 * math.sqrt(2 * math.pi) * u * gauss
    if degree == 2:
        return (8 * math.pi * u**2 - 2) * gauss
    raise DomainError(f'hermite degree must be at most 2, got {degree}')


def _hermite_pair(degrees: tuple[int, ...]) -> tuple[Evaluator, Evaluator]:
    phase = (-1j) ** sum(degrees)

    def spatial(x: np.ndarray) -> np.ndarray:
        value = np.ones(np.shape(x)[:-1])
        for axis, degree in enumerate(degrees):
            value = value * _hermite(degree, x[..., axis])
        return value

    def symbol(xi: np.ndarray) -> np.ndarray:
        if phase.imag == 0:
            return phase.real * spatial(xi)
        return phase * spatial(xi)

    return symbol, spatial


def _hermite_degrees(name: str, dim: int) -> tuple[int, ...] | None:
    rest = (0,) * (dim - 1)
    return {
        'gaussian': (0,) + rest,
        'hermite_1': (1,) + rest,
        'hermite_n': rest + (1,),
        'hermite_2': (2,) + rest,
        'hermite_11': (1, 1) + (0,) * (dim - 2),
    }.get(name)


def _raw_member(name: str, dim: int, profile: BumpProfile) -> TestFunction:
    if name == 'phi':
        return TestFunction(name, dim, profile.symbol)

    if name == 'cosine_bump':
        shift = np.zeros(dim)
        shift[-1] = 1.0

        def symbol(xi: np.ndarray) -> np.ndarray:
            return 0.5 * (profile.symbol(xi - shift) + profile.symbol(xi + shift))

        return TestFunction(name, dim, symbol)

    degrees = _hermite_degrees(name, dim)
    if degrees is None:
        raise ConfigError(f'unknown dictionary member {name!r}, expected one of {", ".join(MEMBER_NAMES)}')
    symbol, spatial = _hermite_pair(degrees)
    return TestFunction(name, dim, symbol, spatial)


def reference_grid(dim: int) -> GridShape:
    """Grid on which dictionary constants are measured."""
    return GridShape(dim, 256 if dim == 2 else 64, 8.0)


def _multi_indices(dim: int, order: int) -> list[tuple[int, ...]]:
    return [index for index in itertools.product(range(order + 1), repeat=dim) if sum(index) <= order]


def estimate_seminorm(member: TestFunction, grid: GridShape, order: int) -> float:
    """``max |x^alpha d^beta Upsilon|`` over the grid for ``|alpha|, |beta| <= order``."""
    xi = grid.frequencies()
    x = grid.coordinates()
    spectrum = member.symbol(xi)
    indices = _multi_indices(grid.dim, order)
    best = 0.0
    for beta in indices:
        multiplier = np.prod((2j * np.pi * xi) ** np.array(beta), axis=-1)
        derivative = np.abs(scipy.fft.ifftn(spectrum * multiplier)) / grid.cell_volume
        for alpha in indices:
            monomial = np.abs(np.prod(x ** np.array(alpha), axis=-1))
            best = max(best, float(np.max(monomial * derivative)))
    return best


@define(frozen=True, eq=False)
class TestDictionary:
    """Finite family standing in for the unit ball of a Schwartz seminorm class."""

    __test__ = False

    dim: int
    members: tuple[TestFunction, ...]
    normalization: Normalization = 'mass'
    order: int = 0

    def __iter__(self) -> Iterator[TestFunction]:
        return iter(self.members)

    def __len__(self) -> int:
        return len(self.members)

    def __getitem__(self, name: str) -> TestFunction:
        for member in self.members:
            if member.name == name:
                return member
        raise KeyError(name)

    @property
    def names(self) -> list[str]:
        return [member.name for member in self.members]

    @property
    def max_l1_mass(self) -> float:
        return max(member.l1_mass for member in self.members)

    def subset(self, names: Sequence[str]) -> typing_extensions.Self:
        return evolve(self, members=tuple(self[name] for name in names))


def build_dictionary(
    dim: int,
    names: Sequence[str] | None = None,
    *,
    normalization: Normalization = 'mass',
    order: int | None = None,
    profile: BumpProfile | None = None,
) -> TestDictionary:
    """Build and normalize the dictionary.

    ``mass`` scales members with nonzero integral to unit ``|mass|`` and zero-mean members
    to unit L1 norm. ``seminorm`` scales every member so that the seminorms up to
    ``order`` (default ``2n + 2``) measured on :func:`reference_grid` are at most one.
    """
    if normalization not in ('mass', 'seminorm'):
        raise ConfigError(f'normalization must be mass or seminorm, got {normalization!r}')
    profile = profile or BumpProfile()
    order = 2 * dim + 2 if order is None else order
    grid = reference_grid(dim)

    members = []
    for name in names or MEMBER_NAMES:
        raw = _raw_member(name, dim, profile)
        raw_l1 = float(grid.cell_volume * np.sum(np.abs(raw.sample(grid).values)))
        if normalization == 'mass':
            mass = abs(raw.mass)
            scale = 1.0 / mass if mass > ZERO_MASS else 1.0 / raw_l1
            member = raw.rescaled(scale, l1_mass=scale * raw_l1)
        else:
            raw_seminorm = estimate_seminorm(raw, grid, order)
            scale = 1.0 / raw_seminorm
            member = raw.rescaled(scale, l1_mass=scale * raw_l1, seminorm=1.0)
        _log.debug(f'dictionary member {name}: scale={member.scale:.6g} l1={member.l1_mass:.6g}')
        members.append(member)

    return TestDictionary(dim, tuple(members), normalization, order)
