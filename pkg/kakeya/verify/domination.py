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

"""The pointwise chain bounding the smoothed maximal function by tangential maximal functions.

For a fixed scale ``t``, rotation ``A`` and member ``Upsilon`` the symbol
``Upsilon_I(t A^T xi)`` splits into band pieces ``E_k(xi) = eta[k](t A^T xi)`` times
``phi(c_k t xi)``. On the grid this gives, at every point ``x``,

    |f * K(x)| <= sum_k I_k T_(c_k t) f(x) + |f|_inf |tail|_1

with ``I_k = sum_y (1 + |y| / (c_k t))^N |E_k(y)|`` and ``T_s`` the tangential maximal
function of ``f`` against ``phi_s``. Both sides are evaluated exactly, so a violation
points at a convention or truncation bug rather than at discretization.
"""
import logging
import math
from typing import Any, Iterable, Sequence

import numpy as np
import scipy.fft
from attrs import define, field

from ..errors import DomainError, GridError
from ..filters import (
    SUPPORT_THRESHOLD,
    FilterBank,
    TestFunction,
    eta0_scale,
    eta0_symbol,
    eta1_scale,
    eta1_symbol,
)
from ..grid import Field, lp_norm
from ..maximal import RotationSet, tangential_maximal
from .sampling import sample_points

__all__ = ['DominationReport', 'DominationChain', 'ChainTerm', 'domination_check', 'DOMINATION_TOLERANCE']

_log = logging.getLogger(__name__)

DOMINATION_TOLERANCE = 1e-8


@define(frozen=True)
class ChainTerm:
    label: str
    scale: float
    """Scale ``c_k t`` of the tangential maximal function the term multiplies."""
    factor: float


@define(frozen=True, eq=False)
class _Combination:
    t: float
    rotation: int
    member: TestFunction = field(repr=False)
    terms: tuple[ChainTerm, ...]
    tail: float
    """``|tail|_1`` of the truncated resummation."""

    @property
    def factor_sum(self) -> float:
        return sum(term.factor for term in self.terms)


@define(frozen=True)
class DominationReport:
    points: int
    lhs_max: float
    min_slack: float
    """Smallest ``(RHS - LHS) / |f|_inf`` over the sampled points."""
    min_ratio: float
    """Smallest ``RHS / LHS`` over the points where ``LHS > 0``."""
    factor_sum: float
    """Largest ``sum_k I_k`` over scales, rotations and members."""
    tail: float
    """Largest ``|f|_inf |tail|_1`` left over by the truncated resummation."""
    contributions: dict[str, float] = field(repr=False)
    """Largest ``I_k`` per band kernel, keyed ``eta0[k]`` / ``eta1[k]``."""
    violations: list[dict[str, Any]] = field(repr=False)
    tolerance: float = DOMINATION_TOLERANCE

    @property
    def passed(self) -> bool:
        return not self.violations


def _pieces(bank: FilterBank, upsilon: TestFunction, t: float) -> list[tuple[str, Any, float]]:
    pieces = [(f'eta0[{k}]', eta0_symbol(bank, upsilon, k), eta0_scale(bank, k)) for k in range(bank.eta0_top + 1)]
    top = bank.k_cover(t * bank.max_frequency)
    pieces += [(f'eta1[{k}]', eta1_symbol(bank, upsilon, k), eta1_scale(bank, k)) for k in range(2, top + 1)]
    return pieces


@define(frozen=True, eq=False)
class DominationChain:
    """Weight factors of the chain for every ``(t, A, Upsilon)``; they do not depend on ``f``."""

    bank: FilterBank
    rotations: RotationSet = field(repr=False)
    weight_power: float
    combinations: tuple[_Combination, ...] = field(repr=False)

    @classmethod
    def build(
        cls,
        bank: FilterBank,
        members: Iterable[TestFunction],
        rotations: RotationSet,
        t_grid: Sequence[float],
        N: float,
    ) -> 'DominationChain':
        bank.require_regime()
        if not N > 0:
            raise DomainError(f'weight power must be positive, got {N}')
        t_values = [float(t) for t in t_grid]
        if not t_values or any(not t > 0 for t in t_values):
            raise DomainError(f't_grid must be non-empty and positive, got {t_values}')

        grid = bank.grid
        xi = grid.frequencies()
        radius = grid.radius()
        members = list(members)
        combinations = []
        for t in t_values:
            for a, rotation in enumerate(rotations):
                argument = t * (xi @ rotation)
                for upsilon in members:
                    target = upsilon.symbol(bank.anisotropic(argument))
                    resummed = np.zeros(grid.shape, dtype=np.complex128)
                    terms = []
                    for label, symbol, c in _pieces(bank, upsilon, t):
                        piece = symbol(argument)
                        if not np.any(np.abs(piece) > SUPPORT_THRESHOLD):
                            continue
                        resummed += piece * bank.phi_at_scale(c * t, xi)
                        weight = (1.0 + radius / (c * t)) ** N
                        terms.append(ChainTerm(label, c * t, float(np.sum(weight * np.abs(scipy.fft.ifftn(piece))))))
                    tail = float(np.sum(np.abs(scipy.fft.ifftn(target - resummed))))
                    combinations.append(_Combination(t, a, upsilon, tuple(terms), tail))

        _log.debug(f'domination chain over {len(combinations)} kernels built')
        return cls(bank, rotations, float(N), tuple(combinations))

    @property
    def scales(self) -> list[float]:
        return sorted({term.scale for combination in self.combinations for term in combination.terms})

    def check(
        self, f: Field, points: np.ndarray | int = 1000, *, seed: int = 0, tolerance: float = DOMINATION_TOLERANCE
    ) -> DominationReport:
        grid = self.bank.grid
        if f.grid != grid:
            raise GridError(f'field grid {f.grid} differs from the filter bank grid {grid}')
        if isinstance(points, (int, np.integer)):
            points = sample_points(grid, int(points), seed)
        points = np.atleast_2d(np.asarray(points, dtype=np.int64))
        where = tuple(points.T)

        spectrum = scipy.fft.fftn(f.values)
        xi = grid.frequencies()
        sup_norm = lp_norm(f, math.inf)
        allowance = tolerance * sup_norm
        phi = TestFunction('phi', grid.dim, self.bank.profile.symbol)
        tangential = {scale: tangential_maximal(f, phi, self.weight_power, [scale], points) for scale in self.scales}

        lhs = np.zeros(points.shape[0])
        contributions: dict[str, float] = {}
        violations: list[dict[str, Any]] = []
        rotations = list(self.rotations)
        for combination in self.combinations:
            argument = combination.t * (xi @ rotations[combination.rotation])
            target = combination.member.symbol(self.bank.anisotropic(argument))
            combo_lhs = np.abs(scipy.fft.ifftn(spectrum * target))[where]
            combo_rhs = np.full(points.shape[0], sup_norm * combination.tail)
            for term in combination.terms:
                combo_rhs += term.factor * tangential[term.scale]
                contributions[term.label] = max(contributions.get(term.label, 0.0), term.factor)

            for i in np.flatnonzero(combo_lhs > combo_rhs + allowance):
                violations.append(
                    {
                        'point': points[i].tolist(),
                        't': combination.t,
                        'rotation': combination.rotation,
                        'member': combination.member.name,
                        'lhs': float(combo_lhs[i]),
                        'rhs': float(combo_rhs[i]),
                    }
                )
            np.maximum(lhs, combo_lhs, out=lhs)

        factor_sum = max(combination.factor_sum for combination in self.combinations)
        tail = sup_norm * max(combination.tail for combination in self.combinations)
        grand = np.max(np.stack(list(tangential.values())), axis=0) if tangential else np.zeros_like(lhs)
        rhs = factor_sum * grand + tail
        slack = float(np.min(rhs - lhs)) / sup_norm if sup_norm > 0 else math.inf
        positive = lhs > 0
        min_ratio = float(np.min(rhs[positive] / lhs[positive])) if np.any(positive) else math.inf

        if violations:
            _log.warning(f'domination chain violated at {len(violations)} (point, kernel) pairs')
        _log.debug(f'domination: {points.shape[0]} points, min slack {slack:.3e}, factor sum {factor_sum:.4g}')
        return DominationReport(
            points.shape[0], float(np.max(lhs)), slack, min_ratio, factor_sum, tail, contributions, violations, tolerance
        )


def domination_check(
    f: Field,
    bank: FilterBank,
    members: Iterable[TestFunction],
    rotations: RotationSet,
    t_grid: Sequence[float],
    N: float,
    points: np.ndarray | int = 1000,
    *,
    seed: int = 0,
    tolerance: float = DOMINATION_TOLERANCE,
) -> DominationReport:
    """Check ``LHS(x) <= RHS(x) + tolerance |f|_inf`` at the sampled points."""
    chain = DominationChain.build(bank, members, rotations, t_grid, N)
    return chain.check(f, points, seed=seed, tolerance=tolerance)
