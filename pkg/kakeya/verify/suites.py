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

"""Verification suites: each runs one family of checks at the configured parameters."""
import itertools
import logging
import math
import warnings
from typing import Any, Callable

import numpy as np
from attrs import define, evolve, field

from ..errors import ConfigError, PeriodizationWarning
from ..filters import (
    FilterBank,
    TestDictionary,
    TestFunction,
    build_dictionary,
    eta0_kernel,
    eta1_kernel,
    reconstruct,
)
from ..grid import Field, GridShape, apply_grid_map, cyclic_shift, spectral_refine
from ..maximal import (
    DirectionSet,
    RotationSet,
    default_t_grid,
    hl_maximal,
    kakeya_maximal,
    nikodym_maximal,
    nontangential_maximal,
    smoothed_frozen_t,
    smoothed_kakeya,
    tangential_maximal,
)
from ..pool import Orchestrator
from ..testsets import TestSpec, bandlimited_random
from .bernstein import bernstein_check
from .decay import DECAY_COLUMNS, lemma31_table, lemma32_table, ratio_spread, refinement_study, weighted_kernel_integral
from .domination import DominationChain
from .params import Parameters
from .sampling import sample_points
from .sweep import SWEEP_COLUMNS, norm_ratio_sweep

__all__ = ['SuiteResult', 'SUITES', 'SUITE_NAMES', 'run_suite']

_log = logging.getLogger(__name__)

PARTITION_TOLERANCE = 1e-12
FIXED_POINT_TOLERANCE = 1e-8
PROPERTY_TOLERANCE = 1e-9
ROTATION_TOLERANCE = 1e-10
DECAY_STABILITY = 0.05
BERNSTEIN_STABILITY = 0.10


@define(frozen=True)
class SuiteResult:
    name: str
    columns: tuple[str, ...]
    rows: list[tuple[Any, ...]] = field(repr=False)
    summary: dict[str, Any] = field(repr=False)
    failures: list[dict[str, Any]] = field(factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


def _kernel_grid(params: Parameters) -> GridShape:
    return GridShape(params.dim, params.samples, params.kernel_length)


def _tube_grid(params: Parameters) -> GridShape:
    return GridShape(params.dim, params.samples, params.tube_length)


def _dictionary(params: Parameters) -> TestDictionary:
    return build_dictionary(params.dim, params.members, normalization=params.normalization)


def _rotations(params: Parameters, delta: float) -> RotationSet:
    directions = DirectionSet.for_delta(params.dim, delta, max(params.max_rotations, 2))
    return RotationSet.from_directions(directions).subsample(params.max_rotations)


def _t_grid(params: Parameters, bank: FilterBank) -> list[float]:
    ceiling = bank.delta**-bank.eps
    return default_t_grid(min(params.t_low, ceiling), ceiling)


def _phi(dictionary: TestDictionary, bank: FilterBank) -> TestFunction:
    try:
        return dictionary['phi']
    except KeyError:
        return TestFunction('phi', bank.dim, bank.profile.symbol)


def _signed_permutations(dim: int) -> list[np.ndarray]:
    matrices = []
    for permutation in itertools.permutations(range(dim)):
        for signs in itertools.product((1, -1), repeat=dim):
            matrix = np.zeros((dim, dim), dtype=np.int64)
            matrix[np.arange(dim), permutation] = signs
            matrices.append(matrix)
    return matrices


# partition of unity


def _partition_top(bank: FilterBank, family: str, radius: float) -> int:
    ratio = 0.5 if family == 'dyadic' else bank.base
    top = 0
    while ratio**top * radius > bank.profile.inner:
        top += 1
    return top


def run_partition(params: Parameters, threads: int | None = None) -> SuiteResult:
    grid = _kernel_grid(params)
    bank = FilterBank(params.delta, params.eps, grid)
    xi = grid.frequencies()
    radii = {'radial': np.linalg.norm(xi, axis=-1), 'bold': np.linalg.norm(bank.anisotropic(xi), axis=-1)}

    rows, failures = [], []
    for family in ('dyadic', 'eps_scaled'):
        for variant, radius in radii.items():
            top = _partition_top(bank, family, float(np.max(radius)))
            total = sum(bank.radial_symbol(family, k, radius) for k in range(top + 1))
            error = float(np.max(np.abs(total - 1.0)))
            rows.append((family, variant, top, error))
            if not error < PARTITION_TOLERANCE:
                failures.append({'suite': 'partition', 'family': family, 'variant': variant, 'error': error})
    return SuiteResult('partition', ('family', 'variant', 'top', 'error'), rows, {'tolerance': PARTITION_TOLERANCE}, failures)


# reconstruction identity


def run_reconstruction(params: Parameters, threads: int | None = None) -> SuiteResult:
    bank = FilterBank(params.delta, params.eps, _kernel_grid(params))
    bank.require_regime()
    rotations = _rotations(params, params.delta).union(RotationSet.quarter_turns(params.dim))

    rows, failures = [], []
    for member in _dictionary(params):
        for a, rotation in enumerate(rotations):
            report = reconstruct(bank, member, rotation, raise_on_failure=False)
            rows.append((member.name, a, report.error, report.residual, report.passed))
            if not report.passed:
                failures.append(
                    {'suite': 'reconstruction', 'member': member.name, 'rotation': a, 'error': report.error}
                )
    summary = {'k_max': bank.k_max, 'eta0_top': bank.eta0_top, 's': bank.s, 'rotations': len(rotations)}
    return SuiteResult('reconstruction', ('member', 'rotation', 'error', 'residual', 'passed'), rows, summary, failures)


# fixed points and structural properties


def _fixed_points(params: Parameters) -> dict[str, np.ndarray]:
    delta = params.delta
    tube_grid = _tube_grid(params)
    kernel_grid = _kernel_grid(params)
    bank = FilterBank(delta, params.eps, kernel_grid)
    dictionary = _dictionary(params)
    rotations = _rotations(params, delta)
    t_grid = _t_grid(params, bank)
    one = Field.constant(tube_grid, 1.0)
    unit = Field.constant(kernel_grid, 1.0)
    directions = DirectionSet.for_delta(params.dim, delta)
    points = sample_points(kernel_grid, params.sample_points)

    values = {
        'kakeya': kakeya_maximal(one, delta, directions),
        'nikodym': nikodym_maximal(one, delta, directions).values,
        'hardy_littlewood': hl_maximal(unit).values,
        'nontangential': nontangential_maximal(unit, _phi(dictionary, bank), t_grid).values,
        'tangential': tangential_maximal(unit, _phi(dictionary, bank), params.weight_power, t_grid, points),
    }
    if params.normalization == 'mass':
        values['smoothed'] = smoothed_kakeya(unit, bank, dictionary, rotations, t_grid).values
        values['frozen'] = smoothed_frozen_t(unit, bank, dictionary, rotations, 1.0).values
    return values


def _property_operators(params: Parameters) -> dict[str, tuple[Callable[[Field], np.ndarray], bool]]:
    """Operators on the small property grids, with whether they are monotone in ``|f|``."""
    tube_grid = GridShape(params.dim, params.property_samples, params.tube_length)
    kernel_grid = GridShape(params.dim, params.property_samples, params.kernel_length)
    delta = max(params.delta, 4 * tube_grid.spacing)
    directions = DirectionSet.for_delta(params.dim, delta)
    bank = FilterBank(params.delta, params.eps, kernel_grid)
    dictionary = _dictionary(params)
    rotations = _rotations(params, params.delta)
    t_grid = _t_grid(params, bank)
    phi = _phi(dictionary, bank)
    return {
        'kakeya': (lambda f: kakeya_maximal(f, delta, directions), True),
        'nikodym': (lambda f: nikodym_maximal(f, delta, directions).values, True),
        'hardy_littlewood': (lambda f: hl_maximal(f).values, True),
        'nontangential': (lambda f: nontangential_maximal(f, phi, t_grid).values, False),
        'tangential': (lambda f: tangential_maximal(f, phi, params.weight_power, t_grid).values, False),
        'smoothed': (lambda f: smoothed_kakeya(f, bank, dictionary, rotations, t_grid).values, False),
        'frozen': (lambda f: smoothed_frozen_t(f, bank, dictionary, rotations, 1.0).values, False),
    }


def _property_grid(name: str, params: Parameters) -> GridShape:
    length = params.tube_length if name in ('kakeya', 'nikodym') else params.kernel_length
    return GridShape(params.dim, params.property_samples, length)


def run_fixedpoint(params: Parameters, threads: int | None = None) -> SuiteResult:
    rows, failures = [], []
    for name, values in _fixed_points(params).items():
        error = float(np.max(np.abs(values - 1.0)))
        rows.append(('fixed_point', name, 1, error))
        if not error <= FIXED_POINT_TOLERANCE:
            failures.append({'suite': 'fixedpoint', 'check': 'fixed_point', 'operator': name, 'error': error})

    rng = np.random.Generator(np.random.PCG64(params.seeds))
    for name, (operator, monotone) in _property_operators(params).items():
        grid = _property_grid(name, params)
        worst = {'monotone': 0.0, 'sublinear': 0.0, 'translation': 0.0}
        for _ in range(params.property_fields):
            f = Field(rng.standard_normal(grid.shape), grid.side_length)
            g = Field(rng.standard_normal(grid.shape), grid.side_length)
            shift = tuple(int(s) for s in rng.integers(0, grid.samples, size=grid.dim))
            scale = float(np.max(np.abs(f.values)) + np.max(np.abs(g.values)))

            mf, mg = operator(f), operator(g)
            worst['sublinear'] = max(worst['sublinear'], float(np.max(operator(f + g) - mf - mg)) / scale)
            if monotone:
                dominating = Field(np.abs(f.values) + np.abs(g.values), grid.side_length)
                worst['monotone'] = max(worst['monotone'], float(np.max(mf - operator(dominating))) / scale)
            shifted = operator(cyclic_shift(f, shift))
            expected = mf if name == 'kakeya' else np.roll(mf, shift, axis=tuple(range(grid.dim)))
            worst['translation'] = max(worst['translation'], float(np.max(np.abs(shifted - expected))) / scale)

        for check, value in worst.items():
            if check == 'monotone' and not monotone:
                continue
            rows.append((check, name, params.property_fields, value))
            if not value <= PROPERTY_TOLERANCE:
                failures.append({'suite': 'fixedpoint', 'check': check, 'operator': name, 'error': value})
    return SuiteResult('fixedpoint', ('check', 'operator', 'fields', 'error'), rows, {}, failures)


# decay tables


def _decay_suite(name: str, table, params: Parameters) -> SuiteResult:
    bank = FilterBank(params.delta, params.eps, _kernel_grid(params))
    bank.require_regime()
    N = params.weight_power
    rows, failures = [], []
    summary: dict[str, Any] = {'s': bank.s, 'k_max': bank.k_max, 'eta0_top': bank.eta0_top, 'members': {}}

    for member in _dictionary(params):
        table_rows = table(bank, member, N, None)
        refinement = {row.k: row.change for row in refinement_study(table, bank, member, N)}
        for row in table_rows:
            rows.append((member.name,) + tuple(row.to_dict().values()) + (refinement.get(row.k, math.nan),))
            values = [row.integral, row.ratio] + ([row.unit_integral, row.unit_ratio] if name == 'decay32' else [])
            if not all(math.isfinite(value) for value in values):
                failures.append({'suite': name, 'member': member.name, 'k': row.k, 'reason': 'non-finite ratio'})
            if name == 'decay32':
                if row.mass > row.mass_bound * (1 + 1e-9):
                    failures.append({'suite': name, 'member': member.name, 'k': row.k, 'reason': 'mass above Young bound'})
                if row.unit_integral > row.integral * (1 + 1e-12):
                    failures.append({'suite': name, 'member': member.name, 'k': row.k, 'reason': 'unit weight exceeds delta weight'})
            if params.strict_refinement and refinement.get(row.k, 0.0) > DECAY_STABILITY:
                failures.append({'suite': name, 'member': member.name, 'k': row.k, 'reason': 'unstable under refinement'})
        if name == 'decay32' and bank.s not in {row.k for row in table_rows}:
            failures.append({'suite': name, 'member': member.name, 'reason': f'row k=s={bank.s} missing'})

        summary['members'][member.name] = {
            'spread': ratio_spread(table_rows),
            'vanishing': all(row.truncated for row in table_rows),
            'max_refinement_change': max(refinement.values(), default=0.0),
        }

    columns = ('member',) + DECAY_COLUMNS + ('refinement_change',)
    return SuiteResult(name, columns, rows, summary, failures)


def run_decay31(params: Parameters, threads: int | None = None) -> SuiteResult:
    return _decay_suite('decay31', lemma31_table, params)


def run_decay32(params: Parameters, threads: int | None = None) -> SuiteResult:
    return _decay_suite('decay32', lemma32_table, params)


# rotation invariance of weighted integrals


def run_rotation(params: Parameters, threads: int | None = None) -> SuiteResult:
    bank = FilterBank(params.delta, params.eps, _kernel_grid(params))
    bank.require_regime()
    N = params.weight_power
    maps = _signed_permutations(params.dim)
    rows, failures = [], []

    for member in _dictionary(params):
        kernels = [(eta0_kernel(bank, member, k), 2.0 ** (k + 1) * bank.delta) for k in range(bank.eta0_top + 1)]
        kernels += [
            (eta1_kernel(bank, member, k), bank.delta ** (1 + (k + 3) * bank.eps)) for k in range(2, bank.k_max + 1)
        ]
        for kernel, scale in kernels:
            if kernel.empty:
                continue
            base = weighted_kernel_integral(kernel.spatial, scale, N)
            with warnings.catch_warnings():
                warnings.simplefilter('ignore', PeriodizationWarning)
                rotated = [weighted_kernel_integral(apply_grid_map(kernel.spatial, A), scale, N) for A in maps]
            deviation = max(abs(value - base) for value in rotated) / base
            label = f'{kernel.family}[{kernel.k}]'
            rows.append((member.name, label, base, deviation))
            if not deviation <= ROTATION_TOLERANCE:
                failures.append({'suite': 'rotation', 'member': member.name, 'kernel': label, 'deviation': deviation})
    return SuiteResult('rotation', ('member', 'kernel', 'integral', 'deviation'), rows, {'maps': len(maps)}, failures)


# Bernstein bound


def _relative_change(coarse: float, fine: float) -> float:
    if coarse == fine:
        return 0.0
    return abs(fine - coarse) / max(abs(coarse), abs(fine))


def run_bernstein(params: Parameters, threads: int | None = None) -> SuiteResult:
    grid = _kernel_grid(params)
    t, r = params.bernstein_t, params.r_value
    rows, failures = [], []

    constant = bernstein_check(Field.constant(grid, 1.0), t, r, params.sample_points)
    rows.append(('constant', constant.value_ratio, constant.gradient_ratio, math.nan, math.nan, 0.0, 0.0))
    if not abs(constant.value_ratio - 1.0) <= 1e-9:
        failures.append({'suite': 'bernstein', 'input': 'constant', 'value_ratio': constant.value_ratio})

    def check(seed: int) -> tuple[Any, ...]:
        u = bandlimited_random(seed, min(params.cutoff, t), grid)
        points = sample_points(grid, params.sample_points, seed)
        coarse = bernstein_check(u, t, r, points)
        fine = bernstein_check(spectral_refine(u), t, r, 2 * points)
        return (
            f'seed {seed}',
            coarse.value_ratio,
            coarse.gradient_ratio,
            fine.value_ratio,
            fine.gradient_ratio,
            _relative_change(coarse.value_ratio, fine.value_ratio),
            _relative_change(coarse.gradient_ratio, fine.gradient_ratio),
        )

    for row in Orchestrator(threads).run([lambda seed=seed: check(seed) for seed in range(params.bernstein_seeds)]):
        rows.append(row)
        if not all(math.isfinite(value) for value in row[1:]):
            failures.append({'suite': 'bernstein', 'input': row[0], 'reason': 'non-finite ratio'})
        elif params.strict_refinement and max(row[5], row[6]) > BERNSTEIN_STABILITY:
            failures.append({'suite': 'bernstein', 'input': row[0], 'reason': 'unstable under refinement'})

    columns = ('input', 'value_ratio', 'gradient_ratio', 'fine_value_ratio', 'fine_gradient_ratio', 'value_change', 'gradient_change')
    return SuiteResult('bernstein', columns, rows, {'t': t, 'r': r}, failures)


# domination chain


def run_domination(params: Parameters, threads: int | None = None) -> SuiteResult:
    grid = _kernel_grid(params)
    bank = FilterBank(params.delta, params.eps, grid)
    chain = DominationChain.build(
        bank, _dictionary(params), _rotations(params, params.delta), _t_grid(params, bank), params.weight_power
    )
    inputs = [(kind, seed) for kind in params.families for seed in range(params.seeds)]

    def check(kind: str, seed: int):
        f = params.family_spec(kind, seed).generate(grid)
        return chain.check(f, params.sample_points, seed=seed)

    reports = Orchestrator(threads).run([lambda kind=kind, seed=seed: check(kind, seed) for kind, seed in inputs])

    rows, failures = [], []
    contributions: dict[str, float] = {}
    for (kind, seed), report in zip(inputs, reports):
        rows.append((kind, seed, report.lhs_max, report.min_slack, report.min_ratio, len(report.violations)))
        for violation in report.violations[:5]:
            failures.append({'suite': 'domination', 'family': kind, 'seed': seed, **violation})
        for label, factor in report.contributions.items():
            contributions[label] = max(contributions.get(label, 0.0), factor)

    summary = {
        'factor_sum': max((report.factor_sum for report in reports), default=0.0),
        'tail': max((report.tail for report in reports), default=0.0),
        'contributions': contributions,
        'violations': sum(len(report.violations) for report in reports),
        'kernels': len(chain.combinations),
    }
    columns = ('family', 'seed', 'lhs_max', 'min_slack', 'min_ratio', 'violations')
    return SuiteResult('domination', columns, rows, summary, failures)


# exponent audits


def run_sweep(params: Parameters, threads: int | None = None) -> SuiteResult:
    settings = params.sweep_settings(threads=threads)
    dictionary = _dictionary(params)
    audits = []

    tube_family = TestSpec('perron_tree') if params.dim == 2 else TestSpec('tube_union')
    audits.append((None, norm_ratio_sweep('kakeya', tube_family, params.deltas, params.p, params.q, evolve(settings, slack=params.kakeya_slack))))
    for kind in params.families:
        spec = params.family_spec(kind)
        for op in ('smoothed', 'smoothed_first'):
            audits.append((None, norm_ratio_sweep(op, spec, params.deltas, params.p, settings=settings, dictionary=dictionary)))

    frozen_settings = evolve(settings, eps=params.frozen_eps, r=params.frozen_r)
    band_limited = TestSpec('bandlimited_random', cutoff=1.0)
    for t in (0.5, 1.0, None):
        report = norm_ratio_sweep('frozen', band_limited, params.deltas, params.p, settings=evolve(frozen_settings, t=t), dictionary=dictionary)
        audits.append(('ceiling' if t is None else t, report))

    rows, failures, summaries = [], [], []
    for t, report in audits:
        for row in report.rows:
            rows.append((report.operator, report.family, '' if t is None else t) + row.as_tuple())
        summary = report.summary()
        summary['t'] = t
        summaries.append(summary)
        if not report.passed:
            failures.append({'suite': 'sweep', 'reason': 'exponent above bound', **summary})
        elif not report.within_trivial_bounds:
            failures.append({'suite': 'sweep', 'reason': 'exponent outside trivial bounds', **summary})

    return SuiteResult('sweep', ('operator', 'family', 't') + SWEEP_COLUMNS, rows, {'audits': summaries}, failures)


SUITES: dict[str, Callable[[Parameters, int | None], SuiteResult]] = {
    'partition': run_partition,
    'reconstruction': run_reconstruction,
    'fixedpoint': run_fixedpoint,
    'decay31': run_decay31,
    'decay32': run_decay32,
    'rotation': run_rotation,
    'bernstein': run_bernstein,
    'domination': run_domination,
    'sweep': run_sweep,
}
SUITE_NAMES = tuple(SUITES)


def run_suite(name: str, params: Parameters, threads: int | None = None) -> SuiteResult:
    try:
        runner = SUITES[name]
    except KeyError:
        raise ConfigError(f'unknown suite {name!r}, expected one of {", ".join(SUITE_NAMES)}') from None
    _log.info(f'running suite {name}')
    result = runner(params, threads)
    _log.info(f'suite {name}: {"passed" if result.passed else f"{len(result.failures)} failures"}')
    return result
