import math
import warnings

import numpy as np
import pytest
from attrs import evolve

from kakeya import (
    BandLimitError,
    ConfigError,
    DecayRow,
    DomainError,
    Field,
    FilterBank,
    FitError,
    FitWarning,
    GridError,
    Parameters,
    PeriodizationWarning,
    RefinementRow,
    RegimeWarning,
    RotationSet,
    SweepSettings,
    TestSpec,
    apply_grid_map,
    bandlimited_random,
    bernstein_check,
    bound_slope,
    build_dictionary,
    domination_check,
    eta0_kernel,
    eta1_scale,
    fit_exponent,
    kernel_l1_mass,
    lemma31_table,
    lemma32_table,
    norm_ratio_sweep,
    ratio_spread,
    run_suite,
    sample_points,
    smoothing_context,
    weighted_kernel_integral,
)

# exponent fits


def test_constant_ratios_have_zero_slope():
    fit = fit_exponent([1 / 4, 1 / 8, 1 / 16], [3.0, 3.0, 3.0])
    assert fit.slope == pytest.approx(0.0, abs=1e-12)
    assert fit.intercept == pytest.approx(math.log(3.0))
    assert fit.reliable


def test_power_law_slope_is_recovered():
    deltas = np.array([2.0**-k for k in range(3, 8)])
    noise = 1 + 1e-3 * np.array([1, -1, 1, -1, 1])
    fit = fit_exponent(deltas, 2.0 / deltas * noise)
    assert fit.slope == pytest.approx(1.0, abs=1e-2)
    assert fit.residual < 1e-2


@pytest.mark.parametrize(
    'deltas, ratios',
    [
        ([0.5, 0.25], [1.0, 2.0]),
        ([0.5, 0.25, 0.125], [1.0, math.nan, 2.0]),
        ([0.5, 0.25, 0.125], [1.0, 0.0, 2.0]),
        ([0.5, 0.5, 0.5], [1.0, 2.0, 3.0]),
        ([0.5, 0.25, 0.125], [1.0, 2.0]),
    ],
)
def test_bad_fits(deltas, ratios):
    with pytest.raises(FitError):
        fit_exponent(deltas, ratios)


def test_scattered_fit_warns():
    with pytest.warns(FitWarning):
        fit = fit_exponent([1 / 4, 1 / 8, 1 / 16, 1 / 32], [1.0, 10.0, 1.0, 10.0])
    assert not fit.reliable


def test_bound_slopes():
    assert bound_slope('kakeya', 2, 2.0, 0.25) == 0.0
    assert bound_slope('nikodym', 3, 2.0, 0.25) == pytest.approx(0.5)
    assert bound_slope('smoothed', 2, 2.0, 0.25) == pytest.approx(1.25)
    assert bound_slope('smoothed_first', 2, 2.0, 0.25) == 0.25
    assert bound_slope('frozen', 2, 2.0, 1.0 / 16, 1.0) == pytest.approx(0.75)
    with pytest.raises(DomainError):
        bound_slope('frozen', 2, 2.0, 0.25, 3.0)
    with pytest.raises(ConfigError):
        bound_slope('fourier', 2, 2.0, 0.25)


# decay tables


@pytest.fixture
def phi():
    return build_dictionary(2, ['phi'])['phi']


@pytest.mark.filterwarnings('ignore')
def test_unweighted_integral_is_the_l1_mass(bank, phi):
    kernel = eta0_kernel(bank, phi, 0).spatial
    assert weighted_kernel_integral(kernel, 1.0, 0) == pytest.approx(kernel_l1_mass(kernel), rel=1e-12)
    with pytest.raises(DomainError):
        weighted_kernel_integral(kernel, 0.0, 2)
    with pytest.raises(DomainError):
        weighted_kernel_integral(kernel, 1.0, -1)


def test_wrapped_tails_warn(kernel_grid):
    with pytest.warns(PeriodizationWarning):
        weighted_kernel_integral(Field.constant(kernel_grid, 1.0), 1.0, 2)


@pytest.mark.filterwarnings('ignore')
def test_weighted_integrals_are_rotation_invariant(bank, phi):
    kernel = eta0_kernel(bank, phi, 1).spatial
    base = weighted_kernel_integral(kernel, 0.25, 2)
    for matrix in ([[0, -1], [1, 0]], [[-1, 0], [0, -1]], [[0, 1], [1, 0]]):
        rotated = weighted_kernel_integral(apply_grid_map(kernel, np.array(matrix)), 0.25, 2)
        assert rotated == pytest.approx(base, rel=1e-10)


@pytest.mark.filterwarnings('ignore')
def test_lemma31_rows(bank):
    gaussian = build_dictionary(2, ['gaussian'])['gaussian']
    rows = lemma31_table(bank, gaussian, 2.0)
    assert [row.k for row in rows] == list(range(2, bank.k_max + 1))
    for row in rows:
        assert row.scale == pytest.approx(eta1_scale(bank, row.k))
        assert row.bound == pytest.approx(bank.delta ** (row.k * bank.eps))
        assert math.isfinite(row.ratio) and row.ratio >= 0
    assert not rows[0].truncated and rows[0].integral > 0
    assert ratio_spread(rows) >= 1.0
    with pytest.raises(DomainError):
        lemma31_table(bank, gaussian, 1.0)


@pytest.mark.filterwarnings('ignore')
def test_lemma31_vanishes_for_phi(bank, phi):
    # the tube-scaled phi lives where Psi_0 + Psi_1 is one, so every eta1 band is empty
    rows = lemma31_table(bank, phi, 2.0)
    assert all(row.truncated and row.integral == 0.0 for row in rows)
    assert math.isnan(ratio_spread(rows))


@pytest.mark.filterwarnings('ignore')
def test_lemma32_rows(bank, phi):
    rows = lemma32_table(bank, phi, 2.0)
    assert [row.k for row in rows] == list(range(bank.s + 1))
    for row in rows:
        assert row.unit_scale == 2.0 ** (row.k + 1)
        assert row.mass <= row.mass_bound * (1 + 1e-9)
        assert row.unit_integral <= row.integral * (1 + 1e-12)
        assert set(row.to_dict()) >= {'table', 'k', 'ratio', 'unit_ratio'}


def test_ratio_spread_skips_truncated_rows():
    rows = [DecayRow('lemma31', 2, 1.0, 2.0, 1.0, 2.0), DecayRow('lemma31', 3, 1.0, 0.0, 1.0, 0.0, True)]
    assert ratio_spread(rows) == 1.0
    assert math.isnan(ratio_spread(rows[1:]))


def test_refinement_change():
    assert RefinementRow(2, 0.0, 0.0).change == 0.0
    assert RefinementRow(2, 1.0, 1.1).change == pytest.approx(0.1 / 1.1)


# sampling and Bernstein


def test_sample_points(small_grid):
    points = sample_points(small_grid, 100, seed=5)
    assert points.shape[1] == 2 and 0 < len(points) <= 100
    assert points.min() >= 0 and points.max() < 32
    assert len({tuple(p) for p in points}) == len(points)
    assert np.array_equal(points, sample_points(small_grid, 100, seed=5))
    assert len(sample_points(small_grid, 5000)) == 32 * 32
    with pytest.raises(DomainError):
        sample_points(small_grid, 0)


def test_bernstein_constant(kernel_grid):
    report = bernstein_check(Field.constant(kernel_grid, 1.0), 1.0, 1.0, 20)
    assert report.value_ratio == pytest.approx(1.0, abs=1e-12)
    assert report.gradient_ratio == pytest.approx(0.0, abs=1e-12)
    assert report.skipped == 0


def test_bernstein_band_limited(small_grid):
    u = bandlimited_random(1, 1.0, small_grid)
    report = bernstein_check(u, 1.0, 1.0, 30)
    assert math.isfinite(report.value_ratio) and report.value_ratio > 0
    assert math.isfinite(report.gradient_ratio)
    with pytest.raises(BandLimitError):
        bernstein_check(bandlimited_random(1, 2.0, small_grid), 1.0, 1.0, 30)


# domination chain


def test_domination_chain_holds(small_grid):
    bank = FilterBank(1.0 / 16, 0.25, small_grid)
    members = build_dictionary(2, ['phi', 'gaussian'])
    f = bandlimited_random(3, 1.0, small_grid)
    with warnings.catch_warnings():
        warnings.simplefilter('ignore')
        report = domination_check(f, bank, members, RotationSet.identity(2), [1.0, 2.0], 2.0, 50)
    assert report.passed, report.violations[:3]
    assert report.points <= 50
    assert report.min_slack >= -1e-8
    assert report.factor_sum > 0
    assert all(label.startswith(('eta0[', 'eta1[')) for label in report.contributions)


# sweeps


def test_sweeps_need_three_deltas():
    with pytest.raises(FitError):
        norm_ratio_sweep('kakeya', TestSpec('ball'), [0.25, 0.125], 2.0)
    with pytest.raises(ConfigError):
        norm_ratio_sweep('fourier', TestSpec('ball'), [0.25, 0.125, 0.0625], 2.0)


@pytest.mark.filterwarnings('ignore')
def test_kakeya_sweep_on_a_ball(monkeypatch):
    monkeypatch.delenv('KAKEYA_LAB_THREADS', raising=False)
    settings = SweepSettings(samples=64, threads=1)
    report = norm_ratio_sweep('kakeya', TestSpec('ball'), [1 / 4, 1 / 8, 1 / 16], 2.0, settings=settings)
    assert report.bound == 0.0
    assert len(report.rows) == 3
    assert [row.delta for row in report.rows] == [1 / 4, 1 / 8, 1 / 16]
    assert all(row.ratio > 0 for row in report.rows)
    assert math.isfinite(report.slope)
    assert report.summary()['operator'] == 'kakeya'


def test_smoothing_outside_the_band_regime_warns(kernel_grid):
    with pytest.warns(RegimeWarning):
        bank, rotations, t_grid = smoothing_context(1.0 / 16, kernel_grid, SweepSettings(eps=1.0 / 16))
    assert not bank.in_regime
    assert len(rotations) <= 8 and t_grid[-1] == pytest.approx(16 ** (1 / 16))

    with warnings.catch_warnings():
        warnings.simplefilter('error', RegimeWarning)
        bank, _, _ = smoothing_context(1.0 / 16, kernel_grid, SweepSettings())
    assert bank.in_regime


# parameters and suites


@pytest.mark.parametrize(
    'overrides',
    [{'dim': 4}, {'r': 3.0}, {'deltas': [0.5, 1.5]}, {'families': ['spiral']}, {'eps': 0.0}],
)
def test_parameter_validation(overrides):
    with pytest.raises(ConfigError):
        Parameters(**overrides)


def test_parameter_files(tmp_path, small_params):
    assert Parameters.from_dict(small_params.to_dict()) == small_params
    with pytest.raises(ConfigError):
        Parameters.from_dict({'colour': 'red'})
    with pytest.raises(ConfigError):
        Parameters.from_dict({'eps': 'small'})
    path = tmp_path / 'params.json'
    path.write_text('[1, 2]')
    with pytest.raises(ConfigError):
        Parameters.from_json(path)


def test_family_specs(small_params):
    assert small_params.family_spec('bandlimited_random', 2).cutoff == small_params.cutoff
    assert small_params.family_spec('ball').cutoff is None
    assert small_params.r_value == 1.0


def test_unknown_suite(small_params):
    with pytest.raises(ConfigError):
        run_suite('everything', small_params)


def test_partition_suite_passes(small_params):
    result = run_suite('partition', small_params)
    assert result.passed, result.failures
    assert len(result.rows) == 4


@pytest.mark.filterwarnings('ignore')
def test_rotation_suite_passes(small_params):
    result = run_suite('rotation', evolve(small_params, members=['phi', 'gaussian']))
    assert result.passed, result.failures
    assert result.summary['maps'] == 8


@pytest.mark.filterwarnings('ignore')
def test_fixedpoint_suite_covers_every_operator(small_params):
    result = run_suite('fixedpoint', evolve(small_params, members=['phi', 'gaussian']))
    assert result.passed, result.failures
    operators = {'kakeya', 'nikodym', 'hardy_littlewood', 'nontangential', 'tangential', 'smoothed', 'frozen'}
    for check in ('fixed_point', 'sublinear', 'translation'):
        assert {row[1] for row in result.rows if row[0] == check} == operators
    assert {row[1] for row in result.rows if row[0] == 'monotone'} == {'kakeya', 'nikodym', 'hardy_littlewood'}
    assert all(row[2] == 2 for row in result.rows if row[0] != 'fixed_point')


@pytest.mark.filterwarnings('ignore')
def test_decay31_suite_flags_vanishing_members(small_params):
    result = run_suite('decay31', evolve(small_params, members=['phi', 'gaussian']))
    assert result.passed, result.failures
    members = result.summary['members']
    assert members['phi']['vanishing'] and math.isnan(members['phi']['spread'])
    assert not members['gaussian']['vanishing']
    assert {row[0] for row in result.rows} == {'phi', 'gaussian'}


@pytest.mark.filterwarnings('ignore')
def test_decay32_suite_passes(small_params):
    result = run_suite('decay32', evolve(small_params, members=['phi']))
    assert result.passed, result.failures
    assert len(result.rows) == result.summary['s'] + 1
    assert len(result.columns) == len(result.rows[0])


def test_bernstein_suite_passes(small_params):
    result = run_suite('bernstein', small_params)
    assert result.passed, result.failures
    assert [row[0] for row in result.rows] == ['constant', 'seed 0']
    assert result.rows[0][1] == pytest.approx(1.0, abs=1e-9)


@pytest.mark.filterwarnings('ignore')
def test_domination_suite_passes(small_params):
    result = run_suite('domination', evolve(small_params, members=['phi', 'gaussian']))
    assert result.passed, result.failures[:3]
    assert [row[0] for row in result.rows] == list(small_params.families)
    assert result.summary['violations'] == 0
    assert result.summary['factor_sum'] > 0


@pytest.mark.filterwarnings('ignore')
def test_sweep_suite_runs_every_audit(small_params):
    params = evolve(small_params, deltas=[0.25, 0.125, 0.0625], families=['bandlimited_random'], members=['phi'])
    result = run_suite('sweep', params, threads=1)
    audits = result.summary['audits']
    assert [audit['operator'] for audit in audits] == ['kakeya', 'smoothed', 'smoothed_first'] + ['frozen'] * 3
    assert [audit['t'] for audit in audits[3:]] == [0.5, 1.0, 'ceiling']
    assert all(math.isfinite(audit['fitted_exponent']) for audit in audits)
    assert len(result.rows) == 3 * len(audits)
    assert len(result.columns) == len(result.rows[0])


@pytest.mark.slow
def test_partition_on_the_default_grid():
    result = run_suite('partition', Parameters())
    assert result.passed, result.failures
    assert max(row[3] for row in result.rows) < 1e-12


@pytest.mark.slow
@pytest.mark.filterwarnings('ignore')
def test_reconstruction_on_the_default_grid():
    result = run_suite('reconstruction', Parameters())
    assert result.passed, result.failures[:3]
    assert len({row[0] for row in result.rows}) == 7


def test_suites_reject_bad_grids():
    with pytest.raises(GridError):
        run_suite('partition', Parameters(samples=48))
