import math

import numpy as np
import pytest
import scipy.fft

from kakeya import (
    DirectionSet,
    DomainError,
    Field,
    FilterBank,
    GridShape,
    RegimeError,
    ResolutionError,
    RotationSet,
    TubeSpec,
    ball_indicator,
    build_dictionary,
    convolve,
    cyclic_shift,
    default_t_grid,
    dilate,
    direction_lq_norm,
    disc_mask,
    dual_direction_exponent,
    hl_maximal,
    hl_maximal_r,
    hl_radii,
    kakeya_maximal,
    nikodym_maximal,
    nontangential_maximal,
    single_tube,
    smoothed_frozen_t,
    smoothed_kakeya,
    tangential_maximal,
    tube_core,
    tube_indicator,
    tube_weights,
    weighted_dilate,
)


@pytest.fixture
def directions() -> DirectionSet:
    return DirectionSet.circle(1.0 / 8)


def test_circle_directions():
    dirs = DirectionSet.circle(1.0 / 16)
    assert len(dirs) == 50
    assert np.sum(dirs.weights) == pytest.approx(2 * math.pi)
    assert dirs.separation >= 1.0 / 16
    # quarter-turn symmetric: rotating every node by pi/2 lands on another node's line
    turned = dirs.directions @ np.array([[0.0, 1.0], [-1.0, 0.0]])
    for omega in turned:
        assert abs(abs(dirs.directions[dirs.match(omega)] @ omega) - 1.0) < 1e-12


def test_fibonacci_directions():
    dirs = DirectionSet.fibonacci(0.5)
    assert len(dirs) == math.ceil(4 * math.pi / 0.25)
    assert np.sum(dirs.weights) == pytest.approx(4 * math.pi)
    assert dirs.separation > 0


def test_tube_needs_two_cells(tube_grid):
    with pytest.raises(ResolutionError):
        tube_weights(TubeSpec([1.0, 0.0], 1.0 / 64), tube_grid)
    with pytest.raises(DomainError):
        TubeSpec([1.0, 1.0], 0.1)


def test_tube_indicator_has_unit_mass(tube_grid):
    tube = tube_indicator(np.array([0.6, 0.8]), 1.0 / 8, tube_grid)
    assert tube_grid.cell_volume * np.sum(tube.values) == pytest.approx(1.0, rel=1e-12)
    assert np.all(tube.values >= 0)


def test_fixed_points(tube_grid, kernel_grid, directions):
    one = Field.constant(tube_grid, 1.0)
    np.testing.assert_allclose(kakeya_maximal(one, 1.0 / 8, directions), 1.0, atol=1e-10)
    np.testing.assert_allclose(nikodym_maximal(one, 1.0 / 8, directions).values, 1.0, atol=1e-10)
    np.testing.assert_allclose(hl_maximal(Field.constant(kernel_grid, 1.0)).values, 1.0, atol=1e-10)


def test_kakeya_is_monotone_and_shift_invariant(tube_grid, directions, rng):
    f = Field(np.abs(rng.standard_normal(tube_grid.shape)), tube_grid.side_length)
    g = Field(f.values + rng.uniform(0.0, 1.0, tube_grid.shape), tube_grid.side_length)
    mf = kakeya_maximal(f, 1.0 / 8, directions)
    assert np.all(mf <= kakeya_maximal(g, 1.0 / 8, directions) + 1e-12)
    np.testing.assert_allclose(kakeya_maximal(cyclic_shift(f, (7, 3)), 1.0 / 8, directions), mf, atol=1e-12)


def test_nikodym_covariance_and_domination(tube_grid, directions, rng):
    f = Field(rng.standard_normal(tube_grid.shape), tube_grid.side_length)
    result = nikodym_maximal(f, 1.0 / 8, directions)
    shifted = nikodym_maximal(cyclic_shift(f, (5, 9)), 1.0 / 8, directions)
    np.testing.assert_allclose(shifted.values, np.roll(result.values, (5, 9), axis=(0, 1)), atol=1e-12)
    for omega in directions:
        average = convolve(abs(f), tube_indicator(omega, 1.0 / 8, tube_grid))
        assert np.all(result.values >= average.values - 1e-12)


def test_hardy_littlewood(kernel_grid, rng):
    f = Field(rng.standard_normal(kernel_grid.shape), kernel_grid.side_length)
    result = hl_maximal(f)
    assert np.all(result.values >= np.abs(f.values) - 1e-12)
    assert np.max(result.values) <= np.max(np.abs(f.values)) + 1e-10
    np.testing.assert_allclose(hl_maximal_r(f, 1.0).values, result.values, atol=1e-12)
    with pytest.raises(DomainError):
        hl_maximal_r(f, 0.0)


def test_sublinearity(tube_grid, directions, rng):
    f = Field(rng.standard_normal(tube_grid.shape), tube_grid.side_length)
    g = Field(rng.standard_normal(tube_grid.shape), tube_grid.side_length)
    total = kakeya_maximal(f + g, 1.0 / 8, directions)
    assert np.all(total <= kakeya_maximal(f, 1.0 / 8, directions) + kakeya_maximal(g, 1.0 / 8, directions) + 1e-10)


def test_direction_norms(directions):
    ones = np.ones(len(directions))
    assert direction_lq_norm(ones, directions, 2) == pytest.approx(math.sqrt(2 * math.pi))
    assert direction_lq_norm(ones, directions, math.inf) == 1.0
    assert dual_direction_exponent(2, 2) == 2.0
    assert dual_direction_exponent(3, 2) == 4.0
    with pytest.raises(DomainError):
        dual_direction_exponent(2, 1.0)


def test_default_t_grid():
    grid = default_t_grid(0.5, 2.0)
    assert grid[0] == 0.5 and grid[-1] == 2.0
    ratios = np.array(grid[1:]) / np.array(grid[:-1])
    assert np.all(ratios <= math.sqrt(2) * (1 + 1e-12))
    assert default_t_grid(1.0, 1.0) == [1.0]
    with pytest.raises(DomainError):
        default_t_grid(2.0, 1.0)


def test_dilation_matches_brute_force(rng):
    values = rng.standard_normal((16, 16))
    mask = rng.uniform(size=(16, 16)) < 0.2
    mask[0, 0] = True
    expected = np.full(values.shape, -np.inf)
    for offset in zip(*np.nonzero(mask)):
        expected = np.maximum(expected, np.roll(values, offset, axis=(0, 1)))
    np.testing.assert_array_equal(dilate(values, mask), expected)


def test_weighted_dilation_matches_brute_force(rng):
    values = np.abs(rng.standard_normal((16, 16)))
    offsets = rng.integers(-8, 8, size=(40, 2))
    weights = rng.uniform(size=40)
    expected = np.zeros(values.shape)
    for offset, weight in zip(offsets, weights):
        expected = np.maximum(expected, weight * np.roll(values, tuple(offset), axis=(0, 1)))
    np.testing.assert_allclose(weighted_dilate(values, offsets, weights), expected, rtol=0, atol=0)


def test_tangential_points_agree_with_the_full_field(rng):
    grid = GridShape(2, 16, 8.0)
    f = Field(rng.standard_normal(grid.shape), grid.side_length)
    phi = build_dictionary(2, ['phi'])['phi']
    full = tangential_maximal(f, phi, 2.0, [0.5, 1.0])
    points = np.array([[0, 0], [3, 11], [15, 7]])
    at_points = tangential_maximal(f, phi, 2.0, [0.5, 1.0], points)
    np.testing.assert_allclose(at_points, full.values[tuple(points.T)], atol=1e-12)
    nontangential = nontangential_maximal(f, phi, [0.5, 1.0])
    assert np.all(nontangential.values <= full.values * 4.0 * (1 + 1e-9) + 1e-12)


@pytest.mark.filterwarnings('ignore')
def test_smoothed_operators_fix_constants(small_grid):
    bank = FilterBank(1.0 / 16, 0.25, small_grid)
    dictionary = build_dictionary(2, ['phi', 'gaussian', 'hermite_1'])
    one = Field.constant(small_grid, 1.0)
    rotations = RotationSet.identity(2)
    smoothed = smoothed_kakeya(one, bank, dictionary, rotations, [1.0, 2.0])
    np.testing.assert_allclose(smoothed.values, 1.0, atol=1e-10)
    frozen = smoothed_frozen_t(one, bank, dictionary, rotations, 1.0)
    np.testing.assert_allclose(frozen.values, 1.0, atol=1e-10)
    with pytest.raises(RegimeError):
        smoothed_frozen_t(one, bank, dictionary, rotations, 4.0)


def _spike(grid: GridShape) -> Field:
    values = np.zeros(grid.shape)
    values[(0,) * grid.dim] = 1.0
    return Field(values, grid.side_length)


def _smoothed_magnitude(f: Field, upsilon, t: float) -> np.ndarray:
    return np.abs(scipy.fft.ifftn(scipy.fft.fftn(f.values) * upsilon.symbol(t * f.grid.frequencies())))


def test_tube_against_itself_and_across(tube_grid):
    delta = 1.0 / 8
    f = single_tube(delta, tube_grid)
    dirs = DirectionSet.circle(delta, 2)
    across, along = kakeya_maximal(f, delta, dirs)
    assert abs(along - 1.0) <= 2 * tube_grid.spacing / delta
    # overlap area delta^2 over tube area delta
    assert delta / 2 <= across <= 2 * delta


def test_kakeya_matches_a_translate_scan(rng):
    grid = GridShape(2, 32, 1.0)
    delta = 1.0 / 8
    f = np.abs(rng.standard_normal(grid.shape))
    dirs = DirectionSet.circle(delta, 4)
    index = np.arange(grid.samples)
    expected = []
    for omega in dirs:
        tube = tube_indicator(omega, delta, grid).values
        best = max(
            np.sum(f[np.ix_((i - index) % grid.samples, (j - index) % grid.samples)] * tube)
            for i in range(grid.samples)
            for j in range(grid.samples)
        )
        expected.append(grid.cell_volume * best)
    np.testing.assert_allclose(kakeya_maximal(Field(f, grid.side_length), delta, dirs), expected, rtol=1e-10)


def test_nikodym_matches_a_placement_scan(tube_grid):
    delta = 1.0 / 8
    ball = ball_indicator(delta, None, tube_grid)
    dirs = DirectionSet.circle(delta)
    best = 0.0
    for omega in dirs:
        tube = tube_indicator(omega, delta, tube_grid).values
        core = tube_core(omega, delta, tube_grid)
        # placements a whose core holds the origin: -a is a core offset
        for a in np.argwhere(np.roll(np.flip(core, axis=(0, 1)), 1, axis=(0, 1))):
            average = tube_grid.cell_volume * np.sum(ball.values * np.roll(tube, tuple(a), axis=(0, 1)))
            best = max(best, average)
    value = nikodym_maximal(ball, delta, dirs).values[0, 0]
    assert value == pytest.approx(best, rel=1e-10)
    assert 0.0 < value < 1.0


def test_hardy_littlewood_of_a_spike(kernel_grid):
    result = hl_maximal(_spike(kernel_grid)).values
    radii = hl_radii(kernel_grid)
    h = kernel_grid.spacing
    scaled = []
    for m in range(3, 17):
        radius = min(r for r in radii if r >= m * h * (1 - 1e-12))
        cells = np.count_nonzero(disc_mask(kernel_grid, radius))
        assert result[m, 0] == pytest.approx(1.0 / cells, rel=1e-9)
        scaled.append(result[m, 0] * m**2)
    assert max(scaled) <= 4 * min(scaled)


def test_nontangential_matches_an_exhaustive_scan(small_grid):
    f = _spike(small_grid)
    phi = build_dictionary(2, ['phi'])['phi']
    t_grid = [0.5, 1.0]
    points = np.indices(small_grid.shape).reshape(2, -1).T
    distances = small_grid.distances_from(points).reshape(len(points), -1)
    expected = np.zeros(len(points))
    for t in t_grid:
        magnitude = _smoothed_magnitude(f, phi, t).reshape(-1)
        admissible = np.where(distances <= t * (1 + 1e-12), magnitude[np.newaxis], 0.0)
        expected = np.maximum(expected, np.max(admissible, axis=1))
    result = nontangential_maximal(f, phi, t_grid).values.reshape(-1)
    np.testing.assert_allclose(result, expected, rtol=0, atol=1e-12)


def test_steep_tangential_weight_is_the_centred_maximal(small_grid):
    f = _spike(small_grid)
    phi = build_dictionary(2, ['phi'])['phi']
    t_grid = [0.25, 0.5]
    centred = np.max([_smoothed_magnitude(f, phi, t) for t in t_grid], axis=0)
    result = tangential_maximal(f, phi, 64.0, t_grid).values
    np.testing.assert_allclose(result, centred, rtol=0, atol=1e-6)
