import math

import numpy as np
import pytest
import scipy.fft

from kakeya import (
    KINDS,
    ConfigError,
    GridError,
    GridShape,
    ResolutionError,
    TestSpec,
    TubeSpec,
    ball_indicator,
    bandlimited_random,
    bump_sum,
    describe,
    lp_norm,
    perron_tree,
    rotated_tube_union,
    tube_weights,
    union_directions,
    write_manifest,
)
from kakeya.utils import read_json


@pytest.mark.parametrize('kind', KINDS)
def test_specs_are_deterministic(kind, tube_grid):
    spec = TestSpec(kind, seed=3)
    assert np.array_equal(spec.generate(tube_grid).values, spec.generate(tube_grid).values)


def test_seeds_change_random_inputs(kernel_grid):
    first = TestSpec('bump_sum', seed=1).generate(kernel_grid)
    second = TestSpec('bump_sum', seed=2).generate(kernel_grid)
    assert not np.array_equal(first.values, second.values)
    assert np.all(first.values >= 0)


def test_bandlimited_inputs(kernel_grid):
    f = bandlimited_random(7, 1.0, kernel_grid)
    assert lp_norm(f, 2) == pytest.approx(1.0, rel=1e-12)
    spectrum = np.abs(scipy.fft.fftn(f.values))
    outside = np.linalg.norm(kernel_grid.frequencies(), axis=-1) > 1.0
    assert np.max(spectrum[outside]) < 1e-10 * np.max(spectrum)


def test_ball_values(kernel_grid):
    ball = ball_indicator(1.0, None, kernel_grid)
    assert ball.values.min() >= 0.0 and ball.values.max() == 1.0
    assert ball.values[0, 0] == 1.0
    with pytest.raises(ResolutionError):
        ball_indicator(kernel_grid.spacing, None, kernel_grid)


def test_perron_tree_shrinks():
    grid = GridShape(2, 128, 1.0)
    tree = perron_tree(5, 1.0 / 32, grid)
    assert tree.levels == 5
    assert all(later <= earlier for earlier, later in zip(tree.measures, tree.measures[1:]))
    assert tree.measure == pytest.approx(grid.cell_volume * np.count_nonzero(tree.image.values))
    assert tree.triangles.shape == (16, 3, 2)
    assert 0.0 <= tree.coverage() <= 1.0


def test_perron_tree_is_planar():
    with pytest.raises(GridError):
        perron_tree(2, 1.0 / 8, GridShape(3, 16, 1.0))


def test_spec_validation():
    with pytest.raises(ConfigError):
        TestSpec('spiral')
    with pytest.raises(ConfigError):
        TestSpec.from_dict({'kind': 'ball', 'colour': 'red'})
    spec = TestSpec.from_dict({'kind': 'tube', 'delta': 0.125})
    assert spec.to_dict() == {'kind': 'tube', 'seed': 0, 'delta': 0.125}
    assert spec.adapted(0.25).delta == 0.25


def test_manifest(tmp_path, tube_grid):
    spec = TestSpec('tube', delta=0.125)
    entry = describe(spec, spec.generate(tube_grid))
    assert set(entry) == {'spec', 'grid', 'measure', 'norms'}
    assert entry['grid'] == {'dim': 2, 'N': 64, 'L': 1.0}
    assert entry['norms']['linf'] == 1.0
    assert 0 < entry['measure'] < 1.0
    assert math.isfinite(entry['norms']['l2'])

    path = tmp_path / 'manifest.json'
    write_manifest(path, [entry])
    assert read_json(path)['entries'][0]['spec']['kind'] == 'tube'


def test_ball_measure_and_symmetry():
    grid = GridShape(2, 128, 1.0)
    ball = ball_indicator(0.25, None, grid)
    assert lp_norm(ball, 1) == pytest.approx(math.pi / 16, rel=0.05)
    assert ball.values.min() >= 0.0 and ball.values.max() <= 1.0
    mirrored = np.roll(np.flip(ball.values, axis=(0, 1)), 1, axis=(0, 1))
    np.testing.assert_array_equal(mirrored, ball.values)


def test_single_tube_union(tube_grid):
    union = rotated_tube_union(1, 1.0 / 8, tube_grid, seed=4)
    (direction,) = union_directions(1, 2, 4)
    np.testing.assert_array_equal(union.values, tube_weights(TubeSpec(direction, 1.0 / 8), tube_grid))


def test_tube_union_overlaps(tube_grid):
    delta = 1.0 / 32
    count = math.ceil(math.pi / delta)
    union = rotated_tube_union(count, delta, tube_grid, seed=2)
    assert union.values.min() >= 0.0 and union.values.max() <= 1.0
    separate = sum(
        tube_grid.cell_volume * np.sum(tube_weights(TubeSpec(direction, delta), tube_grid))
        for direction in union_directions(count, 2, 2)
    )
    measure = lp_norm(union, 1)
    assert measure <= separate + 1e-12
    assert measure <= 0.7 * count * delta


def test_bump_sum_mass(kernel_grid):
    assert np.array_equal(bump_sum(3, 0, kernel_grid).values, np.zeros(kernel_grid.shape))

    # same draws as the generator: cell, width, amplitude per bump
    rng = np.random.Generator(np.random.PCG64(3))
    low = 8 * kernel_grid.spacing
    amplitudes = []
    for _ in range(5):
        rng.integers(0, kernel_grid.samples, size=2)
        rng.uniform(low, max(low, kernel_grid.side_length / 8))
        amplitudes.append(rng.uniform(0.5, 1.5))

    f = bump_sum(3, 5, kernel_grid)
    assert np.all(f.values >= 0)
    assert lp_norm(f, 1) == pytest.approx(sum(amplitudes), abs=1e-6)


def test_single_stage_is_one_triangle():
    grid = GridShape(2, 512, 1.0)
    tree = perron_tree(1, 2 * grid.spacing, grid, base=0.8, height=0.8)
    assert tree.levels == 1
    assert tree.measure == pytest.approx(0.5 * 0.8 * 0.8, rel=0.05)


def test_perron_tree_covers_its_directions():
    grid = GridShape(2, 256, 1.0)
    tree = perron_tree(4, 1.0 / 64, grid)
    assert tree.measures[3] < tree.measures[1]
    assert tree.coverage() >= 0.9


def test_perron_spec_generates_the_tree_image(tube_grid):
    tree = perron_tree(3, 1.0 / 16, tube_grid)
    generated = TestSpec('perron_tree', delta=1.0 / 16, levels=3).generate(tube_grid)
    assert generated.grid == tube_grid
    np.testing.assert_array_equal(generated.values, tree.image.values)
    assert set(np.unique(tree.image.values)) <= {0.0, 1.0}
