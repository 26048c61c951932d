import math

import numpy as np
import pytest

from kakeya import (
    DomainError,
    Field,
    GridError,
    GridShape,
    apply_grid_map,
    apply_multiplier,
    convolve,
    cyclic_shift,
    export_csv,
    forward_transform,
    lp_norm,
    read_field,
    spectral_gradient,
    spectral_l2_norm,
    spectral_refine,
    write_field,
)


def test_grid_rejects_bad_shapes():
    with pytest.raises(GridError):
        GridShape(2, 48, 1.0)
    with pytest.raises(GridError):
        GridShape(4, 16, 1.0)
    with pytest.raises(GridError):
        GridShape(2, 16, 0.0)


def test_grid_metadata(kernel_grid):
    assert kernel_grid.spacing == 0.125
    assert kernel_grid.shape == (64, 64)
    assert kernel_grid.nyquist == 4.0
    assert kernel_grid.index_vectors()[32, 0, 0] == -32
    assert kernel_grid.frequencies()[1, 0, 0] == 1.0 / 8


def test_field_validation():
    with pytest.raises(GridError):
        Field(np.zeros((8, 16)), 1.0)
    with pytest.raises(GridError):
        Field(np.full((8, 8), np.nan), 1.0)


def test_constant_norms(kernel_grid):
    one = Field.constant(kernel_grid, 1.0)
    assert lp_norm(one, 2) == pytest.approx(8.0, rel=1e-14)
    assert lp_norm(one, 1) == pytest.approx(64.0, rel=1e-14)
    assert lp_norm(one, math.inf) == 1.0
    with pytest.raises(DomainError):
        lp_norm(one, 0)


def test_lp_norm_is_shift_invariant(kernel_grid, rng):
    f = Field(rng.standard_normal(kernel_grid.shape), kernel_grid.side_length)
    shifted = cyclic_shift(f, (5, -11))
    for p in (1, 2, 3.5, math.inf):
        assert lp_norm(shifted, p) == pytest.approx(lp_norm(f, p), rel=1e-12)


def test_parseval(kernel_grid, rng):
    f = Field(rng.standard_normal(kernel_grid.shape), kernel_grid.side_length)
    assert spectral_l2_norm(forward_transform(f)) == pytest.approx(lp_norm(f, 2), rel=1e-12)


def test_gaussian_coefficients():
    grid = GridShape(2, 256, 8.0)
    f = Field.from_function(grid, lambda x: np.exp(-np.pi * np.sum(x**2, axis=-1)))
    expected = np.exp(-np.pi * np.sum(grid.frequencies() ** 2, axis=-1))
    assert np.max(np.abs(forward_transform(f).coefficients - expected)) < 1e-6


def test_convolution_with_unit_mass_spike(kernel_grid, rng):
    f = Field(rng.standard_normal(kernel_grid.shape), kernel_grid.side_length)
    spike = np.zeros(kernel_grid.shape)
    spike[0, 0] = 1.0 / kernel_grid.cell_volume
    result = convolve(f, Field(spike, kernel_grid.side_length))
    np.testing.assert_allclose(result.values, f.values, atol=1e-12)


def test_convolution_requires_matching_grids(kernel_grid, tube_grid):
    with pytest.raises(GridError):
        convolve(Field.zeros(kernel_grid), Field.zeros(tube_grid))


def test_identity_multiplier(kernel_grid, rng):
    f = Field(rng.standard_normal(kernel_grid.shape), kernel_grid.side_length)
    np.testing.assert_allclose(apply_multiplier(f, np.ones(kernel_grid.shape)).values, f.values, atol=1e-12)
    with pytest.raises(GridError):
        apply_multiplier(f, np.ones((4, 4)))


def test_spectral_gradient_of_a_sine(kernel_grid):
    mode = 3 / kernel_grid.side_length
    f = Field.from_function(kernel_grid, lambda x: np.sin(2 * np.pi * mode * x[..., 0]))
    dx, dy = spectral_gradient(f)
    expected = 2 * np.pi * mode * np.cos(2 * np.pi * mode * kernel_grid.coordinates()[..., 0])
    np.testing.assert_allclose(dx.values, expected, atol=1e-10)
    np.testing.assert_allclose(dy.values, 0.0, atol=1e-10)


def test_quarter_turn_has_order_four(kernel_grid, rng):
    f = Field(rng.standard_normal(kernel_grid.shape), kernel_grid.side_length)
    turn = np.array([[0, -1], [1, 0]])
    g = f
    for _ in range(4):
        g = apply_grid_map(g, turn)
    assert np.array_equal(g.values, f.values)
    assert not np.array_equal(apply_grid_map(f, turn).values, f.values)


def test_grid_map_rejects_general_rotations(kernel_grid):
    c = math.cos(0.3)
    s = math.sin(0.3)
    with pytest.raises(DomainError):
        apply_grid_map(Field.zeros(kernel_grid), np.array([[c, -s], [s, c]]))


def test_spectral_refine_interpolates(kernel_grid):
    f = Field.from_function(kernel_grid, lambda x: np.cos(2 * np.pi * 2 * x[..., 0] / 8) + np.sin(2 * np.pi * x[..., 1] / 8))
    fine = spectral_refine(f)
    assert fine.samples == 128
    np.testing.assert_allclose(fine.values[::2, ::2], f.values, atol=1e-12)
    with pytest.raises(GridError):
        spectral_refine(f, 3)


def test_distances_from_the_origin_cell(small_grid):
    distances = small_grid.distances_from(np.array([[0, 0], [3, 5]]))
    assert distances.shape == (2, 32, 32)
    np.testing.assert_allclose(distances[0], small_grid.radius(), atol=1e-14)
    assert distances[1, 3, 5] == 0.0


def test_field_files(tmp_path, kernel_grid, rng):
    f = Field(rng.standard_normal(kernel_grid.shape), kernel_grid.side_length)
    path = tmp_path / 'f.field'
    write_field(path, f)
    loaded = read_field(path)
    assert loaded.side_length == f.side_length
    assert np.array_equal(loaded.values, f.values)

    path.write_bytes(path.read_bytes()[:-8])
    with pytest.raises(GridError):
        read_field(path)


def test_csv_export(tmp_path, small_grid):
    path = tmp_path / 'f.csv'
    export_csv(path, Field.constant(small_grid, 2.0))
    lines = path.read_text().splitlines()
    assert lines[0] == 'i0,i1,value'
    assert len(lines) == 32 * 32 + 1
