import json

import numpy as np
import pytest

from kakeya import FilterBank, GridShape, Parameters


@pytest.fixture
def kernel_grid() -> GridShape:
    return GridShape(2, 64, 8.0)


@pytest.fixture
def tube_grid() -> GridShape:
    return GridShape(2, 64, 1.0)


@pytest.fixture
def small_grid() -> GridShape:
    return GridShape(2, 32, 8.0)


@pytest.fixture
def bank(kernel_grid: GridShape) -> FilterBank:
    return FilterBank(1.0 / 16, 0.25, kernel_grid)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(1234))


@pytest.fixture
def small_params() -> Parameters:
    return Parameters(samples=64, seeds=1, bernstein_seeds=1, sample_points=50, property_fields=2, property_samples=16)


@pytest.fixture
def params_file(tmp_path, small_params: Parameters):
    path = tmp_path / 'params.json'
    path.write_text(json.dumps(small_params.to_dict()))
    return path
