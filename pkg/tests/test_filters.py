import numpy as np
import pytest

from kakeya import (
    BAND_COLUMNS,
    MEMBER_NAMES,
    BumpProfile,
    ConfigError,
    DomainError,
    FilterBank,
    GridShape,
    RegimeError,
    RotationSet,
    SpectralField,
    band_table,
    build_dictionary,
    eta0_kernel,
    eta1_kernel,
    inverse_transform,
    kernel_mass,
    phi_field,
    phi_hat,
    reconstruct,
    tube_test_kernel,
)


def test_profile_shape():
    profile = BumpProfile()
    r = np.linspace(0.0, 3.0, 301)
    values = profile(r)
    assert np.all(values[r <= 1.0] == 1.0)
    assert np.all(values[r >= 2.0] == 0.0)
    assert profile(1.5) == pytest.approx(0.5, abs=1e-15)
    assert np.all(np.diff(values) <= 1e-15)


def test_profile_radii_are_ordered():
    with pytest.raises(DomainError):
        BumpProfile(2.0, 1.0)


def test_phi_hat_is_radial():
    xi = np.array([[0.6, 0.8], [1.0, 0.0], [0.0, -1.0]])
    np.testing.assert_array_equal(phi_hat(xi), [1.0, 1.0, 1.0])


def test_bank_constants(bank):
    assert bank.base == pytest.approx(0.5)
    assert bank.in_regime
    assert bank.s == 1
    assert bank.eta0_top == 2
    assert bank.k_max >= 2


def test_out_of_regime_bank(kernel_grid):
    bank = FilterBank(0.5, 0.25, kernel_grid)
    assert not bank.in_regime
    with pytest.raises(RegimeError):
        bank.require_regime()
    with pytest.raises(DomainError):
        FilterBank(1.5, 0.25, kernel_grid)


@pytest.mark.parametrize('family', ['dyadic', 'eps_scaled'])
def test_partition_of_unity(bank, family):
    top = 6
    ratio = 0.5 if family == 'dyadic' else bank.base
    radius = np.linspace(0.0, ratio**-top, 2001)
    total = sum(bank.radial_symbol(family, k, radius) for k in range(top + 1))
    assert np.max(np.abs(total - 1.0)) < 1e-12


def test_dyadic_support_is_exact(bank):
    for k in range(1, 5):
        radius = np.concatenate([np.linspace(0.0, 2.0 ** (k - 1), 50), np.linspace(2.0 ** (k + 1), 2.0 ** (k + 3), 50)])
        assert np.all(bank.radial_symbol('dyadic', k, radius) == 0.0)


def test_symbols_lie_in_the_unit_interval(bank, kernel_grid):
    xi = kernel_grid.frequencies()
    for family in ('dyadic', 'eps_scaled'):
        for k in range(5):
            for values in (bank.lp_symbol(family, k, xi), bank.bold_symbol(family, k, xi)):
                assert values.min() >= -1e-15
                assert values.max() <= 1 + 1e-15


def test_bold_support_is_anisotropic(bank, kernel_grid):
    xi = kernel_grid.frequencies()
    k = 2
    radius = np.linalg.norm(bank.anisotropic(xi), axis=-1)
    values = bank.bold_symbol('dyadic', k, xi)
    outside = (radius < 2.0 ** (k - 1)) | (radius > 2.0 ** (k + 1))
    assert np.all(values[outside] == 0.0)


def test_dictionary_members_are_normalized():
    dictionary = build_dictionary(2)
    assert dictionary.names == list(MEMBER_NAMES)
    for member in dictionary:
        if abs(member.mass) > 1e-6:
            assert abs(member.mass) == pytest.approx(1.0, rel=1e-12)
        else:
            assert member.l1_mass == pytest.approx(1.0, rel=1e-9)


def test_dilation_keeps_the_mass():
    phi = build_dictionary(2, ['phi'])['phi']
    assert phi.dilate(0.25).mass == pytest.approx(phi.mass)
    with pytest.raises(DomainError):
        phi.dilate(0.0)


def test_dictionary_rejects_unknown_names():
    with pytest.raises(ConfigError):
        build_dictionary(2, ['wavelet'])
    with pytest.raises(ConfigError):
        build_dictionary(2, normalization='sobolev')


def test_seminorm_normalization_bounds_the_seminorms():
    dictionary = build_dictionary(2, ['phi', 'gaussian'], normalization='seminorm', order=2)
    for member in dictionary:
        assert member.seminorm == 1.0
        assert member.scale > 0


@pytest.mark.filterwarnings('ignore')
def test_reconstruction_identity(bank):
    dictionary = build_dictionary(2, ['phi', 'gaussian', 'cosine_bump'])
    for member in dictionary:
        for rotation in RotationSet.quarter_turns(2):
            report = reconstruct(bank, member, rotation, raise_on_failure=False)
            assert report.passed
            assert report.error < 1e-8 + report.residual


@pytest.mark.filterwarnings('ignore')
def test_band_kernels_carry_their_smoothing_scale(bank):
    phi = build_dictionary(2, ['phi'])['phi']
    low = eta0_kernel(bank, phi, 0)
    assert low.smoothing_scale == pytest.approx(bank.delta / 2)
    high = eta1_kernel(bank, phi, 2)
    assert high.smoothing_scale == pytest.approx(bank.delta ** (1 + 5 * bank.eps))
    with pytest.raises(DomainError):
        eta1_kernel(bank, phi, 1)


def test_band_table(bank):
    rows = band_table(bank)
    families = {row.family for row in rows}
    assert families == {'dyadic', 'eps_scaled'}
    assert rows[0].k == 0 and rows[0].inner_radius == 0.0
    assert rows[0].l1_mass > 0
    assert all(row.l1_mass >= 0 for row in rows)
    assert len([row for row in rows if row.family == 'eps_scaled']) == bank.k_max + 1
    assert len(rows[0].as_tuple()) == len(BAND_COLUMNS)
    assert {row.family for row in band_table(bank, bold=True)} == {'bold_dyadic', 'bold_eps_scaled'}


def test_phi_field_mass(bank):
    assert kernel_mass(phi_field(bank, 1.0, GridShape(2, 256, 8.0))) == pytest.approx(1.0, abs=1e-8)
    with pytest.raises(DomainError):
        phi_field(bank, 0.0)


def test_phi_field_scaling(bank):
    # phi(xi / 4) sampled at m / 2 and phi(xi) at m / 8 are the same array
    narrow = phi_field(bank, 0.25, GridShape(2, 64, 2.0))
    wide = phi_field(bank, 1.0, GridShape(2, 64, 8.0))
    assert np.max(np.abs(narrow.values)) == pytest.approx(16 * np.max(np.abs(wide.values)), rel=1e-6)


@pytest.mark.filterwarnings('ignore')
@pytest.mark.parametrize('t', [0.5, 1.0, 2.0])
def test_tube_kernels_keep_the_mass(bank, t):
    quarter = np.array([[0.0, -1.0], [1.0, 0.0]])
    for member in build_dictionary(2, ['phi', 'gaussian', 'hermite_1']):
        for rotation in (None, quarter):
            assert kernel_mass(tube_test_kernel(bank, member, t, rotation)) == pytest.approx(member.mass, abs=1e-6)


@pytest.mark.filterwarnings('ignore')
def test_unit_tube_kernel_is_the_anisotropic_member(bank):
    phi = build_dictionary(2, ['phi'])['phi']
    grid = bank.grid
    expected = inverse_transform(SpectralField(phi.symbol(bank.anisotropic(grid.frequencies())), grid.side_length))
    np.testing.assert_allclose(tube_test_kernel(bank, phi, 1.0).values, expected.values, rtol=0, atol=1e-10)
    np.testing.assert_allclose(tube_test_kernel(bank, phi, 1.0, np.eye(2)).values, expected.values, rtol=0, atol=1e-10)


@pytest.mark.filterwarnings('ignore')
def test_axis_swap_transposes_the_tube_kernel(kernel_grid):
    bank = FilterBank(1.0 / 8, 0.25, kernel_grid)
    phi = build_dictionary(2, ['phi'])['phi']
    swap = np.array([[0.0, 1.0], [1.0, 0.0]])
    straight = tube_test_kernel(bank, phi, 1.0).values
    swapped = tube_test_kernel(bank, phi, 1.0, swap).values
    np.testing.assert_allclose(swapped, straight.T, rtol=0, atol=1e-10 * np.max(np.abs(straight)))
