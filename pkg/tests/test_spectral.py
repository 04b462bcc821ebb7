import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from boussinesq.spectral import (FrequencyGrid, PhysicalField, SpectralField, bernstein_ratio,
                                 bump, lp_decompose, lp_multiplier, lp_project, max_block,
                                 physical_lp_norm, random_block_field, sobolev_norm, to_physical,
                                 to_spectral, transform)


def grid1(points=64, extent=4 * np.pi):
    return FrequencyGrid.make(1, points, extent)


def grid2(points=32, extent=2 * np.pi):
    return FrequencyGrid.make(2, points, extent)


def test_grid_validation():
    with pytest.raises(ValueError):
        FrequencyGrid.make(1, 12, 1.0)
    with pytest.raises(ValueError):
        FrequencyGrid.make(1, 4, 1.0)
    with pytest.raises(ValueError):
        FrequencyGrid.make(3, 8, 1.0)
    with pytest.raises(ValueError):
        FrequencyGrid.make(1, 8, -1.0)


def test_grid_lattice():
    g = grid1(64, 4 * np.pi)
    assert g.dxi == (0.25,)
    assert g.nyquist == (8.0,)
    np.testing.assert_allclose(np.sort(g.axes[0]), 0.25 * np.arange(-32, 32))


def test_with_spacing_reaches_nyquist():
    g = FrequencyGrid.with_spacing((0.25, 0.5), (100, 3))
    assert g.dxi == (0.25, 0.5)
    assert g.nyquist[0] >= 100 and g.nyquist[1] >= 3
    assert g.shape[0] // 4 * 0.25 < 100  # smallest such power of two


def _direct_dft(values, grid):
    """O(P^2) transform straight from the defining sum."""
    x = grid.x[0]
    xi = grid.axes[0]
    return np.exp(-1j * np.outer(xi, x)) @ values * grid.dx[0]


def test_transform_matches_direct_sum():
    g = grid1(32, 3.0)
    rng = np.random.default_rng(0)
    f = rng.standard_normal(32) + 1j * rng.standard_normal(32)
    np.testing.assert_allclose(to_spectral(f, g), _direct_dft(f, g), atol=1e-12)


def test_zero_field():
    g = grid2()
    z = transform(PhysicalField(g, np.zeros(g.shape)), "toSpectral")
    assert not np.any(z.coeffs)
    assert sobolev_norm(z, 3.0) == 0.0


@pytest.mark.parametrize("k", [0, 3, -7])
def test_pure_tone_is_a_delta(k):
    g = grid1(64, 4 * np.pi)
    xi0 = k * g.dxi[0]
    coeffs = to_spectral(np.exp(1j * xi0 * g.x[0]), g)
    hit = np.isclose(g.axes[0], xi0)
    assert abs(coeffs[hit][0] - 2 * g.extent[0]) < 1e-12
    assert np.abs(coeffs[~hit]).max() < 1e-12


@pytest.mark.parametrize("grid", [grid1(), grid2()])
def test_roundtrip(grid):
    rng = np.random.default_rng(1)
    f = rng.standard_normal(grid.shape)
    back = transform(transform(PhysicalField(grid, f), "toSpectral"), "toPhysical").values
    assert np.linalg.norm(back - f) / np.linalg.norm(f) < 1e-12


def test_transform_errors():
    g = grid1()
    with pytest.raises(ValueError):
        to_spectral(np.zeros(16), g)
    with pytest.raises(ValueError):
        transform(SpectralField.zeros(g), "sideways")
    with pytest.raises(TypeError):
        transform(PhysicalField(g, np.zeros(64)), "toPhysical")


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31), st.floats(-3, 3), st.floats(-3, 3))
def test_linearity(seed, alpha, beta):
    g = grid2(16)
    rng = np.random.default_rng(seed)
    f, h = rng.standard_normal((2,) + g.shape)
    lhs = to_spectral(alpha * f + beta * h, g)
    rhs = alpha * to_spectral(f, g) + beta * to_spectral(h, g)
    assert np.abs(lhs - rhs).max() <= 1e-12 * max(1.0, np.abs(rhs).max())


@pytest.mark.parametrize("grid", [grid1(), grid2()])
def test_parseval(grid):
    rng = np.random.default_rng(2)
    f = rng.standard_normal(grid.shape)
    phys = physical_lp_norm(f, grid, 2)
    spec = sobolev_norm(SpectralField(grid, to_spectral(f, grid)), 0)
    assert phys == pytest.approx(spec / (2 * np.pi) ** (grid.dimension / 2), rel=1e-12)


def test_real_field_is_conjugate_symmetric():
    g = grid2()
    f = np.random.default_rng(3).standard_normal(g.shape)
    assert SpectralField(g, to_spectral(f, g)).is_real()
    assert not SpectralField(g, to_spectral(1j * f + f, g)).is_real()


def test_sobolev_single_mode():
    g = grid1(64, 4 * np.pi)
    c = np.zeros(64, complex)
    c[np.isclose(g.axes[0], 3.0)] = 1.0
    assert sobolev_norm(SpectralField(g, c), 2) == pytest.approx(10 * np.sqrt(g.cell), rel=1e-14)


def test_sobolev_monotone_in_s():
    g = grid2()
    f = SpectralField(g, to_spectral(np.random.default_rng(4).standard_normal(g.shape), g))
    vals = [sobolev_norm(f, s) for s in np.linspace(-2, 2, 9)]
    assert np.all(np.diff(vals) > 0)


@settings(max_examples=200, deadline=None)
@given(st.floats(0, 10))
def test_bump_profile(r):
    v = bump(r)
    assert 0 <= v <= 1
    if r <= 1:
        assert v == 1
    if r >= 2:
        assert v == 0


def test_bump_monotone():
    r = np.linspace(0, 3, 3001)
    assert np.all(np.diff(bump(r)) <= 0)


@pytest.mark.parametrize("grid", [grid1(256, 16 * np.pi), grid2(64, 8 * np.pi)])
def test_partition_of_unity(grid):
    top = max_block(grid)
    total = sum(lp_multiplier(grid.modulus, 1 << k) for k in range(int(np.log2(top)) + 1))
    resolved = grid.modulus <= top
    assert np.abs(total[resolved] - 1).max() < 1e-12


@pytest.mark.parametrize("N", [2, 4, 8])
def test_block_support(N):
    g = grid1(256, 16 * np.pi)
    m = lp_multiplier(g.modulus, N)
    outside = (g.modulus < N / 2) | (g.modulus > 2 * N)
    assert not np.any(m[outside])


def test_low_block_identity_on_low_frequencies():
    g = grid1(128, 8 * np.pi)
    rng = np.random.default_rng(5)
    c = np.where(g.modulus <= 1, rng.standard_normal(128), 0.0)
    f = SpectralField(g, c)
    np.testing.assert_array_equal(lp_project(f, 1).coeffs, f.coeffs)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_dyadic_mode_split(k):
    g = grid1(256, 8 * np.pi)
    c = np.zeros(256, complex)
    c[np.isclose(g.axes[0], 2.0**k)] = 1.0
    f = SpectralField(g, c)
    parts = [lp_project(f, 1 << j) for j in range(int(np.log2(max_block(g))) + 1)]
    nonzero = [p for p in parts if np.any(p.coeffs)]
    assert 1 <= len(nonzero) <= 2
    np.testing.assert_allclose(sum(p.coeffs for p in parts), c, atol=1e-15)


@pytest.mark.parametrize("grid", [grid1(512, 32 * np.pi), grid2(64, 8 * np.pi)])
def test_decomposition_sums_back(grid):
    rng = np.random.default_rng(6)
    top = max_block(grid)
    c = np.where(grid.modulus <= top, rng.standard_normal(grid.shape), 0.0)
    f = SpectralField(grid, c)
    dec = lp_decompose(f)
    assert dec.levels[-1] == top
    err = sobolev_norm(dec.total() - f, 0) / sobolev_norm(f, 0)
    assert err < 1e-12


def test_block_range_error():
    g = grid1(64, 4 * np.pi)
    with pytest.raises(ValueError):
        lp_project(SpectralField.zeros(g), 8)
    with pytest.raises(ValueError):
        lp_project(SpectralField.zeros(g), 3)


def test_bernstein_single_mode():
    g = grid1(256, 4 * np.pi)
    for N, xi0 in [(4, 3.0), (8, 12.0), (16, 9.0)]:
        c = np.zeros(256, complex)
        c[np.isclose(g.axes[0], xi0)] = 1.0
        r = bernstein_ratio(SpectralField(g, c), N, p=2, s=1)
        assert r == pytest.approx(xi0 / N, rel=1e-12)
        assert 0.5 <= r <= 2


def test_bernstein_empty_block():
    with pytest.raises(ValueError):
        bernstein_ratio(SpectralField.zeros(grid1()), 4)


@pytest.mark.parametrize("s", [-1.0, 1.0])
def test_bernstein_random_blocks(s):
    g = grid1(4096, 4 * np.pi)
    rng = np.random.default_rng(7)
    for N in [4, 8, 16, 32, 64, 128, 256]:
        for _ in range(100):
            f = random_block_field(g, [N], rng)
            assert 0.25 <= bernstein_ratio(f, N, p=2, s=s) <= 4


def test_bernstein_lq_growth():
    """``||f_N||_inf / ||f_N||_2`` stays under C N^{1/2}, with C not growing in N."""
    g = grid1(1024, 4 * np.pi)
    rng = np.random.default_rng(8)
    single, blocks = [], []
    for N in [4, 16, 64]:
        c = np.zeros(1024, complex)
        c[np.isclose(g.axes[0], N)] = 1.0
        single.append(bernstein_ratio(SpectralField(g, c), N, p=2, q=np.inf))
        blocks.append(max(bernstein_ratio(random_block_field(g, [N], rng), N, p=2, q=np.inf)
                          for _ in range(20)))
    assert max(single) < 1.0
    assert max(blocks) < 2.0
