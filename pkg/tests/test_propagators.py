import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from boussinesq.propagators import (SingularFrequencyError, StateVector, apply_linear,
                                    apply_linear_diagonal, block_matrices, change_of_variables,
                                    diagonal_phases, diagonalize_2d, generator_matrix_1d,
                                    generator_matrix_2d, propagator_matrix_1d,
                                    propagator_matrix_2d, weighted_energy_1d)
from boussinesq.spectral import FrequencyGrid, SpectralField, to_physical, to_spectral
from boussinesq.symbols import BBM, GENERIC, KDV, AbcdParams, eval_dispersion

SYM = AbcdParams(-1, 1, -1, 1)
ALL = [GENERIC, KDV, BBM, SYM]


def expm_oracle(M):
    """``exp(M)`` by eigendecomposition (M diagonalisable)."""
    w, V = np.linalg.eig(M)
    return V @ np.diag(np.exp(w)) @ np.linalg.inv(V)


def random_state(grid, rng, real=False):
    shape = (grid.dimension + 1,) + grid.shape
    if real:
        return StateVector(grid, to_spectral(rng.standard_normal(shape), grid))
    return StateVector(grid, rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def irrotational_state(grid, rng):
    """Velocity = gradient of a random potential."""
    phi = to_spectral(rng.standard_normal(grid.shape), grid)
    eta = to_spectral(rng.standard_normal(grid.shape), grid)
    return StateVector(grid, np.stack([eta] + [1j * x * phi for x in grid.xi]))


def _rel(a, b):
    return np.abs(a - b).max() / np.abs(b).max()


G1 = FrequencyGrid.make(1, 64, 4 * np.pi)
G2 = FrequencyGrid.make(2, 32, 2 * np.pi)


@pytest.mark.parametrize("xi", [-3.0, 0.4, 2.5, 7.0])
@pytest.mark.parametrize("p", ALL)
def test_1d_matrix_matches_exponential(xi, p):
    t = 0.37
    A = generator_matrix_1d(xi, p)
    if abs(A[0, 1] * A[1, 0]) < 1e-14:
        pytest.skip("nilpotent generator at a zero of the symbol")
    np.testing.assert_allclose(propagator_matrix_1d(xi, t, p), expm_oracle(-1j * t * A),
                               atol=1e-12)


@pytest.mark.parametrize("xi", [(1.0, 0.0), (0.3, -2.0), (-1.5, 0.7)])
@pytest.mark.parametrize("p", ALL)
def test_2d_matrix_matches_exponential(xi, p):
    t = -0.81
    mod = np.hypot(*xi)
    A = mod * generator_matrix_2d(xi, p)
    np.testing.assert_allclose(propagator_matrix_2d(xi[0], xi[1], t, p),
                               expm_oracle(-1j * t * A), atol=1e-12)


@pytest.mark.parametrize("grid", [G1, G2])
@pytest.mark.parametrize("p", ALL)
def test_identity_at_zero_time(grid, p):
    v = random_state(grid, np.random.default_rng(0))
    np.testing.assert_array_equal(apply_linear(v, 0.0, p).coeffs, v.coeffs)


def test_closed_form_rotation():
    xi0 = 1.25
    c = np.zeros((2, 64), complex)
    hit = np.isclose(G1.axes[0], xi0)
    c[1, hit] = 1.0
    for t in (0.3, 1.7):
        out = apply_linear(StateVector(G1, c), t, SYM).coeffs
        assert out[0, hit][0] == pytest.approx(-1j * np.sin(xi0 * t), abs=1e-15)
        assert out[1, hit][0] == pytest.approx(np.cos(xi0 * t), abs=1e-15)
        assert not np.any(out[:, ~hit])


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31), st.floats(-2, 2), st.floats(-2, 2), st.sampled_from(ALL),
       st.sampled_from([G1, G2]))
def test_group_law(seed, t, s, p, grid):
    v = random_state(grid, np.random.default_rng(seed))
    lhs = apply_linear(apply_linear(v, s, p), t, p).coeffs
    assert _rel(lhs, apply_linear(v, t + s, p).coeffs) < 1e-12
    back = apply_linear(apply_linear(v, t, p), -t, p).coeffs
    assert _rel(back, v.coeffs) < 1e-12


@pytest.mark.parametrize("grid", [G1, G2])
@pytest.mark.parametrize("p", ALL)
def test_matrix_path_matches_diagonal_path(grid, p):
    v = random_state(grid, np.random.default_rng(1))
    for t in (0.5, -1.3):
        assert _rel(apply_linear(v, t, p).coeffs, apply_linear_diagonal(v, t, p).coeffs) < 1e-12


@pytest.mark.parametrize("grid", [G1, G2])
@pytest.mark.parametrize("p", ALL)
def test_diagonal_modulus_conserved(grid, p):
    v = random_state(grid, np.random.default_rng(2))
    d0 = change_of_variables(v, "toDiagonal", p).coeffs
    dt = change_of_variables(apply_linear(v, 0.9, p), "toDiagonal", p).coeffs
    np.testing.assert_allclose(np.abs(dt), np.abs(d0), rtol=1e-12, atol=1e-14)


def test_weighted_energy_conserved_but_plain_norm_is_not():
    rng = np.random.default_rng(3)
    v = random_state(G1, rng)
    e0 = weighted_energy_1d(v, GENERIC, s=1.5)
    vt = apply_linear(v, 2.0, GENERIC)
    assert weighted_energy_1d(vt, GENERIC, s=1.5) == pytest.approx(e0, rel=1e-12)
    plain = lambda w: np.sum(np.abs(w.coeffs) ** 2)
    # h != 1 in the generic regime, so the unweighted norm moves
    assert abs(plain(vt) / plain(v) - 1) > 1e-6


@pytest.mark.parametrize("grid", [G1, G2])
@pytest.mark.parametrize("p", ALL)
def test_reality_preserved(grid, p):
    v = random_state(grid, np.random.default_rng(4), real=True)
    # the Nyquist mode is its own conjugate partner, so odd symbols cannot keep it
    # real; band-limited states have it empty
    nyq = np.zeros(grid.shape, bool)
    for ax, k in enumerate(grid.index):
        shape = [-1 if i == ax else 1 for i in range(grid.dimension)]
        nyq |= (k == -grid.shape[ax] // 2).reshape(shape)
    v = StateVector(grid, np.where(nyq, 0, v.coeffs))
    out = apply_linear(v, 1.1, p)
    assert all(f.is_real(1e-12) for f in out.fields())


@pytest.mark.parametrize("p", ALL)
def test_curl_preserved(p):
    rng = np.random.default_rng(5)
    for _ in range(5):
        v = irrotational_state(G2, rng)
        assert v.is_irrotational()
        assert apply_linear(v, rng.uniform(-2, 2), p).curl_residual() < 1e-12


def test_bbm_phase_advance():
    grid = FrequencyGrid.make(2, 64, (np.pi / np.sqrt(6) * 8, 2 * np.pi))
    hit = np.isclose(grid.xi[0], np.sqrt(6)) & np.isclose(grid.xi[1], 0.0)
    assert hit.sum() == 1
    ph = diagonal_phases(grid, 1.0, BBM)[1][hit][0]
    assert np.angle(ph) == pytest.approx(-np.sqrt(6) / 2, abs=1e-14)
    assert eval_dispersion(np.sqrt(6), BBM, 2) * np.sqrt(6) == pytest.approx(np.sqrt(6) / 2)


def test_diagonalize_symmetric_eigs():
    _, _, eigs = diagonalize_2d((1.0, 0.0), SYM)
    assert eigs == (0.0, 1.0, -1.0)


def test_block_matrix_column_pattern():
    P, _, _ = diagonalize_2d((0.0, 1.0), GENERIC)
    np.testing.assert_array_equal(P[:, 0], [0.0, -1.0, 0.0])


def test_diagonalize_residual_random():
    rng = np.random.default_rng(6)
    for _ in range(200):
        a, c = -rng.uniform(0.05, 2, 2)
        b, d = rng.uniform(0.05, 2, 2)
        p = AbcdParams(a, b, c, d)
        xi = rng.normal(scale=3, size=2)
        P, Pinv, eigs = diagonalize_2d(xi, p)
        A = generator_matrix_2d(xi, p)
        assert np.abs(P @ Pinv - np.eye(3)).max() < 1e-12
        assert np.abs(Pinv @ A @ P - np.diag(eigs)).max() < 1e-12


def test_singular_frequency():
    with pytest.raises(SingularFrequencyError):
        diagonalize_2d((0.0, 0.0), GENERIC)
    with pytest.raises(SingularFrequencyError):
        generator_matrix_2d((0.0, 0.0), GENERIC)


def test_zero_mode_is_fixed():
    grid = G2
    v = random_state(grid, np.random.default_rng(7))
    zero = grid.modulus == 0
    out = apply_linear(v, 3.0, GENERIC).coeffs
    np.testing.assert_array_equal(out[:, zero], v.coeffs[:, zero])
    P, Pinv = block_matrices(0.0, 0.0, GENERIC)
    np.testing.assert_allclose(P @ Pinv, np.eye(3), atol=1e-15)


def test_change_of_variables_zero_elevation():
    rng = np.random.default_rng(8)
    u = rng.standard_normal(64) + 0j
    v = StateVector(G1, np.stack([np.zeros(64), u]))
    d = change_of_variables(v, "toDiagonal", GENERIC).coeffs
    np.testing.assert_allclose(d[0], u / 2, atol=1e-15)
    np.testing.assert_allclose(d[1], -u / 2, atol=1e-15)


@pytest.mark.parametrize("grid", [G1, G2])
@pytest.mark.parametrize("p", [GENERIC, KDV, SYM])
def test_change_of_variables_roundtrip(grid, p):
    v = random_state(grid, np.random.default_rng(9))
    back = change_of_variables(change_of_variables(v, "toDiagonal", p), "fromDiagonal", p)
    assert _rel(back.coeffs, v.coeffs) < 1e-12


def test_irrotational_has_no_kernel_component():
    v = irrotational_state(G2, np.random.default_rng(10))
    mu = change_of_variables(v, "toDiagonal", GENERIC).coeffs[0]
    assert np.abs(mu).max() < 1e-12 * np.abs(v.coeffs).max()


def test_change_of_variables_direction_error():
    with pytest.raises(ValueError):
        change_of_variables(StateVector.zeros(G1), "sideways", GENERIC)


def test_state_vector_validation():
    with pytest.raises(ValueError):
        StateVector(G2, np.zeros((2,) + G2.shape))
    with pytest.raises(ValueError):
        StateVector.from_fields(SpectralField.zeros(G1), SpectralField.zeros(G2))
    s = StateVector.from_fields(SpectralField.zeros(G1), SpectralField.zeros(G1))
    assert s.dimension == 1 and len(s.velocity) == 1
