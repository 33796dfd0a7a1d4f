import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tdqmc.ensemble import GuideSet, WalkerCloud
from tdqmc.grid import Grid, gaussian_ground_state
from tdqmc.observables import (
    DensityMatrix,
    density_profile,
    guide_purity,
    l1_distance,
    linear_entropy,
    reduced_density_matrix,
)

G = Grid(6.0, 96)


def hermite_basis(grid, m):
    """First m orthonormal (on the grid) oscillator-like functions."""
    x = grid.axis
    raw = np.stack([x**n * np.exp(-0.5 * x * x) for n in range(m)])
    q, _ = np.linalg.qr(raw.T)
    return q.T / np.sqrt(grid.cell_volume)


def test_pure_state():
    phi = gaussian_ground_state(G).values
    rho = reduced_density_matrix(GuideSet(0, G, np.tile(phi, (5, 1))))
    assert np.allclose(rho.values, np.outer(phi, phi))
    assert rho.trace() == pytest.approx(1.0, abs=1e-8)
    assert abs(linear_entropy(rho)) < 1e-8


def test_sign_flips_keep_state_pure():
    phi = gaussian_ground_state(G).values
    waves = np.stack([phi, -phi, phi])
    assert abs(linear_entropy(reduced_density_matrix(GuideSet(0, G, waves)))) < 1e-8


@pytest.mark.parametrize("m", [2, 3, 5])
def test_orthogonal_mixture(m):
    rho = reduced_density_matrix(GuideSet(0, G, hermite_basis(G, m)))
    assert rho.purity() == pytest.approx(1.0 / m, abs=1e-10)
    assert linear_entropy(rho) == pytest.approx(1.0 - 1.0 / m, abs=1e-10)


def test_non_normalized_input_rejected():
    phi = gaussian_ground_state(G).values
    with pytest.raises(ValueError):
        reduced_density_matrix(GuideSet(0, G, np.stack([phi, 1.1 * phi])))


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 8), st.integers(0, 2**31))
def test_rdm_identities_and_streaming_purity(m, seed):
    rng = np.random.default_rng(seed)
    basis = hermite_basis(G, 6)
    waves = rng.normal(size=(m, 6)) @ basis
    waves /= np.sqrt(G.cell_volume * np.sum(waves**2, axis=1, keepdims=True))
    rho = reduced_density_matrix(GuideSet(0, G, waves))
    assert np.max(np.abs(rho.values - rho.values.T)) < 1e-10
    assert rho.trace() == pytest.approx(1.0, abs=1e-8)
    assert np.linalg.eigvalsh(rho.values * G.cell_volume).min() >= -1e-8
    assert abs(guide_purity(waves, G) - rho.purity()) < 1e-8
    S = linear_entropy(rho)
    assert -1e-12 <= S < 1.0
    identical = np.allclose(np.abs(waves @ waves.T) * G.cell_volume, 1.0, atol=1e-9)
    assert (S < 1e-9) == identical


def test_streaming_purity_2d():
    g = Grid(4.0, 20, 2)
    rng = np.random.default_rng(0)
    waves = rng.normal(size=(7, g.size))
    waves /= np.sqrt(g.cell_volume * np.sum(waves**2, axis=1, keepdims=True))
    rho = reduced_density_matrix(GuideSet(0, g, waves))
    assert abs(guide_purity(waves, g) - rho.purity()) < 1e-8


def test_density_profile_of_guides():
    phi = gaussian_ground_state(G)
    prof = density_profile(GuideSet(0, G, np.tile(phi.values, (4, 1))))
    assert np.allclose(prof.values, phi.values**2)
    assert prof.values.sum() * G.cell_volume == pytest.approx(1.0)


def test_walker_histogram_matches_density():
    g = Grid(6.0, 128)
    xs = np.random.default_rng(1).normal(0, np.sqrt(0.5), 10**6)
    exact = gaussian_ground_state(g)
    hist = density_profile(WalkerCloud(0, xs), g)
    assert l1_distance(hist, density_profile(GuideSet(0, g, exact.values[None]))) < 0.02


def test_walker_histogram_2d():
    g = Grid(5.0, 48, 2)
    xy = np.random.default_rng(2).normal(0, np.sqrt(0.5), (10**6, 2))
    hist = density_profile(xy, g)
    exact = gaussian_ground_state(g).values ** 2
    assert hist.values.sum() * g.cell_volume == pytest.approx(1.0)
    assert g.cell_volume * np.abs(hist.values - exact).sum() < 0.02


def test_empty_cloud_rejected():
    with pytest.raises(ValueError):
        density_profile(np.zeros((0, 1)), G)
    with pytest.raises(ValueError):
        density_profile(np.zeros((5, 1)))


def test_density_matrix_diagonal():
    phi = gaussian_ground_state(G).values
    rho = DensityMatrix(G, np.outer(phi, phi))
    assert np.allclose(rho.diagonal().values, phi**2)
