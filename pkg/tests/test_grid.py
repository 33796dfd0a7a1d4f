import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import expm

from tdqmc.grid import (
    CollapsedWaveError,
    Grid,
    ProbeFlag,
    ScalarField,
    gaussian_ground_state,
    gradient_values,
    imaginary_time_step,
    kinetic_factor,
    laplacian_apply,
    laplacian_values,
    normalize,
    probe_log_gradient,
    probe_values,
    rayleigh_energy,
)


def harmonic(grid):
    return ScalarField(grid, 0.5 * grid.radius2)


def test_grid_geometry():
    g = Grid(8.0, 256)
    assert g.spacing == pytest.approx(16 / 255)
    assert g.axis[0] == -8.0 and g.axis[-1] == pytest.approx(8.0)
    assert Grid(6.0, 64, 2).coords.shape == (4096, 2)
    with pytest.raises(ValueError):
        Grid(8.0, 15)


def test_laplacian_of_constant_and_linear_vanishes_inside():
    g = Grid(5.0, 64)
    assert np.allclose(laplacian_values(np.ones(64), g)[1:-1], 0.0)
    assert np.allclose(laplacian_values(g.axis.copy(), g)[1:-1], 0.0, atol=1e-10)


def test_laplacian_of_gaussian_at_origin():
    g = Grid(10.0, 512)
    lap = laplacian_apply(ScalarField(g, np.exp(-0.5 * g.axis**2))).values
    # closed form (x^2 - 1) exp(-x^2/2) evaluated on the same nodes
    exact = (g.axis**2 - 1) * np.exp(-0.5 * g.axis**2)
    centre = np.argmin(np.abs(g.axis))
    assert lap[centre] == pytest.approx(exact[centre], abs=1e-3)
    assert np.max(np.abs(lap - exact)) < 1e-3


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([1, 2]))
def test_laplacian_symmetric(seed, dim):
    g = Grid(3.0, 16 if dim == 2 else 40, dim)
    rng = np.random.default_rng(seed)
    f, h = rng.normal(size=(2, g.size))
    assert np.dot(f, laplacian_values(h, g)) == pytest.approx(np.dot(laplacian_values(f, g), h), abs=1e-10 * np.abs(f).sum() * np.abs(h).sum())


def test_laplacian_linear():
    g = Grid(3.0, 20, 2)
    rng = np.random.default_rng(0)
    f, h = rng.normal(size=(2, g.size))
    assert np.allclose(laplacian_values(2 * f + 3 * h, g), 2 * laplacian_values(f, g) + 3 * laplacian_values(h, g))


def test_normalize():
    g = Grid(8.0, 256)
    phi = gaussian_ground_state(g)
    assert g.cell_volume * np.sum(phi.values**2) == pytest.approx(1.0, abs=1e-10)
    assert np.allclose(normalize(phi).values, phi.values, atol=1e-12)
    scaled = ScalarField(g, 7 * np.exp(-0.3 * g.axis**2))
    assert np.allclose(normalize(scaled).values, normalize(ScalarField(g, np.exp(-0.3 * g.axis**2))).values)
    with pytest.raises(CollapsedWaveError):
        normalize(ScalarField(g, np.zeros(256)))


@pytest.mark.parametrize("dtau", [0.005, 0.05, 0.5])
@pytest.mark.parametrize("n, L", [(16, 3.0), (64, 6.0), (255, 8.0)])
def test_kinetic_factor_matches_matrix_exponential(n, L, dtau):
    g = Grid(L, n)
    D2 = (np.diag(np.ones(n - 1), 1) + np.diag(np.ones(n - 1), -1) - 2 * np.eye(n)) / g.spacing**2
    assert np.max(np.abs(kinetic_factor(n, g.spacing, dtau) - expm(0.5 * dtau * D2))) < 1e-13


@pytest.mark.parametrize("dim, expected, tol", [(1, 0.5, 1e-3), (2, 1.0, 2e-3)])
def test_imaginary_time_relaxes_to_harmonic_ground_state(dim, expected, tol):
    g = Grid.default(dim)
    V = harmonic(g)
    phi = normalize(ScalarField(g, 1.0 / (1.0 + g.radius2) + 0.3 * (g.coords[:, 0] > 0)))
    energies = []
    for _ in range(2000):
        phi = imaginary_time_step(phi, V, 0.01)
        energies.append(rayleigh_energy(phi, V))
    assert energies[-1] == pytest.approx(expected, abs=tol)
    # monotone relaxation with a fixed potential
    assert np.all(np.diff(energies) <= 1e-12)


def test_grid_eigenstate_is_fixed_point():
    g = Grid(8.0, 64)
    n = g.points
    H = -0.5 * (np.diag(np.ones(n - 1), 1) + np.diag(np.ones(n - 1), -1) - 2 * np.eye(n)) / g.spacing**2
    H += np.diag(0.5 * g.axis**2)
    w, v = np.linalg.eigh(H)
    phi = normalize(ScalarField(g, np.abs(v[:, 0])))
    out = imaginary_time_step(phi, harmonic(g), 0.005)
    # Strang splitting shifts the fixed point by O(dtau^2) only
    assert np.max(np.abs(out.values - phi.values)) < 1e-5
    for _ in range(3):
        nxt = imaginary_time_step(out, harmonic(g), 0.005)
        assert np.max(np.abs(nxt.values - out.values)) < 1e-8 or np.max(np.abs(nxt.values - out.values)) < np.max(np.abs(out.values - phi.values))
        out = nxt


def test_probe_log_gradient_gaussian():
    g = Grid(8.0, 256)
    phi = ScalarField(g, np.exp(-0.5 * g.axis**2))
    v, flag = probe_log_gradient(phi, [1.5])
    assert v[0] == pytest.approx(-1.5, abs=2e-2) and flag == ProbeFlag.NONE
    v, _ = probe_log_gradient(phi, [0.0])
    assert abs(v[0]) < 1e-6


def test_probe_log_gradient_2d():
    g = Grid(6.0, 64, 2)
    phi = ScalarField(g, np.exp(-0.5 * g.radius2))
    v, _ = probe_log_gradient(phi, [0.5, -0.5])
    # reference: centred differences of the analytic field at the probe point
    eps = 1e-5
    f = lambda x, y: np.exp(-0.5 * (x * x + y * y))
    ref = np.array([(f(0.5 + eps, -0.5) - f(0.5 - eps, -0.5)) / (2 * eps),
                    (f(0.5, -0.5 + eps) - f(0.5, -0.5 - eps)) / (2 * eps)]) / f(0.5, -0.5)
    assert np.allclose(v, ref, atol=2e-2)
    assert np.allclose(v, [-0.5, 0.5], atol=2e-2)


def test_probe_flags():
    g = Grid(8.0, 128)
    phi = ScalarField(g, np.exp(-0.5 * g.axis**2))
    _, flag = probe_log_gradient(phi, [9.0])
    assert ProbeFlag.CLAMPED in flag
    node = ScalarField(g, np.where(np.abs(g.axis) < 1, 0.0, 1.0))
    v, flag = probe_log_gradient(node, [0.0])
    assert ProbeFlag.NODE in flag and np.all(v == 0)


@pytest.mark.parametrize("dim", [1, 2])
def test_probe_on_nodes_matches_gradient_field(dim):
    g = Grid(5.0, 48, dim)
    rng = np.random.default_rng(1)
    waves = np.exp(-0.5 * g.radius2)[None] * (1 + 0.1 * rng.random((3, g.size)))
    nodes = rng.integers(0, g.size, 40)
    idx = rng.integers(0, 3, 40)
    val, grad, lap, flags = probe_values(waves, idx, g.coords[nodes], g)
    assert np.allclose(val, waves[idx, nodes])
    assert np.allclose(grad, gradient_values(waves, g)[idx, nodes])
    assert np.allclose(lap, laplacian_values(waves, g)[idx, nodes])
    assert not flags.any()


def test_probe_between_nodes_is_second_order():
    errs = []
    for n in (64, 128, 256):
        g = Grid(8.0, n)
        phi = np.exp(-0.5 * g.axis**2)
        x = np.linspace(-2.3, 2.1, 17)[:, None]
        _, grad, _, _ = probe_values(phi[None], np.zeros(17, np.int64), x, g)
        errs.append(np.max(np.abs(grad[:, 0] - (-x[:, 0] * np.exp(-0.5 * x[:, 0] ** 2)))))
    ratios = np.array(errs[:-1]) / np.array(errs[1:])
    assert np.all(ratios > 3.0)


@pytest.mark.parametrize("n, dtau", [(256, 0.005), (128, 0.01), (64, 0.5), (300, 0.002)])
def test_banded_kinetic_matches_dense(n, dtau):
    from tdqmc.grid import apply_kinetic, kinetic_bandwidth, kinetic_factor

    g = Grid(8.0, n)
    v = np.random.default_rng(n).normal(size=(2, 7, n))
    dense = v @ kinetic_factor(n, g.spacing, dtau)
    assert np.max(np.abs(apply_kinetic(v, g, dtau) - dense)) < 1e-14
    assert 0 < kinetic_bandwidth(n, g.spacing, dtau) < n
