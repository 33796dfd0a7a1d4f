import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tdqmc.ensemble import (
    ConfigurationError,
    NoiseSchedule,
    WalkerCloud,
    diffuse_step,
    drift_velocity,
    effective_potential_field,
    interaction_fields,
    effective_potentials,
    kernel_weight,
    noise_amplitude,
    normalized_weights,
    partition_weight,
    sample_stddev,
    smoothed_field,
)
from tdqmc.grid import Grid, ProbeFlag, ScalarField, gaussian_ground_state, imaginary_time_step
from tdqmc.model import PhysicalParams, pair_potential


G1 = Grid(6.0, 64)
LR = PhysicalParams(2, 1)


def test_kernel_weight_values():
    assert kernel_weight([0.3], [0.3], 0.5) == 1.0
    s = 0.8
    assert kernel_weight([s * math.sqrt(2)], [0.0], s) == pytest.approx(math.exp(-1), rel=1e-12)
    assert kernel_weight([1.0, -2.0], [0.0, 0.0], 1e6) == pytest.approx(1.0, abs=1e-9)
    with pytest.raises(ValueError):
        kernel_weight([0.0], [1.0], 0.0)


def test_partition_weight():
    assert partition_weight(WalkerCloud(0, np.full(7, 0.4), 0.3), 2) == pytest.approx(7.0)
    assert partition_weight(WalkerCloud(0, np.array([1.0]), 0.3), 0) == 1.0
    cloud = WalkerCloud(0, np.linspace(-2, 2, 9), 1e6)
    assert partition_weight(cloud, 4) == pytest.approx(9.0, abs=1e-6)
    assert partition_weight(WalkerCloud(0, np.linspace(-2, 2, 9), 0.2), 0) >= 1.0


def test_effective_potential_single_particle_is_zero():
    clouds = [WalkerCloud(0, np.linspace(-1, 1, 5), 0.5)]
    assert np.all(effective_potential_field(0, 2, clouds, PhysicalParams(1, 1), G1).values == 0)


@pytest.mark.parametrize("mode", ["standard", "local", "hartree"])
def test_effective_potential_of_point_cloud(mode):
    p = np.array([0.7])
    clouds = [WalkerCloud(0, np.zeros(4), 0.3), WalkerCloud(1, np.full(4, p[0]), 0.3)]
    field = effective_potential_field(0, 1, clouds, LR, G1, mode=mode)
    assert np.allclose(field.values, pair_potential(G1.coords, p, LR))


def test_effective_potential_three_walker_hand_sum():
    g = Grid(3.0, 61)  # node at 0
    clouds = [WalkerCloud(0, np.array([0.0, 0.0, 0.0]), 0.5), WalkerCloud(1, np.array([-1.0, 0.0, 1.0]), 0.5)]
    field = effective_potential_field(0, 1, clouds, LR, g)
    centre = np.argmin(np.abs(g.axis))
    e2 = math.exp(-2.0)
    assert field.values[centre] == pytest.approx((1 + 2 * e2 / math.sqrt(2)) / (1 + 2 * e2), rel=1e-12)
    assert field.values[centre] == pytest.approx(0.937610, abs=1e-6)


def test_effective_potential_mismatched_clouds():
    clouds = [WalkerCloud(0, np.zeros(3), 0.5), WalkerCloud(1, np.zeros(4), 0.5)]
    with pytest.raises(ConfigurationError):
        effective_potential_field(0, 0, clouds, LR, G1)


positions_1d = st.lists(st.floats(-4, 4), min_size=2, max_size=12)


@settings(max_examples=40, deadline=None)
@given(positions_1d, st.floats(0.05, 5.0), st.data())
def test_effective_potential_convex_bounds_and_relabeling(xs, sigma, data):
    xs = np.array(xs)
    M = len(xs)
    k = data.draw(st.integers(0, M - 1))
    clouds = [WalkerCloud(0, np.zeros(M), sigma), WalkerCloud(1, xs, sigma)]
    field = effective_potential_field(0, k, clouds, LR, G1).values
    V = pair_potential(G1.coords[None, :, :], xs[:, None, None], LR)
    assert np.all(field >= V.min(axis=0) - 1e-12)
    assert np.all(field <= V.max(axis=0) + 1e-12)
    perm = data.draw(st.permutations(range(M)))
    perm = np.array(perm)
    # relabel j-walkers, keeping the paired walker the same point
    clouds_p = [clouds[0], WalkerCloud(1, xs[perm], sigma)]
    k_p = int(np.where(perm == k)[0][0])
    assert np.allclose(effective_potential_field(0, k_p, clouds_p, LR, G1).values, field, atol=1e-12)


def test_hartree_equals_wide_kernel():
    rng = np.random.default_rng(3)
    xs = rng.normal(size=50) * 0.7
    s = sample_stddev(xs)
    clouds = [WalkerCloud(0, np.zeros(50), 1e6 * s), WalkerCloud(1, xs, 1e6 * s)]
    wide = effective_potential_field(0, 7, clouds, LR, G1).values
    hartree = effective_potential_field(0, 7, clouds, LR, G1, mode="hartree").values
    assert np.max(np.abs(wide - hartree)) < 1e-6


def test_local_equals_standard_for_coincident_walkers():
    clouds = [WalkerCloud(0, np.zeros(6), 0.4), WalkerCloud(1, np.full(6, -0.9), 0.4)]
    a = effective_potential_field(0, 3, clouds, LR, G1).values
    b = effective_potential_field(0, 3, clouds, LR, G1, mode="local").values
    assert np.max(np.abs(a - b)) < 1e-6


@pytest.mark.parametrize("dim", [1, 2])
@pytest.mark.parametrize("mode", ["standard", "local", "hartree"])
def test_batched_fields_match_single_walker_route(dim, mode):
    g = Grid(4.0, 24, dim)
    params = PhysicalParams(3, dim, screening=3.0)
    rng = np.random.default_rng(5)
    pos = rng.normal(size=(3, 10, dim))
    sig = np.array([sample_stddev(pos[i]) for i in range(3)]) * 0.8
    U = interaction_fields(pos, sig, params, g, mode)
    V = effective_potentials(U)
    clouds = [WalkerCloud(i, pos[i], sig[i]) for i in range(3)]
    for i, k in [(0, 0), (1, 4), (2, 9)]:
        ref = effective_potential_field(i, k, clouds, params, g, mode=mode).values
        row = 0 if mode == "hartree" else k
        assert np.allclose(V[i, row], ref, atol=1e-12)
    U32 = interaction_fields(pos, sig, params, g, mode, np.float32)
    assert np.max(np.abs(U32 - U)) < 1e-5


def test_normalized_weights_rows_sum_to_one():
    W = normalized_weights(np.random.default_rng(0).normal(size=(20, 2)), 0.5)
    assert np.allclose(W.sum(axis=1), 1.0)
    V = np.random.default_rng(1).random((20, 7))
    assert np.allclose(smoothed_field(np.random.default_rng(0).normal(size=(20, 2)), V, 0.5), W @ V)


def test_drift_velocity():
    g = Grid(8.0, 256)
    phi = ScalarField(g, np.exp(-0.5 * g.axis**2))
    assert drift_velocity(phi, [1.5])[0][0] == pytest.approx(-1.5, abs=2e-2)
    assert abs(drift_velocity(phi, [0.0])[0][0]) < 1e-12


def test_drift_of_relaxed_trap_ground_state():
    g = Grid(8.0, 256)
    V = ScalarField(g, 0.5 * g.radius2)
    phi = gaussian_ground_state(g)
    for _ in range(200):
        phi = imaginary_time_step(phi, V, 0.05)
    xs = np.random.default_rng(2).normal(0, 0.7, 50)
    for x in xs:
        v, flag = drift_velocity(phi, [x])
        assert flag == ProbeFlag.NONE
        assert v[0] == pytest.approx(-x, abs=5 * g.spacing**2 * (1 + x * x))


def test_diffuse_step_deterministic_limits():
    rng = np.random.default_rng(0)
    r = np.array([0.3, -0.2])
    assert np.array_equal(diffuse_step(r, np.zeros(2), 0.01, 0.0, rng), r)
    out = diffuse_step(r, np.array([1.0, 2.0]), 0.01, 0.0, rng)
    assert np.array_equal(out, r + np.array([1.0, 2.0]) * 0.01)
    assert np.array_equal(diffuse_step(r, np.array([1.0, 2.0]), 0.01, 0.0, rng, drift_enabled=False), r)


def test_diffuse_step_variance():
    rng = np.random.default_rng(7)
    r = np.zeros((100_000, 1))
    out = diffuse_step(r, np.zeros_like(r), 0.01, 1.0, rng)
    assert out.var() == pytest.approx(0.01, rel=0.03)


def test_sample_stddev():
    assert sample_stddev(np.array([-1.0, 1.0])) == 1.0
    assert sample_stddev(np.full(10, 2.5)) == 0.0
    x = np.random.default_rng(11).normal(size=(100_000, 2))
    assert sample_stddev(x) == pytest.approx(1.0, rel=0.01)
    with pytest.raises(ValueError):
        sample_stddev(np.array([1.0]))
    cloud = WalkerCloud(0, x[:50])
    assert abs(cloud.sample_stddev - sample_stddev(x[:50])) < 1e-12


def test_noise_amplitude():
    s = NoiseSchedule(2.0, 0.2, 1.0, floor=0.0)
    assert noise_amplitude(s, 0.0) == 2.0
    assert noise_amplitude(s, 31.0) == pytest.approx(1.0, rel=1e-12)  # 2 * 32**-0.2
    flat = NoiseSchedule(1.5, 0.0, 1.0, floor=0.0)
    assert all(noise_amplitude(flat, t) == 1.5 for t in (0, 1, 100))
    assert noise_amplitude(NoiseSchedule(), 1e6) == 1.0


@given(st.floats(0.1, 3), st.floats(0, 1), st.floats(0, 1), st.floats(0, 100), st.floats(0, 100))
def test_noise_amplitude_non_increasing(a0, frac, p, t1, t2):
    s = NoiseSchedule(a0, p, 1.0, floor=frac * a0)
    lo, hi = sorted((t1, t2))
    assert noise_amplitude(s, hi) <= noise_amplitude(s, lo) + 1e-15
