"""The numba and numpy paths of every hot kernel must agree."""

import numpy as np
import pytest

from tdqmc import _kernels

pytestmark = pytest.mark.skipif(not _kernels.HAVE_NUMBA, reason="numba unavailable")


@pytest.fixture
def rng():
    return np.random.default_rng(42)


def test_probe_1d_parity(rng):
    waves = rng.normal(size=(5, 40))
    idx = rng.integers(0, 5, 300)
    pos = rng.uniform(-3.5, 3.5, 300)  # some outside [-3, 3]
    a = _kernels.probe_1d_numba(waves, idx, pos, -3.0, 6.0 / 39)
    b = _kernels.probe_1d_numpy(waves, idx, pos, -3.0, 6.0 / 39)
    for x, y in zip(a, b):
        assert np.allclose(x, y, rtol=1e-12, atol=1e-12)
    assert a[3].any()


def test_probe_2d_parity(rng):
    n = 20
    waves = rng.normal(size=(4, n, n))
    idx = rng.integers(0, 4, 200)
    pos = rng.uniform(-2.4, 2.4, (200, 2))
    a = _kernels.probe_2d_numba(waves, idx, pos, -2.0, 4.0 / (n - 1))
    b = _kernels.probe_2d_numpy(waves, idx, pos, -2.0, 4.0 / (n - 1))
    for x, y in zip(a, b):
        assert np.allclose(x, y, rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize("screening", [0.0, 3.0])
@pytest.mark.parametrize("d", [1, 2])
def test_pair_field_parity(rng, screening, d):
    pos = rng.normal(size=(30, d))
    nodes = rng.uniform(-4, 4, (50, d))
    a = _kernels.pair_field_numba(pos, nodes, screening, 1.0)
    b = _kernels.pair_field_numpy(pos, nodes, screening, 1.0)
    assert np.allclose(a, b, rtol=1e-13)


def test_kernel_matrix_single_vs_double(rng):
    pos = rng.normal(size=(100, 2))
    K64 = _kernels.kernel_matrix(pos, 0.7)
    K32 = _kernels.kernel_matrix(pos, 0.7, np.float32)
    assert K32.dtype == np.float32
    assert np.allclose(K64, K64.T) and np.allclose(np.diag(K64), 1.0)
    assert np.max(np.abs(K64 - K32)) < 1e-6
