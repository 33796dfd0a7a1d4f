"""Hot inner loops.

Every kernel has a numba version and a pure-numpy version with identical
signatures.  The numba path is used when numba imports and the environment
variable ``TDQMC_DISABLE_NUMBA`` is unset or "0"; the flag is read once at
import time.
"""

from __future__ import annotations

import os

import numpy as np

os.environ.setdefault("NUMBA_THREADING_LAYER", "workqueue")

try:
    import numba
    from numba import njit, prange

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and os.environ.get("TDQMC_DISABLE_NUMBA", "0") in ("", "0")

CLAMPED = 1


# -- numpy implementations --------------------------------------------------

def _locate(x, lo, h, n):
    hi = lo + (n - 1) * h
    clamped = (x < lo) | (x > hi)
    x = np.clip(x, lo, hi)
    u = (x - lo) / h
    i0 = np.minimum(np.floor(u).astype(np.int64), n - 2)
    return i0, u - i0, clamped


def _cubic_weights(t):
    """Lagrange weights of nodes -1, 0, 1, 2 at fraction t of cell [0, 1]."""
    return np.stack([
        -t * (t - 1) * (t - 2) / 6,
        (t + 1) * (t - 1) * (t - 2) / 2,
        -(t + 1) * t * (t - 2) / 2,
        (t + 1) * t * (t - 1) / 6,
    ], axis=-1)


def _nodal(F, h, axis):
    """Centred value, first and second difference on the inner nodes of F."""
    n = F.shape[axis]
    c = np.take(F, range(1, n - 1), axis=axis)
    up = np.take(F, range(2, n), axis=axis)
    dn = np.take(F, range(0, n - 2), axis=axis)
    return c, (up - dn) / (2 * h), (up - 2 * c + dn) / (h * h)


def probe_1d_numpy(waves, idx, pos, lo, h):
    n = waves.shape[1]
    i0, t, clamped = _locate(pos, lo, h, n)
    padded = np.zeros((waves.shape[0], n + 4))
    padded[:, 2:-2] = waves
    # padded index j is node j-2; window covers nodes i0-2 .. i0+3
    F = padded[idx[:, None], i0[:, None] + np.arange(6)[None, :]]
    c, g, l = _nodal(F, h, 1)
    w = _cubic_weights(t)
    val = np.einsum("pi,pi->p", w, c)
    grad = np.einsum("pi,pi->p", w, g)
    lap = np.einsum("pi,pi->p", w, l)
    return val, grad, lap, clamped.astype(np.int8) * CLAMPED


def probe_2d_numpy(waves, idx, pos, lo, h):
    n = waves.shape[1]
    ix, tx, cx = _locate(pos[:, 0], lo, h, n)
    iy, ty, cy = _locate(pos[:, 1], lo, h, n)
    padded = np.zeros((waves.shape[0], n + 4, n + 4))
    padded[:, 2:-2, 2:-2] = waves
    # 6x6 block of nodes i0-2 .. i0+3 per axis
    ox = ix[:, None] + np.arange(6)[None, :]
    oy = iy[:, None] + np.arange(6)[None, :]
    F = padded[idx[:, None, None], ox[:, :, None], oy[:, None, :]]
    inner = F[:, 1:-1, 1:-1]
    gx = (F[:, 2:, 1:-1] - F[:, :-2, 1:-1]) / (2 * h)
    gy = (F[:, 1:-1, 2:] - F[:, 1:-1, :-2]) / (2 * h)
    lp = (F[:, 2:, 1:-1] + F[:, :-2, 1:-1] + F[:, 1:-1, 2:] + F[:, 1:-1, :-2] - 4 * inner) / (h * h)
    wx, wy = _cubic_weights(tx), _cubic_weights(ty)

    def interp(A):
        return np.einsum("pi,pij,pj->p", wx, A, wy)

    grad = np.stack([interp(gx), interp(gy)], axis=-1)
    flags = (cx | cy).astype(np.int8) * CLAMPED
    return interp(inner), grad, interp(lp), flags


def kernel_matrix(pos, sigma, dtype=np.float64):
    """Symmetric Gaussian kernel matrix exp(-|r_k - r_l|^2 / 2 sigma^2).

    numpy only: its vectorized exp outruns a scalar numba loop here,
    by a wide margin in float32.
    """
    x = (pos - pos.mean(axis=0)).astype(dtype)
    c = dtype(-0.5 / (sigma * sigma)) if dtype is not np.float64 else -0.5 / (sigma * sigma)
    d2 = np.zeros((x.shape[0], x.shape[0]), dtype=dtype)
    for a in range(x.shape[1]):
        t = x[:, a, None] - x[None, :, a]
        t *= t
        d2 += t
    d2 *= c
    return np.exp(d2, out=d2)


def pair_field_numpy(pos, nodes, screening, softening):
    diff = nodes[None, :, :] - pos[:, None, :]
    r2 = np.einsum("mgd,mgd->mg", diff, diff)
    v = 1.0 / np.sqrt(r2 + softening * softening)
    if screening != 0.0:
        v *= np.exp(-screening * np.sqrt(r2))
    return v


# -- numba implementations ----------------------------------------------------

if HAVE_NUMBA:

    @njit(cache=True, inline="always")
    def _weights(t, out):
        out[0] = -t * (t - 1) * (t - 2) / 6
        out[1] = (t + 1) * (t - 1) * (t - 2) / 2
        out[2] = -(t + 1) * t * (t - 2) / 2
        out[3] = (t + 1) * t * (t - 1) / 6

    @njit(cache=True, inline="always")
    def _at1(w, i, n):
        if i < 0 or i >= n:
            return 0.0
        return w[i]

    @njit(cache=True, inline="always")
    def _at(w, i, j, n):
        if i < 0 or i >= n or j < 0 or j >= n:
            return 0.0
        return w[i, j]

    @njit(cache=True, parallel=True)
    def probe_1d_numba(waves, idx, pos, lo, h):
        n = waves.shape[1]
        P = pos.shape[0]
        hi = lo + (n - 1) * h
        val = np.empty(P)
        grad = np.empty(P)
        lap = np.empty(P)
        flags = np.zeros(P, np.int8)
        for p in prange(P):
            x = pos[p]
            if x < lo:
                x = lo
                flags[p] = CLAMPED
            elif x > hi:
                x = hi
                flags[p] = CLAMPED
            u = (x - lo) / h
            i0 = min(int(np.floor(u)), n - 2)
            wt = np.empty(4)
            _weights(u - i0, wt)
            w = waves[idx[p]]
            v = 0.0
            g = 0.0
            l = 0.0
            for m in range(4):
                i = i0 - 1 + m
                c = _at1(w, i, n)
                up = _at1(w, i + 1, n)
                dn = _at1(w, i - 1, n)
                v += wt[m] * c
                g += wt[m] * (up - dn)
                l += wt[m] * (up - 2 * c + dn)
            val[p] = v
            grad[p] = g / (2 * h)
            lap[p] = l / (h * h)
        return val, grad, lap, flags

    @njit(cache=True, parallel=True)
    def probe_2d_numba(waves, idx, pos, lo, h):
        n = waves.shape[1]
        P = pos.shape[0]
        hi = lo + (n - 1) * h
        val = np.empty(P)
        grad = np.empty((P, 2))
        lap = np.empty(P)
        flags = np.zeros(P, np.int8)
        for p in prange(P):
            x = pos[p, 0]
            y = pos[p, 1]
            if x < lo or x > hi or y < lo or y > hi:
                flags[p] = CLAMPED
                x = min(max(x, lo), hi)
                y = min(max(y, lo), hi)
            ux = (x - lo) / h
            uy = (y - lo) / h
            ix = min(int(np.floor(ux)), n - 2)
            iy = min(int(np.floor(uy)), n - 2)
            wx = np.empty(4)
            wy = np.empty(4)
            _weights(ux - ix, wx)
            _weights(uy - iy, wy)
            w = waves[idx[p]]
            v = 0.0
            gx = 0.0
            gy = 0.0
            lp = 0.0
            for a in range(4):
                i = ix - 1 + a
                for b in range(4):
                    j = iy - 1 + b
                    c = _at(w, i, j, n)
                    e = _at(w, i + 1, j, n)
                    W = _at(w, i - 1, j, n)
                    N = _at(w, i, j + 1, n)
                    S = _at(w, i, j - 1, n)
                    wt = wx[a] * wy[b]
                    v += wt * c
                    gx += wt * (e - W)
                    gy += wt * (N - S)
                    lp += wt * (e + W + N + S - 4 * c)
            val[p] = v
            grad[p, 0] = gx / (2 * h)
            grad[p, 1] = gy / (2 * h)
            lap[p] = lp / (h * h)
        return val, grad, lap, flags

    @njit(cache=True, parallel=True)
    def pair_field_numba(pos, nodes, screening, softening):
        M, d = pos.shape
        G = nodes.shape[0]
        out = np.empty((M, G))
        b2 = softening * softening
        for m in prange(M):
            for g in range(G):
                r2 = 0.0
                for a in range(d):
                    t = nodes[g, a] - pos[m, a]
                    r2 += t * t
                v = 1.0 / np.sqrt(r2 + b2)
                if screening != 0.0:
                    v *= np.exp(-screening * np.sqrt(r2))
                out[m, g] = v
        return out

    def set_threads(n: int) -> None:
        numba.set_num_threads(max(1, min(n, numba.config.NUMBA_NUM_THREADS)))

else:  # pragma: no cover
    probe_1d_numba = probe_1d_numpy
    probe_2d_numba = probe_2d_numpy
    pair_field_numba = pair_field_numpy

    def set_threads(n: int) -> None:
        pass


if USE_NUMBA:
    probe_1d, probe_2d = probe_1d_numba, probe_2d_numba
    pair_field = pair_field_numba
else:
    probe_1d, probe_2d = probe_1d_numpy, probe_2d_numpy
    pair_field = pair_field_numpy
