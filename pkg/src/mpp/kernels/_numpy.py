"""Pure-numpy implementations of the hot kernels.

Every function here is leaf-vectorized: the leading axis of each input
indexes leaves and the python-level loops run only over time indices.
Signatures and results match :mod:`mpp.kernels._numba` exactly.
"""
from itertools import combinations

import numpy as np

# Upper bound on the number of floats materialized per brute-force chunk.
_BRUTE_CHUNK = 4_000_000


def variation_dp(absinc, rho):
    """Leaf-wise ``rho``-variation of an increment tensor ``absinc[l, i, j]``."""
    absinc = np.asarray(absinc, dtype=np.float64)
    n_leaves, m = absinc.shape[0], absinc.shape[1]
    powered = absinc ** rho
    best = np.zeros((n_leaves, m))
    for j in range(1, m):
        cand = best[:, :j] + powered[:, :j, j]
        best[:, j] = np.maximum(cand.max(axis=1), 0.0)
    return best.max(axis=1) ** (1.0 / rho)


def jump_dp(absinc, lam):
    absinc = np.asarray(absinc, dtype=np.float64)
    n_leaves, m = absinc.shape[0], absinc.shape[1]
    count = np.zeros((n_leaves, m), dtype=np.int64)
    for j in range(1, m):
        hit = absinc[:, :j, j] >= lam
        via = np.where(hit, count[:, :j] + 1, 0).max(axis=1)
        count[:, j] = np.maximum(count[:, j - 1], via)
    return count[:, -1]


def _subset_scan(absinc, reduce_terms):
    absinc = np.asarray(absinc, dtype=np.float64)
    n_leaves, m = absinc.shape[0], absinc.shape[1]
    out = np.zeros(n_leaves)
    for size in range(2, m + 1):
        combos = np.array(list(combinations(range(m), size)), dtype=np.int64)
        left, right = combos[:, :-1], combos[:, 1:]
        step = max(1, _BRUTE_CHUNK // (combos.size or 1))
        for lo in range(0, n_leaves, step):
            block = absinc[lo:lo + step][:, left, right]
            out[lo:lo + step] = np.maximum(out[lo:lo + step], reduce_terms(block).max(axis=1))
    return out


def brute_variation(absinc, rho):
    total = _subset_scan(absinc, lambda b: (b ** rho).sum(axis=2))
    return total ** (1.0 / rho)


def brute_jump(absinc, lam):
    counts = _subset_scan(absinc, lambda b: (b >= lam).sum(axis=2).astype(np.float64))
    return counts.astype(np.int64)


def jump_stopping(f, g, pi, lam):
    """Stopping times of the paraproduct jump construction, one row per leaf.

    ``f``, ``g``, ``pi`` are leaf-major paths of shape ``(L, N + 1)``.  Row
    ``l`` of the result holds ``S_0 = 0, S_1, ...`` with ``N + 1`` standing in
    for an infinite stopping time.
    """
    f = np.asarray(f, dtype=np.float64)
    g = np.asarray(g, dtype=np.float64)
    pi = np.asarray(pi, dtype=np.float64)
    n_leaves, m = f.shape
    horizon = m - 1
    thr = lam / 3.0
    out = np.full((n_leaves, m), horizon + 1, dtype=np.int64)
    out[:, 0] = 0
    rows = np.arange(n_leaves)
    last = np.zeros(n_leaves, dtype=np.int64)
    k = np.zeros(n_leaves, dtype=np.int64)
    cols = np.arange(m)
    for n in range(1, m):
        fs, gs, ps = f[rows, last], g[rows, last], pi[rows, last]
        trunc = pi[:, n] - ps - fs * (g[:, n] - gs)
        hit = np.abs(trunc) >= thr
        inside = (cols[None, :] > last[:, None]) & (cols[None, :] <= n)
        prod = np.abs(f - fs[:, None]) * np.abs(g[:, n][:, None] - g)
        worst = np.where(inside, prod, 0.0).max(axis=1)
        hit |= worst >= thr
        k = k + hit
        out[rows[hit], k[hit]] = n
        last = np.where(hit, n, last)
    return out
