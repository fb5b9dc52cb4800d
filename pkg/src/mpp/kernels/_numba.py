"""Numba-compiled implementations of the hot kernels (per-leaf loops)."""
import numpy as np
from numba import njit

_OPTS = dict(cache=True, nogil=True)


@njit(**_OPTS)
def variation_dp(absinc, rho):
    n_leaves, m = absinc.shape[0], absinc.shape[1]
    out = np.empty(n_leaves)
    best = np.empty(m)
    for leaf in range(n_leaves):
        top = 0.0
        best[0] = 0.0
        for j in range(1, m):
            v = 0.0
            for i in range(j):
                c = best[i] + absinc[leaf, i, j] ** rho
                if c > v:
                    v = c
            best[j] = v
            if v > top:
                top = v
        out[leaf] = top ** (1.0 / rho)
    return out


@njit(**_OPTS)
def jump_dp(absinc, lam):
    n_leaves, m = absinc.shape[0], absinc.shape[1]
    out = np.empty(n_leaves, dtype=np.int64)
    count = np.empty(m, dtype=np.int64)
    for leaf in range(n_leaves):
        count[0] = 0
        for j in range(1, m):
            c = count[j - 1]
            for i in range(j):
                if absinc[leaf, i, j] >= lam and count[i] + 1 > c:
                    c = count[i] + 1
            count[j] = c
        out[leaf] = count[m - 1]
    return out


@njit(**_OPTS)
def brute_variation(absinc, rho):
    n_leaves, m = absinc.shape[0], absinc.shape[1]
    out = np.empty(n_leaves)
    idx = np.empty(m, dtype=np.int64)
    for leaf in range(n_leaves):
        top = 0.0
        for mask in range(1, 1 << m):
            size = 0
            for b in range(m):
                if (mask >> b) & 1:
                    idx[size] = b
                    size += 1
            s = 0.0
            for t in range(1, size):
                s += absinc[leaf, idx[t - 1], idx[t]] ** rho
            if s > top:
                top = s
        out[leaf] = top ** (1.0 / rho)
    return out


@njit(**_OPTS)
def brute_jump(absinc, lam):
    n_leaves, m = absinc.shape[0], absinc.shape[1]
    out = np.empty(n_leaves, dtype=np.int64)
    idx = np.empty(m, dtype=np.int64)
    for leaf in range(n_leaves):
        top = 0
        for mask in range(1, 1 << m):
            size = 0
            for b in range(m):
                if (mask >> b) & 1:
                    idx[size] = b
                    size += 1
            c = 0
            for t in range(1, size):
                if absinc[leaf, idx[t - 1], idx[t]] >= lam:
                    c += 1
            if c > top:
                top = c
        out[leaf] = top
    return out


@njit(**_OPTS)
def jump_stopping(f, g, pi, lam):
    n_leaves, m = f.shape
    horizon = m - 1
    thr = lam / 3.0
    out = np.full((n_leaves, m), horizon + 1, dtype=np.int64)
    for leaf in range(n_leaves):
        out[leaf, 0] = 0
        s = 0
        k = 0
        for n in range(1, m):
            trunc = pi[leaf, n] - pi[leaf, s] - f[leaf, s] * (g[leaf, n] - g[leaf, s])
            hit = abs(trunc) >= thr
            if not hit:
                for q in range(s + 1, n + 1):
                    if abs(f[leaf, q] - f[leaf, s]) * abs(g[leaf, n] - g[leaf, q]) >= thr:
                        hit = True
                        break
            if hit:
                k += 1
                out[leaf, k] = n
                s = n
    return out
