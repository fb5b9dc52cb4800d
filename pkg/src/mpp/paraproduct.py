"""Martingale paraproducts, truncated and localized paraproducts, Riemann sums."""
from __future__ import annotations

import numpy as np

from .martingale import Martingale, _check_same_space, localize
from .space import SpaceError, StoppingSequence


class ParaproductProcess(Martingale):
    """``Pi_n(f, g) = sum_{j <= n} f_{j-1} (g_j - g_{j-1})`` with ``Pi_0 = 0``.

    Keeps references to its factors so truncated paraproducts can be read off
    in O(1) per index pair from the prefix paths.
    """

    def __init__(self, f: Martingale, g: Martingale):
        space = _check_same_space(f, g)
        terms = f.paths[:-1] * np.diff(g.paths, axis=0)
        paths = np.vstack([np.zeros(space.n_leaves), np.cumsum(terms, axis=0)])
        proto = Martingale.from_paths(space, paths, check=False)
        super().__init__(space, proto.values, check=False)
        self.f = f
        self.g = g

    def truncated(self, n, n2):
        """``Pi_{n,n2} = Pi_{n2} - Pi_n - f_n (g_{n2} - g_n)`` leaf-wise.

        ``n`` and ``n2`` may also be equal-length index arrays, giving one row per pair.
        """
        P, F, G = self.paths, self.f.paths, self.g.paths
        return P[n2] - P[n] - F[n] * (G[n2] - G[n])


def paraproduct(f: Martingale, g: Martingale) -> ParaproductProcess:
    return ParaproductProcess(f, g)


def _double_sum(df, dg, lo, hi):
    """Leaf-wise ``sum_{lo < i < j <= hi} df_i dg_j``; ``lo``/``hi`` are per-leaf times.

    Row ``t`` of ``df``/``dg`` holds the increment at time ``t + 1``.
    """
    times = np.arange(1, df.shape[0] + 1)[:, None]
    mask = (times > lo[None, :]) & (times <= hi[None, :])
    a, b = np.where(mask, df, 0.0), np.where(mask, dg, 0.0)
    # full[i, j, l] = a_i b_j; keep i < j
    full = a[:, None, :] * b[None, :, :]
    return np.triu(np.moveaxis(full, 2, 0), k=1).sum(axis=(1, 2))


def truncated_paraproduct(f: Martingale, g: Martingale, n: int, n2: int):
    """``sum_{n < i < j <= n2} df_i dg_j`` evaluated as the literal double sum."""
    space = _check_same_space(f, g)
    if not 0 <= n < n2 <= space.depth:
        raise SpaceError(f"truncated paraproduct needs 0 <= n < n' <= {space.depth}, got ({n}, {n2})")
    L = space.n_leaves
    return _double_sum(f.differences(), g.differences(), np.full(L, n), np.full(L, n2))


def truncated_between(f: Martingale, g: Martingale, lo, hi):
    """``sum_{lo < i < j <= hi} df_i dg_j`` with leaf-wise times ``lo <= hi``."""
    space = _check_same_space(f, g)
    L = space.n_leaves
    lo = np.broadcast_to(np.asarray(lo, dtype=np.int64), (L,))
    hi = np.broadcast_to(np.asarray(hi, dtype=np.int64), (L,))
    if np.any(lo < 0) or np.any(hi > space.depth) or np.any(lo > hi):
        raise SpaceError(f"need 0 <= lo <= hi <= {space.depth} on every leaf")
    return _double_sum(f.differences(), g.differences(), lo, hi)


def splitting_check(f: Martingale, g: Martingale, S, n1: int, n2: int, atol=1e-12):
    """``Pi_{n1,n2} = Pi_{S,n2} - Pi_{S,n1} - (f_{n1} - f_S)(g_{n2} - g_{n1})`` for times ``S <= n1 < n2``."""
    space = _check_same_space(f, g)
    S = np.broadcast_to(np.asarray(S, dtype=np.int64), (space.n_leaves,))
    if np.any(S > n1) or not n1 < n2:
        raise SpaceError("need S <= n1 < n2")
    leaves = np.arange(space.n_leaves)
    fS = f.paths[S, leaves]
    lhs = truncated_between(f, g, n1, n2)
    rhs = (
        truncated_between(f, g, S, n2)
        - truncated_between(f, g, S, n1)
        - (f.paths[n1] - fS) * (g.paths[n2] - g.paths[n1])
    )
    return bool(np.all(np.abs(lhs - rhs) <= atol * (1.0 + np.abs(lhs))))


def localized_paraproduct(f: Martingale, g: Martingale, S: StoppingSequence, k: int):
    """``sum_{T_{k-1} < i < j <= T_k} df_i dg_j`` leaf-wise."""
    _check_same_space(f, g)
    if not 1 <= k <= S.K:
        raise SpaceError(f"localization index {k} out of range 1..{S.K}")
    return _double_sum(f.differences(), g.differences(), S.times[k - 1], S.times[k])


def localized_paraproduct_via_pieces(f, g, S, k):
    """``Pi_N(f^(k), g^(k))`` computed from the localized martingales."""
    return paraproduct(localize(f, S, k), localize(g, S, k)).final


def riemann_sum(f: Martingale, g: Martingale, partition: StoppingSequence, t):
    """``S_t(f, g; Sigma) = sum_j f_{t ^ tau_{j-1}} (g_{t ^ tau_j} - g_{t ^ tau_{j-1}})``.

    ``t`` is an integer time or a leaf-wise array of times.
    """
    space = _check_same_space(f, g)
    if partition.space != space:
        raise SpaceError("partition lives on a different space")
    t = np.broadcast_to(np.asarray(t, dtype=np.int64), (space.n_leaves,))
    if np.any(t < 0) or np.any(t > space.depth):
        raise SpaceError(f"t must lie in 0..{space.depth}")
    leaves = np.arange(space.n_leaves)
    capped = np.minimum(partition.times, t[None, :])
    F = f.paths[capped, leaves[None, :]]
    G = g.paths[capped, leaves[None, :]]
    return (F[:-1] * np.diff(G, axis=0)).sum(axis=0)


def summation_by_parts_check(f: Martingale, g: Martingale, n: int, n2: int, atol=1e-12):
    """``Pi_{n,n'}(f,g) + Pi_{n,n'}(g,f) + sum df_j dg_j = (f_{n'} - f_n)(g_{n'} - g_n)`` leaf-wise."""
    lhs = (
        truncated_paraproduct(f, g, n, n2)
        + truncated_paraproduct(g, f, n, n2)
        + (f.differences()[n:n2] * g.differences()[n:n2]).sum(axis=0)
    )
    rhs = (f.paths[n2] - f.paths[n]) * (g.paths[n2] - g.paths[n])
    return bool(np.all(np.abs(lhs - rhs) <= atol * (1.0 + np.abs(rhs))))
