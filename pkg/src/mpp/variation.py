"""``rho``-variation and ``lambda``-jump functionals over increment kernels.

An increment kernel assigns to every pair of times ``i < j`` a leaf-wise real
``delta(i, j)``.  The functionals take suprema over all increasing index
tuples; :func:`rho_variation` and :func:`jump_count` do so by dynamic
programming and the ``brute_force_*`` functions by enumerating every subset of
times, which serves as an independent oracle.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .martingale import AdaptedProcess, _check_same_space
from .paraproduct import paraproduct
from .space import SpaceError, StoppingSequence

BRUTE_FORCE_MAX_DEPTH = 14


class IncrementKernel:
    """Base class: subclasses implement :meth:`evaluate` on leaf-wise index pairs."""

    horizon: int
    n_leaves: int

    def evaluate(self, i, j):
        raise NotImplementedError

    def matrix(self):
        """Signed increments as an array ``[leaf, i, j]``; entries with ``i >= j`` are zero."""
        m = self.horizon + 1
        ii, jj = np.triu_indices(m, k=1)
        out = np.zeros((self.n_leaves, m, m))
        out[:, ii, jj] = self._pairs(ii, jj).T
        return out

    def _pairs(self, ii, jj):
        # rows: one per (i, j) pair
        return np.array([self.evaluate(i, j) for i, j in zip(ii, jj)])

    def abs_matrix(self):
        return np.ascontiguousarray(np.abs(self.matrix()))


def _paths_of(process):
    if isinstance(process, AdaptedProcess):
        return process.paths
    paths = np.asarray(process, dtype=np.float64)
    return paths[:, None] if paths.ndim == 1 else paths


class ScalarKernel(IncrementKernel):
    """``delta(i, j) = f_j - f_i``.  Accepts a process or raw ``(N + 1, L)`` paths."""

    def __init__(self, f, n_max=None):
        paths = _paths_of(f)
        self.horizon = paths.shape[0] - 1 if n_max is None else int(n_max)
        self.paths = paths[: self.horizon + 1]
        self.n_leaves = paths.shape[1]

    def evaluate(self, i, j):
        return self.paths[j] - self.paths[i]

    def _pairs(self, ii, jj):
        return self.paths[jj] - self.paths[ii]


class ParaproductKernel(IncrementKernel):
    """``delta(i, j) = Pi_{i,j}(f, g)`` from the prefix paths of ``f``, ``g`` and ``Pi``."""

    def __init__(self, f, g, n_max=None):
        _check_same_space(f, g)
        self.pi = paraproduct(f, g)
        self.horizon = f.depth if n_max is None else int(n_max)
        if not 0 <= self.horizon <= f.depth:
            raise SpaceError("n_max out of range")
        self.n_leaves = f.space.n_leaves
        self._f, self._g, self._p = f.paths, g.paths, self.pi.paths

    def evaluate(self, i, j):
        F, G, P = self._f, self._g, self._p
        return P[j] - P[i] - F[i] * (G[j] - G[i])

    _pairs = evaluate


def rho_variation(kernel: IncrementKernel, rho: float):
    """Leaf-wise ``sup (sum_k |delta(n_{k-1}, n_k)|^rho)^{1/rho}`` over increasing tuples."""
    if not rho > 0:
        raise SpaceError("rho must be positive")
    return kernels.variation_dp(kernel.abs_matrix(), float(rho))


def jump_count(kernel: IncrementKernel, lam: float):
    """Leaf-wise ``lambda``-jump counting function (integer-valued)."""
    if not lam > 0:
        raise SpaceError("lambda must be positive")
    return kernels.jump_dp(kernel.abs_matrix(), float(lam))


def _guard(kernel):
    if kernel.horizon > BRUTE_FORCE_MAX_DEPTH:
        raise SpaceError(f"brute force enumeration limited to horizon <= {BRUTE_FORCE_MAX_DEPTH}")


def brute_force_variation(kernel: IncrementKernel, rho: float):
    if not rho > 0:
        raise SpaceError("rho must be positive")
    _guard(kernel)
    return kernels.brute_variation(kernel.abs_matrix(), float(rho))


def brute_force_jump_count(kernel: IncrementKernel, lam: float):
    if not lam > 0:
        raise SpaceError("lambda must be positive")
    _guard(kernel)
    return kernels.brute_jump(kernel.abs_matrix(), float(lam))


@dataclass(frozen=True)
class JumpStoppingTimes:
    """Stopping times of the jump construction.

    ``S[k, l]`` is ``S_k`` at leaf ``l`` with ``N + 1`` encoding infinity;
    ``T = min(S, n_max)``.
    """

    S: np.ndarray
    n_max: int
    horizon: int

    @property
    def T(self):
        return np.minimum(self.S, self.n_max)

    @property
    def count(self):
        """``sup{k : S_k <= n_max}`` per leaf."""
        return (self.S[1:] <= self.n_max).sum(axis=0)

    def sequence(self, space):
        return StoppingSequence(space, self.T)


def jump_stopping_times(f, g, lam: float, n_max: int | None = None) -> JumpStoppingTimes:
    """Recursive stopping times that fire once the truncated paraproduct since the
    last stop, or the cross term ``max_{n'} |f_{n'} - f_S| |g_n - g_{n'}|``, reaches ``lam / 3``."""
    if not lam > 0:
        raise SpaceError("lambda must be positive")
    space = _check_same_space(f, g)
    n_max = space.depth if n_max is None else int(n_max)
    if not 0 <= n_max <= space.depth:
        raise SpaceError(f"n_max must lie in 0..{space.depth}")
    pi = paraproduct(f, g)
    S = kernels.jump_stopping(
        np.ascontiguousarray(f.paths.T), np.ascontiguousarray(g.paths.T), np.ascontiguousarray(pi.paths.T), float(lam)
    ).T
    finite_rows = np.flatnonzero((S <= space.depth).any(axis=1))
    keep = max(2, int(finite_rows.max()) + 2 if finite_rows.size else 2)
    S = np.ascontiguousarray(S[: min(keep, S.shape[0])])
    if S.shape[0] < 2:
        S = np.vstack([S, np.full(space.n_leaves, space.depth + 1)])
    S.setflags(write=False)
    return JumpStoppingTimes(S=S, n_max=n_max, horizon=space.depth)


@dataclass(frozen=True)
class JumpComparison:
    counts: np.ndarray  # N_lambda(f, g) per leaf
    stopped: np.ndarray  # tilde N_lambda(f, g) per leaf
    covered: np.ndarray  # every lambda-jump interval contains some S_k

    @property
    def ok(self):
        return (self.counts <= self.stopped) & self.covered


def jump_comparison_check(f, g, lam: float, n_max: int | None = None) -> JumpComparison:
    """Leaf-wise ``N_lambda(f, g) <= tilde N_lambda(f, g)`` and the covering property behind it."""
    stops = jump_stopping_times(f, g, lam, n_max)
    kernel = ParaproductKernel(f, g, n_max=stops.n_max)
    counts = jump_count(kernel, lam)
    big = kernel.abs_matrix() >= lam  # [leaf, n', n'']
    m = stops.n_max + 1
    times = np.arange(m)
    # hits[l, t] = #{k >= 1 : S_k <= t}
    hits = (stops.S[1:, :, None] <= times[None, None, :]).sum(axis=0)
    contains = (hits[:, None, :] - hits[:, :, None]) > 0
    covered = ~np.any(big & ~contains, axis=(1, 2))
    return JumpComparison(counts=counts, stopped=stops.count, covered=covered)
