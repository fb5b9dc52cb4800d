"""Adapted processes and martingales on a :class:`~mpp.space.FilteredSpace`."""
from __future__ import annotations

import numpy as np

from .space import FilteredSpace, SpaceError, StoppingSequence

MARTINGALE_RTOL = 1e-12


class NotAMartingale(SpaceError):
    pass


class AdaptedProcess:
    """A process ``(h_n)_{n=0..N}`` with one value per level-``n`` atom.

    ``paths`` is the leaf-wise view of shape ``(N + 1, L)``: ``paths[n, l]`` is
    the value of ``h_n`` on the level-``n`` atom containing leaf ``l``.
    """

    def __init__(self, space: FilteredSpace, values):
        if len(values) != space.depth + 1:
            raise SpaceError(f"expected {space.depth + 1} levels, got {len(values)}")
        vals = []
        for n, v in enumerate(values):
            v = np.asarray(v, dtype=np.float64).reshape(-1)
            if v.size != space.atom_counts[n]:
                raise SpaceError(f"level {n}: expected {space.atom_counts[n]} atom values, got {v.size}")
            if not np.all(np.isfinite(v)):
                raise SpaceError(f"level {n}: values must be finite")
            v.setflags(write=False)
            vals.append(v)
        self.space = space
        self.values = tuple(vals)
        self.paths = np.array([v[idx] for v, idx in zip(vals, space.atom_index)])
        self.paths.setflags(write=False)

    @classmethod
    def from_paths(cls, space, paths, atol=1e-12, **kwargs):
        """Build from leaf-wise paths, checking that level ``n`` is ``F_n``-measurable."""
        paths = np.asarray(paths, dtype=np.float64)
        if paths.shape != (space.depth + 1, space.n_leaves):
            raise SpaceError(f"paths must have shape {(space.depth + 1, space.n_leaves)}, got {paths.shape}")
        values = []
        for n, row in enumerate(paths):
            idx, count = space.atom_index[n], space.atom_counts[n]
            lo = np.full(count, np.inf)
            hi = np.full(count, -np.inf)
            np.minimum.at(lo, idx, row)
            np.maximum.at(hi, idx, row)
            spread = hi - lo
            scale = 1.0 + np.maximum(np.abs(lo), np.abs(hi))
            bad = np.flatnonzero(spread > atol * scale)
            if bad.size:
                raise SpaceError(f"level {n}: values not constant on atom {bad[0]} (not adapted)")
            # first leaf of each atom; exact, unlike an average
            values.append(row[np.unique(idx, return_index=True)[1]] if count < space.n_leaves else row)
        return cls(space, values, **kwargs)

    @property
    def depth(self):
        return self.space.depth

    def __getitem__(self, n):
        """Leaf-wise random variable ``h_n``."""
        return self.paths[n]

    @property
    def final(self):
        return self.paths[-1]

    def differences(self):
        """Leaf-wise increments ``dh_n = h_n - h_{n-1}``, shape ``(N, L)`` (row ``n - 1`` holds ``dh_n``)."""
        return np.diff(self.paths, axis=0)

    def scaled(self, c):
        return type(self).from_paths(self.space, c * self.paths)

    def __repr__(self):
        return f"{type(self).__name__}(depth={self.depth}, n_leaves={self.space.n_leaves})"


def _check_same_space(*processes):
    first = processes[0].space
    for proc in processes[1:]:
        if proc.space is not first and proc.space != first:
            raise SpaceError("processes live on different spaces")
    return first


def is_martingale(f: AdaptedProcess, rtol=MARTINGALE_RTOL):
    """Tower-property check at every atom.

    Returns ``(ok, where)`` with ``where = (n, atom)`` naming the first
    level-``n - 1`` atom whose children average differs from the parent value.
    """
    space = f.space
    for n in range(1, space.depth + 1):
        parent = f.values[n - 1]
        child_mean = space.atom_means(f.paths[n], n - 1)
        child_abs = space.atom_means(np.abs(f.paths[n]), n - 1)
        err = np.abs(child_mean - parent)
        bad = np.flatnonzero(err > rtol * (1.0 + np.abs(parent) + child_abs))
        if bad.size:
            return False, (n - 1, int(bad[0]))
    return True, None


class Martingale(AdaptedProcess):
    """An adapted process satisfying the tower property, validated on construction."""

    def __init__(self, space, values, check=True):
        super().__init__(space, values)
        if check:
            ok, where = is_martingale(self)
            if not ok:
                raise NotAMartingale(f"tower property fails at level {where[0]}, atom {where[1]}")

    @classmethod
    def from_terminal(cls, space, h):
        """The martingale ``h_n = E[h | F_n]`` closed by a terminal random variable."""
        h = space.random_variable(h)
        return cls(space, [space.atom_means(h, n) for n in range(space.depth + 1)])

    @classmethod
    def constant(cls, space, c):
        return cls(space, [np.full(k, float(c)) for k in space.atom_counts])


def differences(f: AdaptedProcess):
    """Per-level increments ``df_n`` (``n >= 1``) as arrays over level-``n`` atoms."""
    space = f.space
    return [f.values[n] - f.values[n - 1][space.parent(n)] for n in range(1, space.depth + 1)]


def maximal_function(f: AdaptedProcess):
    return np.abs(f.paths).max(axis=0)


def square_function(f: AdaptedProcess):
    return np.sqrt((f.differences() ** 2).sum(axis=0))


def martingale_lp_norm(f: AdaptedProcess, p):
    """``sup_n ||f_n||_p``."""
    return max(f.space.lp_norm(row, p) for row in f.paths)


def _restrict(paths, leaf_map, n_new, atol=1e-12):
    rep = np.zeros(n_new, dtype=np.int64)
    rep[leaf_map[::-1]] = np.arange(leaf_map.size)[::-1]
    out = paths[:, rep]
    spread = np.abs(paths - out[:, leaf_map])
    if np.any(spread > atol * (1.0 + np.abs(paths))):
        raise SpaceError("process is not measurable with respect to the sampled filtration")
    return out


def optional_sample(f: Martingale, S: StoppingSequence):
    """The sampled martingale ``(f_{T_k})_k`` on the filtration ``(F_{T_k})_k``.

    Returns ``(g, leaf_map)``; ``g`` lives on the coarsened space whose leaves
    are the atoms of ``F_{T_K}`` and ``leaf_map`` sends original leaves there.
    """
    if S.space != f.space:
        raise SpaceError("stopping sequence lives on a different space")
    if S.K < 1:
        raise SpaceError("optional sampling needs at least one stopping time after T_0")
    coarse, leaf_map = f.space.sampled(S.times)
    leaves = np.arange(f.space.n_leaves)
    sampled = f.paths[S.times, leaves[None, :]]
    return Martingale.from_paths(coarse, _restrict(sampled, leaf_map, coarse.n_leaves)), leaf_map


def localized_times(S: StoppingSequence, k: int):
    """``(n v T_{k-1}) ^ T_k`` for ``n = 0..N``, shape ``(N + 1, L)``."""
    if not 1 <= k <= S.K:
        raise SpaceError(f"localization index {k} out of range 1..{S.K}")
    levels = np.arange(S.space.depth + 1)[:, None]
    return np.minimum(np.maximum(levels, S.times[k - 1][None, :]), S.times[k][None, :])


def localize(f: Martingale, S: StoppingSequence, k: int):
    """Localized piece ``f^(k)_n = f_{(n v T_{k-1}) ^ T_k} - f_{T_{k-1}}`` on the original grid.

    The result is a martingale for ``F`` as well as for the localized
    filtration (see :func:`localized_filtration`).
    """
    if S.space != f.space:
        raise SpaceError("stopping sequence lives on a different space")
    times = localized_times(S, k)
    leaves = np.arange(f.space.n_leaves)
    start = f.paths[S.times[k - 1], leaves]
    return Martingale.from_paths(f.space, f.paths[times, leaves[None, :]] - start[None, :])


def localized_filtration(S: StoppingSequence, k: int):
    """The filtration ``F^(k)_n = F_{(n v T_{k-1}) ^ T_k}`` as ``(space, leaf_map)``."""
    return S.space.sampled(localized_times(S, k))


def express_on(process: AdaptedProcess, coarse, leaf_map, cls=AdaptedProcess):
    """Re-express leaf-wise paths over a coarsened space from :meth:`FilteredSpace.sampled`."""
    paths = _restrict(process.paths, leaf_map, coarse.n_leaves)
    return cls.from_paths(coarse, paths)
