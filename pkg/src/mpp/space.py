"""Exact finite filtered probability spaces.

A :class:`FilteredSpace` is a finite set of leaves with positive
probabilities and a refining chain of partitions ``F_0 ⊆ F_1 ⊆ ... ⊆ F_N``,
the last one being the partition into singletons.  Random variables are
plain float arrays with one entry per leaf and stopping times are integer
arrays of the same shape; every expectation is a finite weighted sum.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

PROB_ATOL = 1e-12


class SpaceError(ValueError):
    """Raised when a space, stopping time or exponent violates its invariants."""


def _canonical_labels(labels):
    # relabel so that atoms are numbered by their smallest leaf
    _, first, inverse = np.unique(labels, return_index=True, return_inverse=True)
    order = np.argsort(first, kind="stable")
    rank = np.empty_like(order)
    rank[order] = np.arange(order.size)
    return rank[inverse.reshape(-1)].astype(np.int64)


class FilteredSpace:
    """Finite probability space with a filtration of nested partitions.

    Parameters
    ----------
    leaf_probs : sequence of float
        Strictly positive leaf probabilities summing to one.
    level_atoms : sequence of sequences of leaf-index lists
        ``level_atoms[n]`` is the level-``n`` partition.
    """

    def __init__(self, leaf_probs, level_atoms):
        probs = np.asarray(leaf_probs, dtype=np.float64).reshape(-1)
        if probs.size == 0:
            raise SpaceError("leaf_probs: a space needs at least one leaf")
        if not np.all(np.isfinite(probs)) or np.any(probs <= 0.0) or np.any(probs > 1.0):
            raise SpaceError("leaf_probs: every probability must lie in (0, 1]")
        if abs(probs.sum() - 1.0) > PROB_ATOL:
            raise SpaceError(f"leaf_probs: probabilities sum to {probs.sum()!r}, not 1")
        if len(level_atoms) < 2:
            raise SpaceError("level_atoms: depth must be at least 1")
        n_leaves = probs.size
        index = np.empty((len(level_atoms), n_leaves), dtype=np.int64)
        for n, atoms in enumerate(level_atoms):
            seen = np.full(n_leaves, -1, dtype=np.int64)
            for a, atom in enumerate(atoms):
                atom = list(atom)
                if not atom:
                    raise SpaceError(f"level_atoms[{n}][{a}]: empty atom")
                for leaf in atom:
                    if not (0 <= int(leaf) < n_leaves):
                        raise SpaceError(f"level_atoms[{n}][{a}]: leaf {leaf} out of range")
                    if seen[leaf] >= 0:
                        raise SpaceError(f"level_atoms[{n}][{a}]: leaf {leaf} already in atom {seen[leaf]}")
                    seen[leaf] = a
            if np.any(seen < 0):
                missing = int(np.flatnonzero(seen < 0)[0])
                raise SpaceError(f"level_atoms[{n}]: leaf {missing} is not covered")
            index[n] = seen
        self._init_from_index(probs, index)

    def _init_from_index(self, probs, index):
        index = np.array([_canonical_labels(row) for row in index], dtype=np.int64)
        depth = index.shape[0] - 1
        for n in range(1, depth + 1):
            count = index[n].max() + 1
            lo = np.full(count, np.iinfo(np.int64).max)
            hi = np.full(count, -1)
            np.minimum.at(lo, index[n], index[n - 1])
            np.maximum.at(hi, index[n], index[n - 1])
            split = np.flatnonzero(lo != hi)
            if split.size:
                raise SpaceError(
                    f"level_atoms[{n}][{split[0]}]: atom is not contained in a single level-{n - 1} atom"
                )
        if index[depth].max() + 1 != probs.size:
            raise SpaceError(f"level_atoms[{depth}]: the final level must consist of singletons")
        self.depth = depth
        self.leaf_probs = probs
        self.atom_index = index
        self.atom_counts = tuple(int(row.max()) + 1 for row in index)
        self.atom_probs = tuple(
            np.bincount(row, weights=probs, minlength=c) for row, c in zip(index, self.atom_counts)
        )
        self._parents = tuple(
            np.zeros(self.atom_counts[0], dtype=np.int64) if n == 0 else _parent_map(index[n - 1], index[n])
            for n in range(depth + 1)
        )
        for arr in (self.leaf_probs, self.atom_index, *self.atom_probs, *self._parents):
            arr.setflags(write=False)

    @classmethod
    def from_index(cls, leaf_probs, atom_index):
        """Build a space from an ``(N + 1, L)`` array of per-level atom labels."""
        probs = np.asarray(leaf_probs, dtype=np.float64).reshape(-1)
        index = np.asarray(atom_index, dtype=np.int64)
        if index.ndim != 2 or index.shape[1] != probs.size:
            raise SpaceError("atom_index must have shape (depth + 1, n_leaves)")
        atoms = [[np.flatnonzero(row == a).tolist() for a in np.unique(row)] for row in index]
        return cls(probs, atoms)

    @classmethod
    def dyadic(cls, depth, bias=0.5):
        """Binary tree of the given depth; each left child has conditional probability ``bias``."""
        if depth < 1:
            raise SpaceError("depth must be at least 1")
        if not 0.0 < bias < 1.0:
            raise SpaceError("bias must lie in (0, 1)")
        leaves = np.arange(2 ** depth)
        index = np.array([leaves >> (depth - n) for n in range(depth + 1)])
        rights = np.array([bin(int(x)).count("1") for x in leaves])
        probs = bias ** (depth - rights) * (1.0 - bias) ** rights
        probs = probs / probs.sum()
        space = cls.__new__(cls)
        space._init_from_index(probs, index)
        space.bias = float(bias)
        return space

    # ------------------------------------------------------------------ layout

    @property
    def n_leaves(self):
        return self.leaf_probs.size

    @property
    def level_atoms(self):
        """Level partitions as sorted leaf-index lists."""
        return [
            [np.flatnonzero(row == a).tolist() for a in range(count)]
            for row, count in zip(self.atom_index, self.atom_counts)
        ]

    def parent(self, n):
        """Map from level-``n`` atoms to the containing level-``n - 1`` atoms."""
        self._check_level(n)
        if n == 0:
            raise SpaceError("level 0 has no parent level")
        return self._parents[n]

    def _check_level(self, n):
        if not 0 <= n <= self.depth:
            raise SpaceError(f"level {n} out of range 0..{self.depth}")

    def __eq__(self, other):
        return (
            isinstance(other, FilteredSpace)
            and self.depth == other.depth
            and np.array_equal(self.leaf_probs, other.leaf_probs)
            and np.array_equal(self.atom_index, other.atom_index)
        )

    def __hash__(self):
        return hash((self.depth, self.leaf_probs.tobytes(), self.atom_index.tobytes()))

    def __repr__(self):
        return f"FilteredSpace(depth={self.depth}, n_leaves={self.n_leaves})"

    # ------------------------------------------------------------ expectations

    def random_variable(self, values):
        h = np.asarray(values, dtype=np.float64).reshape(-1)
        if h.size != self.n_leaves:
            raise SpaceError(f"expected {self.n_leaves} leaf values, got {h.size}")
        if not np.all(np.isfinite(h)):
            raise SpaceError("random variable values must be finite")
        return h

    def expectation(self, h):
        return float(np.dot(self.leaf_probs, h))

    def atom_means(self, h, n):
        """``E[h | A]`` for every level-``n`` atom ``A``, as an array over atoms."""
        self._check_level(n)
        sums = np.bincount(self.atom_index[n], weights=self.leaf_probs * h, minlength=self.atom_counts[n])
        return sums / self.atom_probs[n]

    def conditional_expectation(self, h, n):
        """``E[h | F_n]`` as a leaf-wise array."""
        h = self.random_variable(h)
        self._check_level(n)
        if self.atom_counts[n] == self.n_leaves:
            return h.copy()
        return self.atom_means(h, n)[self.atom_index[n]]

    def lp_norm(self, h, p):
        """``(E|h|^p)^{1/p}``; ``p = inf`` gives the ess sup, ``p < 1`` a quasinorm."""
        return weighted_lp_norm(self, h, None, p)

    def weak_lp_norm(self, h, p):
        """Weak ``L^p`` quasinorm, exact via the jump points of the distribution of ``|h|``."""
        if not 0.0 < p < np.inf:
            raise SpaceError("weak L^p norm needs 0 < p < inf")
        a = np.abs(self.random_variable(h))
        order = np.argsort(-a, kind="stable")
        values, probs = a[order], self.leaf_probs[order]
        tail = np.cumsum(probs)  # tail[i] = P(|h| >= values[i]) once ties are merged
        last_of_tie = np.r_[values[1:] != values[:-1], True]
        v, t = values[last_of_tie], tail[last_of_tie]
        keep = v > 0
        if not np.any(keep):
            return 0.0
        return float(np.max(v[keep] ** p * t[keep]) ** (1.0 / p))

    def mixed_lp_lq_norm(self, family, p, q):
        """``L^p(l^q)`` quasinorm of a family of random variables."""
        family = [self.random_variable(h) for h in family]
        if not family:
            raise SpaceError("mixed norm needs a nonempty family")
        stack = np.abs(np.vstack(family))
        if q == np.inf:
            agg = stack.max(axis=0)
        elif q > 0:
            agg = (stack ** q).sum(axis=0) ** (1.0 / q)
        else:
            raise SpaceError("q must be positive")
        return self.lp_norm(agg, p)

    # ---------------------------------------------------------- stopping times

    def is_stopping_time(self, T):
        """Check measurability of ``{T = n}`` at every level.

        Returns ``(ok, violations)``; each violation is ``(level, atom)`` for a
        level-``n`` atom that is split by the event ``{T = n}``.
        """
        T = np.asarray(T).reshape(-1)
        if T.size != self.n_leaves:
            raise SpaceError(f"expected {self.n_leaves} leaf values, got {T.size}")
        if np.any(T < 0) or np.any(T > self.depth):
            raise SpaceError(f"stopping time values must lie in 0..{self.depth}")
        violations = []
        for n in range(self.depth + 1):
            hit = (T == n).astype(np.int64)
            idx = self.atom_index[n]
            count = np.bincount(idx, weights=hit, minlength=self.atom_counts[n])
            size = np.bincount(idx, minlength=self.atom_counts[n])
            for a in np.flatnonzero((count > 0) & (count < size)):
                violations.append((n, int(a)))
        return not violations, violations

    def stopping_time(self, T):
        T = np.asarray(T, dtype=np.int64).reshape(-1)
        ok, bad = self.is_stopping_time(T)
        if not ok:
            n, a = bad[0]
            raise SpaceError(f"not a stopping time: {{T = {n}}} splits level-{n} atom {a}")
        return T

    # ------------------------------------------------------------- coarsening

    def sampled(self, times):
        """Filtration ``(F_{tau_k})_k`` along nondecreasing stopping times.

        ``times`` has shape ``(K + 1, L)``.  The atoms of ``F_{tau_K}`` become the
        leaves of the returned space.  Returns ``(space, leaf_map)`` where
        ``leaf_map[l]`` is the new leaf containing original leaf ``l``.
        """
        times = np.asarray(times, dtype=np.int64)
        if times.ndim != 2 or times.shape[1] != self.n_leaves or times.shape[0] < 2:
            raise SpaceError("times must have shape (K + 1, n_leaves) with K >= 1")
        if np.any(np.diff(times, axis=0) < 0):
            raise SpaceError("sampling times must be nondecreasing")
        for k, T in enumerate(times):
            ok, bad = self.is_stopping_time(T)
            if not ok:
                raise SpaceError(f"times[{k}] is not a stopping time (level/atom {bad[0]})")
        leaves = np.arange(self.n_leaves)
        # the F_tau atom of leaf l is its level-tau(l) atom; encode (tau, atom) as one label
        width = self.n_leaves + 1
        labels = np.array([T * width + self.atom_index[T, leaves] for T in times])
        leaf_map = _canonical_labels(labels[-1])
        n_new = int(leaf_map.max()) + 1
        rep = np.zeros(n_new, dtype=np.int64)
        rep[leaf_map[::-1]] = leaves[::-1]
        probs = np.bincount(leaf_map, weights=self.leaf_probs, minlength=n_new)
        space = FilteredSpace.__new__(FilteredSpace)
        space._init_from_index(probs, labels[:, rep])
        return space, leaf_map


def _parent_map(upper, lower):
    parents = np.zeros(int(lower.max()) + 1, dtype=np.int64)
    parents[lower] = upper
    return parents


def weighted_lp_norm(space, h, w, p):
    """``(E|h|^p w)^{1/p}``; ``w=None`` means the unweighted norm.

    For ``p = inf`` the weighted norm is the maximum of ``|h|`` over leaves
    with positive weight, the limit of the finite-``p`` expression.
    """
    if not p > 0:
        raise SpaceError("p must be positive")
    a = np.abs(space.random_variable(h))
    if w is None:
        wt = space.leaf_probs
    else:
        w = space.random_variable(w)
        if np.any(w < 0):
            raise SpaceError("weights must be nonnegative")
        wt = space.leaf_probs * w
    if p == np.inf:
        support = wt > 0
        return float(a[support].max()) if np.any(support) else 0.0
    return float(np.dot(wt, a ** p) ** (1.0 / p))


@dataclass(frozen=True)
class ExponentTriple:
    """Exponents with ``p, q`` in ``(1, inf)`` and ``1/r = 1/p + 1/q``."""

    p: float
    q: float
    r: float

    def __post_init__(self):
        if not (1.0 < self.p < np.inf and 1.0 < self.q < np.inf):
            raise SpaceError("p and q must lie in (1, inf)")
        if not self.r > 0.5:
            raise SpaceError("r must exceed 1/2")
        if abs(1.0 / self.p + 1.0 / self.q - 1.0 / self.r) > 1e-12:
            raise SpaceError("exponents violate 1/p + 1/q = 1/r")

    @classmethod
    def from_pq(cls, p, q):
        return cls(p, q, 1.0 / (1.0 / p + 1.0 / q))

    @property
    def p_conj(self):
        return conjugate(self.p)


def conjugate(p):
    """Conjugate exponent ``p'`` with ``1/p + 1/p' = 1`` for ``p`` in ``[1, inf]``."""
    if p == np.inf:
        return 1.0
    if p == 1:
        return np.inf
    if p < 1:
        raise SpaceError("conjugate exponent needs p >= 1")
    return p / (p - 1.0)


@dataclass(frozen=True)
class StoppingSequence:
    """Nondecreasing bounded stopping times ``T_0 = 0 <= T_1 <= ... <= T_K``.

    ``times`` has shape ``(K + 1, L)``.
    """

    space: FilteredSpace
    times: np.ndarray

    def __post_init__(self):
        times = np.atleast_2d(np.asarray(self.times, dtype=np.int64))
        if times.shape[1] != self.space.n_leaves:
            raise SpaceError("stopping sequence has the wrong number of leaves")
        if np.any(times[0] != 0):
            raise SpaceError("T_0 must vanish identically")
        if np.any(np.diff(times, axis=0) < 0):
            raise SpaceError("stopping times must be nondecreasing in k")
        for k, T in enumerate(times):
            ok, bad = self.space.is_stopping_time(T)
            if not ok:
                raise SpaceError(f"T_{k} is not a stopping time: level/atom {bad[0]}")
        times.setflags(write=False)
        object.__setattr__(self, "times", times)

    @classmethod
    def constant(cls, space, values):
        values = list(values)
        times = np.repeat(np.asarray(values, dtype=np.int64)[:, None], space.n_leaves, axis=1)
        return cls(space, times)

    @property
    def K(self):
        return self.times.shape[0] - 1

    def __getitem__(self, k):
        return self.times[k]
