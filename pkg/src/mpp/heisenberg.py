"""Heisenberg-group lift of a martingale pair and rough-path functionals.

Elements are ``(x, y, z)`` with product ``(x, y, z)(x', y', z') =
(x + x', y + y', z + z' + x y')``.  The vectorized helpers accept arrays of
shape ``(..., 3)`` so paths and random samples go through the same code.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .martingale import Martingale, _check_same_space
from .paraproduct import paraproduct
from .variation import IncrementKernel, jump_count, rho_variation


class HeisenbergElement(NamedTuple):
    x: float
    y: float
    z: float

    def __mul__(self, other):
        return HeisenbergElement(*multiply(self, other))

    def inverse(self):
        return HeisenbergElement(*inverse(self))

    def norm(self):
        return float(box_norm(self))


IDENTITY = HeisenbergElement(0.0, 0.0, 0.0)


def multiply(a, b):
    a, b = np.asarray(a, dtype=np.float64), np.asarray(b, dtype=np.float64)
    x, y, z = a[..., 0], a[..., 1], a[..., 2]
    x2, y2, z2 = b[..., 0], b[..., 1], b[..., 2]
    return np.stack([x + x2, y + y2, z + z2 + x * y2], axis=-1)


def inverse(a):
    a = np.asarray(a, dtype=np.float64)
    x, y, z = a[..., 0], a[..., 1], a[..., 2]
    return np.stack([-x, -y, -z + x * y], axis=-1)


def box_norm(a):
    """Homogeneous norm ``max(|x|, |y|, |z|^{1/2})``."""
    a = np.asarray(a, dtype=np.float64)
    return np.maximum(np.maximum(np.abs(a[..., 0]), np.abs(a[..., 1])), np.sqrt(np.abs(a[..., 2])))


def distance(a, b):
    return box_norm(multiply(inverse(a), b))


def dilate(a, c):
    a = np.asarray(a, dtype=np.float64)
    return np.stack([c * a[..., 0], c * a[..., 1], c * c * a[..., 2]], axis=-1)


def lift(f: Martingale, g: Martingale):
    """``H_n = (f_n, g_n, Pi_n(f, g))`` as an array of shape ``(N + 1, L, 3)``."""
    _check_same_space(f, g)
    return np.stack([f.paths, g.paths, paraproduct(f, g).paths], axis=-1)


def chen_check(f: Martingale, g: Martingale, n: int, n2: int, atol=1e-12):
    """``H_n (f_{n'} - f_n, g_{n'} - g_n, Pi_{n,n'}) = H_{n'}`` leaf-wise."""
    H = lift(f, g)
    pi = paraproduct(f, g)
    step = np.stack([f.paths[n2] - f.paths[n], g.paths[n2] - g.paths[n], pi.truncated(n, n2)], axis=-1)
    got = multiply(H[n], step)
    return bool(np.all(np.abs(got - H[n2]) <= atol * (1.0 + np.abs(H[n2]))))


class HeisenbergKernel(IncrementKernel):
    """``delta(i, j) = d(H_i, H_j)`` computed through the group operations."""

    def __init__(self, f: Martingale, g: Martingale):
        self.H = lift(f, g)
        self.horizon = f.depth
        self.n_leaves = f.space.n_leaves

    def evaluate(self, i, j):
        return distance(self.H[i], self.H[j])

    _pairs = evaluate


class BoxFormulaKernel(IncrementKernel):
    """``max(|f_j - f_i|, |g_j - g_i|, |Pi_{i,j}|^{1/2})``, the closed form of the same distance."""

    def __init__(self, f: Martingale, g: Martingale):
        self.pi = paraproduct(f, g)
        self.f, self.g = f, g
        self.horizon = f.depth
        self.n_leaves = f.space.n_leaves

    def evaluate(self, i, j):
        F, G = self.f.paths, self.g.paths
        return np.maximum(
            np.maximum(np.abs(F[j] - F[i]), np.abs(G[j] - G[i])), np.sqrt(np.abs(self.pi.truncated(i, j)))
        )

    _pairs = evaluate


def rough_variation(f: Martingale, g: Martingale, rho: float):
    return rho_variation(HeisenbergKernel(f, g), rho)


def rough_jump_count(f: Martingale, g: Martingale, lam: float):
    return jump_count(HeisenbergKernel(f, g), lam)
