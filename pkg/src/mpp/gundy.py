"""Gundy's decomposition of a martingale at a height ``alpha``.

Construction (one pass over the levels, all leaf-wise):

* ``sigma`` is the first time with ``|g_n| > alpha``;
* ``A_n = sum_{k <= n} E[|dg_k| 1{k = sigma} | F_{k-1}]`` is the predictable
  compensator of the crossing jump and ``rho`` the first ``n`` with
  ``A_{n+1} > alpha``;
* ``tau = min(sigma, rho)``, ``bad = g - g^tau``;
* the crossing jump ``U_k = dg_k 1{k = sigma <= rho}`` minus its conditional
  mean given ``F_{k-1}`` forms the harmless part, the rest of the stopped
  increments the good part.

Before ``sigma`` the good part equals the stopped martingale up to the
accumulated compensator, so ``|good| <= alpha + alpha``.  The Doob weak-type
bound and Markov's inequality for ``A_N`` give the bound on the bad part;
``E sum |U_k| <= 2 ||g||_1`` gives the other two.

When ``|g_0| > 2 alpha`` on some level-0 atom no part with ``good_0 = g_0``
can be bounded by ``2 alpha``; there the whole of ``g`` is routed to the bad
part and the result carries ``rerouted = True``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .martingale import Martingale, martingale_lp_norm, maximal_function
from .report import CheckReport
from .space import SpaceError


@dataclass(frozen=True)
class GundyParts:
    good: Martingale
    bad: Martingale
    harmless: Martingale
    alpha: float
    tau: np.ndarray
    rerouted: bool = False


def gundy_decompose(g: Martingale, alpha: float) -> GundyParts:
    if not alpha > 0:
        raise SpaceError("alpha must be positive")
    space = g.space
    N, L = space.depth, space.n_leaves
    paths = g.paths
    d = np.diff(paths, axis=0)  # row k-1 is dg_k
    never = N + 1

    above = np.abs(paths) > alpha
    sigma = np.where(above.any(axis=0), above.argmax(axis=0), never)

    times = np.arange(1, N + 1)[:, None]
    crossing = times == sigma[None, :]
    jump = np.abs(d) * crossing
    comp = np.array([space.conditional_expectation(jump[k - 1], k - 1) for k in range(1, N + 1)])
    A = np.vstack([np.zeros(L), np.cumsum(comp, axis=0)])  # A[n] for n = 0..N
    # rho = first n in 0..N-1 with A_{n+1} > alpha
    over = A[1:] > alpha
    rho = np.where(over.any(axis=0), over.argmax(axis=0), never)
    tau = np.minimum(sigma, rho)

    live = times <= tau[None, :]
    U = d * (crossing & live)
    C = np.array([space.conditional_expectation(U[k - 1], k - 1) for k in range(1, N + 1)])
    dh = U - C
    dgood = d * live - dh

    zero = np.zeros((1, L))
    good = paths[0][None, :] + np.vstack([zero, np.cumsum(dgood, axis=0)])
    harmless = np.vstack([zero, np.cumsum(dh, axis=0)])
    stopped = paths[np.minimum(np.arange(N + 1)[:, None], tau[None, :]), np.arange(L)[None, :]]
    bad = paths - stopped

    reroute = np.abs(paths[0]) > 2.0 * alpha
    if np.any(reroute):
        good = np.where(reroute[None, :], 0.0, good)
        harmless = np.where(reroute[None, :], 0.0, harmless)
        bad = np.where(reroute[None, :], paths, bad)

    return GundyParts(
        good=Martingale.from_paths(space, good),
        bad=Martingale.from_paths(space, bad),
        harmless=Martingale.from_paths(space, harmless),
        alpha=float(alpha),
        tau=tau,
        rerouted=bool(np.any(reroute)),
    )


GUNDY_IDS = ("gundy_good_sup", "gundy_good_l1", "gundy_bad_support", "gundy_harmless_variation")


def gundy_report(g: Martingale, alpha: float, parts: GundyParts | None = None, **params):
    """Four reports, one per quantitative property of the decomposition."""
    parts = gundy_decompose(g, alpha) if parts is None else parts
    space = g.space
    g_l1 = martingale_lp_norm(g, 1)
    note = "initial value rerouted" if parts.rerouted else ""
    params = {"alpha": float(alpha), "note": note, **params}
    bad_support = float(space.leaf_probs[maximal_function(parts.bad) > 0].sum())
    harmless_var = float(sum(space.lp_norm(row, 1) for row in parts.harmless.differences()))
    return [
        CheckReport.make("gundy_good_sup", martingale_lp_norm(parts.good, np.inf), alpha, bound=2.0, **params),
        CheckReport.make("gundy_good_l1", martingale_lp_norm(parts.good, 1), g_l1, bound=4.0, **params),
        CheckReport.make("gundy_bad_support", bad_support, g_l1 / alpha, bound=3.0, **params),
        CheckReport.make("gundy_harmless_variation", harmless_var, g_l1, bound=4.0, **params),
    ]


def gundy_identities_hold(g: Martingale, parts: GundyParts, atol=1e-12):
    """Sum identity and initial values (the latter relaxed on rerouted atoms)."""
    total = parts.good.paths + parts.bad.paths + parts.harmless.paths
    scale = 1.0 + np.abs(g.paths)
    if np.any(np.abs(total - g.paths) > atol * scale):
        return False
    if np.any(parts.harmless.paths[0] != 0):
        return False
    rerouted = np.abs(g.paths[0]) > 2.0 * parts.alpha
    ok_good = np.where(rerouted, parts.good.paths[0] == 0, parts.good.paths[0] == g.paths[0])
    ok_bad = np.where(rerouted, parts.bad.paths[0] == g.paths[0], parts.bad.paths[0] == 0)
    return bool(np.all(ok_good) and np.all(ok_bad))
