"""Exact evaluation of both sides of the martingale inequalities.

Each ``check_*`` function returns a :class:`~mpp.report.CheckReport` (or a
pair, for BDG).  Only Doob's inequality, its weighted form and the weighted
Davis inequality come with explicit constants; every other ratio is reported
as a measured quantity, never as the constant of the underlying theorem.
"""
from __future__ import annotations

import math

import numpy as np

from .heisenberg import rough_jump_count, rough_variation
from .martingale import (
    Martingale,
    _check_same_space,
    localize,
    martingale_lp_norm,
    maximal_function,
    square_function,
)
from .paraproduct import localized_paraproduct, paraproduct
from .report import CheckReport
from .space import ExponentTriple, SpaceError, StoppingSequence, conjugate, weighted_lp_norm
from .variation import ParaproductKernel, ScalarKernel, jump_count, rho_variation

WEIGHTED_BDG_CONSTANT = 16.0 * (math.sqrt(2.0) + 1.0)

CHECK_IDS = (
    "lepingle",
    "bourgain_jump",
    "doob",
    "weighted_doob",
    "bdg_max_square",
    "bdg_square_max",
    "weighted_bdg",
    "chao_long_max",
    "vector_doob",
    "localized_maximal",
    "localized_square",
    "prop_l1",
    "thm_variation",
    "thm_jump",
    "rough_variation",
    "rough_jump",
)
BOUNDED_IDS = ("doob", "weighted_doob", "weighted_bdg")


def _open_p(p):
    if not 1.0 < p < np.inf:
        raise SpaceError("p must lie in (1, inf)")


def check_lepingle(f: Martingale, p, rho, **params):
    _open_p(p)
    lhs = f.space.lp_norm(rho_variation(ScalarKernel(f), rho), p)
    return CheckReport.make("lepingle", lhs, martingale_lp_norm(f, p), p=p, rho=rho, **params)


def check_bourgain_jump(f: Martingale, p, lam, **params):
    _open_p(p)
    counts = jump_count(ScalarKernel(f), lam)
    lhs = f.space.lp_norm(np.sqrt(counts), p)
    rep = CheckReport.make("bourgain_jump", lhs, martingale_lp_norm(f, p) / lam, p=p, lam=lam, **params)
    rep.meta["max_jumps"] = int(counts.max())
    return rep


def check_doob(f: Martingale, p, **params):
    if not p > 1:
        raise SpaceError("Doob's inequality needs p in (1, inf]")
    lhs = f.space.lp_norm(maximal_function(f), p)
    return CheckReport.make("doob", lhs, martingale_lp_norm(f, p), bound=conjugate(p), p=p, **params)


def weight_maximal(space, w):
    """Maximal function of the martingale ``w_n = E[w | F_n]``."""
    w = space.random_variable(w)
    if np.any(w < 0):
        raise SpaceError("weights must be nonnegative")
    return Martingale.from_terminal(space, w), maximal_function(Martingale.from_terminal(space, w))


def check_weighted_doob(f: Martingale, w, p, **params):
    if not p > 1:
        raise SpaceError("weighted Doob needs p in (1, inf]")
    _, Mw = weight_maximal(f.space, w)
    lhs = weighted_lp_norm(f.space, maximal_function(f), w, p)
    rhs = weighted_lp_norm(f.space, f.final, Mw, p)
    return CheckReport.make("weighted_doob", lhs, rhs, bound=conjugate(p), p=p, **params)


def check_bdg(f: Martingale, p, **params):
    """``(||Mf||_p / ||Sf||_p, ||Sf||_p / ||Mf||_p)``, both unbounded reports."""
    if not 1 <= p < np.inf:
        raise SpaceError("BDG needs p in [1, inf)")
    M = f.space.lp_norm(maximal_function(f), p)
    S = f.space.lp_norm(square_function(f), p)
    return (
        CheckReport.make("bdg_max_square", M, S, p=p, **params),
        CheckReport.make("bdg_square_max", S, M, p=p, **params),
    )


def check_weighted_bdg(f: Martingale, w, p=1, **params):
    if p != 1:
        raise SpaceError("the weighted Davis inequality is an L^1 statement")
    _, Mw = weight_maximal(f.space, w)
    lhs = weighted_lp_norm(f.space, maximal_function(f), w, 1)
    rhs = weighted_lp_norm(f.space, square_function(f), Mw, 1)
    return CheckReport.make("weighted_bdg", lhs, rhs, bound=WEIGHTED_BDG_CONSTANT, p=1.0, **params)


def _bilinear_rhs(f, g, ex):
    return martingale_lp_norm(f, ex.p) * martingale_lp_norm(g, ex.q)


def check_chao_long_max(f: Martingale, g: Martingale, p, q, **params):
    ex = ExponentTriple.from_pq(p, q)
    pi = paraproduct(f, g)
    lhs = f.space.lp_norm(maximal_function(pi), ex.r)
    return CheckReport.make("chao_long_max", lhs, _bilinear_rhs(f, g, ex), p=p, q=q, r=ex.r, **params)


def _pieces(f, S):
    return [localize(f, S, k) for k in range(1, S.K + 1)]


def check_vector_doob(f: Martingale, S: StoppingSequence, p, q, **params):
    _open_p(p)
    if not 1.0 < q < np.inf:
        raise SpaceError("q must lie in (1, inf)")
    pieces = _pieces(f, S)
    lhs = f.space.mixed_lp_lq_norm([maximal_function(h) for h in pieces], p, q)
    rhs = f.space.mixed_lp_lq_norm([h.final for h in pieces], p, q)
    return CheckReport.make("vector_doob", lhs, rhs, p=p, q=q, **params)


def check_localized_maximal(f: Martingale, S: StoppingSequence, p, **params):
    _open_p(p)
    pieces = _pieces(f, S)
    lhs = f.space.mixed_lp_lq_norm([maximal_function(h) for h in pieces], p, 2)
    return CheckReport.make("localized_maximal", lhs, martingale_lp_norm(f, p), p=p, **params)


def localized_square_pathwise(f: Martingale, S: StoppingSequence, rtol=1e-12):
    """``(sum_k (S f^(k))^2)^{1/2} <= S f`` leaf-wise."""
    agg = np.sqrt(sum(square_function(h) ** 2 for h in _pieces(f, S)))
    return np.all(agg <= square_function(f) * (1.0 + rtol) + rtol)


def check_localized_square(f: Martingale, S: StoppingSequence, p, **params):
    _open_p(p)
    pieces = _pieces(f, S)
    lhs = f.space.mixed_lp_lq_norm([square_function(h) for h in pieces], p, 2)
    rep = CheckReport.make("localized_square", lhs, martingale_lp_norm(f, p), p=p, **params)
    pathwise = bool(localized_square_pathwise(f, S))
    rep.meta["pathwise"] = pathwise
    if not pathwise:
        rep = rep.with_params(passed=False, note="pathwise square-function bound violated")
    return rep


def check_prop_l1(f: Martingale, g: Martingale, S: StoppingSequence, p, q, **params):
    ex = ExponentTriple.from_pq(p, q)
    _check_same_space(f, g)
    total = sum(np.abs(localized_paraproduct(f, g, S, k)) for k in range(1, S.K + 1))
    lhs = f.space.lp_norm(total, ex.r)
    return CheckReport.make("prop_l1", lhs, _bilinear_rhs(f, g, ex), p=p, q=q, r=ex.r, **params)


def check_thm_variation(f: Martingale, g: Martingale, p, q, rho, **params):
    if not rho > 1:
        raise SpaceError("rho must exceed 1")
    ex = ExponentTriple.from_pq(p, q)
    lhs = f.space.lp_norm(rho_variation(ParaproductKernel(f, g), rho), ex.r)
    return CheckReport.make("thm_variation", lhs, _bilinear_rhs(f, g, ex), p=p, q=q, r=ex.r, rho=rho, **params)


def check_thm_jump(f: Martingale, g: Martingale, p, q, lam, **params):
    ex = ExponentTriple.from_pq(p, q)
    counts = jump_count(ParaproductKernel(f, g), lam)
    lhs = f.space.lp_norm(counts.astype(np.float64), ex.r)
    rep = CheckReport.make(
        "thm_jump", lhs, _bilinear_rhs(f, g, ex) / lam, p=p, q=q, r=ex.r, lam=lam, **params
    )
    rep.meta["max_jumps"] = int(counts.max())
    return rep


def _rough_rhs(f, g, p):
    return martingale_lp_norm(f, p) + martingale_lp_norm(g, p)


def check_rough_variation(f: Martingale, g: Martingale, p, rho, **params):
    _open_p(p)
    lhs = f.space.lp_norm(rough_variation(f, g, rho), p)
    note = "" if rho > 2 else "rho <= 2: outside the regime of the rough-path estimate"
    return CheckReport.make("rough_variation", lhs, _rough_rhs(f, g, p), p=p, rho=rho, note=note, **params)


def check_rough_jump(f: Martingale, g: Martingale, p, lam, **params):
    _open_p(p)
    counts = rough_jump_count(f, g, lam)
    lhs = f.space.lp_norm(np.sqrt(counts), p)
    rep = CheckReport.make("rough_jump", lhs, _rough_rhs(f, g, p) / lam, p=p, lam=lam, **params)
    rep.meta["max_jumps"] = int(counts.max())
    return rep


def run_suite(f, g, w, S, *, p, q, rho, lam, **params):
    """Every check on one input configuration, in a fixed order."""
    reports = [
        check_lepingle(f, p, rho),
        check_bourgain_jump(f, p, lam),
        check_doob(f, p),
        check_weighted_doob(f, w, p),
        *check_bdg(f, p),
        check_weighted_bdg(f, w),
        check_chao_long_max(f, g, p, q),
        check_vector_doob(f, S, p, q),
        check_localized_maximal(f, S, p),
        check_localized_square(f, S, p),
        check_prop_l1(f, g, S, p, q),
        check_thm_variation(f, g, p, q, rho),
        check_thm_jump(f, g, p, q, lam),
        check_rough_variation(f, g, p, rho),
        check_rough_jump(f, g, p, lam),
    ]
    return [rep.with_params(**params) for rep in reports]
