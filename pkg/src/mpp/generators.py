"""Martingale families and an extremal-ratio hill climber.

All randomness goes through ``numpy.random.default_rng`` (PCG64), whose
streams are fixed across platforms, so a seed pins every generated object
bit for bit.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field, replace

import numpy as np

from . import verify
from ._parallel import parallel_map
from .martingale import Martingale, martingale_lp_norm
from .report import CheckReport, fmt_float
from .space import FilteredSpace, SpaceError, StoppingSequence
from .variation import jump_stopping_times

SCALES = ("normal", "uniform", "sign")


@dataclass(frozen=True)
class DyadicMartingaleParams:
    """A dyadic martingale given by its start and one amplitude per internal node.

    Node ``v = 2^n - 1 + a`` is atom ``a`` of level ``n``.  With left-child
    probability ``bias`` its children move by ``a_v sqrt((1 - bias) / bias)``
    and ``-a_v sqrt(bias / (1 - bias))``, i.e. ``+a_v`` and ``-a_v`` when
    ``bias = 1/2``.
    """

    depth: int
    a: np.ndarray
    f0: float = 0.0
    bias: float = 0.5

    def __post_init__(self):
        a = np.array(self.a, dtype=np.float64).reshape(-1)
        if self.depth < 1:
            raise SpaceError("depth must be at least 1")
        if a.size != 2 ** self.depth - 1:
            raise SpaceError(f"expected {2 ** self.depth - 1} node amplitudes, got {a.size}")
        a.setflags(write=False)
        object.__setattr__(self, "a", a)

    def scaled(self, c):
        return replace(self, a=c * self.a, f0=c * self.f0)

    def martingale(self, space: FilteredSpace | None = None, check=True) -> Martingale:
        if space is None:
            space = FilteredSpace.dyadic(self.depth, self.bias)
        up = np.sqrt((1.0 - self.bias) / self.bias)
        down = np.sqrt(self.bias / (1.0 - self.bias))
        values = [np.array([self.f0])]
        for n in range(self.depth):
            amp = self.a[2 ** n - 1: 2 ** (n + 1) - 1]
            nxt = np.empty(2 ** (n + 1))
            nxt[0::2] = values[-1] + amp * up
            nxt[1::2] = values[-1] - amp * down
            values.append(nxt)
        return Martingale(space, values, check=check)


def rademacher_walk(d: int) -> Martingale:
    return DyadicMartingaleParams(d, np.ones(2 ** d - 1)).martingale()


def random_dyadic_params(d: int, seed: int, scale="normal", bias=0.5, f0=0.0):
    """Node amplitudes drawn from ``default_rng(seed)``.

    ``normal`` draws standard normals, ``uniform`` draws from ``[-1, 1)``
    and ``sign`` draws fair random signs.
    """
    rng = np.random.default_rng(seed)
    size = 2 ** d - 1
    if scale == "normal":
        a = rng.standard_normal(size)
    elif scale == "uniform":
        a = rng.uniform(-1.0, 1.0, size)
    elif scale == "sign":
        a = rng.choice(np.array([-1.0, 1.0]), size)
    else:
        raise SpaceError(f"unknown scale {scale!r}; expected one of {SCALES}")
    return DyadicMartingaleParams(d, a, f0=f0, bias=bias)


def random_dyadic(d: int, seed: int, scale="normal", bias=0.5, f0=0.0) -> Martingale:
    return random_dyadic_params(d, seed, scale, bias, f0).martingale()


# ---------------------------------------------------------------- general spaces


def random_space(depth: int, n_leaves: int, rng) -> FilteredSpace:
    """A random filtration on ``n_leaves`` points.

    Each level splits every atom at a random subset of its gaps; the last
    level is all singletons.  Leaves are then relabelled by a random
    permutation (so atoms are not contiguous index ranges) and given
    Dirichlet(1, ..., 1) probabilities.
    """
    if depth < 1 or n_leaves < 1:
        raise SpaceError("need depth >= 1 and at least one leaf")
    cuts = np.zeros(max(n_leaves - 1, 0), dtype=bool)
    index = [np.zeros(n_leaves, dtype=np.int64)]
    for _ in range(depth - 1):
        cuts = cuts | (rng.random(cuts.size) < 0.5)
        index.append(np.concatenate([[0], np.cumsum(cuts)]))
    index.append(np.arange(n_leaves))
    perm = rng.permutation(n_leaves)
    index = np.array(index)[:, perm]
    return FilteredSpace.from_index(rng.dirichlet(np.ones(n_leaves)), index)


def random_martingale(space: FilteredSpace, rng, centered=True, heavy=False) -> Martingale:
    """``f_n = E[h | F_n]`` for a random terminal ``h``, optionally shifted to ``f_0 = 0``.

    ``heavy`` multiplies the normal draw by a lognormal factor.
    """
    h = rng.standard_normal(space.n_leaves)
    if heavy:
        h = h * np.exp(rng.standard_normal(space.n_leaves))
    f = Martingale.from_terminal(space, h)
    if centered:
        # subtract f_0 level by level so that f_0 is exactly zero
        f = Martingale(space, [row - f.values[0][0] for row in f.values], check=False)
    return f


def random_weight(space: FilteredSpace, rng):
    """Exponential weights with roughly a fifth of the leaves zeroed (never all)."""
    w = rng.exponential(size=space.n_leaves) * (rng.random(space.n_leaves) > 0.2)
    if not np.any(w > 0):
        w[rng.integers(space.n_leaves)] = 1.0
    return w


def random_stopping_sequence(space: FilteredSpace, K: int, rng) -> StoppingSequence:
    """``T_k`` = first ``n >= T_{k-1} + s_k`` at which an adapted uniform field exceeds ``theta``.

    ``s_k`` is 0 or 1 at random, so some consecutive times coincide.
    """
    N = space.depth
    field_ = np.array([rng.random(c)[idx] for c, idx in zip(space.atom_counts, space.atom_index)])
    levels = np.arange(N + 1)[:, None]
    times = [np.zeros(space.n_leaves, dtype=np.int64)]
    for _ in range(K):
        start = times[-1] + rng.integers(0, 2)
        hit = (field_ > rng.uniform(0.3, 0.9)) & (levels >= start[None, :])
        first = np.where(hit.any(axis=0), hit.argmax(axis=0), N)
        times.append(np.minimum(first, N))
    return StoppingSequence(space, np.array(times))


# ---------------------------------------------------------------- search

LINEAR_TARGETS = (
    "lepingle", "bourgain_jump", "doob", "bdg_max_square", "bdg_square_max",
    "vector_doob", "localized_maximal", "localized_square",
)
WEIGHTED_TARGETS = ("weighted_doob", "weighted_bdg")
BILINEAR_TARGETS = ("chao_long_max", "prop_l1", "thm_variation", "thm_jump")
ROUGH_TARGETS = ("rough_variation", "rough_jump")
SEARCH_TARGETS = LINEAR_TARGETS + WEIGHTED_TARGETS + BILINEAR_TARGETS + ROUGH_TARGETS
SEARCH_DEFAULTS = {"p": 2.0, "q": 2.0, "rho": 1.5, "lam": 1.0}


def _evaluate(target, f, g, w, prm) -> CheckReport:
    p, q, rho, lam = prm["p"], prm["q"], prm["rho"], prm["lam"]
    if target in ("vector_doob", "localized_maximal", "localized_square"):
        S = jump_stopping_times(f, f, lam).sequence(f.space)
        if target == "vector_doob":
            return verify.check_vector_doob(f, S, p, q)
        fn = verify.check_localized_maximal if target == "localized_maximal" else verify.check_localized_square
        return fn(f, S, p)
    if target == "prop_l1":
        return verify.check_prop_l1(f, g, jump_stopping_times(f, g, lam).sequence(f.space), p, q)
    table = {
        "lepingle": lambda: verify.check_lepingle(f, p, rho),
        "bourgain_jump": lambda: verify.check_bourgain_jump(f, p, lam),
        "doob": lambda: verify.check_doob(f, p),
        "bdg_max_square": lambda: verify.check_bdg(f, p)[0],
        "bdg_square_max": lambda: verify.check_bdg(f, p)[1],
        "weighted_doob": lambda: verify.check_weighted_doob(f, w, p),
        "weighted_bdg": lambda: verify.check_weighted_bdg(f, w),
        "chao_long_max": lambda: verify.check_chao_long_max(f, g, p, q),
        "thm_variation": lambda: verify.check_thm_variation(f, g, p, q, rho),
        "thm_jump": lambda: verify.check_thm_jump(f, g, p, q, lam),
        "rough_variation": lambda: verify.check_rough_variation(f, g, p, rho),
        "rough_jump": lambda: verify.check_rough_jump(f, g, p, lam),
    }
    return table[target]()


@dataclass
class _State:
    f: DyadicMartingaleParams
    g: DyadicMartingaleParams | None = None
    w: np.ndarray | None = None

    def vectors(self):
        out = [self.f.a]
        if self.g is not None:
            out.append(self.g.a)
        if self.w is not None:
            out.append(self.w)
        return out


def _normalize(target, state: _State, prm):
    """Rescale to unit norm; every searched ratio is invariant under this step."""
    p, q = prm["p"], prm["q"]
    f = state.f.martingale(check=False)
    nf = martingale_lp_norm(f, 1.0 if target == "weighted_bdg" else p)
    if target in ROUGH_TARGETS:
        # joint dilation (f, g, Pi) -> (c f, c g, c^2 Pi) keeps the ratio fixed
        ng = martingale_lp_norm(state.g.martingale(check=False), p)
        c = 2.0 / (nf + ng) if nf + ng > 0 else 1.0
        return _State(state.f.scaled(c), state.g.scaled(c))
    f_new = state.f.scaled(1.0 / nf) if nf > 0 else state.f
    g_new, w_new = state.g, state.w
    if state.g is not None:
        ng = martingale_lp_norm(state.g.martingale(check=False), q)
        g_new = state.g.scaled(1.0 / ng) if ng > 0 else state.g
    if state.w is not None:
        mass = float(state.w.mean())
        w_new = state.w / mass if mass > 0 else state.w
    return _State(f_new, g_new, w_new)


def _score(target, state: _State, prm) -> CheckReport:
    f = state.f.martingale(check=False)
    g = state.g.martingale(space=f.space, check=False) if state.g is not None else None
    return _evaluate(target, f, g, state.w, prm)


def _perturb(state: _State, coord: int, factor: float) -> _State:
    sizes = [v.size for v in state.vectors()]
    which = 0
    while coord >= sizes[which]:
        coord -= sizes[which]
        which += 1
    vec = state.vectors()[which].copy()
    vec[coord] *= factor
    if which == 0:
        return _State(replace(state.f, a=vec), state.g, state.w)
    if which == 1 and state.g is not None:
        return _State(state.f, replace(state.g, a=vec), state.w)
    return _State(state.f, state.g, vec)


@dataclass
class RestartResult:
    restart: int
    best: _State
    best_report: CheckReport
    trace: list = field(default_factory=list)


@dataclass
class SearchResult:
    """Outcome of :func:`ratio_search`.

    ``params`` is the best ``f`` (``g_params``/``weight`` hold the companions
    for bilinear and weighted targets).  ``violations`` lists the reports of
    bounded targets whose ratio exceeded the bound; it must stay empty.
    """

    target: str
    params: DyadicMartingaleParams
    g_params: DyadicMartingaleParams | None
    weight: np.ndarray | None
    best_ratio: float
    best_report: CheckReport
    best_restart: int
    trace: list
    violations: list

    def trace_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(("restart", "iteration", "ratio", "accepted"))
        for restart, it, ratio, accepted in self.trace:
            writer.writerow((restart, it, fmt_float(ratio), "true" if accepted else "false"))
        return buf.getvalue()


def _climb(target, depth, prm, iterations, seed, restart, eta0, patience):
    rng = np.random.default_rng([seed, restart])
    size = 2 ** depth - 1
    state = _State(DyadicMartingaleParams(depth, rng.standard_normal(size)))
    if target in BILINEAR_TARGETS + ROUGH_TARGETS:
        state.g = DyadicMartingaleParams(depth, rng.standard_normal(size))
    if target in WEIGHTED_TARGETS:
        state.w = rng.exponential(size=2 ** depth)
    state = _normalize(target, state, prm)
    current = _score(target, state, prm)
    best, best_rep = state, current
    dim = sum(v.size for v in state.vectors())
    eta, stall = eta0, 0
    violations = [] if current.passed or current.bound is None else [current]
    trace = []
    for it in range(1, iterations + 1):
        coord = int(rng.integers(dim))
        factor = 1.0 + eta if rng.random() < 0.5 else 1.0 / (1.0 + eta)
        cand = _normalize(target, _perturb(state, coord, factor), prm)
        rep = _score(target, cand, prm)
        if rep.bound is not None and not rep.passed:
            violations.append(rep)
        accepted = rep.ratio >= current.ratio
        trace.append((restart, it, rep.ratio, accepted))
        if rep.ratio > current.ratio:
            stall = 0
        else:
            stall += 1
            if stall >= patience:
                eta, stall = max(eta / 2.0, 1e-6), 0
        if accepted:
            state, current = cand, rep
            if rep.ratio > best_rep.ratio:
                best, best_rep = cand, rep
    return RestartResult(restart, best, best_rep, trace), violations


def ratio_search(target: str, params=None, iterations=200, restarts=4, seed=0, depth=4,
                 eta0=0.5, patience=20) -> SearchResult:
    """Hill-climb the ratio of ``target`` over unit-norm dyadic martingales.

    Each restart starts from ``default_rng([seed, restart])`` normal node
    amplitudes and proposes ``iterations`` single-coordinate moves by a factor
    ``1 + eta`` or ``1 / (1 + eta)``.  A proposal is accepted when its ratio
    is at least the current one; ``eta`` is halved after ``patience``
    proposals without strict improvement.  Restarts run in parallel and the
    best ratio wins, ties going to the lowest restart index.
    """
    if target not in SEARCH_TARGETS:
        raise SpaceError(f"unknown search target {target!r}")
    if iterations < 1 or restarts < 1:
        raise SpaceError("iterations and restarts must be at least 1")
    prm = {**SEARCH_DEFAULTS, **(params or {})}
    runs = parallel_map(
        lambda r: _climb(target, depth, prm, iterations, seed, r, eta0, patience), range(restarts)
    )
    winner = runs[0][0]
    for res, _ in runs[1:]:
        if res.best_report.ratio > winner.best_report.ratio:
            winner = res
    return SearchResult(
        target=target,
        params=winner.best.f,
        g_params=winner.best.g,
        weight=winner.best.w,
        best_ratio=winner.best_report.ratio,
        best_report=winner.best_report.with_params(depth=depth, seed=seed, generator="search"),
        best_restart=winner.restart,
        trace=[row for res, _ in runs for row in res.trace],
        violations=[v for _, vs in runs for v in vs],
    )
