import math

import numpy as np
import pytest

from mpp.generators import (
    SEARCH_TARGETS,
    DyadicMartingaleParams,
    rademacher_walk,
    random_dyadic,
    random_dyadic_params,
    ratio_search,
)
from mpp.martingale import is_martingale, martingale_lp_norm, square_function
from mpp.space import SpaceError
from mpp.verify import check_doob, check_lepingle


def test_rademacher_walk():
    f = rademacher_walk(1)
    assert f.paths[1].tolist() == [1.0, -1.0]
    for d in (2, 5):
        f = rademacher_walk(d)
        np.testing.assert_allclose(square_function(f), math.sqrt(d), rtol=1e-15)
        assert martingale_lp_norm(f, 2) == pytest.approx(math.sqrt(d), rel=1e-15)


def test_random_dyadic_is_reproducible():
    a, b = random_dyadic(6, 42), random_dyadic(6, 42)
    np.testing.assert_array_equal(a.paths, b.paths)
    assert not np.array_equal(random_dyadic_params(6, 1).a, random_dyadic_params(6, 2).a)
    for scale in ("normal", "uniform", "sign"):
        for bias in (0.5, 0.2):
            assert is_martingale(random_dyadic(5, 3, scale=scale, bias=bias))[0]
    with pytest.raises(SpaceError):
        random_dyadic(3, 0, scale="cauchy")


def test_param_count_is_checked():
    with pytest.raises(SpaceError):
        DyadicMartingaleParams(3, np.ones(6))


def test_search_is_deterministic():
    a = ratio_search("lepingle", {"rho": 1.5}, iterations=40, restarts=3, seed=5, depth=4)
    b = ratio_search("lepingle", {"rho": 1.5}, iterations=40, restarts=3, seed=5, depth=4)
    assert a.trace == b.trace and a.best_ratio == b.best_ratio
    assert a.trace_csv().splitlines()[0] == "restart,iteration,ratio,accepted"
    assert len(a.trace) == 120


def test_search_best_report_matches_params():
    res = ratio_search("lepingle", {"rho": 1.5, "p": 2.0}, iterations=60, restarts=2, seed=1, depth=4)
    f = res.params.martingale()
    assert martingale_lp_norm(f, 2) == pytest.approx(1.0, rel=1e-12)
    assert check_lepingle(f, 2.0, 1.5).ratio == pytest.approx(res.best_ratio, rel=1e-12)


def test_renormalization_leaves_ratios_unchanged():
    params = random_dyadic_params(5, 9)
    for c in (0.01, 7.5):
        for p in (1.5, 2, np.inf):
            assert check_doob(params.scaled(c).martingale(), p).ratio == pytest.approx(
                check_doob(params.martingale(), p).ratio, rel=1e-12)


SHARP_CASES = [(t, p) for t in ("doob", "weighted_doob") for p in (1.5, 3.0, np.inf)] + [("weighted_bdg", 1.0)]


@pytest.mark.parametrize("target, p", SHARP_CASES)
def test_search_respects_sharp_constants(target, p):
    res = ratio_search(target, {"p": p}, iterations=150, restarts=2, seed=3, depth=5)
    assert not res.violations
    assert res.best_report.passed


@pytest.mark.parametrize("target", SEARCH_TARGETS)
def test_every_target_runs(target):
    res = ratio_search(target, iterations=5, restarts=1, seed=0, depth=3)
    assert res.best_ratio >= 0 and len(res.trace) == 5


def test_lepingle_search_grows_with_depth():
    shallow = ratio_search("lepingle", {"rho": 1.5}, iterations=150, restarts=2, seed=0, depth=4).best_ratio
    deep = ratio_search("lepingle", {"rho": 1.5}, iterations=150, restarts=2, seed=0, depth=10).best_ratio
    assert deep > shallow


def test_unknown_target():
    with pytest.raises(SpaceError, match="unknown"):
        ratio_search("nope")
