import math

import numpy as np
import pytest
from hypothesis import example, given
from hypothesis import strategies as st

from mpp import verify
from mpp.generators import rademacher_walk, random_dyadic, random_martingale, random_space, random_stopping_sequence, random_weight
from mpp.martingale import Martingale, localize, maximal_function, square_function
from mpp.space import FilteredSpace, SpaceError, StoppingSequence
from mpp.variation import jump_stopping_times

S2 = FilteredSpace([0.5, 0.5], [[[0, 1]], [[0], [1]]])


def test_lepingle_examples():
    const = Martingale.constant(FilteredSpace.dyadic(3), 2.0)
    rep = verify.check_lepingle(const, 2, 1.5)
    assert rep.lhs == 0 and rep.ratio == 0
    for d in (2, 4, 6):
        rep = verify.check_lepingle(rademacher_walk(d), 2, 1.5)
        # consecutive partition of a d-step walk: d^{1/rho} against ||f||_2 = sqrt(d)
        assert rep.ratio >= d ** (1 / 1.5 - 0.5) * (1 - 1e-15)
    for d in range(1, 9):
        assert math.isfinite(verify.check_lepingle(rademacher_walk(d), 2, 3).ratio)


def test_bourgain_jump_examples():
    for d in (3, 5):
        rep = verify.check_bourgain_jump(rademacher_walk(d), 2, 1.0)
        assert rep.lhs == pytest.approx(math.sqrt(d), rel=1e-15)
        assert rep.ratio == pytest.approx(1.0, rel=1e-15)
        assert rep.meta["max_jumps"] == d
    assert verify.check_bourgain_jump(rademacher_walk(4), 2, 9.0).lhs == 0


def test_doob_examples():
    f = Martingale(S2, [[0], [1, -1]])
    rep = verify.check_doob(f, 2)
    assert rep.ratio == 1.0 and rep.bound == 2.0 and rep.passed
    assert verify.check_doob(Martingale.constant(S2, 3.0), 3).ratio == 1.0
    rep = verify.check_doob(random_dyadic(5, 1), np.inf)
    assert rep.bound == 1.0 and rep.ratio <= 1.0
    with pytest.raises(SpaceError):
        verify.check_doob(f, 1)


def test_weighted_doob_examples():
    f = random_dyadic(5, 2)
    ones = np.ones(f.space.n_leaves)
    rep = verify.check_weighted_doob(f, ones, 2)
    assert rep.rhs == pytest.approx(f.space.lp_norm(f.final, 2), rel=1e-14)
    assert rep.lhs == pytest.approx(verify.check_doob(f, 2).lhs, rel=1e-14)
    # all weight on one leaf: compare |Mf| there with |f_N| times the weight maximal function
    w = np.zeros(f.space.n_leaves)
    w[7] = 1.0
    _, Mw = verify.weight_maximal(f.space, w)
    rep = verify.check_weighted_doob(f, w, 3)
    want_lhs = (f.space.leaf_probs[7] * maximal_function(f)[7] ** 3) ** (1 / 3)
    assert rep.lhs == pytest.approx(want_lhs, rel=1e-13)
    assert rep.rhs == pytest.approx(f.space.lp_norm(np.abs(f.final) * Mw ** (1 / 3), 3), rel=1e-13)
    assert rep.passed


def test_bdg_examples():
    for d in (3, 6):
        f = rademacher_walk(d)
        m_over_s, s_over_m = verify.check_bdg(f, 2)
        assert m_over_s.rhs == pytest.approx(math.sqrt(d), rel=1e-15)
        assert m_over_s.ratio * s_over_m.ratio == pytest.approx(1.0, rel=1e-14)
    _, s_over_m = verify.check_bdg(Martingale.constant(S2, 1.0), 2)
    assert s_over_m.ratio == 0 and math.isinf(verify.check_bdg(Martingale.constant(S2, 1.0), 2)[0].ratio)


def test_weighted_bdg_examples():
    f = random_dyadic(6, 3)
    rep = verify.check_weighted_bdg(f, np.ones(f.space.n_leaves))
    assert rep.bound == pytest.approx(38.627, abs=1e-3) and rep.passed
    single = Martingale(S2, [[0], [2, -2]])
    np.testing.assert_array_equal(maximal_function(single), square_function(single))
    assert verify.check_weighted_bdg(single, [3.0, 0.5]).ratio <= 1.0


def test_chao_long_examples():
    f = random_dyadic(5, 4)
    const = Martingale.constant(f.space, 1.0)
    assert verify.check_chao_long_max(f, const, 2, 2).lhs == 0
    walk = rademacher_walk(6)
    rep = verify.check_chao_long_max(walk, walk, 2, 2)
    assert rep.r == 1.0 and math.isfinite(rep.ratio)
    g = random_dyadic(5, 5)
    base = verify.check_chao_long_max(f, g, 3, 1.5).ratio
    assert verify.check_chao_long_max(f.scaled(-2.5), g.scaled(0.75), 3, 1.5).ratio == pytest.approx(base, rel=1e-12)


def test_localized_examples():
    f = random_dyadic(5, 6)
    whole = StoppingSequence.constant(f.space, [0, 5])
    assert verify.check_vector_doob(f, whole, 2, 3).ratio <= 2.0
    rep = verify.check_localized_maximal(f, whole, 2)
    assert rep.lhs == pytest.approx(f.space.lp_norm(maximal_function(localize(f, whole, 1)), 2), rel=1e-14)
    rep = verify.check_localized_square(f, whole, 2)
    assert rep.lhs == pytest.approx(f.space.lp_norm(square_function(f), 2), rel=1e-14)
    full = StoppingSequence.constant(f.space, range(6))
    pieces = [square_function(localize(f, full, k)) ** 2 for k in range(1, 6)]
    np.testing.assert_allclose(sum(pieces), square_function(f) ** 2, rtol=1e-14)
    zero = Martingale.constant(f.space, 0.0)
    assert verify.check_vector_doob(zero, full, 2, 2).lhs == 0


def test_prop_l1_examples():
    f, g = random_dyadic(5, 7), random_dyadic(5, 8)
    const = Martingale.constant(f.space, 2.0)
    S = jump_stopping_times(f, g, 0.5).sequence(f.space)
    assert verify.check_prop_l1(f, const, S, 2, 2).lhs == 0
    assert math.isfinite(verify.check_prop_l1(f, g, S, 2, 2).ratio)
    from mpp.paraproduct import truncated_paraproduct
    whole = StoppingSequence.constant(f.space, [0, 5])
    want = f.space.lp_norm(truncated_paraproduct(f, g, 0, 5), 1)
    assert verify.check_prop_l1(f, g, whole, 2, 2).lhs == pytest.approx(want, rel=1e-14)


def test_theorem_checks():
    f = random_dyadic(5, 9)
    const = Martingale.constant(f.space, 1.0)
    assert verify.check_thm_variation(f, const, 2, 2, 1.5).lhs == 0
    assert verify.check_thm_jump(const, f, 2, 2, 0.5).lhs == 0
    for d in (2, 5, 8):
        walk = rademacher_walk(d)
        assert math.isfinite(verify.check_thm_variation(walk, walk, 2, 2, 1.5).ratio)
    g = random_dyadic(5, 10)
    for lam in (0.25, 1.0):
        jumps = verify.check_thm_jump(f, g, 2, 2, lam)
        from mpp.variation import ParaproductKernel, rho_variation, jump_count
        n = jump_count(ParaproductKernel(f, g), lam)
        v = rho_variation(ParaproductKernel(f, g), 1.5)
        assert np.all(n <= (v / lam) ** 1.5 * (1 + 1e-12))
        assert jumps.meta["max_jumps"] == n.max()


def test_rough_checks():
    f = random_dyadic(5, 11)
    zero = Martingale.constant(f.space, 0.0)
    assert verify.check_rough_variation(zero, zero, 2, 2.5).lhs == 0
    rep = verify.check_rough_variation(zero, f, 2, 2.5)
    from mpp.variation import ScalarKernel, rho_variation
    assert rep.lhs == pytest.approx(f.space.lp_norm(rho_variation(ScalarKernel(f), 2.5), 2), rel=1e-14)
    assert rep.note == ""
    assert verify.check_rough_variation(f, f, 2, 1.5).note
    assert math.isfinite(verify.check_rough_jump(f, rademacher_walk(5), 2, 0.5).ratio)


def test_run_suite_covers_every_id():
    f, g = random_dyadic(4, 1), random_dyadic(4, 2)
    S = jump_stopping_times(f, g, 1.0).sequence(f.space)
    reports = verify.run_suite(f, g, np.ones(16), S, p=2, q=2, rho=1.5, lam=1.0, depth=4, seed=1, generator="random")
    assert [r.inequality_id for r in reports] == list(verify.CHECK_IDS)
    assert all(r.depth == 4 and r.seed == 1 for r in reports)


@given(st.integers(0, 2 ** 32 - 1), st.sampled_from([1.5, 2.0, 3.0, np.inf]))
@example(seed=5311, p=1.5)  # one-leaf space: f_0 must be exactly zero
def test_sharp_constants_hold(seed, p):
    rng = np.random.default_rng(seed)
    space = random_space(int(rng.integers(1, 8)), int(rng.integers(1, 40)), rng)
    f = random_martingale(space, rng, heavy=True)
    w = random_weight(space, rng)
    assert verify.check_doob(f, p).passed
    assert verify.check_weighted_doob(f, w, p).passed
    assert verify.check_weighted_bdg(f, w).passed


@given(st.integers(0, 2 ** 32 - 1))
def test_localized_square_pathwise(seed):
    rng = np.random.default_rng(seed)
    space = random_space(int(rng.integers(1, 8)), int(rng.integers(1, 30)), rng)
    f = random_martingale(space, rng, centered=False)
    S = random_stopping_sequence(space, int(rng.integers(1, 5)), rng)
    assert verify.localized_square_pathwise(f, S)
    assert verify.check_localized_square(f, S, 2).passed
