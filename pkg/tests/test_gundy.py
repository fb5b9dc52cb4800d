import numpy as np
import pytest
from hypothesis import example, given
from hypothesis import strategies as st

from dataclasses import replace

from mpp.generators import random_dyadic, random_martingale, random_space
from mpp.gundy import GUNDY_IDS, gundy_decompose, gundy_identities_hold, gundy_report
from mpp.martingale import Martingale, is_martingale, martingale_lp_norm, maximal_function
from mpp.report import from_csv, from_json, to_csv, to_json
from mpp.space import FilteredSpace, SpaceError


def test_trivial_decomposition_when_alpha_dominates():
    g = random_dyadic(5, 4)
    alpha = float(maximal_function(g).max())
    parts = gundy_decompose(g, alpha)
    np.testing.assert_array_equal(parts.good.paths, g.paths)
    assert not np.any(parts.bad.paths) and not np.any(parts.harmless.paths)
    reports = gundy_report(g, alpha, parts)
    assert [r.inequality_id for r in reports] == list(GUNDY_IDS)
    assert all(r.passed and r.ratio <= 1 for r in reports)


def test_constant_martingale():
    g = Martingale.constant(FilteredSpace.dyadic(3), -0.5)
    parts = gundy_decompose(g, 1.0)
    assert np.all(parts.good.paths == -0.5)
    assert not np.any(parts.bad.paths) and not np.any(parts.harmless.paths)


def test_alpha_must_be_positive():
    with pytest.raises(SpaceError):
        gundy_decompose(random_dyadic(2, 0), 0.0)


def test_rerouted_initial_value():
    g = Martingale.from_terminal(FilteredSpace.dyadic(3), np.linspace(8.0, 12.0, 8))
    parts = gundy_decompose(g, 1.0)
    assert parts.rerouted
    assert gundy_identities_hold(g, parts)
    reports = gundy_report(g, 1.0, parts)
    assert all(r.passed for r in reports)
    assert all(r.note == "initial value rerouted" for r in reports)


def test_depth6_dyadic_at_l1_height():
    g = random_dyadic(6, 11)
    alpha = martingale_lp_norm(g, 1)
    parts = gundy_decompose(g, alpha)
    assert gundy_identities_hold(g, parts)
    assert all(r.passed for r in gundy_report(g, alpha, parts))


def test_corrupted_parts_fail_with_named_bound():
    g = random_dyadic(5, 2)
    alpha = martingale_lp_norm(g, 1)
    parts = gundy_decompose(g, alpha)
    bloated = replace(parts, good=parts.good.scaled(100.0))
    failed = [r.inequality_id for r in gundy_report(g, alpha, bloated) if not r.passed]
    assert "gundy_good_sup" in failed


def test_reports_round_trip():
    reports = gundy_report(random_dyadic(4, 3), 0.3, depth=4, seed=3, generator="random")
    assert from_csv(to_csv(reports)) == reports
    assert from_json(to_json(reports)) == reports


@given(st.integers(0, 2 ** 32 - 1), st.sampled_from([0.25, 1.0, 4.0]))
@example(seed=263505, mult=1.0)
def test_contract_on_random_spaces(seed, mult):
    rng = np.random.default_rng(seed)
    # two leaves at least, so a centered g is not identically zero and alpha > 0
    space = random_space(int(rng.integers(1, 9)), int(rng.integers(2, 40)), rng)
    g = random_martingale(space, rng, centered=bool(rng.integers(2)), heavy=True)
    alpha = mult * martingale_lp_norm(g, 1)
    parts = gundy_decompose(g, alpha)
    assert gundy_identities_hold(g, parts)
    for part in (parts.good, parts.bad, parts.harmless):
        assert is_martingale(part)[0]
    assert all(r.passed for r in gundy_report(g, alpha, parts))
    # bad part lives where the stopping time fired
    active = maximal_function(parts.bad) > 0
    assert np.all(parts.tau[active] <= space.depth)
