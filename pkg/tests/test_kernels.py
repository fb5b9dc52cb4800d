import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mpp import kernels
from mpp.generators import random_martingale, random_space
from mpp.paraproduct import paraproduct
from mpp.variation import ParaproductKernel

pytestmark = pytest.mark.skipif(kernels.numba_impl is None, reason="numba unavailable")


def _inputs(seed):
    rng = np.random.default_rng(seed)
    space = random_space(int(rng.integers(1, 9)), int(rng.integers(1, 30)), rng)
    f, g = random_martingale(space, rng), random_martingale(space, rng)
    return rng, f, g, ParaproductKernel(f, g).abs_matrix()


@given(st.integers(0, 2 ** 32 - 1))
def test_backends_agree(seed):
    rng, f, g, absinc = _inputs(seed)
    nb, np_ = kernels.numba_impl, kernels.numpy_impl
    rho = float(rng.uniform(0.5, 4.0))
    lam = float(rng.uniform(0.01, 1.0))
    np.testing.assert_allclose(nb.variation_dp(absinc, rho), np_.variation_dp(absinc, rho), rtol=1e-13, atol=0)
    np.testing.assert_array_equal(nb.jump_dp(absinc, lam), np_.jump_dp(absinc, lam))
    np.testing.assert_allclose(nb.brute_variation(absinc, rho), np_.brute_variation(absinc, rho), rtol=1e-13, atol=0)
    np.testing.assert_array_equal(nb.brute_jump(absinc, lam), np_.brute_jump(absinc, lam))
    args = [np.ascontiguousarray(p.paths.T) for p in (f, g, paraproduct(f, g))]
    np.testing.assert_array_equal(nb.jump_stopping(*args, lam), np_.jump_stopping(*args, lam))


@pytest.mark.parametrize("flag, want", [("1", "numpy"), ("0", "numba"), ("", "numba")])
def test_environment_flag_selects_backend(flag, want):
    env = {**os.environ, "MPP_DISABLE_JIT": flag}
    out = subprocess.run(
        [sys.executable, "-c", "from mpp import kernels; print(kernels.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == want
