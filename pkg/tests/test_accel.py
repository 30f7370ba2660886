"""The numpy fallback path computes the same thing as the compiled path."""

import numpy as np
import pytest

from rotorllc import kernels, plant
from rotorllc.accel import NUMBA_ENABLED

needs_numba = pytest.mark.skipif(
    not NUMBA_ENABLED, reason="fallback already active; nothing to compare"
)


def fallback(fn):
    return fn.py_func if hasattr(fn, "py_func") else fn


@needs_numba
class TestFallbackParity:
    def test_eval_periodic(self, default_params):
        for psi in (0.0, 0.9, 4.1):
            a = kernels.eval_periodic(default_params.f_table, psi)
            b = fallback(kernels.eval_periodic)(default_params.f_table, psi)
            np.testing.assert_allclose(a, b, rtol=1e-14, atol=0)

    def test_ltp_simulate(self, default_params):
        rng = np.random.default_rng(8)
        u = rng.uniform(-5, 5, size=(100, 4))
        args = (default_params.f_table, default_params.g_table, 27.0, 0.0,
                np.zeros(10), 0.0, u, 0.005)
        np.testing.assert_allclose(
            kernels.ltp_simulate(*args), fallback(kernels.ltp_simulate)(*args),
            rtol=1e-13, atol=1e-13,
        )

    def test_monodromy(self, default_params):
        a = kernels.ltp_monodromy(default_params.f_table, 27.0, 256)
        b = fallback(kernels.ltp_monodromy)(default_params.f_table, 27.0, 256)
        np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-14)

    def test_qp_ipm(self):
        h = np.array([[2.0, 0.2], [0.2, 1.0]])
        g = np.array([-1.0, 0.5])
        a_eq = np.array([[1.0, 1.0]])
        b_eq = np.array([0.5])
        gi = np.array([[1.0, 0.0], [-1.0, 0.0]])
        hi = np.array([2.0, 2.0])
        fast = kernels.qp_ipm(h, g, a_eq, b_eq, gi, hi, 1e-8, 100)
        slow = fallback(kernels.qp_ipm)(h, g, a_eq, b_eq, gi, hi, 1e-8, 100)
        np.testing.assert_allclose(fast[0], slow[0], atol=1e-10)
        assert fast[3] == slow[3]  # status agrees
