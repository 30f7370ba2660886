"""Benchmark the hot kernels: numba-compiled vs pure-numpy fallback.

Usage:
    python benchmarks/bench_kernels.py

The compiled path is whatever the current environment selects (numba unless
ROTORLLC_DISABLE_NUMBA=1); the fallback is the same function's .py_func.
"""

import time

import numpy as np

from rotorllc import kernels, plant
from rotorllc.accel import NUMBA_ENABLED


def timeit(fn, *args, repeat=20, number=5):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        for _ in range(number):
            fn(*args)
        best = min(best, (time.perf_counter() - t0) / number)
    return best


def bench_pair(name, fn, *args):
    fast = timeit(fn, *args)
    slow = timeit(fn.py_func, *args) if hasattr(fn, "py_func") else fast
    ratio = slow / fast if fast > 0 else float("nan")
    print(f"{name:18s} jit={fast*1e3:9.3f} ms   numpy={slow*1e3:9.3f} ms   speedup={ratio:6.1f}x")


def main():
    print(f"numba enabled: {NUMBA_ENABLED}")
    p = plant.default_params()
    kernels.warmup()

    # one second of plant integration at the trim-resolution step
    steps = 500
    u_seq = np.zeros((steps, 4))
    u_seq[:, 0] = 5.0
    x0 = np.zeros(10)
    bench_pair(
        "ltp_simulate",
        kernels.ltp_simulate,
        p.f_table, p.g_table, p.omega, 0.0, x0, 0.0, u_seq, 0.002,
    )

    traj = kernels.ltp_simulate(p.f_table, p.g_table, p.omega, 0.0, x0, 0.0, u_seq, 0.002)
    bench_pair(
        "ltp_outputs",
        kernels.ltp_outputs,
        p.p_table, p.r_table, p.bias_table, p.omega, traj, u_seq, 0.0, 0.002,
    )

    bench_pair("ltp_monodromy", kernels.ltp_monodromy, p.f_table, p.omega, 512)

    # the default-horizon limiter QP (49 vars, 40 equalities, 18 inequalities)
    from rotorllc import harmonic, llc, reduction

    lti = harmonic.assemble_lti(p.ltp_model(), 4, 0, 2)
    red = reduction.residualize(lti, reduction.default_partition(lti))
    tr = plant.trim_plant(p)
    cfg = llc.MpcConfig()
    ctrl = llc.LlcController.from_models(cfg, red, tr)
    x = np.zeros(10)
    x[4], x[8] = 5.0, 0.5
    prob = llc.build_qp(cfg, ctrl.dmodel, ctrl.lin, x, tr.u_trim + np.array([8.0, 0, 0, 0]), 350.0)
    bench_pair(
        "qp_ipm (mpc)",
        kernels.qp_ipm,
        prob.h, prob.g, prob.a_eq, prob.b_eq, prob.g_ineq, prob.h_ineq, 1e-8, 200,
    )


if __name__ == "__main__":
    main()
