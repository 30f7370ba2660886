"""Dense strictly convex QP interface over the interior-point kernel.

    minimize    1/2 z'Hz + g'z
    subject to  A_eq z = b_eq,   G z <= h

Deterministic for fixed inputs: fixed iteration schedule, no randomized
pivoting.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels

STATUS_NAMES = {
    kernels.QP_OPTIMAL: "optimal",
    kernels.QP_MAX_ITER: "max_iter",
    kernels.QP_INFEASIBLE: "infeasible",
}


@dataclass(frozen=True)
class QpResult:
    z: np.ndarray
    lam: np.ndarray
    nu: np.ndarray
    status: str
    iterations: int
    kkt_residual: float

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"


def solve_dense_qp(
    h_mat,
    g_vec,
    a_eq=None,
    b_eq=None,
    g_ineq=None,
    h_ineq=None,
    tol: float = 1e-8,
    max_iter: int = 200,
) -> QpResult:
    h_mat = np.ascontiguousarray(h_mat, dtype=float)
    g_vec = np.ascontiguousarray(g_vec, dtype=float)
    n = h_mat.shape[0]
    if h_mat.shape != (n, n) or g_vec.shape != (n,):
        raise ValueError("H must be (n,n) and g (n,)")
    a_eq = np.zeros((0, n)) if a_eq is None else np.ascontiguousarray(a_eq, dtype=float)
    b_eq = np.zeros(0) if b_eq is None else np.ascontiguousarray(b_eq, dtype=float)
    g_ineq = np.zeros((0, n)) if g_ineq is None else np.ascontiguousarray(g_ineq, dtype=float)
    h_ineq = np.zeros(0) if h_ineq is None else np.ascontiguousarray(h_ineq, dtype=float)
    if a_eq.shape[0] != b_eq.shape[0] or (a_eq.size and a_eq.shape[1] != n):
        raise ValueError("equality constraint dimensions inconsistent")
    if g_ineq.shape[0] != h_ineq.shape[0] or (g_ineq.size and g_ineq.shape[1] != n):
        raise ValueError("inequality constraint dimensions inconsistent")

    z, lam, nu, status, iters, kkt = kernels.qp_ipm(
        h_mat, g_vec, a_eq, b_eq, g_ineq, h_ineq, tol, max_iter
    )
    return QpResult(
        z=z,
        lam=lam,
        nu=nu,
        status=STATUS_NAMES[int(status)],
        iterations=int(iters),
        kkt_residual=float(kkt),
    )
