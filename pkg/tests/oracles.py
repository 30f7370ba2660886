"""Independent reference computations for cross-checking the implementation.

Everything here deliberately avoids the code paths it verifies: quadrature
instead of product-to-sum identities, exhaustive active-set enumeration
instead of interior-point iterations, time-marching instead of closed forms.
"""

import itertools

import numpy as np

from rotorllc import kernels


def basis_fn(kind, n, psi):
    if kind == "mean":
        return np.ones_like(psi)
    if kind == "cos":
        return np.cos(n * psi)
    return np.sin(n * psi)


def galerkin_quadrature_block(table, row_kind, row_n, col_kind, col_n, n_quad=4096):
    """Projection integral of basis_row * M(psi) * basis_col over a period.

    Mean rows use the 1/(2 pi) normalization, harmonic rows 1/pi; the uniform
    periodic grid makes the rectangle sum exact for trigonometric content
    below the grid Nyquist.
    """
    psi = np.arange(n_quad) * (2 * np.pi / n_quad)
    bi = basis_fn(row_kind, row_n, psi)
    bj = basis_fn(col_kind, col_n, psi)
    weight = (1.0 if row_kind == "mean" else 2.0) / n_quad
    acc = np.zeros(table.shape[1:])
    for k in range(n_quad):
        acc += bi[k] * bj[k] * kernels.eval_periodic(table, psi[k])
    return weight * acc


def blocks_up_to(order):
    out = [("mean", 0)]
    for n in range(1, order + 1):
        out.append(("cos", n))
        out.append(("sin", n))
    return out


def strip_kinematic_terms(a, n_base, order, omega):
    """Remove the +/- n*Omega cross blocks, leaving the pure projection."""
    a = a.copy()
    for h in range(1, order + 1):
        for j in range(n_base):
            a[(2 * h - 1) * n_base + j, 2 * h * n_base + j] += h * omega
            a[2 * h * n_base + j, (2 * h - 1) * n_base + j] -= h * omega
    return a


def assert_galerkin_match(lti, ltp, tol=1e-8, n_quad=4096):
    """Compare every block of A/B/C/D against the quadrature projection."""
    n, nu, ny = ltp.n_states, ltp.n_inputs, ltp.n_outputs
    sblocks = blocks_up_to(lti.n_state_harmonics)
    iblocks = blocks_up_to(lti.n_input_harmonics)
    oblocks = blocks_up_to(lti.n_output_harmonics)
    a_proj = strip_kinematic_terms(lti.a, n, lti.n_state_harmonics, ltp.omega)
    worst = 0.0
    for (ri, (rk, rn)) in enumerate(sblocks):
        for (ci, (ck, cn)) in enumerate(sblocks):
            blk = a_proj[ri * n : (ri + 1) * n, ci * n : (ci + 1) * n]
            ref = galerkin_quadrature_block(ltp.f_table, rk, rn, ck, cn, n_quad)
            worst = max(worst, float(np.max(np.abs(blk - ref))))
        for (ci, (ck, cn)) in enumerate(iblocks):
            blk = lti.b[ri * n : (ri + 1) * n, ci * nu : (ci + 1) * nu]
            ref = galerkin_quadrature_block(ltp.g_table, rk, rn, ck, cn, n_quad)
            worst = max(worst, float(np.max(np.abs(blk - ref))))
    for (ri, (rk, rn)) in enumerate(oblocks):
        for (ci, (ck, cn)) in enumerate(sblocks):
            blk = lti.c[ri * ny : (ri + 1) * ny, ci * n : (ci + 1) * n]
            ref = galerkin_quadrature_block(ltp.p_table, rk, rn, ck, cn, n_quad)
            worst = max(worst, float(np.max(np.abs(blk - ref))))
        for (ci, (ck, cn)) in enumerate(iblocks):
            blk = lti.d[ri * ny : (ri + 1) * ny, ci * nu : (ci + 1) * nu]
            ref = galerkin_quadrature_block(ltp.r_table, rk, rn, ck, cn, n_quad)
            worst = max(worst, float(np.max(np.abs(blk - ref))))
    assert worst < tol, f"assembly deviates from quadrature projection by {worst:.3e}"
    return worst


def active_set_qp_oracle(h_mat, g_vec, a_eq, b_eq, g_ineq, h_ineq):
    """Global optimum by enumerating every inequality active set.

    Returns None when no candidate is feasible (infeasible problem).  Each
    candidate KKT system is verified by residual before acceptance, since a
    singular system can 'solve' to garbage.
    """
    n = h_mat.shape[0]
    m = g_ineq.shape[0]
    p = a_eq.shape[0]
    best, best_obj = None, np.inf
    for k in range(m + 1):
        for active in itertools.combinations(range(m), k):
            ga = g_ineq[list(active)]
            na = len(active)
            kkt = np.zeros((n + p + na, n + p + na))
            kkt[:n, :n] = h_mat
            kkt[:n, n : n + p] = a_eq.T
            kkt[n : n + p, :n] = a_eq
            kkt[:n, n + p :] = ga.T
            kkt[n + p :, :n] = ga
            rhs = np.concatenate([-g_vec, b_eq, h_ineq[list(active)]])
            try:
                sol = np.linalg.solve(kkt, rhs)
            except np.linalg.LinAlgError:
                continue
            if np.max(np.abs(kkt @ sol - rhs)) > 1e-8 * (1 + np.max(np.abs(rhs))):
                continue
            z = sol[:n]
            lam = sol[n + p :]
            if m and np.any(g_ineq @ z - h_ineq > 1e-8):
                continue
            if na and np.any(lam < -1e-8):
                continue
            obj = 0.5 * z @ h_mat @ z + g_vec @ z
            if obj < best_obj - 1e-12:
                best_obj, best = obj, z
    return best


def random_qp(rng, n_max=6, m_max=4, p_max=3):
    n = int(rng.integers(1, n_max + 1))
    m = int(rng.integers(0, m_max + 1))
    p = int(rng.integers(0, min(p_max, n - 1) + 1))
    mat = rng.standard_normal((n, n))
    h = mat @ mat.T + (0.1 + rng.random()) * np.eye(n)
    g = rng.standard_normal(n) * 2.0
    a_eq = rng.standard_normal((p, n))
    b_eq = rng.standard_normal(p)
    g_ineq = rng.standard_normal((m, n))
    h_ineq = rng.standard_normal(m) + 1.0
    return h, g, a_eq, b_eq, g_ineq, h_ineq
