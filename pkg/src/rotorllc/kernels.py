"""Hot numeric kernels.

Everything here is written in nopython-compatible numpy and compiled with
numba unless ROTORLLC_DISABLE_NUMBA=1 (see accel.py).  The un-jitted
functions are the pure-numpy fallback path; they compute the same thing with
the same operation order.

Conventions:
  * Periodic matrices M(psi) = M0 + sum_i [M_ic cos(i psi) + M_is sin(i psi)]
    are stored as a stacked table of shape (2*order+1, rows, cols) with layout
    [M0, M1c, M1s, M2c, M2s, ...].
  * Integration is fixed-step RK4 with zero-order-hold inputs.
"""

import numpy as np

from .accel import maybe_jit


@maybe_jit
def eval_periodic(table, psi):
    """Evaluate a stacked Fourier-coefficient matrix table at azimuth psi."""
    out = table[0].copy()
    order = (table.shape[0] - 1) // 2
    for i in range(1, order + 1):
        c = np.cos(i * psi)
        s = np.sin(i * psi)
        out += table[2 * i - 1] * c + table[2 * i] * s
    return out


@maybe_jit
def fourier_basis(order, psi):
    """Basis vector [1, cos psi, sin psi, cos 2psi, ...] of length 2*order+1."""
    out = np.empty(2 * order + 1)
    out[0] = 1.0
    for i in range(1, order + 1):
        out[2 * i - 1] = np.cos(i * psi)
        out[2 * i] = np.sin(i * psi)
    return out


@maybe_jit
def _ltp_rhs(tab_f, tab_g, nl_gain, x, u, psi):
    fmat = eval_periodic(tab_f, psi)
    gmat = eval_periodic(tab_g, psi)
    dx = fmat @ x + gmat @ u
    if nl_gain != 0.0:
        n = x.shape[0]
        for i in range(n):
            dx[i] += nl_gain * x[i] * x[(i + 1) % n]
    return dx


@maybe_jit
def ltp_simulate(tab_f, tab_g, omega, nl_gain, x0, psi0, u_seq, dt):
    """RK4-integrate dx/dt = F(psi)x + G(psi)u + nl_gain*q(x) over len(u_seq) steps.

    u_seq has shape (n_steps, n_u); u_seq[k] is held over step k (ZOH).
    Returns the state trajectory of shape (n_steps+1, n_x).
    """
    n_steps = u_seq.shape[0]
    n = x0.shape[0]
    traj = np.empty((n_steps + 1, n))
    traj[0] = x0
    x = x0.copy()
    half = 0.5 * dt
    dpsi_half = omega * half
    for k in range(n_steps):
        psi = psi0 + omega * dt * k
        u = u_seq[k]
        k1 = _ltp_rhs(tab_f, tab_g, nl_gain, x, u, psi)
        k2 = _ltp_rhs(tab_f, tab_g, nl_gain, x + half * k1, u, psi + dpsi_half)
        k3 = _ltp_rhs(tab_f, tab_g, nl_gain, x + half * k2, u, psi + dpsi_half)
        k4 = _ltp_rhs(tab_f, tab_g, nl_gain, x + dt * k3, u, psi + 2.0 * dpsi_half)
        x = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        traj[k + 1] = x
    return traj


@maybe_jit
def ltp_outputs(tab_p, tab_r, bias_tab, omega, traj, u_seq, psi0, dt):
    """Output trajectory y_k = P(psi_k) x_k + R(psi_k) u_k + bias(psi_k).

    bias_tab has shape (n_y, 2*order_b+1): per-output Fourier coefficients of
    the built-in trim output.  u at the final sample holds the last input.
    """
    n_samp = traj.shape[0]
    n_y = tab_p.shape[1]
    order_b = (bias_tab.shape[1] - 1) // 2
    y = np.empty((n_samp, n_y))
    for k in range(n_samp):
        psi = psi0 + omega * dt * k
        ku = k if k < u_seq.shape[0] else u_seq.shape[0] - 1
        pmat = eval_periodic(tab_p, psi)
        rmat = eval_periodic(tab_r, psi)
        yk = pmat @ traj[k] + rmat @ u_seq[ku]
        basis = fourier_basis(order_b, psi)
        for j in range(n_y):
            yk[j] += bias_tab[j] @ basis
        y[k] = yk
    return y


@maybe_jit
def ltp_monodromy(tab_f, omega, n_steps):
    """One-period state-transition matrix of dx/dt = F(psi)x via RK4."""
    n = tab_f.shape[1]
    phi = np.eye(n)
    period = 2.0 * np.pi / omega
    dt = period / n_steps
    half = 0.5 * dt
    dpsi_half = omega * half
    for k in range(n_steps):
        psi = omega * dt * k
        k1 = eval_periodic(tab_f, psi) @ phi
        k2 = eval_periodic(tab_f, psi + dpsi_half) @ (phi + half * k1)
        k3 = eval_periodic(tab_f, psi + dpsi_half) @ (phi + half * k2)
        k4 = eval_periodic(tab_f, psi + 2.0 * dpsi_half) @ (phi + dt * k3)
        phi = phi + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return phi


@maybe_jit
def lti_simulate(a, b, x0, u_seq, dt):
    """RK4-integrate dx/dt = A x + B u with ZOH inputs; returns (n_steps+1, n)."""
    n_steps = u_seq.shape[0]
    n = x0.shape[0]
    traj = np.empty((n_steps + 1, n))
    traj[0] = x0
    x = x0.copy()
    half = 0.5 * dt
    for k in range(n_steps):
        bu = b @ u_seq[k]
        k1 = a @ x + bu
        k2 = a @ (x + half * k1) + bu
        k3 = a @ (x + half * k2) + bu
        k4 = a @ (x + dt * k3) + bu
        x = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        traj[k + 1] = x
    return traj


# --- dense convex QP: primal-dual interior point -------------------------
#
# minimize 1/2 z'Hz + g'z  subject to  A z = b,  G z <= h
#
# Equalities are eliminated first through an SVD null-space reduction (the
# equality manifold is affine, so the remaining problem is inequality-only in
# the null coordinates); a Mehrotra predictor-corrector handles the reduced
# problem.  Deterministic: fixed iteration schedule, no pivot randomization.
# Status codes: 0 = optimal, 1 = max_iter, 2 = infeasible.

QP_OPTIMAL = 0
QP_MAX_ITER = 1
QP_INFEASIBLE = 2


@maybe_jit
def _kkt_residual(h_mat, g_vec, a_mat, b_vec, g_ineq, h_ineq, z, lam, nu):
    """max of stationarity / primal / dual / complementarity infinity norms."""
    stat = h_mat @ z + g_vec
    if a_mat.shape[0] > 0:
        stat += a_mat.T @ nu
    if g_ineq.shape[0] > 0:
        stat += g_ineq.T @ lam
    r = np.max(np.abs(stat))
    if a_mat.shape[0] > 0:
        r = max(r, np.max(np.abs(a_mat @ z - b_vec)))
    if g_ineq.shape[0] > 0:
        slack = h_ineq - g_ineq @ z
        for i in range(slack.shape[0]):
            if -slack[i] > r:
                r = -slack[i]
            if -lam[i] > r:
                r = -lam[i]
            c = abs(lam[i] * slack[i])
            if c > r:
                r = c
    return r


@maybe_jit
def _ipm_ineq(h_mat, g_vec, g_ineq, h_ineq, tol, max_iter):
    """Inequality-only strictly convex QP.  Returns (z, lam, status, iters)."""
    n = h_mat.shape[0]
    m = g_ineq.shape[0]
    if m == 0:
        z = np.linalg.solve(h_mat, -g_vec)
        return z, np.zeros(0), QP_OPTIMAL, 1

    z = np.zeros(n)
    lam = np.ones(m)
    s = np.empty(m)
    r0 = g_ineq @ z - h_ineq
    for i in range(m):
        s[i] = max(1.0, 1.5 * abs(r0[i]))

    iters = 0
    tau = 0.995
    for it in range(max_iter):
        iters = it + 1
        r_d = h_mat @ z + g_vec + g_ineq.T @ lam
        r_g = g_ineq @ z + s - h_ineq
        mu = lam @ s / m

        conv = max(np.max(np.abs(r_d)), np.max(np.abs(r_g)), np.max(lam * s))
        # Converge well past tol: near-degenerate actives trade complementarity
        # against solution displacement, so a small surplus buys z-accuracy.
        if conv <= max(tol * 1e-3, 1e-13):
            return z, lam, QP_OPTIMAL, iters
        # Complementarity far below need: the other residuals sit at their
        # floating-point floor and further centering only degrades the KKT
        # system conditioning.
        if mu <= max(tol * 1e-4, 1e-15):
            break

        w = lam / s
        diverged = False
        for i in range(m):
            if not np.isfinite(w[i]) or w[i] > 1e25:
                diverged = True
                break
        if diverged:
            break
        gw = g_ineq * w.reshape((m, 1))
        kkt = h_mat + g_ineq.T @ gw

        # Affine (predictor) direction.
        rs_aff = lam * s
        rhs = -r_d + g_ineq.T @ ((rs_aff - lam * r_g) / s)
        dz_a = np.linalg.solve(kkt, rhs)
        ds_a = -r_g - g_ineq @ dz_a
        dlam_a = -(rs_aff + lam * ds_a) / s

        alpha_p = 1.0
        alpha_d = 1.0
        for i in range(m):
            if ds_a[i] < 0.0:
                alpha_p = min(alpha_p, -s[i] / ds_a[i])
            if dlam_a[i] < 0.0:
                alpha_d = min(alpha_d, -lam[i] / dlam_a[i])
        mu_aff = ((lam + alpha_d * dlam_a) @ (s + alpha_p * ds_a)) / m
        sigma = (mu_aff / mu) ** 3 if mu > 0.0 else 0.0

        # Corrector.
        rs_cor = lam * s + dlam_a * ds_a - sigma * mu
        rhs = -r_d + g_ineq.T @ ((rs_cor - lam * r_g) / s)
        dz = np.linalg.solve(kkt, rhs)
        ds = -r_g - g_ineq @ dz
        dlam = -(rs_cor + lam * ds) / s

        alpha_p = 1.0
        alpha_d = 1.0
        for i in range(m):
            if ds[i] < 0.0:
                alpha_p = min(alpha_p, -tau * s[i] / ds[i])
            if dlam[i] < 0.0:
                alpha_d = min(alpha_d, -tau * lam[i] / dlam[i])

        if alpha_p < 1e-12 and alpha_d < 1e-12:
            break

        z = z + alpha_p * dz
        s = s + alpha_p * ds
        lam = lam + alpha_d * dlam

    viol = 0.0
    gz = g_ineq @ z - h_ineq
    for i in range(m):
        if gz[i] > viol:
            viol = gz[i]
    scale = 1.0 + np.max(np.abs(h_ineq))
    status = QP_INFEASIBLE if viol > 1e-6 * scale else QP_MAX_ITER
    return z, lam, status, iters


@maybe_jit
def qp_ipm(h_mat, g_vec, a_mat, b_vec, g_ineq, h_ineq, tol, max_iter):
    """Solve the QP above.  Returns (z, lam, nu, status, iters, kkt_residual)."""
    n = h_mat.shape[0]
    p = a_mat.shape[0]
    m = g_ineq.shape[0]

    if p == 0:
        z, lam, status, iters = _ipm_ineq(h_mat, g_vec, g_ineq, h_ineq, tol, max_iter)
        nu = np.zeros(0)
        res = _kkt_residual(h_mat, g_vec, a_mat, b_vec, g_ineq, h_ineq, z, lam, nu)
        if status != QP_INFEASIBLE:
            status = QP_OPTIMAL if res <= tol else QP_MAX_ITER
        return z, lam, nu, status, iters, res

    # Null-space reduction of the equalities: z = z_p + Z y with A z_p = b
    # and the columns of Z spanning null(A).
    u_svd, sig, vt = np.linalg.svd(a_mat)
    smax = sig[0] if sig.shape[0] > 0 else 0.0
    rank = 0
    for i in range(sig.shape[0]):
        if sig[i] > max(1e-13, 1e-12 * smax):
            rank += 1
    z_p = np.ascontiguousarray(vt[:rank].T) @ ((np.ascontiguousarray(u_svd[:, :rank]).T @ b_vec) / sig[:rank])

    eq_res = np.max(np.abs(a_mat @ z_p - b_vec))
    if eq_res > 1e-8 * (1.0 + np.max(np.abs(b_vec))):
        lam = np.zeros(m)
        nu = np.zeros(p)
        res = _kkt_residual(h_mat, g_vec, a_mat, b_vec, g_ineq, h_ineq, z_p, lam, nu)
        return z_p, lam, nu, QP_INFEASIBLE, 0, res

    d = n - rank
    iters = 0
    if d == 0:
        z = z_p
        lam = np.zeros(m)
        status = QP_OPTIMAL
        if m > 0:
            viol = np.max(g_ineq @ z - h_ineq)
            if viol > 1e-6 * (1.0 + np.max(np.abs(h_ineq))):
                status = QP_INFEASIBLE
    else:
        z_basis = np.ascontiguousarray(vt[rank:].T)  # (n, d)
        h_red = z_basis.T @ h_mat @ z_basis
        h_red = 0.5 * (h_red + h_red.T)
        g_red = z_basis.T @ (g_vec + h_mat @ z_p)
        if m > 0:
            gi_red = np.ascontiguousarray(g_ineq @ z_basis)
            hi_red = h_ineq - g_ineq @ z_p
        else:
            gi_red = np.zeros((0, d))
            hi_red = np.zeros(0)
        y, lam, status, iters = _ipm_ineq(h_red, g_red, gi_red, hi_red, tol, max_iter)
        z = z_p + z_basis @ y

    # Recover the equality multipliers by least squares on stationarity.
    resid = h_mat @ z + g_vec
    if m > 0:
        resid = resid + g_ineq.T @ lam
    nu = -(np.ascontiguousarray(u_svd[:, :rank]) @ ((np.ascontiguousarray(vt[:rank]) @ resid) / sig[:rank]))

    res = _kkt_residual(h_mat, g_vec, a_mat, b_vec, g_ineq, h_ineq, z, lam, nu)
    if status != QP_INFEASIBLE:
        status = QP_OPTIMAL if res <= tol else QP_MAX_ITER
    return z, lam, nu, status, iters, res


def warmup():
    """Trigger JIT compilation of every kernel (no-op on the fallback path)."""
    tab = np.zeros((3, 2, 2))
    tab[0] = -np.eye(2)
    tab_g = np.zeros((3, 2, 1))
    tab_g[0, 0, 0] = 1.0
    u = np.zeros((2, 1))
    traj = ltp_simulate(tab, tab_g, 1.0, 0.0, np.zeros(2), 0.0, u, 0.01)
    bias = np.zeros((1, 3))
    ltp_outputs(np.zeros((3, 1, 2)), np.zeros((3, 1, 1)), bias, 1.0, traj, u, 0.0, 0.01)
    ltp_monodromy(tab, 1.0, 8)
    lti_simulate(-np.eye(2), np.ones((2, 1)), np.zeros(2), u, 0.01)
    eval_periodic(tab, 0.3)
    fourier_basis(2, 0.3)
    qp_ipm(
        np.eye(2),
        np.zeros(2),
        np.ones((1, 2)),
        np.ones(1),
        -np.eye(2),
        np.zeros(2),
        1e-8,
        50,
    )
