"""Load limiting core: load-constraint linearization, ZOH discretization,
direct-transcription QP, extremal control, control margin, command clamping.

Perturbation bookkeeping: the on-board reduced model works in deviations from
trim for states, controls, and load harmonics.  Conversion to absolute
controls happens only at the control bound rows (via the stored trim control)
and when reporting extremal controls.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .harmonic import COS, SIN, HarmonicIndex
from .plant import TrimSolution
from .qp import QpResult, solve_dense_qp
from .reduction import ReducedLti


class LlcError(ValueError):
    pass


class DegenerateLoadError(LlcError):
    """Trim 1/rev vector is zero: the linearization direction is undefined."""


@dataclass(frozen=True)
class MpcConfig:
    """Receding-horizon limit-detection configuration."""

    tp: float = 0.0065  # prediction horizon, s
    dt_mpc: float | None = None  # transcription step, s (None -> tp/4)
    q_weight: float = 1.0  # scalar load-error weight
    r_weight: float = 0.01  # control-activity weight per controlled axis
    y_max: float = 350.0  # load limit, lbs
    u_min: float = 0.0  # absolute control bounds, %
    u_max: float = 100.0
    controlled_axes: tuple = (0,)  # input indices the limiter may restrict
    soft_load: bool = True  # soft limit with exact-penalty slack
    slack_penalty: float = 1e6
    slack_quad: float = 1.0
    hessian_reg: float = 1e-9
    solver_tol: float = 1e-8
    solver_max_iter: int = 200

    def __post_init__(self):
        if self.tp <= 0:
            raise LlcError("prediction horizon must be positive")
        if self.dt_mpc is not None:
            steps = self.tp / self.dt_mpc
            if abs(steps - round(steps)) > 1e-9 or round(steps) < 1:
                raise LlcError("dt_mpc must divide tp into >= 1 integer steps")
        if self.q_weight <= 0 or self.r_weight <= 0:
            raise LlcError("Q and R weights must be strictly positive")
        if self.u_min >= self.u_max:
            raise LlcError("u_min must be below u_max")
        if not self.controlled_axes:
            raise LlcError("need at least one controlled axis")

    @property
    def step(self) -> float:
        return self.tp / 4.0 if self.dt_mpc is None else self.dt_mpc

    @property
    def horizon(self) -> int:
        return int(round(self.tp / self.step))

    @classmethod
    def from_json(cls, doc: dict) -> "MpcConfig":
        known = {f for f in cls.__dataclass_fields__}
        kw = {k: v for k, v in doc.items() if k in known}
        if "controlled_axes" in kw:
            kw["controlled_axes"] = tuple(kw["controlled_axes"])
        return cls(**kw)


@dataclass(frozen=True)
class LoadLinearization:
    """First-order model of the 1/rev load magnitude about trim.

    ||y_1rev|| ~= a + b*dy_1c + c*dy_1s with (b, c) the unit vector along the
    trim 1/rev components and a their magnitude.
    """

    a: float
    b: float
    c: float
    trim_1c: float
    trim_1s: float

    def __post_init__(self):
        if abs(self.b**2 + self.c**2 - 1.0) > 1e-12:
            raise LlcError("(b, c) must be a unit vector")
        if self.a < 0:
            raise LlcError("a must be non-negative")

    def total(self, dy_1c, dy_1s):
        return self.a + self.b * np.asarray(dy_1c) + self.c * np.asarray(dy_1s)


def linearize_load(trim: TrimSolution) -> LoadLinearization:
    """Linearize the 1/rev load magnitude about the trim harmonics."""
    t1c, t1s = trim.load_1rev_components()
    mag = float(np.hypot(t1c, t1s))
    if mag == 0.0:
        raise DegenerateLoadError("trim 1/rev load vector is zero; direction undefined")
    return LoadLinearization(a=mag, b=t1c / mag, c=t1s / mag, trim_1c=t1c, trim_1s=t1s)


@dataclass(frozen=True)
class DiscreteReduced:
    """Exact ZOH discretization of a reduced model (C, D pass through)."""

    a_d: np.ndarray
    b_d: np.ndarray
    c: np.ndarray
    d: np.ndarray
    dt: float
    u_trim: np.ndarray
    output_index: HarmonicIndex
    input_index: HarmonicIndex

    @property
    def n_states(self) -> int:
        return self.a_d.shape[0]

    @property
    def n_inputs(self) -> int:
        return self.b_d.shape[1]


def discretize(model: ReducedLti, dt: float, u_trim=None) -> DiscreteReduced:
    """Zero-order-hold discretization via the augmented matrix exponential."""
    if dt <= 0:
        raise LlcError("dt must be positive")
    n, m = model.a_hat.shape[0], model.b_hat.shape[1]
    aug = np.zeros((n + m, n + m))
    aug[:n, :n] = model.a_hat * dt
    aug[:n, n:] = model.b_hat * dt
    phi = scipy.linalg.expm(aug)
    u_trim = np.zeros(m) if u_trim is None else np.asarray(u_trim, dtype=float)
    return DiscreteReduced(
        a_d=phi[:n, :n],
        b_d=phi[:n, n:],
        c=model.c_hat.copy(),
        d=model.d_hat.copy(),
        dt=dt,
        u_trim=u_trim,
        output_index=model.output_index,
        input_index=model.input_index,
    )


@dataclass(frozen=True)
class MpcProblem:
    """Assembled direct-transcription QP.

    Decision layout: [U(k)..U(k+T-1), X_s(k+1)..X_s(k+T)] plus one
    nonnegative load slack per horizon sample in soft mode.
    """

    h: np.ndarray
    g: np.ndarray
    a_eq: np.ndarray
    b_eq: np.ndarray
    g_ineq: np.ndarray
    h_ineq: np.ndarray
    horizon: int
    n_ctrl: int
    n_states: int
    n_slack: int
    controlled_axes: tuple
    u_trim: np.ndarray
    u_pilot_prev: np.ndarray
    y_max: float
    load_rows: np.ndarray  # (T+1, nz) affine load maps
    load_consts: np.ndarray  # (T+1,)
    load_dir: np.ndarray  # sign of first-step load sensitivity per ctrl axis
    x_now: np.ndarray

    @property
    def n_decision(self) -> int:
        return self.h.shape[0]


@dataclass(frozen=True)
class MpcSolution:
    """Extremal-control solution of one receding-horizon solve."""

    u_traj: np.ndarray  # (T, n_inputs) absolute controls, %
    x_traj: np.ndarray  # (T+1, n_states) predicted slow states
    y_pred: np.ndarray  # (T+1,) predicted total 1/rev load, lbs
    u_ext: np.ndarray  # (n_ctrl,) absolute extremal control at first step, %
    kkt_residual: float
    status: str
    iterations: int
    load_dir: np.ndarray
    controlled_axes: tuple
    u_pilot_prev: np.ndarray

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"


@dataclass(frozen=True)
class ControlMargin:
    """cm = u_ext - u_pilot(k-1), per controlled axis, % stick."""

    cm: np.ndarray
    u_ext: np.ndarray
    u_pilot_prev: np.ndarray
    valid: bool = True


def _load_output_rows(index: HarmonicIndex):
    label = index.labels[0]
    try:
        return index.row(label, 1, COS), index.row(label, 1, SIN)
    except KeyError:
        raise LlcError(
            "reduced model lacks 1/rev output rows; assemble with n_output >= 1"
        ) from None


def build_qp(
    cfg: MpcConfig,
    dmodel: DiscreteReduced,
    lin: LoadLinearization,
    x_now,
    u_pilot_prev,
    y_max_now: float | None = None,
) -> MpcProblem:
    """Assemble the horizon QP about the current measured slow state.

    u_pilot_prev is the previous commanded control, absolute %.  Fixed
    (uncontrolled) axes are held at their previous values over the horizon;
    the terminal sample holds the last decision control (ZOH semantics).
    """
    y_max = cfg.y_max if y_max_now is None else float(y_max_now)
    if not np.isfinite(y_max):
        raise LlcError("y_max must be finite; bypass the limiter for an infinite limit")
    if abs(dmodel.dt - cfg.step) > 1e-12 * max(1.0, cfg.step):
        raise LlcError(f"model discretized at {dmodel.dt}, config step is {cfg.step}")

    x_now = np.asarray(x_now, dtype=float)
    u_prev_abs = np.asarray(u_pilot_prev, dtype=float)
    nx, nu = dmodel.n_states, dmodel.n_inputs
    if x_now.shape != (nx,) or u_prev_abs.shape != (nu,):
        raise LlcError("state/control dimensions inconsistent with the model")

    t_h = cfg.horizon
    ca = np.asarray(cfg.controlled_axes, dtype=int)
    fa = np.setdiff1d(np.arange(nu), ca)
    nc = ca.shape[0]

    r1c, r1s = _load_output_rows(dmodel.output_index)
    w = lin.b * dmodel.c[r1c] + lin.c * dmodel.c[r1s]  # (nx,)
    d_vec = lin.b * dmodel.d[r1c] + lin.c * dmodel.d[r1s]  # (nu,)

    u_prev_pert = u_prev_abs - dmodel.u_trim
    uf = u_prev_pert[fa]
    up_c = u_prev_pert[ca]

    b_c = dmodel.b_d[:, ca]
    b_f = dmodel.b_d[:, fa]
    d_c = d_vec[ca]
    d_f = float(d_vec[fa] @ uf) if fa.size else 0.0

    n_slack = t_h + 1 if cfg.soft_load else 0
    nz = t_h * nc + t_h * nx + n_slack

    def u_off(i):
        return i * nc

    def x_off(i):  # i in 1..T
        return t_h * nc + (i - 1) * nx

    s_base = t_h * nc + t_h * nx

    # Affine load maps y_hat(i) = row_i . z + const_i, i = 0..T.
    load_rows = np.zeros((t_h + 1, nz))
    load_consts = np.empty(t_h + 1)
    base = lin.a + d_f
    for i in range(t_h + 1):
        if i == 0:
            load_consts[i] = base + float(w @ x_now)
            load_rows[i, u_off(0) : u_off(0) + nc] = d_c
        else:
            load_consts[i] = base
            load_rows[i, x_off(i) : x_off(i) + nx] = w
            ui = min(i, t_h - 1)
            load_rows[i, u_off(ui) : u_off(ui) + nc] += d_c

    # Cost 1/2 z'Hz + g'z.
    h = np.zeros((nz, nz))
    g = np.zeros(nz)
    two_q = 2.0 * cfg.q_weight
    for i in range(t_h + 1):
        v = load_rows[i]
        h += two_q * np.outer(v, v)
        g += two_q * (load_consts[i] - y_max) * v
    two_r = 2.0 * cfg.r_weight
    for i in range(t_h):
        mult = 2.0 if i == t_h - 1 else 1.0  # held terminal control counted once more
        for j in range(nc):
            h[u_off(i) + j, u_off(i) + j] += mult * two_r
        g[u_off(i) : u_off(i) + nc] += -mult * two_r * up_c
    if cfg.soft_load:
        for i in range(t_h + 1):
            h[s_base + i, s_base + i] += 2.0 * cfg.slack_quad
            g[s_base + i] += cfg.slack_penalty
    h[np.diag_indices(nz)] += 2.0 * cfg.hessian_reg

    # Dynamics equalities.
    a_eq = np.zeros((t_h * nx, nz))
    b_eq = np.empty(t_h * nx)
    for i in range(t_h):
        rows = slice(i * nx, (i + 1) * nx)
        a_eq[rows, x_off(i + 1) : x_off(i + 1) + nx] = np.eye(nx)
        a_eq[rows, u_off(i) : u_off(i) + nc] = -b_c
        rhs = b_f @ uf if fa.size else np.zeros(nx)
        if i == 0:
            rhs = rhs + dmodel.a_d @ x_now
        else:
            a_eq[rows, x_off(i) : x_off(i) + nx] = -dmodel.a_d
        b_eq[rows] = rhs

    # Inequalities: load rows, slack positivity, absolute control bounds.
    rows_g = []
    rows_h = []
    for i in range(t_h + 1):
        row = load_rows[i].copy()
        if cfg.soft_load:
            row[s_base + i] = -1.0
        rows_g.append(row)
        rows_h.append(y_max - load_consts[i])
    if cfg.soft_load:
        for i in range(t_h + 1):
            row = np.zeros(nz)
            row[s_base + i] = -1.0
            rows_g.append(row)
            rows_h.append(0.0)
    for i in range(t_h):
        for j in range(nc):
            axis = ca[j]
            row = np.zeros(nz)
            row[u_off(i) + j] = 1.0
            rows_g.append(row)
            rows_h.append(cfg.u_max - dmodel.u_trim[axis])
            row = np.zeros(nz)
            row[u_off(i) + j] = -1.0
            rows_g.append(row)
            rows_h.append(-(cfg.u_min - dmodel.u_trim[axis]))

    sens = d_c + w @ b_c
    load_dir = np.sign(np.where(np.abs(sens) < 1e-12, 0.0, sens))

    return MpcProblem(
        h=0.5 * (h + h.T),
        g=g,
        a_eq=a_eq,
        b_eq=b_eq,
        g_ineq=np.array(rows_g),
        h_ineq=np.array(rows_h),
        horizon=t_h,
        n_ctrl=nc,
        n_states=nx,
        n_slack=n_slack,
        controlled_axes=tuple(int(i) for i in ca),
        u_trim=dmodel.u_trim.copy(),
        u_pilot_prev=u_prev_abs.copy(),
        y_max=y_max,
        load_rows=load_rows,
        load_consts=load_consts,
        load_dir=load_dir,
        x_now=x_now.copy(),
    )


def solve_qp(problem: MpcProblem, tol: float = 1e-8, max_iter: int = 200) -> MpcSolution:
    """Solve the assembled QP and unpack trajectories and extremal control."""
    res: QpResult = solve_dense_qp(
        problem.h,
        problem.g,
        problem.a_eq,
        problem.b_eq,
        problem.g_ineq,
        problem.h_ineq,
        tol=tol,
        max_iter=max_iter,
    )
    t_h, nc, nx = problem.horizon, problem.n_ctrl, problem.n_states
    z = res.z
    ca = np.asarray(problem.controlled_axes, dtype=int)
    fa = np.setdiff1d(np.arange(problem.u_trim.shape[0]), ca)

    u_traj = np.tile(problem.u_pilot_prev, (t_h, 1))
    for i in range(t_h):
        u_traj[i, ca] = problem.u_trim[ca] + z[i * nc : (i + 1) * nc]
        if fa.size:
            u_traj[i, fa] = problem.u_pilot_prev[fa]

    x_traj = np.empty((t_h + 1, nx))
    x_traj[0] = problem.x_now
    for i in range(1, t_h + 1):
        off = t_h * nc + (i - 1) * nx
        x_traj[i] = z[off : off + nx]

    y_pred = problem.load_rows @ z + problem.load_consts
    u_ext = problem.u_trim[ca] + z[:nc]

    return MpcSolution(
        u_traj=u_traj,
        x_traj=x_traj,
        y_pred=y_pred,
        u_ext=u_ext,
        kkt_residual=res.kkt_residual,
        status=res.status,
        iterations=res.iterations,
        load_dir=problem.load_dir.copy(),
        controlled_axes=problem.controlled_axes,
        u_pilot_prev=problem.u_pilot_prev.copy(),
    )


def control_margin(sol: MpcSolution, u_pilot_prev) -> ControlMargin:
    """CM(k) = u_ext(k) - u_pilot(k-1) per controlled axis."""
    u_prev = np.asarray(u_pilot_prev, dtype=float)
    prev_ctrl = u_prev[np.asarray(sol.controlled_axes, dtype=int)]
    return ControlMargin(
        cm=sol.u_ext - prev_ctrl,
        u_ext=sol.u_ext.copy(),
        u_pilot_prev=prev_ctrl,
        valid=sol.status != "infeasible",
    )


def clamp_command(u_cmd, sol: MpcSolution | None):
    """Limit commanded controls so the load-increasing direction respects u_ext.

    Controlled axes are clamped toward the extremal control when the command
    exceeds it in the direction that raises the predicted load; uncontrolled
    axes and a disabled limiter (sol=None) pass through unchanged.
    """
    u = np.asarray(u_cmd, dtype=float).copy()
    if sol is None:
        return u
    for j, axis in enumerate(sol.controlled_axes):
        d = sol.load_dir[j]
        if d > 0:
            u[axis] = min(u[axis], sol.u_ext[j])
        elif d < 0:
            u[axis] = max(u[axis], sol.u_ext[j])
    return u


@dataclass
class LlcController:
    """Per-frame limit detection: wires trim data, model, and config together."""

    cfg: MpcConfig
    dmodel: DiscreteReduced
    lin: LoadLinearization

    @classmethod
    def from_models(cls, cfg: MpcConfig, reduced: ReducedLti, trim: TrimSolution) -> "LlcController":
        lin = linearize_load(trim)
        dmodel = discretize(reduced, cfg.step, u_trim=trim.u_trim)
        return cls(cfg=cfg, dmodel=dmodel, lin=lin)

    def step(self, x_now, u_pilot_prev, y_max=None):
        problem = build_qp(self.cfg, self.dmodel, self.lin, x_now, u_pilot_prev, y_max)
        sol = solve_qp(problem, tol=self.cfg.solver_tol, max_iter=self.cfg.solver_max_iter)
        return sol, control_margin(sol, u_pilot_prev)

    def predicted_load(self, x_now, u_abs):
        """Instantaneous linearized total 1/rev load for telemetry."""
        r1c, r1s = _load_output_rows(self.dmodel.output_index)
        u_pert = np.asarray(u_abs, dtype=float) - self.dmodel.u_trim
        dy1c = float(self.dmodel.c[r1c] @ x_now + self.dmodel.d[r1c] @ u_pert)
        dy1s = float(self.dmodel.c[r1s] @ x_now + self.dmodel.d[r1s] @ u_pert)
        return float(self.lin.total(dy1c, dy1s))
