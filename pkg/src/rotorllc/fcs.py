"""Dynamic-inversion flight controller with command filtering and anti-windup.

Pitch-axis control through longitudinal cyclic: a command filter shapes the
stick into the desired response (ACAH second-order attitude dynamics or RCAH
first-order rate dynamics), a PID on the tracking error plus the filtered
command derivative forms the pseudo-command, and the mean linearized model at
trim is inverted to produce the control.  Uncontrolled axes hold trim.

Anti-windup is back-calculation in the pseudo-command frame: the part of the
commanded control that the limiter or the actuator bounds removed is converted
back through the inversion gain and drained from the integrator.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

ACAH = "ACAH"
RCAH = "RCAH"

LON_AXIS = 0
Q_STATE = 4  # pitch rate row in the slow-state vector
THETA_STATE = 6  # pitch attitude row


class FcsError(ValueError):
    pass


@dataclass(frozen=True)
class FcsConfig:
    response_type: str = ACAH
    # ACAH second-order command filter
    filter_omega: float = 2.5  # rad/s
    filter_zeta: float = 0.85
    stick_to_attitude: float = 1.0  # deg per % stick
    # RCAH first-order command filter
    rcah_tau: float = 0.3  # s
    stick_to_rate: float = 0.3  # deg/s per % stick
    # PID on the tracking error -> pseudo command (deg/s^2)
    kp: float = 13.75
    ki: float = 9.375
    kd: float = 6.5
    anti_windup_gain: float = 3.0
    deriv_filter_ratio: float = 10.0  # derivative rolloff at ratio * filter bandwidth
    dt_ctrl: float = 0.01
    # inversion model: mean linearized dynamics at trim
    a_fc: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))
    b_fc: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))
    u_trim: np.ndarray = field(default_factory=lambda: np.zeros(4))

    def __post_init__(self):
        if self.response_type not in (ACAH, RCAH):
            raise FcsError(f"unknown response type {self.response_type!r}")
        if self.dt_ctrl <= 0:
            raise FcsError("dt_ctrl must be positive")
        if self.anti_windup_gain < 0:
            raise FcsError("anti_windup_gain must be >= 0")
        if self.a_fc.size and abs(self.b_fc[Q_STATE, LON_AXIS]) < 1e-12:
            raise FcsError("inversion gain B_FC[q, lon] is singular")

    @property
    def inversion_gain(self) -> float:
        return float(self.b_fc[Q_STATE, LON_AXIS])


def make_default_config(reduced, u_trim, response_type: str = ACAH, **overrides) -> FcsConfig:
    """Inversion model from the reduced on-board dynamics at trim."""
    return FcsConfig(
        response_type=response_type,
        a_fc=np.asarray(reduced.a_hat, dtype=float),
        b_fc=np.asarray(reduced.b_hat, dtype=float),
        u_trim=np.asarray(u_trim, dtype=float),
        **overrides,
    )


@dataclass
class FcsState:
    """Filter, integrator, and derivative-estimate state (one owner per loop)."""

    filt: np.ndarray  # ACAH: [pos, vel]; RCAH: [pos, unused]
    int_e: float
    deriv_f: float
    prev_e: float
    primed: bool
    filt_ad: np.ndarray
    filt_bd: np.ndarray

    @classmethod
    def init(cls, cfg: FcsConfig) -> "FcsState":
        if cfg.response_type == ACAH:
            wn, z = cfg.filter_omega, cfg.filter_zeta
            a = np.array([[0.0, 1.0], [-wn * wn, -2.0 * z * wn]])
            b = np.array([[0.0], [wn * wn]])
        else:
            a = np.array([[-1.0 / cfg.rcah_tau, 0.0], [0.0, -1.0]])
            b = np.array([[1.0 / cfg.rcah_tau], [0.0]])
        aug = np.zeros((3, 3))
        aug[:2, :2] = a * cfg.dt_ctrl
        aug[:2, 2:] = b * cfg.dt_ctrl
        phi = scipy.linalg.expm(aug)
        return cls(
            filt=np.zeros(2),
            int_e=0.0,
            deriv_f=0.0,
            prev_e=0.0,
            primed=False,
            filt_ad=phi[:2, :2],
            filt_bd=phi[:2, 2:3],
        )

    def reset(self):
        self.filt[:] = 0.0
        self.int_e = 0.0
        self.deriv_f = 0.0
        self.prev_e = 0.0
        self.primed = False


def command_filter(stick: float, cfg: FcsConfig, state: FcsState, dt: float) -> float:
    """Advance the command filter one step; returns the commanded response.

    ACAH: stick scales to attitude (deg) through a unity-DC second-order
    filter.  RCAH: stick scales to rate (deg/s) through a first-order lag.
    """
    if abs(dt - cfg.dt_ctrl) > 1e-12:
        raise FcsError("command filter discretized at dt_ctrl; pass matching dt")
    if cfg.response_type == ACAH:
        target = stick * cfg.stick_to_attitude
    else:
        target = stick * cfg.stick_to_rate
    state.filt[:] = state.filt_ad @ state.filt + state.filt_bd[:, 0] * target
    return float(state.filt[0])


def _cmd_derivatives(cfg: FcsConfig, state: FcsState, target: float):
    """(d/dt y_cmd, d2/dt2 y_cmd) from the current filter state."""
    if cfg.response_type == ACAH:
        wn, z = cfg.filter_omega, cfg.filter_zeta
        ydot = state.filt[1]
        yddot = wn * wn * (target - state.filt[0]) - 2.0 * z * wn * state.filt[1]
        return float(ydot), float(yddot)
    ydot = (target - state.filt[0]) / cfg.rcah_tau
    return float(ydot), 0.0


def di_step(
    cfg: FcsConfig,
    state: FcsState,
    x_meas: np.ndarray,
    y_cmd: float,
    dt: float,
    stick: float = 0.0,
) -> np.ndarray:
    """One dynamic-inversion step; returns absolute commanded controls (%).

    The pseudo-command is the commanded response derivative feedforward plus
    the PID on the tracking error, inverted through the mean model's pitch
    acceleration row.  Uncontrolled axes hold trim.
    """
    x = np.asarray(x_meas, dtype=float)
    if cfg.response_type == ACAH:
        y_meas = float(x[THETA_STATE])
        target = stick * cfg.stick_to_attitude
    else:
        y_meas = float(x[Q_STATE])
        target = stick * cfg.stick_to_rate

    e = y_cmd - y_meas
    if not state.primed:
        state.prev_e = e
        state.primed = True

    bandwidth = cfg.filter_omega if cfg.response_type == ACAH else 1.0 / cfg.rcah_tau
    tau_d = 1.0 / (cfg.deriv_filter_ratio * bandwidth)
    d_raw = (e - state.prev_e) / dt
    state.deriv_f += (dt / tau_d) * (d_raw - state.deriv_f)
    state.prev_e = e

    state.int_e += e * dt

    ydot_cmd, yddot_cmd = _cmd_derivatives(cfg, state, target)
    ff = yddot_cmd if cfg.response_type == ACAH else ydot_cmd
    nu = ff + cfg.kp * e + cfg.ki * state.int_e + cfg.kd * state.deriv_f

    u = cfg.u_trim.copy()
    u[LON_AXIS] += (nu - float(cfg.a_fc[Q_STATE] @ x)) / cfg.inversion_gain
    return u


def anti_windup_update(
    cfg: FcsConfig, state: FcsState, u_cmd: np.ndarray, u_applied: np.ndarray, dt: float
) -> None:
    """Back-calculation: drain the integrator by the clamped-away control.

    The control deficit on the pitch axis converts to pseudo-command units
    through the inversion gain; with no clamping the update is a no-op.
    """
    if cfg.anti_windup_gain == 0.0 or cfg.ki == 0.0:
        return
    deficit = float(u_cmd[LON_AXIS] - u_applied[LON_AXIS])
    if deficit == 0.0:
        return
    nu_excess = cfg.inversion_gain * deficit
    state.int_e -= dt * cfg.anti_windup_gain * nu_excess / cfg.ki
