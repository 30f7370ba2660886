"""Closed-loop scenario execution.

Two loop flavors share the plant, limiter, and trace plumbing:

* run_batch: stick script -> command filter -> dynamic inversion -> limiter
  (mode auto_limit clamps, cue records the margin, llc_off passes through) ->
  anti-windup -> plant.  This is the flight-controller pipeline.

* run_piloted / PilotedLoop: the stick maps directly to the longitudinal
  effector (mechanically-linked semantics of the piloted cue experiments);
  the margin drives a cue and an optional perfect-tracking policy caps the
  scripted stick at the extremal control.  The real-time server drives the
  same loop object.

The "exact" 1/rev load is a sliding least-squares harmonic fit over the most
recent rotor period of plant output; with a warm-start seed of one period of
trim output every record is complete from the first frame.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from . import fcs as fcs_mod
from . import llc as llc_mod
from .harmonic import assemble_lti, reconstruct_signal
from .plant import PlantState, SurrogateParams, TrimSolution, simulate_plant, trim_plant
from .reduction import ReducedLti, default_partition, residualize
from .scenario import (
    MODE_AUTO_LIMIT,
    MODE_CUE,
    MODE_LLC_OFF,
    POLICY_PERFECT,
    Scenario,
)
from .trace import QP_STATUS_CODES, SimTrace, TraceRecorder, trace_columns

DEFAULT_STATE_HARMONICS = 4
DEFAULT_OUTPUT_HARMONICS = 2
ONE_REV_FIT_ORDER = 3


class RunnerError(RuntimeError):
    pass


@dataclass
class LoopSetup:
    """Prepared model pipeline shared by every run of one scenario family."""

    scenario: Scenario
    params: SurrogateParams
    trim: TrimSolution
    reduced: ReducedLti
    fcs_cfg: fcs_mod.FcsConfig
    mpc_cfg: llc_mod.MpcConfig
    controller: llc_mod.LlcController

    @property
    def y_max(self) -> float:
        if self.scenario.limiting_disabled:
            return math.inf
        return self.mpc_cfg.y_max


def prepare(scenario: Scenario) -> LoopSetup:
    """Trim the plant and build the on-board reduced model and configs."""
    params = scenario.effective_plant()
    trim = trim_plant(params)
    n_state = scenario.model_orders.get("n_state_harmonics", DEFAULT_STATE_HARMONICS)
    n_out = scenario.model_orders.get("n_output_harmonics", DEFAULT_OUTPUT_HARMONICS)
    lti = assemble_lti(params.ltp_model(), n_state, 0, n_out)
    reduced = residualize(lti, default_partition(lti), provenance=f"{scenario.name}:N{n_state}")
    mpc_cfg = scenario.mpc_config()
    fcs_cfg = scenario.fcs_config(reduced, trim.u_trim)
    controller = llc_mod.LlcController.from_models(mpc_cfg, reduced, trim)
    return LoopSetup(
        scenario=scenario,
        params=params,
        trim=trim,
        reduced=reduced,
        fcs_cfg=fcs_cfg,
        mpc_cfg=mpc_cfg,
        controller=controller,
    )


class OneRevEstimator:
    """Sliding one-period harmonic fit of the plant load output.

    A least-squares fit of [1, cos psi .. sin(order psi)] over the most
    recent rotor period; least squares (rather than quadrature) stays exact
    for band-limited content when the period is not an integer number of
    samples.
    """

    def __init__(self, params: SurrogateParams, dt: float, order: int = ONE_REV_FIT_ORDER):
        self.omega = params.omega
        self.order = order
        self.window = int(math.ceil(params.period / dt)) + 1
        # Seed with one period of trim output so the first records are complete.
        t0 = -dt * np.arange(self.window - 1, -1, -1)
        self._t = list(t0)
        self._y = [
            float(reconstruct_signal(params.load_trim_harmonics, self.omega * t)) for t in t0
        ]

    def push(self, t: float, y: float) -> None:
        self._t.append(t)
        self._y.append(y)
        if len(self._t) > self.window:
            self._t.pop(0)
            self._y.pop(0)

    def estimate(self):
        """(magnitude, y_1c, y_1s) of the 1/rev component including trim."""
        psi = self.omega * np.asarray(self._t)
        cols = [np.ones_like(psi)]
        for n in range(1, self.order + 1):
            cols.append(np.cos(n * psi))
            cols.append(np.sin(n * psi))
        a = np.column_stack(cols)
        coef, *_ = np.linalg.lstsq(a, np.asarray(self._y), rcond=None)
        return float(np.hypot(coef[1], coef[2])), float(coef[1]), float(coef[2])


def _advance_plant(params: SurrogateParams, state: PlantState, u_abs: np.ndarray, dt: float):
    """One control frame of plant integration with internal substepping."""
    n_sub = max(1, int(math.ceil(dt / params.dt_max)))
    u_seq = np.tile(u_abs, (n_sub, 1))
    traj, y = simulate_plant(params, state.x, state.psi, u_seq, dt / n_sub)
    new = PlantState(
        x=traj[-1], psi=(state.psi + params.omega * dt) % (2.0 * math.pi), t=state.t + dt
    )
    return new, float(y[-1, 0])


_SKIPPED = QP_STATUS_CODES["skipped"]


def run_batch(scenario: Scenario, setup: LoopSetup | None = None) -> SimTrace:
    """Fixed-step closed-loop run through the flight-controller pipeline."""
    setup = prepare(scenario) if setup is None else setup
    params, cfg = setup.params, setup.fcs_cfg
    dt = scenario.dt_ctrl
    n_frames = int(round(scenario.duration / dt))
    y_max = setup.y_max
    ctrl = setup.controller

    state = PlantState.at_trim(params)
    fstate = fcs_mod.FcsState.init(cfg)
    est = OneRevEstimator(params, dt)
    u_prev_intent = setup.trim.u_trim.copy()
    rec = TraceRecorder(trace_columns(params.state_labels, params.input_labels), n_frames)

    for k in range(n_frames):
        t = k * dt
        stick_lon = scenario.stick_at(t, "lon")
        y_cmd = fcs_mod.command_filter(stick_lon, cfg, fstate, dt)
        u_cmd_raw = fcs_mod.di_step(cfg, fstate, state.x, y_cmd, dt, stick=stick_lon)
        for j, axis in enumerate(("lat", "col", "ped"), start=1):
            u_cmd_raw[j] += scenario.stick_at(t, axis)
        # FCS output authority is the actuator range; the limiter and the
        # margin anchor both see the realizable command.
        u_cmd = np.clip(u_cmd_raw, setup.mpc_cfg.u_min, setup.mpc_cfg.u_max)

        if math.isinf(y_max):
            sol = None
            u_ext = math.inf
            cm = math.inf
            qp_status, qp_iters, qp_kkt, solve_ms = _SKIPPED, 0.0, 0.0, 0.0
        else:
            t_solve = time.perf_counter()
            sol, margin = ctrl.step(state.x, u_prev_intent, y_max)
            solve_ms = (time.perf_counter() - t_solve) * 1e3
            u_ext = float(sol.u_ext[0])
            cm = float(margin.cm[0])
            qp_status = QP_STATUS_CODES[sol.status]
            qp_iters = float(sol.iterations)
            qp_kkt = sol.kkt_residual

        if scenario.mode == MODE_AUTO_LIMIT:
            u_app = llc_mod.clamp_command(u_cmd, sol)
        else:  # llc_off passes through; cue records the margin only
            u_app = u_cmd.copy()

        # Back-calculation sees the full unrealized command (saturation plus
        # limiter clamping).
        fcs_mod.anti_windup_update(cfg, fstate, u_cmd_raw, u_app, dt)
        state, y_now = _advance_plant(params, state, u_app, dt)
        est.push(state.t, y_now)
        y_1rev, _, _ = est.estimate()
        y_pred = ctrl.predicted_load(state.x, u_app)

        row = {
            "t": state.t,
            "u_pilot_lon": float(u_cmd[0]),
            "u_ext": u_ext,
            "cm": cm,
            "y_load": y_now,
            "y_1rev_exact": y_1rev,
            "y_1rev_predicted": y_pred,
            "y_max": y_max,
            "fcs_y_cmd": y_cmd,
            "fcs_int_e": fstate.int_e,
            "fcs_deriv_f": fstate.deriv_f,
            "qp_status": qp_status,
            "qp_iters": qp_iters,
            "qp_kkt": qp_kkt,
            "solve_ms": solve_ms,
            "deadline_miss": float(solve_ms > dt * 1e3),
            "stale": 0.0,
        }
        for lab, val in zip(params.state_labels, state.x):
            row[f"x_{lab}"] = float(val)
        for lab, val in zip(params.input_labels, u_app):
            row[f"u_applied_{lab}"] = float(val)
        rec.record(**row)
        u_prev_intent = u_cmd.copy()

    return rec.finalize()


class PilotedLoop:
    """Direct stick-to-effector loop with per-frame margin computation.

    Drives one frame per step(stick) call and returns the full telemetry
    record.  Used by the scripted piloted runs, record/replay, and the
    real-time session server.
    """

    def __init__(self, setup: LoopSetup):
        self.setup = setup
        sc = setup.scenario
        if sc.mode != MODE_CUE:
            raise RunnerError("piloted loop requires a cue-mode scenario")
        self.dt = sc.dt_ctrl
        self.params = setup.params
        self.state = PlantState.at_trim(self.params)
        self.est = OneRevEstimator(self.params, self.dt)
        self.u_prev = setup.trim.u_trim.copy()
        self.frame = 0
        self.columns = trace_columns(self.params.state_labels, self.params.input_labels)
        self._y_max = setup.y_max

    def step(self, stick: float) -> dict:
        sc = self.setup.scenario
        ctrl = self.setup.controller
        t = self.frame * self.dt

        if math.isinf(self._y_max):
            sol = None
            u_ext = math.inf
            cm = math.inf
            qp_status, qp_iters, qp_kkt, solve_ms = _SKIPPED, 0.0, 0.0, 0.0
        else:
            t_solve = time.perf_counter()
            sol, margin = ctrl.step(self.state.x, self.u_prev, self._y_max)
            solve_ms = (time.perf_counter() - t_solve) * 1e3
            u_ext = float(sol.u_ext[0])
            cm = float(margin.cm[0])
            qp_status = QP_STATUS_CODES[sol.status]
            qp_iters = float(sol.iterations)
            qp_kkt = sol.kkt_residual

        u_pilot = self.setup.trim.u_trim.copy()
        u_pilot[0] += stick * sc.stick_gain
        if sc.pilot_policy == POLICY_PERFECT and sol is not None:
            u_pilot = llc_mod.clamp_command(u_pilot, sol)
        u_app = np.clip(u_pilot, self.setup.mpc_cfg.u_min, self.setup.mpc_cfg.u_max)

        self.state, y_now = _advance_plant(self.params, self.state, u_app, self.dt)
        self.est.push(self.state.t, y_now)
        y_1rev, _, _ = self.est.estimate()
        y_pred = ctrl.predicted_load(self.state.x, u_app)

        row = {
            "t": self.state.t,
            "u_pilot_lon": float(u_pilot[0]),
            "u_ext": u_ext,
            "cm": cm,
            "y_load": y_now,
            "y_1rev_exact": y_1rev,
            "y_1rev_predicted": y_pred,
            "y_max": self._y_max,
            "fcs_y_cmd": 0.0,
            "fcs_int_e": 0.0,
            "fcs_deriv_f": 0.0,
            "qp_status": qp_status,
            "qp_iters": qp_iters,
            "qp_kkt": qp_kkt,
            "solve_ms": solve_ms,
            "deadline_miss": float(solve_ms > self.dt * 1e3),
            "stale": 0.0,
        }
        for lab, val in zip(self.params.state_labels, self.state.x):
            row[f"x_{lab}"] = float(val)
        for lab, val in zip(self.params.input_labels, u_app):
            row[f"u_applied_{lab}"] = float(val)
        self.frame += 1
        self.u_prev = u_app.copy()
        return row


def run_piloted(
    scenario: Scenario, setup: LoopSetup | None = None, stick_sequence=None
) -> SimTrace:
    """Scripted piloted run; stick_sequence (one value per frame) replays a
    recorded session in place of the scenario script."""
    setup = prepare(scenario) if setup is None else setup
    loop = PilotedLoop(setup)
    n_frames = int(round(scenario.duration / scenario.dt_ctrl))
    if stick_sequence is not None and len(stick_sequence) < n_frames:
        n_frames = len(stick_sequence)
    rec = TraceRecorder(loop.columns, n_frames)
    stick_prev = 0.0
    slew_step = scenario.pilot_slew * scenario.dt_ctrl
    for k in range(n_frames):
        if stick_sequence is not None:
            stick = float(stick_sequence[k])
        else:
            # The scripted pilot is slew-limited: a human cannot step the
            # stick within one control frame.
            raw = scenario.stick_at(k * scenario.dt_ctrl, "lon")
            stick = float(np.clip(raw, stick_prev - slew_step, stick_prev + slew_step))
            stick_prev = stick
        rec.record(**loop.step(stick))
    return rec.finalize()
