"""Periodic rotorcraft-like surrogate plant.

The truth model is a configurable linear time-periodic (LTP) system with an
optional quadratic state-coupling nonlinearity and a pitch-link-load output:

    dx/dt = F(psi) x + G(psi) (u - u_trim) + nl_gain * q(x)
    y     = P(psi) x + R(psi) (u - u_trim) + bias(psi)

with psi = Omega t.  States are perturbations from the built-in trim, so with
nl_gain = 0 the plant is exactly LTP about x = 0.  bias(psi) carries the trim
pitch-link load harmonics.  Units follow rotorcraft convention: velocities kt,
rates deg/s, attitudes/flapping deg, controls %, loads lbs.

q(x) is the fixed quadratic coupling q_i = x_i * x_{(i+1) mod n}; it vanishes
at the origin together with its Jacobian, so the trim and the linearized
model are unchanged while large-amplitude responses deviate (the on-board
model-mismatch mode).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

import numpy as np

from . import kernels

BODY_LABELS = ("vx", "vy", "vz", "p", "q", "r", "theta", "phi")
ROTOR_LABELS = ("beta_1c", "beta_1s")
INPUT_LABELS = ("delta_lon", "delta_lat", "delta_col", "delta_ped")
OUTPUT_LABELS = ("pitch_link_load",)

PLANT_SCHEMA_VERSION = 1
LTP_SCHEMA_VERSION = 1


class PlantError(Exception):
    """Base class for plant-level failures."""


class IntegrationDivergedError(PlantError):
    pass


class TrimConvergenceError(PlantError):
    pass


class FourierFitError(PlantError):
    pass


def stack_fourier(m0, cos_terms=(), sin_terms=()):
    """Stack [M0, M1c, M1s, ...] coefficient matrices into a kernel table."""
    if len(cos_terms) != len(sin_terms):
        raise ValueError("need matching cos/sin coefficient lists")
    m0 = np.asarray(m0, dtype=float)
    parts = [m0]
    for mc, ms in zip(cos_terms, sin_terms):
        parts.append(np.asarray(mc, dtype=float))
        parts.append(np.asarray(ms, dtype=float))
    return np.ascontiguousarray(np.stack(parts))


def table_order(table) -> int:
    return (table.shape[0] - 1) // 2


@dataclass(frozen=True)
class LtpModel:
    """Fourier-coefficient form of an LTP state-space model."""

    f_table: np.ndarray  # (2k+1, n, n)
    g_table: np.ndarray  # (2k+1, n, nu)
    p_table: np.ndarray  # (2k+1, ny, n)
    r_table: np.ndarray  # (2k+1, ny, nu)
    omega: float
    state_labels: tuple
    input_labels: tuple
    output_labels: tuple

    def __post_init__(self):
        n = self.f_table.shape[1]
        if self.f_table.shape[2] != n:
            raise ValueError("F table must be square")
        if self.g_table.shape[1] != n or self.p_table.shape[2] != n:
            raise ValueError("G/P tables inconsistent with state count")
        if self.r_table.shape[1:] != (self.n_outputs, self.n_inputs):
            raise ValueError("R table inconsistent with input/output counts")
        if len(self.state_labels) != n:
            raise ValueError("state label count mismatch")
        if self.omega <= 0:
            raise ValueError("omega must be positive")

    @property
    def n_states(self) -> int:
        return self.f_table.shape[1]

    @property
    def n_inputs(self) -> int:
        return self.g_table.shape[2]

    @property
    def n_outputs(self) -> int:
        return self.p_table.shape[1]

    @property
    def fourier_order(self) -> int:
        return table_order(self.f_table)

    @property
    def period(self) -> float:
        return 2.0 * np.pi / self.omega

    def f_at(self, psi: float) -> np.ndarray:
        return kernels.eval_periodic(self.f_table, psi)

    def g_at(self, psi: float) -> np.ndarray:
        return kernels.eval_periodic(self.g_table, psi)

    def p_at(self, psi: float) -> np.ndarray:
        return kernels.eval_periodic(self.p_table, psi)

    def r_at(self, psi: float) -> np.ndarray:
        return kernels.eval_periodic(self.r_table, psi)

    def to_json(self) -> dict:
        return {
            "schema_version": LTP_SCHEMA_VERSION,
            "omega": self.omega,
            "state_labels": list(self.state_labels),
            "input_labels": list(self.input_labels),
            "output_labels": list(self.output_labels),
            "f_table": self.f_table.tolist(),
            "g_table": self.g_table.tolist(),
            "p_table": self.p_table.tolist(),
            "r_table": self.r_table.tolist(),
        }

    @classmethod
    def from_json(cls, doc: dict) -> "LtpModel":
        if doc.get("schema_version") != LTP_SCHEMA_VERSION:
            raise ValueError(f"unsupported LTP schema_version {doc.get('schema_version')}")
        return cls(
            f_table=np.asarray(doc["f_table"], dtype=float),
            g_table=np.asarray(doc["g_table"], dtype=float),
            p_table=np.asarray(doc["p_table"], dtype=float),
            r_table=np.asarray(doc["r_table"], dtype=float),
            omega=float(doc["omega"]),
            state_labels=tuple(doc["state_labels"]),
            input_labels=tuple(doc["input_labels"]),
            output_labels=tuple(doc["output_labels"]),
        )

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=1)

    @classmethod
    def load(cls, path) -> "LtpModel":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


@dataclass(frozen=True)
class SurrogateParams:
    """Configuration of the surrogate truth plant."""

    n_body: int
    n_rotor: int
    omega: float
    fourier_order: int
    f_table: np.ndarray
    g_table: np.ndarray
    p_table: np.ndarray
    r_table: np.ndarray
    nonlinearity_gain: float
    load_trim_harmonics: np.ndarray  # [y0, y1c, y1s, ...] lbs, output 0
    u_trim: np.ndarray  # absolute trim controls, %
    state_labels: tuple = ()
    input_labels: tuple = INPUT_LABELS
    output_labels: tuple = OUTPUT_LABELS

    def __post_init__(self):
        n = self.n_body + self.n_rotor
        if self.omega <= 0:
            raise ValueError("omega must be positive")
        if self.fourier_order < 0:
            raise ValueError("fourier_order must be >= 0")
        if self.nonlinearity_gain < 0:
            raise ValueError("nonlinearity_gain must be >= 0")
        if self.f_table.shape != (2 * self.fourier_order + 1, n, n):
            raise ValueError(f"F table shape {self.f_table.shape} inconsistent with {n} states")
        if self.g_table.shape[:2] != (2 * self.fourier_order + 1, n):
            raise ValueError("G table inconsistent with state count")
        if self.p_table.shape[0] != 2 * self.fourier_order + 1 or self.p_table.shape[2] != n:
            raise ValueError("P table inconsistent with state count")
        ny, nu = self.p_table.shape[1], self.g_table.shape[2]
        if self.r_table.shape != (2 * self.fourier_order + 1, ny, nu):
            raise ValueError("R table inconsistent with P/G tables")
        if self.u_trim.shape != (nu,):
            raise ValueError("u_trim length mismatch")
        if self.load_trim_harmonics.ndim != 1 or self.load_trim_harmonics.shape[0] % 2 != 1:
            raise ValueError("load_trim_harmonics must be [y0, y1c, y1s, ...]")
        if not self.state_labels:
            object.__setattr__(self, "state_labels", default_state_labels(self.n_body, self.n_rotor))
        if len(self.state_labels) != n:
            raise ValueError("state label count mismatch")

    @property
    def n_states(self) -> int:
        return self.n_body + self.n_rotor

    @property
    def n_inputs(self) -> int:
        return self.g_table.shape[2]

    @property
    def n_outputs(self) -> int:
        return self.p_table.shape[1]

    @property
    def period(self) -> float:
        return 2.0 * np.pi / self.omega

    @property
    def dt_max(self) -> float:
        """Largest integration step resolving the periodic coefficients."""
        return 2.0 * np.pi / (20.0 * self.omega)

    @property
    def bias_table(self) -> np.ndarray:
        """Per-output trim-output Fourier coefficients, shape (ny, 2L+1)."""
        bias = np.zeros((self.n_outputs, self.load_trim_harmonics.shape[0]))
        bias[0] = self.load_trim_harmonics
        return bias

    def ltp_model(self) -> LtpModel:
        """The stored-table LTP model (perturbations about the built-in trim)."""
        return LtpModel(
            f_table=self.f_table,
            g_table=self.g_table,
            p_table=self.p_table,
            r_table=self.r_table,
            omega=self.omega,
            state_labels=self.state_labels,
            input_labels=self.input_labels,
            output_labels=self.output_labels,
        )

    def with_changes(self, **kw) -> "SurrogateParams":
        return replace(self, **kw)

    def to_json(self) -> dict:
        return {
            "schema_version": PLANT_SCHEMA_VERSION,
            "n_body": self.n_body,
            "n_rotor": self.n_rotor,
            "omega": self.omega,
            "fourier_order": self.fourier_order,
            "nonlinearity_gain": self.nonlinearity_gain,
            "load_trim_harmonics": self.load_trim_harmonics.tolist(),
            "u_trim": self.u_trim.tolist(),
            "state_labels": list(self.state_labels),
            "input_labels": list(self.input_labels),
            "output_labels": list(self.output_labels),
            "f_table": self.f_table.tolist(),
            "g_table": self.g_table.tolist(),
            "p_table": self.p_table.tolist(),
            "r_table": self.r_table.tolist(),
        }

    @classmethod
    def from_json(cls, doc: dict) -> "SurrogateParams":
        if doc.get("schema_version") != PLANT_SCHEMA_VERSION:
            raise ValueError(f"unsupported plant schema_version {doc.get('schema_version')}")
        return cls(
            n_body=int(doc["n_body"]),
            n_rotor=int(doc["n_rotor"]),
            omega=float(doc["omega"]),
            fourier_order=int(doc["fourier_order"]),
            f_table=np.asarray(doc["f_table"], dtype=float),
            g_table=np.asarray(doc["g_table"], dtype=float),
            p_table=np.asarray(doc["p_table"], dtype=float),
            r_table=np.asarray(doc["r_table"], dtype=float),
            nonlinearity_gain=float(doc["nonlinearity_gain"]),
            load_trim_harmonics=np.asarray(doc["load_trim_harmonics"], dtype=float),
            u_trim=np.asarray(doc["u_trim"], dtype=float),
            state_labels=tuple(doc.get("state_labels", ())),
            input_labels=tuple(doc.get("input_labels", INPUT_LABELS)),
            output_labels=tuple(doc.get("output_labels", OUTPUT_LABELS)),
        )


def default_state_labels(n_body: int, n_rotor: int) -> tuple:
    body = BODY_LABELS if n_body == 8 else tuple(f"body_{i}" for i in range(n_body))
    rotor = ROTOR_LABELS if n_rotor == 2 else tuple(f"rotor_{i}" for i in range(n_rotor))
    return body + rotor


@dataclass(frozen=True)
class PlantState:
    """Instantaneous plant state (perturbation coordinates)."""

    x: np.ndarray
    psi: float
    t: float

    @classmethod
    def at_trim(cls, params: SurrogateParams) -> "PlantState":
        return cls(x=np.zeros(params.n_states), psi=0.0, t=0.0)


@dataclass(frozen=True)
class TrimSolution:
    """Converged periodic trim of the surrogate plant."""

    x_trim: np.ndarray  # (n_psi, n) periodic trim orbit samples
    psi_grid: np.ndarray  # (n_psi,)
    u_trim: np.ndarray  # absolute controls, %
    y_harm_trim: np.ndarray  # (ny, 2L+1) output harmonics, lbs
    residual: float
    periods: int

    def load_1rev_components(self) -> tuple:
        """Trim (y_1c, y_1s) of the pitch-link load (output 0)."""
        return float(self.y_harm_trim[0, 1]), float(self.y_harm_trim[0, 2])

    def load_1rev_magnitude(self) -> float:
        c1, s1 = self.load_1rev_components()
        return float(np.hypot(c1, s1))


def _check_finite(x: np.ndarray, labels, t: float):
    if np.all(np.isfinite(x)):
        return
    bad = int(np.argmax(~np.isfinite(x)))
    raise IntegrationDivergedError(
        f"state '{labels[bad]}' became non-finite at t={t:.6f} s"
    )


def step_plant(params: SurrogateParams, s: PlantState, u, dt: float) -> PlantState:
    """Advance the plant one RK4 step of size dt under absolute controls u."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    if dt > params.dt_max * (1 + 1e-9):
        raise ValueError(
            f"dt={dt} exceeds {params.dt_max:.6f}; periodic coefficients unresolved"
        )
    u_pert = np.asarray(u, dtype=float) - params.u_trim
    traj = kernels.ltp_simulate(
        params.f_table,
        params.g_table,
        params.omega,
        params.nonlinearity_gain,
        s.x,
        s.psi,
        u_pert.reshape(1, -1),
        dt,
    )
    x_new = traj[1]
    t_new = s.t + dt
    _check_finite(x_new, params.state_labels, t_new)
    return PlantState(x=x_new, psi=(s.psi + params.omega * dt) % (2 * np.pi), t=t_new)


def plant_output(params: SurrogateParams, s: PlantState, u) -> np.ndarray:
    """Total plant output (trim bias included) at the current state."""
    u_pert = np.asarray(u, dtype=float) - params.u_trim
    return _plant_out(params, s.x, u_pert, s.psi)


def simulate_plant(params: SurrogateParams, x0, psi0: float, u_seq, dt: float):
    """Integrate n steps with ZOH absolute controls; returns (states, outputs).

    states has shape (n+1, n_x), outputs (n+1, n_y); both include the initial
    sample.  dt must satisfy the step_plant resolution bound.
    """
    if dt > params.dt_max * (1 + 1e-9):
        raise ValueError(f"dt={dt} exceeds {params.dt_max:.6f}")
    u_seq = np.atleast_2d(np.asarray(u_seq, dtype=float))
    u_pert = u_seq - params.u_trim
    traj = kernels.ltp_simulate(
        params.f_table,
        params.g_table,
        params.omega,
        params.nonlinearity_gain,
        np.asarray(x0, dtype=float),
        psi0,
        u_pert,
        dt,
    )
    _check_finite(traj[-1], params.state_labels, dt * u_seq.shape[0])
    y = kernels.ltp_outputs(
        params.p_table, params.r_table, params.bias_table, params.omega, traj, u_pert, psi0, dt
    )
    return traj, y


def floquet_multipliers(ltp: LtpModel, n_steps: int = 512) -> np.ndarray:
    """Eigenvalues of the one-period monodromy matrix."""
    phi = kernels.ltp_monodromy(ltp.f_table, ltp.omega, n_steps)
    return np.linalg.eigvals(phi)


def trim_plant(
    params: SurrogateParams,
    tol: float = 1e-8,
    max_periods: int = 200,
    n_psi: int = 64,
    x0=None,
) -> TrimSolution:
    """Find the periodic trim orbit by time-marching at fixed u_trim.

    Marches whole rotor periods from x0 (default: origin) until the period map
    is a fixed point to within tol (infinity norm), then Fourier-analyzes one
    period of the output for the trim load harmonics.
    """
    mults = floquet_multipliers(params.ltp_model())
    rho = float(np.max(np.abs(mults)))
    if rho >= 1.0:
        raise TrimConvergenceError(
            f"plant is not Floquet-stable at u_trim (spectral radius {rho:.4f})"
        )

    # Integer substeps so period samples land exactly on the psi grid.
    sub = max(1, int(np.ceil(params.period / n_psi / params.dt_max)))
    steps = n_psi * sub
    dt = params.period / steps
    u_seq = np.tile(params.u_trim, (steps, 1))

    x = np.zeros(params.n_states) if x0 is None else np.asarray(x0, dtype=float)
    psi0 = 0.0
    residual = np.inf
    periods = 0
    for k in range(max_periods):
        traj, _ = simulate_plant(params, x, psi0, u_seq, dt)
        x_next = traj[-1]
        residual = float(np.max(np.abs(x_next - x)))
        x = x_next
        periods = k + 1
        if residual < tol:
            break
    else:
        raise TrimConvergenceError(
            f"trim did not converge in {max_periods} periods (residual {residual:.3e})"
        )

    traj, y = simulate_plant(params, x, psi0, u_seq, dt)
    x_samples = traj[:-1:sub]
    y_samples = y[:-1:sub]
    psi_grid = (np.arange(n_psi) * (2 * np.pi / n_psi)) % (2 * np.pi)

    order = max(params.fourier_order, (params.load_trim_harmonics.shape[0] - 1) // 2)
    from .harmonic import harmonic_analyze  # local import avoids cycle at module load

    y_harm = harmonic_analyze(y_samples, order)
    return TrimSolution(
        x_trim=x_samples,
        psi_grid=psi_grid,
        u_trim=params.u_trim.copy(),
        y_harm_trim=y_harm.T.copy(),
        residual=residual,
        periods=periods,
    )


def _plant_rhs(params: SurrogateParams, x, u_pert, psi):
    f = kernels.eval_periodic(params.f_table, psi)
    g = kernels.eval_periodic(params.g_table, psi)
    dx = f @ x + g @ u_pert
    if params.nonlinearity_gain != 0.0:
        dx = dx + params.nonlinearity_gain * x * np.roll(x, -1)
    return dx


def _plant_out(params: SurrogateParams, x, u_pert, psi):
    p = kernels.eval_periodic(params.p_table, psi)
    r = kernels.eval_periodic(params.r_table, psi)
    basis = kernels.fourier_basis((params.bias_table.shape[1] - 1) // 2, psi)
    return p @ x + r @ u_pert + params.bias_table @ basis


def linearize_to_ltp(
    params: SurrogateParams,
    trim: TrimSolution,
    n_psi: int = 64,
    h_state: float = 1e-4,
    h_input: float = 1e-4,
    fit_tol: float = 1e-6,
) -> LtpModel:
    """Recover an LTP model by central differences about the trim orbit.

    Jacobians of the plant right-hand side and output map are estimated at
    n_psi azimuths and least-squares Fourier-fit up to params.fourier_order.
    A fit residual above fit_tol (relative to the largest coefficient) raises
    FourierFitError, which indicates harmonic content beyond the fitted order.
    """
    if trim.x_trim.shape[0] != n_psi:
        # Resample the trim orbit onto the requested azimuth grid.
        from .harmonic import harmonic_analyze, reconstruct_signal

        coeffs = harmonic_analyze(trim.x_trim, min(params.fourier_order + 2, trim.x_trim.shape[0] // 2 - 1))
        psis = np.arange(n_psi) * (2 * np.pi / n_psi)
        x_orbit = np.stack([reconstruct_signal(coeffs[:, j], psis) for j in range(trim.x_trim.shape[1])], axis=1)
    else:
        x_orbit = trim.x_trim
        psis = trim.psi_grid

    n, nu, ny = params.n_states, params.n_inputs, params.n_outputs
    u0 = np.zeros(nu)  # perturbation trim control

    f_s = np.empty((n_psi, n, n))
    g_s = np.empty((n_psi, n, nu))
    p_s = np.empty((n_psi, ny, n))
    r_s = np.empty((n_psi, ny, nu))
    for k in range(n_psi):
        psi = psis[k]
        xk = x_orbit[k]
        for j in range(n):
            dx = np.zeros(n)
            dx[j] = h_state
            f_s[k, :, j] = (
                _plant_rhs(params, xk + dx, u0, psi) - _plant_rhs(params, xk - dx, u0, psi)
            ) / (2 * h_state)
            p_s[k, :, j] = (
                _plant_out(params, xk + dx, u0, psi) - _plant_out(params, xk - dx, u0, psi)
            ) / (2 * h_state)
        for j in range(nu):
            du = np.zeros(nu)
            du[j] = h_input
            g_s[k, :, j] = (
                _plant_rhs(params, xk, u0 + du, psi) - _plant_rhs(params, xk, u0 - du, psi)
            ) / (2 * h_input)
            r_s[k, :, j] = (
                _plant_out(params, xk, u0 + du, psi) - _plant_out(params, xk, u0 - du, psi)
            ) / (2 * h_input)

    def fit(samples):
        from .harmonic import harmonic_analyze, reconstruct_signal

        flat = samples.reshape(n_psi, -1)
        coeffs = harmonic_analyze(flat, params.fourier_order)
        recon = np.stack([reconstruct_signal(coeffs[:, j], psis) for j in range(flat.shape[1])], axis=1)
        resid = float(np.max(np.abs(recon - flat)))
        scale = max(1.0, float(np.max(np.abs(coeffs))))
        if resid > fit_tol * scale:
            raise FourierFitError(
                f"Fourier fit residual {resid:.3e} exceeds tolerance; "
                f"increase n_psi (currently {n_psi}) or fourier_order"
            )
        return coeffs.reshape(-1, *samples.shape[1:])

    return LtpModel(
        f_table=fit(f_s),
        g_table=fit(g_s),
        p_table=fit(p_s),
        r_table=fit(r_s),
        omega=params.omega,
        state_labels=params.state_labels,
        input_labels=params.input_labels,
        output_labels=params.output_labels,
    )


def default_params(**overrides) -> SurrogateParams:
    """Calibrated 10-state surrogate at a 120-kt-like condition.

    The numbers are a desk-scale stand-in tuned so that (a) the plant is
    Floquet-stable, (b) flap dynamics are an order of magnitude faster than
    the body modes, and (c) aggressive pitch maneuvers push the 1/rev
    pitch-link load well past the default 350 lbs limit.
    """
    n = 10
    nu = 4

    f0 = np.zeros((n, n))
    # longitudinal: vx(0), vz(2), q(4), theta(6), beta_1c(8)
    f0[0, 0], f0[0, 4], f0[0, 6], f0[0, 8] = -0.10, 0.05, -0.33, 0.10
    f0[2, 0], f0[2, 2], f0[2, 4] = -0.02, -0.60, 0.45
    f0[4, 0], f0[4, 2], f0[4, 4], f0[4, 6], f0[4, 8] = 0.010, 0.02, -2.0, -0.10, 5.0
    f0[6, 4] = 1.0
    f0[8, 4], f0[8, 8], f0[8, 9] = -1.5, -14.0, 2.0
    # lateral/directional: vy(1), p(3), r(5), phi(7), beta_1s(9)
    f0[1, 1], f0[1, 7], f0[1, 9] = -0.12, 0.33, 0.10
    f0[3, 1], f0[3, 3], f0[3, 9] = -0.04, -4.0, 6.0
    f0[5, 1], f0[5, 5] = 0.05, -1.2
    f0[7, 3] = 1.0
    f0[9, 3], f0[9, 8], f0[9, 9] = -1.4, -2.0, -14.0

    g0 = np.zeros((n, nu))
    g0[4, 0] = 0.50
    g0[8, 0] = 1.10
    g0[3, 1] = 0.60
    g0[9, 1] = 1.00
    g0[2, 2] = -0.50
    g0[5, 3] = 0.90

    f1c = np.zeros((n, n))
    f1c[4, 8], f1c[8, 4], f1c[8, 8] = 1.0, 0.5, -1.2
    f1s = np.zeros((n, n))
    f1s[4, 9], f1s[9, 3], f1s[9, 9] = 0.6, 0.5, -1.2
    f2c = np.zeros((n, n))
    f2c[8, 8], f2c[4, 4] = 0.8, 0.15
    f2s = np.zeros((n, n))
    f2s[9, 9] = 0.8

    g1c = np.zeros((n, nu))
    g1c[8, 0], g1c[4, 0] = 0.15, 0.05
    g1s = np.zeros((n, nu))
    g1s[9, 0] = 0.12
    g2c = np.zeros((n, nu))
    g2s = np.zeros((n, nu))

    p0 = np.array([[1.0, 0.0, 0.8, 0.0, 2.5, 0.0, 0.4, 0.0, 18.0, 6.0]])
    p1c = np.array([[0.5, 0.0, 0.4, 0.0, 5.0, 0.0, 0.2, 0.0, 35.0, 5.0]])
    p1s = np.array([[0.3, 0.0, 0.3, 2.0, 4.0, 0.0, 0.1, 0.0, 8.0, 20.0]])
    p2c = np.array([[0.0, 0.0, 0.2, 0.0, 1.0, 0.0, 0.0, 0.0, 6.0, 1.0]])
    p2s = np.array([[0.0, 0.0, 0.1, 0.5, 0.8, 0.0, 0.0, 0.0, 1.5, 5.0]])
    r0 = np.array([[0.8, 0.2, 0.3, 0.05]])
    r1c = np.array([[3.0, 0.5, 0.3, 0.0]])
    r1s = np.array([[2.2, 0.8, 0.2, 0.0]])
    r2c = np.zeros((1, nu))
    r2s = np.zeros((1, nu))

    params = SurrogateParams(
        n_body=8,
        n_rotor=2,
        omega=27.0,
        fourier_order=2,
        f_table=stack_fourier(f0, (f1c, f2c), (f1s, f2s)),
        g_table=stack_fourier(g0, (g1c, g2c), (g1s, g2s)),
        p_table=stack_fourier(p0, (p1c, p2c), (p1s, p2s)),
        r_table=stack_fourier(r0, (r1c, r2c), (r1s, r2s)),
        nonlinearity_gain=0.0,
        load_trim_harmonics=np.array([450.0, 170.0, 190.0, 40.0, -25.0]),
        u_trim=np.array([50.0, 50.0, 50.0, 50.0]),
    )
    if overrides:
        params = params.with_changes(**overrides)
    return params
