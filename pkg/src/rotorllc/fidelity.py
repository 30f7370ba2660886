"""Frequency responses and the coherence-weighted fidelity cost.

The cost per input/output pair over a shared frequency grid is

    J = (20 / n_w) * sum_w W_gamma [ W_g (dMag_dB)^2 + W_p (dPhase_deg)^2 ]

with W_gamma = [1.58 (1 - exp(-coh))]^2 when a coherence estimate is present
and 1 otherwise.  The default weights W_g = 1.0 and W_p = 0.01745 make 1 dB of
magnitude error cost the same as 7.57 degrees of phase error.  Phase
differences are wrapped to (-180, 180].
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .harmonic import COS, MEAN, SIN, LtiModel
from .reduction import ReducedLti

W_G_DEFAULT = 1.0
W_P_DEFAULT = 0.01745


class FidelityError(ValueError):
    pass


@dataclass(frozen=True)
class FrequencyResponse:
    """Complex responses per (input, output) pair over a frequency grid."""

    omega: np.ndarray  # rad/s, strictly increasing, positive
    pairs: tuple  # pair name strings, e.g. "q/delta_lon"
    response: np.ndarray  # complex, (n_omega, n_pairs)
    coherence: np.ndarray | None = None  # (n_omega, n_pairs) in [0, 1]

    def __post_init__(self):
        if np.any(self.omega <= 0) or np.any(np.diff(self.omega) <= 0):
            raise FidelityError("omega grid must be positive and strictly increasing")
        if self.response.shape != (self.omega.shape[0], len(self.pairs)):
            raise FidelityError("response shape inconsistent with grid/pairs")
        if self.coherence is not None and self.coherence.shape != self.response.shape:
            raise FidelityError("coherence shape inconsistent with response")

    def magnitude_db(self) -> np.ndarray:
        return 20.0 * np.log10(np.abs(self.response))

    def phase_deg(self) -> np.ndarray:
        return np.degrees(np.angle(self.response))

    def pair(self, name: str) -> np.ndarray:
        return self.response[:, self.pairs.index(name)]


def _model_matrices(model):
    if isinstance(model, ReducedLti):
        return model.a_hat, model.b_hat, model.c_hat, model.d_hat, model.output_index, model.input_index, None
    if isinstance(model, LtiModel):
        return model.a, model.b, model.c, model.d, model.output_index, model.input_index, model.state_index
    raise FidelityError(f"unsupported model type {type(model).__name__}")


def _parse_target(target: str, output_index, state_index, c, d):
    """Row of (C, D) for a pair target.

    Targets: "<output_label>" (mean), "<output_label>.<1c|1s|2c|..>" for a
    harmonic row, or a state label (mean harmonic) when the model carries a
    state index.
    """
    label, _, harm = target.partition(".")
    if harm:
        n = int(harm[:-1])
        kind = {"c": COS, "s": SIN}.get(harm[-1])
        if kind is None or n < 1:
            raise FidelityError(f"bad harmonic suffix in target {target!r}")
    else:
        n, kind = 0, MEAN
    try:
        row = output_index.row(label, n, kind)
        return c[row], d[row]
    except KeyError:
        pass
    if state_index is not None and kind == MEAN:
        try:
            row = state_index.row(label, 0, MEAN)
        except KeyError:
            raise FidelityError(f"target {target!r} is neither an output nor a state") from None
        sel = np.zeros(c.shape[1])
        sel[row] = 1.0
        return sel, np.zeros(d.shape[1])
    raise FidelityError(f"target {target!r} not found in model outputs")


def frequency_response(model, pairs, omega) -> FrequencyResponse:
    """C (jwI - A)^-1 B + D per pair per frequency.

    Pair syntax: "<target>/<input_label>".  Raises on a frequency where the
    resolvent is singular (undamped pole on the grid).
    """
    a, b, c, d, output_index, input_index, state_index = _model_matrices(model)
    omega = np.asarray(omega, dtype=float)
    n = a.shape[0]
    rows = []
    cols = []
    for name in pairs:
        target, _, input_label = name.partition("/")
        if not input_label:
            raise FidelityError(f"pair {name!r} must be '<target>/<input>'")
        crow, drow = _parse_target(target, output_index, state_index, c, d)
        rows.append((crow, drow))
        try:
            cols.append(input_index.row(input_label, 0, MEAN))
        except KeyError:
            raise FidelityError(f"input {input_label!r} not found") from None

    resp = np.empty((omega.shape[0], len(pairs)), dtype=complex)
    eye = np.eye(n)
    for k, w in enumerate(omega):
        try:
            x = np.linalg.solve(1j * w * eye - a, b)
        except np.linalg.LinAlgError:
            raise FidelityError(f"resolvent singular at omega={w} rad/s (undamped pole)") from None
        for j, (crow, drow) in enumerate(rows):
            resp[k, j] = crow @ x[:, cols[j]] + drow[cols[j]]
    return FrequencyResponse(omega=omega, pairs=tuple(pairs), response=resp)


@dataclass(frozen=True)
class FidelityReport:
    """Per-pair frequency-domain mismatch costs."""

    pairs: tuple
    costs: np.ndarray
    omega_min: float
    omega_max: float
    w_g: float
    w_p: float

    @property
    def average(self) -> float:
        return float(np.mean(self.costs))

    def __str__(self) -> str:
        lines = [f"{'pair':24s} {'J':>10s}"]
        for name, cost in zip(self.pairs, self.costs):
            lines.append(f"{name:24s} {cost:10.3f}")
        lines.append(f"{'average':24s} {self.average:10.3f}")
        lines.append(f"frequency range: {self.omega_min:g} .. {self.omega_max:g} rad/s")
        return "\n".join(lines)


def coherence_weight(coh: np.ndarray) -> np.ndarray:
    return (1.58 * (1.0 - np.exp(-np.asarray(coh)))) ** 2


def fidelity_cost(
    model_fr: FrequencyResponse,
    ref_fr: FrequencyResponse,
    w_g: float = W_G_DEFAULT,
    w_p: float = W_P_DEFAULT,
) -> FidelityReport:
    """Compare a model response against a reference on a shared grid.

    Pairs are matched by name; coherence (if the reference carries one)
    biases the sum toward trustworthy frequencies.
    """
    if model_fr.omega.shape != ref_fr.omega.shape or np.max(np.abs(model_fr.omega - ref_fr.omega)) > 1e-12:
        raise FidelityError("frequency grids differ")
    shared = [p for p in model_fr.pairs if p in ref_fr.pairs]
    if not shared:
        raise FidelityError("no shared pairs between responses")

    n_w = model_fr.omega.shape[0]
    costs = np.empty(len(shared))
    for j, name in enumerate(shared):
        hm = model_fr.pair(name)
        hr = ref_fr.pair(name)
        dmag = 20.0 * np.log10(np.abs(hm)) - 20.0 * np.log10(np.abs(hr))
        dphase = np.degrees(np.angle(hm)) - np.degrees(np.angle(hr))
        dphase = (dphase + 180.0) % 360.0 - 180.0
        if ref_fr.coherence is not None:
            w_gamma = coherence_weight(ref_fr.coherence[:, ref_fr.pairs.index(name)])
        else:
            w_gamma = np.ones(n_w)
        costs[j] = (20.0 / n_w) * np.sum(w_gamma * (w_g * dmag**2 + w_p * dphase**2))
    return FidelityReport(
        pairs=tuple(shared),
        costs=costs,
        omega_min=float(model_fr.omega[0]),
        omega_max=float(model_fr.omega[-1]),
        w_g=w_g,
        w_p=w_p,
    )


def export_frequency_response(fr: FrequencyResponse, path) -> None:
    """CSV with columns omega, <pair>_re, <pair>_im [, <pair>_coh]."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        header = ["omega"]
        for name in fr.pairs:
            header += [f"{name}_re", f"{name}_im"]
            if fr.coherence is not None:
                header.append(f"{name}_coh")
        writer.writerow(header)
        for k in range(fr.omega.shape[0]):
            row = [f"{fr.omega[k]:.17g}"]
            for j in range(len(fr.pairs)):
                row += [f"{fr.response[k, j].real:.17g}", f"{fr.response[k, j].imag:.17g}"]
                if fr.coherence is not None:
                    row.append(f"{fr.coherence[k, j]:.17g}")
            writer.writerow(row)


def import_frequency_response(path) -> FrequencyResponse:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if not header or header[0] != "omega":
            raise FidelityError(f"{path}: malformed frequency-response header")
        pairs = []
        has_coh = False
        j = 1
        while j < len(header):
            name = header[j]
            if not name.endswith("_re"):
                raise FidelityError(f"{path}: unexpected column {name!r}")
            pairs.append(name[:-3])
            j += 2
            if j < len(header) and header[j].endswith("_coh"):
                has_coh = True
                j += 1
        rows = [row for row in reader if row]
    stride = 3 if has_coh else 2
    omega = np.array([float(r[0]) for r in rows])
    resp = np.empty((len(rows), len(pairs)), dtype=complex)
    coh = np.ones((len(rows), len(pairs))) if has_coh else None
    for k, r in enumerate(rows):
        for j in range(len(pairs)):
            base = 1 + j * stride
            resp[k, j] = float(r[base]) + 1j * float(r[base + 1])
            if has_coh:
                coh[k, j] = float(r[base + 2])
    return FrequencyResponse(omega=omega, pairs=tuple(pairs), response=resp, coherence=coh)
