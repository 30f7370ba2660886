"""Harmonic decomposition: LTP -> augmented LTI assembly and Fourier utilities.

Each LTP state is approximated as mean + cos/sin harmonic components whose
coefficients become states of a constant-coefficient model.  The assembly
substitutes the harmonic expansions into the periodic dynamics, expands the
trig products with product-to-sum identities, truncates harmonics above the
retained order, and matches coefficients of {1, cos n psi, sin n psi}.

Sign convention (fixed by the constant-coefficient block pattern, see tests):
d/dt(x_nc cos n psi) puts -n*Omega*x_nc into the sin-row balance, so the A
matrix carries -n*Omega*I on the (cos_n, sin_n) block and +n*Omega*I on the
(sin_n, cos_n) block.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .plant import LtpModel

LTI_SCHEMA_VERSION = 1

MEAN, COS, SIN = "mean", "cos", "sin"


class AliasingError(ValueError):
    """Too few samples per period for the requested harmonic order."""


@dataclass(frozen=True)
class HarmonicIndex:
    """Bidirectional map between rows and (base label, harmonic, kind) triples."""

    entries: tuple  # of (label, n, kind)
    _lookup: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        lookup = {e: i for i, e in enumerate(self.entries)}
        if len(lookup) != len(self.entries):
            raise ValueError("duplicate harmonic index entries")
        for label, n, kind in self.entries:
            if kind == MEAN and n != 0:
                raise ValueError("mean entries must have n=0")
            if kind in (COS, SIN) and n < 1:
                raise ValueError("cos/sin entries need n >= 1")
        object.__setattr__(self, "_lookup", lookup)

    @classmethod
    def build(cls, labels, order: int) -> "HarmonicIndex":
        """[mean block, then cos/sin blocks for n = 1..order], matching the
        augmented-vector layout."""
        entries = [(lab, 0, MEAN) for lab in labels]
        for n in range(1, order + 1):
            entries.extend((lab, n, COS) for lab in labels)
            entries.extend((lab, n, SIN) for lab in labels)
        return cls(entries=tuple(entries))

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def labels(self) -> tuple:
        """Base labels in block order (from the mean block)."""
        return tuple(lab for lab, n, kind in self.entries if kind == MEAN)

    @property
    def order(self) -> int:
        return max((n for _, n, _ in self.entries), default=0)

    def row(self, label: str, n: int, kind: str) -> int:
        try:
            return self._lookup[(label, n, kind)]
        except KeyError:
            raise KeyError(f"no harmonic row for ({label!r}, n={n}, {kind})") from None

    def triple(self, row: int) -> tuple:
        return self.entries[row]

    def block_rows(self, n: int, kind: str) -> np.ndarray:
        return np.array([i for i, (_, en, ek) in enumerate(self.entries) if en == n and ek == kind], dtype=int)

    def rows_for_label(self, label: str) -> np.ndarray:
        return np.array([i for i, (lab, _, _) in enumerate(self.entries) if lab == label], dtype=int)

    def coeff_rows(self, label: str, order: int) -> np.ndarray:
        """Rows of label's coefficients in [c0, c1c, c1s, ...] order."""
        rows = [self.row(label, 0, MEAN)]
        for n in range(1, order + 1):
            rows.append(self.row(label, n, COS))
            rows.append(self.row(label, n, SIN))
        return np.array(rows, dtype=int)

    def to_json(self):
        return [[lab, n, kind] for lab, n, kind in self.entries]

    @classmethod
    def from_json(cls, doc) -> "HarmonicIndex":
        return cls(entries=tuple((str(l), int(n), str(k)) for l, n, k in doc))


@dataclass(frozen=True)
class LtiModel:
    """Augmented constant-coefficient model over harmonic components."""

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray
    state_index: HarmonicIndex
    input_index: HarmonicIndex
    output_index: HarmonicIndex
    omega: float
    n_state_harmonics: int
    n_input_harmonics: int
    n_output_harmonics: int
    warnings: tuple = ()

    def __post_init__(self):
        ns, ni, no = len(self.state_index), len(self.input_index), len(self.output_index)
        if self.a.shape != (ns, ns) or self.b.shape != (ns, ni):
            raise ValueError("A/B dimensions inconsistent with index maps")
        if self.c.shape != (no, ns) or self.d.shape != (no, ni):
            raise ValueError("C/D dimensions inconsistent with index maps")

    @property
    def n_states(self) -> int:
        return self.a.shape[0]

    def to_json(self) -> dict:
        return {
            "schema_version": LTI_SCHEMA_VERSION,
            "omega": self.omega,
            "n_state_harmonics": self.n_state_harmonics,
            "n_input_harmonics": self.n_input_harmonics,
            "n_output_harmonics": self.n_output_harmonics,
            "state_index": self.state_index.to_json(),
            "input_index": self.input_index.to_json(),
            "output_index": self.output_index.to_json(),
            "warnings": list(self.warnings),
            "a": self.a.tolist(),
            "b": self.b.tolist(),
            "c": self.c.tolist(),
            "d": self.d.tolist(),
        }

    @classmethod
    def from_json(cls, doc: dict) -> "LtiModel":
        if doc.get("schema_version") != LTI_SCHEMA_VERSION:
            raise ValueError(f"unsupported LTI schema_version {doc.get('schema_version')}")
        return cls(
            a=np.asarray(doc["a"], dtype=float),
            b=np.asarray(doc["b"], dtype=float),
            c=np.asarray(doc["c"], dtype=float),
            d=np.asarray(doc["d"], dtype=float),
            state_index=HarmonicIndex.from_json(doc["state_index"]),
            input_index=HarmonicIndex.from_json(doc["input_index"]),
            output_index=HarmonicIndex.from_json(doc["output_index"]),
            omega=float(doc["omega"]),
            n_state_harmonics=int(doc["n_state_harmonics"]),
            n_input_harmonics=int(doc["n_input_harmonics"]),
            n_output_harmonics=int(doc["n_output_harmonics"]),
            warnings=tuple(doc.get("warnings", ())),
        )

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh)

    @classmethod
    def load(cls, path) -> "LtiModel":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


def _canon(kind: str, k: int, w: float):
    """Canonicalize cos/sin of a possibly negative or zero harmonic."""
    if kind == COS:
        if k == 0:
            return (MEAN, 0, w)
        return (COS, abs(k), w)
    if k == 0:
        return None  # sin(0) = 0
    if k < 0:
        return (SIN, -k, -w)
    return (SIN, k, w)


def _product_terms(term_kind: str, p: int, basis_kind: str, n: int):
    """Fourier terms of [coefficient term](psi) * basis(psi).

    term_kind/basis_kind in {mean, cos, sin}; the mean kind means the constant
    1.  Returns a list of (kind, order, weight).
    """
    if term_kind == MEAN:
        return [(basis_kind, n, 1.0)]
    if basis_kind == MEAN:
        return [(term_kind, p, 1.0)]
    out = []
    if term_kind == COS and basis_kind == COS:
        out = [_canon(COS, p - n, 0.5), _canon(COS, p + n, 0.5)]
    elif term_kind == SIN and basis_kind == SIN:
        out = [_canon(COS, p - n, 0.5), _canon(COS, p + n, -0.5)]
    elif term_kind == SIN and basis_kind == COS:
        out = [_canon(SIN, p + n, 0.5), _canon(SIN, p - n, 0.5)]
    else:  # cos * sin
        out = [_canon(SIN, p + n, 0.5), _canon(SIN, p - n, -0.5)]
    return [t for t in out if t is not None]


def _table_terms(table: np.ndarray):
    """(kind, order, matrix) triples of a stacked Fourier table."""
    yield (MEAN, 0, table[0])
    order = (table.shape[0] - 1) // 2
    for i in range(1, order + 1):
        yield (COS, i, table[2 * i - 1])
        yield (SIN, i, table[2 * i])


def _index_blocks(index: HarmonicIndex, block: int):
    """(kind, n, row_offset) for each contiguous block of size `block`."""
    out = [(MEAN, 0, 0)]
    order = index.order
    for n in range(1, order + 1):
        out.append((COS, n, (2 * n - 1) * block))
        out.append((SIN, n, 2 * n * block))
    return out


def _galerkin(table: np.ndarray, row_index: HarmonicIndex, col_index: HarmonicIndex) -> np.ndarray:
    """Project table(psi) * [column basis] onto the row basis by harmonic balance."""
    n_r, n_c = table.shape[1], table.shape[2]
    rows = _index_blocks(row_index, n_r)
    cols = _index_blocks(col_index, n_c)
    row_pos = {(kind, n): off for kind, n, off in rows}
    out = np.zeros((len(row_index), len(col_index)))
    for t_kind, p, mat in _table_terms(table):
        for c_kind, n, c_off in cols:
            for kind, k, w in _product_terms(t_kind, p, c_kind, n):
                off = row_pos.get((kind, k))
                if off is None:
                    continue  # harmonic above the retained order: truncated
                out[off : off + n_r, c_off : c_off + n_c] += w * mat
    return out


def assemble_lti(ltp: LtpModel, n_state: int, n_input: int = 0, n_output: int = 1) -> LtiModel:
    """Assemble the augmented LTI model with N/M/L harmonic orders.

    Only the zeroth input harmonic is kept by default (n_input=0); higher
    input harmonics are supported as plumbing.  A warning record is attached
    when the retained orders truncate stored coefficient content.
    """
    if n_state < 0 or n_input < 0 or n_output < 0:
        raise ValueError("harmonic orders must be non-negative")
    state_index = HarmonicIndex.build(ltp.state_labels, n_state)
    input_index = HarmonicIndex.build(ltp.input_labels, n_input)
    output_index = HarmonicIndex.build(ltp.output_labels, n_output)

    warnings = []
    if n_state < ltp.fourier_order:
        warnings.append(
            f"state harmonic order {n_state} below coefficient order "
            f"{ltp.fourier_order}: truncation bias"
        )

    a = _galerkin(ltp.f_table, state_index, state_index)
    n = ltp.n_states
    omega = ltp.omega
    for h in range(1, n_state + 1):
        cos_off = (2 * h - 1) * n
        sin_off = 2 * h * n
        for j in range(n):
            a[cos_off + j, sin_off + j] += -h * omega
            a[sin_off + j, cos_off + j] += h * omega

    b = _galerkin(ltp.g_table, state_index, input_index)
    c = _galerkin(ltp.p_table, output_index, state_index)
    d = _galerkin(ltp.r_table, output_index, input_index)

    return LtiModel(
        a=a,
        b=b,
        c=c,
        d=d,
        state_index=state_index,
        input_index=input_index,
        output_index=output_index,
        omega=omega,
        n_state_harmonics=n_state,
        n_input_harmonics=n_input,
        n_output_harmonics=n_output,
        warnings=tuple(warnings),
    )


def harmonic_analyze(signal, order: int) -> np.ndarray:
    """Fourier coefficients [c0, c1c, c1s, ...] of one period of samples.

    signal has shape (K,) or (K, m) with K uniform samples psi_k = 2 pi k / K
    (the wrap point is not repeated, so the rectangle sum below is the
    trapezoidal rule on the periodic extension).  Exact for content at or
    below the grid Nyquist.
    """
    sig = np.asarray(signal, dtype=float)
    squeeze = sig.ndim == 1
    if squeeze:
        sig = sig[:, None]
    k = sig.shape[0]
    if k < 2 * (order + 1):
        raise AliasingError(f"{k} samples cannot resolve harmonic order {order}")
    psi = np.arange(k) * (2 * np.pi / k)
    coeffs = np.empty((2 * order + 1, sig.shape[1]))
    coeffs[0] = sig.mean(axis=0)
    for n in range(1, order + 1):
        coeffs[2 * n - 1] = (2.0 / k) * (np.cos(n * psi) @ sig)
        coeffs[2 * n] = (2.0 / k) * (np.sin(n * psi) @ sig)
    return coeffs[:, 0] if squeeze else coeffs


def reconstruct_signal(coeffs, psi):
    """Evaluate the Fourier sum at azimuth(s) psi; inverse of harmonic_analyze.

    coeffs has shape (2N+1,) or (2N+1, m); psi may be scalar or (K,).
    """
    coeffs = np.asarray(coeffs, dtype=float)
    psi = np.asarray(psi, dtype=float)
    order = (coeffs.shape[0] - 1) // 2
    basis = np.empty(psi.shape + (2 * order + 1,))
    basis[..., 0] = 1.0
    for n in range(1, order + 1):
        basis[..., 2 * n - 1] = np.cos(n * psi)
        basis[..., 2 * n] = np.sin(n * psi)
    return basis @ coeffs


def lift_state(x_ltp, index: HarmonicIndex) -> np.ndarray:
    """Initialize the augmented vector from a measured LTP state.

    The mean block takes the measurement, every harmonic block is zero: only
    mean components are measurable, and the resulting transient is part of the
    modeled estimation error.
    """
    x_ltp = np.asarray(x_ltp, dtype=float)
    labels = index.labels
    if x_ltp.shape != (len(labels),):
        raise ValueError(f"expected state of length {len(labels)}, got {x_ltp.shape}")
    out = np.zeros(len(index))
    out[: len(labels)] = x_ltp
    return out


def project_mean(x_aug, index: HarmonicIndex) -> np.ndarray:
    """Mean-block projection; left inverse of lift_state."""
    return np.asarray(x_aug, dtype=float)[: len(index.labels)].copy()


def reconstruct_outputs(lti: LtiModel, y_aug, psi):
    """Physical outputs from augmented output trajectories.

    y_aug has shape (K, n_out_rows); psi shape (K,).  Returns (K, ny) where
    ny is the base output count.
    """
    y_aug = np.asarray(y_aug, dtype=float)
    psi = np.asarray(psi, dtype=float)
    labels = lti.output_index.labels
    order = lti.n_output_harmonics
    out = np.empty((y_aug.shape[0], len(labels)))
    for j, lab in enumerate(labels):
        rows = lti.output_index.coeff_rows(lab, order)
        coeffs = y_aug[:, rows]  # (K, 2L+1)
        vals = coeffs[:, 0].copy()
        for n in range(1, order + 1):
            vals += coeffs[:, 2 * n - 1] * np.cos(n * psi) + coeffs[:, 2 * n] * np.sin(n * psi)
        out[:, j] = vals
    return out
