"""Two-time-scale partition and quasi-steady residualization.

The fast states are assumed to reach their equilibrium instantaneously with
respect to the slow states; eliminating them gives

    A_hat = A_s - A_sf A_f^-1 A_fs        B_hat = B_s - A_sf A_f^-1 B_f
    C_hat = C_s - C_f  A_f^-1 A_fs        D_hat = D  - C_f  A_f^-1 B_f

implemented with LU solves rather than an explicit inverse.  DC gain is
preserved exactly for any stable partition.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .harmonic import MEAN, HarmonicIndex, LtiModel

REDUCED_SCHEMA_VERSION = 1

# Mean-harmonic slow set: body states plus first-harmonic flapping means.
DEFAULT_SLOW_LABELS = ("vx", "vy", "vz", "p", "q", "r", "theta", "phi", "beta_1c", "beta_1s")

COND_LIMIT = 1e12


class ReductionError(ValueError):
    pass


@dataclass(frozen=True)
class Partition:
    """Slow/fast split of an LTI state index."""

    slow_rows: np.ndarray
    fast_rows: np.ndarray
    slow_labels: tuple
    n_total: int

    def __post_init__(self):
        slow = set(self.slow_rows.tolist())
        fast = set(self.fast_rows.tolist())
        if not slow:
            raise ReductionError("slow set must be non-empty")
        if slow & fast:
            raise ReductionError("slow and fast sets overlap")
        if slow | fast != set(range(self.n_total)):
            raise ReductionError("partition must be exhaustive")


def default_partition(lti: LtiModel, slow_labels=DEFAULT_SLOW_LABELS) -> Partition:
    """Select the mean harmonics of the named states as the slow set."""
    slow = []
    for lab in slow_labels:
        try:
            slow.append(lti.state_index.row(lab, 0, MEAN))
        except KeyError:
            raise ReductionError(f"state '{lab}' not present in the LTI index") from None
    slow = np.array(slow, dtype=int)
    mask = np.ones(len(lti.state_index), dtype=bool)
    mask[slow] = False
    fast = np.nonzero(mask)[0]
    labels = tuple(f"{lab}:0:mean" for lab in slow_labels)
    return Partition(slow_rows=slow, fast_rows=fast, slow_labels=labels, n_total=len(lti.state_index))


@dataclass(frozen=True)
class ReducedLti:
    """Residualized slow-state model."""

    a_hat: np.ndarray
    b_hat: np.ndarray
    c_hat: np.ndarray
    d_hat: np.ndarray
    partition: Partition
    omega: float
    output_index: HarmonicIndex
    input_index: HarmonicIndex
    provenance: str = ""

    def __post_init__(self):
        k = self.partition.slow_rows.shape[0]
        if self.a_hat.shape != (k, k):
            raise ReductionError("A_hat dimension inconsistent with partition")
        for m in (self.a_hat, self.b_hat, self.c_hat, self.d_hat):
            if not np.all(np.isfinite(m)):
                raise ReductionError("non-finite entries in reduced model")

    @property
    def n_states(self) -> int:
        return self.a_hat.shape[0]

    def to_json(self) -> dict:
        return {
            "schema_version": REDUCED_SCHEMA_VERSION,
            "omega": self.omega,
            "provenance": self.provenance,
            "slow_rows": self.partition.slow_rows.tolist(),
            "fast_rows": self.partition.fast_rows.tolist(),
            "slow_labels": list(self.partition.slow_labels),
            "n_total": self.partition.n_total,
            "output_index": self.output_index.to_json(),
            "input_index": self.input_index.to_json(),
            "a_hat": self.a_hat.tolist(),
            "b_hat": self.b_hat.tolist(),
            "c_hat": self.c_hat.tolist(),
            "d_hat": self.d_hat.tolist(),
        }

    @classmethod
    def from_json(cls, doc: dict) -> "ReducedLti":
        if doc.get("schema_version") != REDUCED_SCHEMA_VERSION:
            raise ValueError(f"unsupported reduced schema_version {doc.get('schema_version')}")
        part = Partition(
            slow_rows=np.asarray(doc["slow_rows"], dtype=int),
            fast_rows=np.asarray(doc["fast_rows"], dtype=int),
            slow_labels=tuple(doc["slow_labels"]),
            n_total=int(doc["n_total"]),
        )
        return cls(
            a_hat=np.asarray(doc["a_hat"], dtype=float),
            b_hat=np.asarray(doc["b_hat"], dtype=float),
            c_hat=np.asarray(doc["c_hat"], dtype=float),
            d_hat=np.asarray(doc["d_hat"], dtype=float),
            partition=part,
            omega=float(doc["omega"]),
            output_index=HarmonicIndex.from_json(doc["output_index"]),
            input_index=HarmonicIndex.from_json(doc["input_index"]),
            provenance=doc.get("provenance", ""),
        )

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh)

    @classmethod
    def load(cls, path) -> "ReducedLti":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


def residualize(lti: LtiModel, part: Partition, provenance: str = "") -> ReducedLti:
    """Quasi-steady elimination of the fast states of an LTI model."""
    s, f = part.slow_rows, part.fast_rows
    a_s = lti.a[np.ix_(s, s)]
    a_sf = lti.a[np.ix_(s, f)]
    a_fs = lti.a[np.ix_(f, s)]
    a_f = lti.a[np.ix_(f, f)]
    b_s = lti.b[s, :]
    b_f = lti.b[f, :]
    c_s = lti.c[:, s]
    c_f = lti.c[:, f]

    if f.shape[0] == 0:
        return ReducedLti(
            a_hat=a_s.copy(),
            b_hat=b_s.copy(),
            c_hat=c_s.copy(),
            d_hat=lti.d.copy(),
            partition=part,
            omega=lti.omega,
            output_index=lti.output_index,
            input_index=lti.input_index,
            provenance=provenance,
        )

    fast_eigs = np.linalg.eigvals(a_f)
    worst = float(np.max(fast_eigs.real))
    if worst >= 0.0:
        raise ReductionError(
            f"fast subsystem is not stable (max Re eig = {worst:.3e}); "
            "residualization precondition violated"
        )
    cond = np.linalg.cond(a_f, 1)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        idx = int(np.argmin(np.abs(fast_eigs.real)))
        raise ReductionError(
            f"fast subsystem ill-conditioned (cond_1={cond:.3e}); nearly "
            f"unresidualizable mode at eigenvalue {fast_eigs[idx]:.4g}"
        )

    lu, piv = scipy.linalg.lu_factor(a_f)
    x_afs = scipy.linalg.lu_solve((lu, piv), a_fs)
    x_bf = scipy.linalg.lu_solve((lu, piv), b_f)

    return ReducedLti(
        a_hat=a_s - a_sf @ x_afs,
        b_hat=b_s - a_sf @ x_bf,
        c_hat=c_s - c_f @ x_afs,
        d_hat=lti.d - c_f @ x_bf,
        partition=part,
        omega=lti.omega,
        output_index=lti.output_index,
        input_index=lti.input_index,
        provenance=provenance,
    )


def dc_gain(a: np.ndarray, b: np.ndarray, c: np.ndarray, d: np.ndarray) -> np.ndarray:
    """Steady-state gain -C A^-1 B + D; requires Hurwitz A."""
    eigs = np.linalg.eigvals(a)
    if np.max(eigs.real) >= 0.0:
        raise ReductionError(f"dc_gain needs a Hurwitz state matrix (max Re eig = {np.max(eigs.real):.3e})")
    return d - c @ np.linalg.solve(a, b)


def dc_gain_model(model) -> np.ndarray:
    """dc_gain for either an LtiModel or a ReducedLti."""
    if isinstance(model, ReducedLti):
        return dc_gain(model.a_hat, model.b_hat, model.c_hat, model.d_hat)
    return dc_gain(model.a, model.b, model.c, model.d)
