"""Complete projective measurements and POVMs on a chosen subsystem.

A measurement basis on a d-level subsystem is parameterized by an ordered
product of two-level (Givens) rotations over the d(d-1)/2 index pairs in
lexicographic order, each carrying one mixing angle and one relative phase:
d^2 - d real parameters in total (angles first, then phases).  Every basis
is reachable up to outcome relabeling and per-vector phase, which is all a
projective measurement can distinguish.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .qstate import (
    EIG_CLIP,
    QState,
    matrix_from_json,
    matrix_to_json,
    von_neumann_entropy,
)

__all__ = [
    "OUTCOME_FLOOR",
    "OutcomeEnsemble",
    "POVM",
    "ProjectiveMeasurement",
    "apply_measurement",
    "avg_conditional_entropy",
    "dephase",
    "measurement_from_json",
    "measurement_to_json",
    "n_measurement_params",
    "projective_from_params",
    "unitary_from_params",
]

UNITARITY_TOL = 1e-10
ELEMENT_PSD_TOL = 1e-10
COMPLETENESS_TOL = 1e-9

# Outcomes with probability below this floor are dropped to avoid 0/0 in
# conditional-state normalization.
OUTCOME_FLOOR = 1e-12


def n_measurement_params(d: int) -> int:
    """Number of real parameters for a rank-1 projective basis on d levels."""
    return d * d - d


def unitary_from_params(d: int, params) -> np.ndarray:
    """Unitary built as an ordered product of two-level rotations.

    ``params`` holds the d(d-1)/2 Givens angles followed by the d(d-1)/2
    phases, with pairs (i, j) visited in lexicographic order.
    """
    d = int(d)
    params = np.asarray(params, dtype=float).ravel()
    n_pairs = d * (d - 1) // 2
    if params.size != 2 * n_pairs:
        raise ValueError(
            f"expected {2 * n_pairs} parameters for d={d}, got {params.size}"
        )
    thetas = params[:n_pairs]
    phis = params[n_pairs:]
    u = np.eye(d, dtype=complex)
    k = 0
    for i in range(d):
        for j in range(i + 1, d):
            c = math.cos(thetas[k])
            s = math.sin(thetas[k])
            ph = complex(math.cos(phis[k]), math.sin(phis[k]))
            col_i = u[:, i].copy()
            col_j = u[:, j].copy()
            u[:, i] = c * col_i + ph.conjugate() * s * col_j
            u[:, j] = -ph * s * col_i + c * col_j
            k += 1
    return u


@dataclass(frozen=True, eq=False)
class ProjectiveMeasurement:
    """Complete rank-1 projective measurement on one subsystem.

    ``basis`` columns are the measurement vectors; ``params`` records the
    generating parameter vector when the basis came from
    ``projective_from_params``.
    """

    subsystem: int
    basis: np.ndarray
    params: np.ndarray | None = None

    def __post_init__(self):
        b = np.array(self.basis, dtype=np.complex128)
        if b.ndim != 2 or b.shape[0] != b.shape[1]:
            raise ValueError(f"basis must be square, got shape {b.shape}")
        residual = float(np.max(np.abs(b.conj().T @ b - np.eye(b.shape[0]))))
        if residual > UNITARITY_TOL:
            raise ValueError(f"basis unitarity residual {residual:.3g} exceeds {UNITARITY_TOL}")
        b.setflags(write=False)
        object.__setattr__(self, "subsystem", int(self.subsystem))
        object.__setattr__(self, "basis", b)
        if self.params is not None:
            p = np.array(self.params, dtype=float)
            p.setflags(write=False)
            object.__setattr__(self, "params", p)

    @property
    def d(self) -> int:
        return self.basis.shape[0]

    def relabeled(self, permutation) -> "ProjectiveMeasurement":
        """Same measurement with outcome labels permuted."""
        perm = list(permutation)
        return ProjectiveMeasurement(self.subsystem, self.basis[:, perm])


@dataclass(frozen=True, eq=False)
class POVM:
    """General measurement given by PSD elements summing to the identity."""

    subsystem: int
    elements: tuple

    def __post_init__(self):
        elems = tuple(np.array(e, dtype=np.complex128) for e in self.elements)
        if not elems:
            raise ValueError("a POVM needs at least one element")
        d = elems[0].shape[0]
        total = np.zeros((d, d), dtype=complex)
        for e in elems:
            if e.shape != (d, d):
                raise ValueError("POVM elements must be square and share one dimension")
            if float(np.max(np.abs(e - e.conj().T))) > ELEMENT_PSD_TOL:
                raise ValueError("POVM element is not Hermitian")
            if float(np.linalg.eigvalsh(e)[0]) < -ELEMENT_PSD_TOL:
                raise ValueError("POVM element is not positive semidefinite")
            e.setflags(write=False)
            total += e
        if float(np.max(np.abs(total - np.eye(d)))) > COMPLETENESS_TOL:
            raise ValueError("POVM elements do not sum to the identity")
        object.__setattr__(self, "subsystem", int(self.subsystem))
        object.__setattr__(self, "elements", elems)

    @property
    def d(self) -> int:
        return self.elements[0].shape[0]


Measurement = Union[ProjectiveMeasurement, POVM]


@dataclass(frozen=True, eq=False)
class OutcomeEnsemble:
    """Measurement outcomes: probabilities with conditional states.

    Outcomes below ``OUTCOME_FLOOR`` have already been dropped; probabilities
    of the survivors sum to 1 within 1e-9.
    """

    probabilities: np.ndarray
    states: tuple

    def __post_init__(self):
        p = np.array(self.probabilities, dtype=float)
        if p.ndim != 1 or p.size != len(self.states):
            raise ValueError("probabilities and states must have matching lengths")
        if p.size == 0:
            raise ValueError("ensemble must contain at least one outcome")
        if np.any(p <= 0.0) or abs(p.sum() - 1.0) > 1e-9:
            raise ValueError("probabilities must be positive and sum to 1 within 1e-9")
        p.setflags(write=False)
        object.__setattr__(self, "probabilities", p)
        object.__setattr__(self, "states", tuple(self.states))

    @property
    def n_outcomes(self) -> int:
        return self.probabilities.size


def projective_from_params(d: int, params, subsystem: int = 0) -> ProjectiveMeasurement:
    """Projective measurement whose basis is ``unitary_from_params(d, params)``."""
    params = np.asarray(params, dtype=float).ravel()
    return ProjectiveMeasurement(subsystem, unitary_from_params(d, params), params)


def _measured_axes(n: int, subsystem: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    order = (subsystem,) + tuple(i for i in range(n) if i != subsystem)
    return order, order + tuple(n + i for i in order)


def _measured_view(state: QState, subsystem: int):
    """Reshape ``state`` to (d_m, R, d_m, R) with the measured factor first.

    Returns the tensor, the measured dimension, and the remaining dims in
    their original order.
    """
    n = state.n_subsystems
    if not 0 <= subsystem < n:
        raise ValueError(f"subsystem {subsystem} out of range for {n} subsystems")
    dims = state.dims
    order, axes = _measured_axes(n, subsystem)
    rest = tuple(dims[i] for i in order[1:])
    r = int(np.prod(rest)) if rest else 1
    t = state.matrix.reshape(dims + dims).transpose(axes).reshape(dims[subsystem], r, dims[subsystem], r)
    return t, dims[subsystem], rest


def _conditional_blocks(t: np.ndarray, basis: np.ndarray) -> np.ndarray:
    """Unnormalized conditional blocks <b_k| rho |b_k> for every outcome."""
    u = np.tensordot(basis.conj().T, t, axes=([1], [0]))
    return np.einsum("krbs,bk->krs", u, basis)


def _povm_blocks(t: np.ndarray, elements) -> np.ndarray:
    e = np.stack([np.asarray(el) for el in elements])
    return np.einsum("kab,bras->krs", e, t, optimize=True)


def apply_measurement(state: QState, m: Measurement) -> OutcomeEnsemble:
    """Measure one subsystem: outcome probabilities and conditional states.

    p_k = Tr(E_k rho) and rho_k = Tr_measured(E_k rho) / p_k; the unmeasured
    subsystems keep their original order.  Outcomes with p_k below
    ``OUTCOME_FLOOR`` are dropped.
    """
    t, dm, rest = _measured_view(state, m.subsystem)
    if isinstance(m, ProjectiveMeasurement):
        if m.d != dm:
            raise ValueError(f"measurement dimension {m.d} does not match subsystem dimension {dm}")
        blocks = _conditional_blocks(t, m.basis)
    elif isinstance(m, POVM):
        if m.d != dm:
            raise ValueError(f"POVM dimension {m.d} does not match subsystem dimension {dm}")
        blocks = _povm_blocks(t, m.elements)
    else:
        raise TypeError(f"unsupported measurement type {type(m).__name__}")
    probs = np.einsum("krr->k", blocks).real
    rest_dims = rest if rest else (1,)
    kept_p = []
    kept_states = []
    for k in range(probs.size):
        if probs[k] < OUTCOME_FLOOR:
            continue
        c = blocks[k] / probs[k]
        kept_p.append(probs[k])
        kept_states.append(QState(rest_dims, (c + c.conj().T) / 2.0))
    return OutcomeEnsemble(np.array(kept_p), tuple(kept_states))


def avg_conditional_entropy(ensemble: OutcomeEnsemble) -> float:
    """Average conditional entropy sum_k p_k S(rho_k), in bits.

    Uses exactly rounded summation so the result is invariant under outcome
    relabeling.
    """
    return math.fsum(
        p * von_neumann_entropy(s)
        for p, s in zip(ensemble.probabilities, ensemble.states)
    )


def dephase(state: QState, m: ProjectiveMeasurement) -> QState:
    """Nonselective projective measurement: sum_k (P_k (x) I) rho (P_k (x) I).

    Idempotent and trace preserving; entropy never decreases.  POVM input is
    rejected because dephasing requires orthogonal projectors.
    """
    if not isinstance(m, ProjectiveMeasurement):
        raise TypeError("dephasing requires a complete projective measurement")
    n = state.n_subsystems
    t, dm, rest = _measured_view(state, m.subsystem)
    if m.d != dm:
        raise ValueError(f"measurement dimension {m.d} does not match subsystem dimension {dm}")
    blocks = _conditional_blocks(t, m.basis)
    deph = np.einsum("ak,bk,krs->arbs", m.basis, m.basis.conj(), blocks, optimize=True)
    order, axes = _measured_axes(n, m.subsystem)
    rest_dims = rest if rest else ()
    deph = deph.reshape((dm,) + rest_dims + (dm,) + rest_dims)
    deph = deph.transpose(np.argsort(axes))
    side = state.dim
    out = deph.reshape(side, side)
    return QState(state.dims, (out + out.conj().T) / 2.0)


def measurement_to_json(m: ProjectiveMeasurement) -> dict:
    """Serialize a projective measurement for report reproducibility."""
    return {"subsystem": int(m.subsystem), "basis": matrix_to_json(m.basis)}


def measurement_from_json(obj: dict) -> ProjectiveMeasurement:
    return ProjectiveMeasurement(int(obj["subsystem"]), matrix_from_json(obj["basis"]))
