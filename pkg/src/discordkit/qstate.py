"""Density-matrix algebra on multipartite quantum states.

Construction and validation of density matrices, tensor products, partial
traces, spectral decompositions, von Neumann entropies, and canonical
purification.  Everything operates on small dense matrices (total dimension
up to ~64).  All entropies are in bits (base-2 logarithms).

Eigenvalues below ``EIG_CLIP`` are treated as exact zeros and the remaining
spectrum is renormalized; this keeps ``0 * log 0`` and positivity checks
stable under floating-point eigensolvers, and it fixes the rank used for
purification.  Values are immutable after construction and safe to share
across concurrent workers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "EIG_CLIP",
    "InvalidStateError",
    "PureStateVector",
    "QState",
    "Spectrum",
    "StateDiagnostics",
    "conditional_entropy",
    "is_pure",
    "partial_trace",
    "permute_subsystems",
    "purify",
    "purity",
    "spectrum",
    "state_from_json",
    "state_to_json",
    "tensor",
    "validate",
    "von_neumann_entropy",
]

HERMITICITY_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-10
NORM_TOL = 1e-10

# Floor below which eigenvalues are treated as exact zeros.
EIG_CLIP = 1e-10


class InvalidStateError(ValueError):
    """A matrix or amplitude vector is not a valid quantum state."""


def _as_dims(dims) -> tuple[int, ...]:
    out = tuple(int(d) for d in dims)
    if not out:
        raise ValueError("dims must contain at least one subsystem")
    if any(d < 1 for d in out):
        raise ValueError(f"subsystem dimensions must be positive, got {out}")
    return out


def _as_complex_matrix(matrix) -> np.ndarray:
    m = np.array(matrix, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    return m


@dataclass(frozen=True)
class StateDiagnostics:
    """Validation residuals for a candidate density matrix."""

    hermiticity_error: float
    trace_error: float
    min_eigenvalue: float

    @property
    def hermitian_ok(self) -> bool:
        return self.hermiticity_error <= HERMITICITY_TOL

    @property
    def trace_ok(self) -> bool:
        return self.trace_error <= TRACE_TOL

    @property
    def psd_ok(self) -> bool:
        return self.min_eigenvalue >= -PSD_TOL

    @property
    def ok(self) -> bool:
        return self.hermitian_ok and self.trace_ok and self.psd_ok


def validate(matrix, dims) -> StateDiagnostics:
    """Report Hermiticity, trace, and positivity residuals of ``matrix``.

    Parameters
    ----------
    matrix:
        Any square complex matrix.
    dims:
        Ordered subsystem dimensions; their product must equal the matrix
        side (a mismatch raises ``ValueError``, every other defect is
        reported in the diagnostics rather than raised).
    """
    m = _as_complex_matrix(matrix)
    d = _as_dims(dims)
    side = int(np.prod(d))
    if m.shape[0] != side:
        raise ValueError(
            f"matrix side {m.shape[0]} does not match prod(dims) = {side}"
        )
    herm = float(np.max(np.abs(m - m.conj().T)))
    tr = float(abs(m.trace() - 1.0))
    # eigvalsh assumes Hermitian input; symmetrize so the positivity residual
    # stays meaningful even when the Hermiticity check itself fails.
    w = np.linalg.eigvalsh((m + m.conj().T) / 2.0)
    return StateDiagnostics(herm, tr, float(w[0]))


@dataclass(frozen=True, eq=False)
class QState:
    """A density matrix annotated with ordered subsystem dimensions.

    ``matrix`` is row-major over the tensor-product basis with subsystem 0
    slowest (``numpy.kron`` convention).  Construction validates Hermiticity
    (max-norm residual <= 1e-10), unit trace (<= 1e-10), and positive
    semidefiniteness (min eigenvalue >= -1e-10); the stored array is a
    read-only copy.
    """

    dims: tuple[int, ...]
    matrix: np.ndarray

    def __post_init__(self):
        dims = _as_dims(self.dims)
        m = _as_complex_matrix(self.matrix)
        diag = validate(m, dims)
        if not diag.ok:
            raise InvalidStateError(f"invalid density matrix: {diag}")
        m.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims))

    @property
    def n_subsystems(self) -> int:
        return len(self.dims)

    def __repr__(self) -> str:
        return f"QState(dims={self.dims})"


@dataclass(frozen=True, eq=False)
class PureStateVector:
    """A unit-norm amplitude vector with ordered subsystem dimensions."""

    dims: tuple[int, ...]
    amplitudes: np.ndarray

    def __post_init__(self):
        dims = _as_dims(self.dims)
        amps = np.array(self.amplitudes, dtype=np.complex128).ravel()
        if amps.size != int(np.prod(dims)):
            raise ValueError(
                f"amplitude length {amps.size} does not match prod(dims)"
            )
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > NORM_TOL:
            raise InvalidStateError(f"vector norm deviates from 1 by {abs(norm - 1.0):.3g}")
        amps.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims))

    @property
    def n_subsystems(self) -> int:
        return len(self.dims)

    def to_density(self) -> QState:
        """Return the rank-1 density matrix of this vector."""
        return QState(self.dims, np.outer(self.amplitudes, self.amplitudes.conj()))

    def __repr__(self) -> str:
        return f"PureStateVector(dims={self.dims})"


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Clipped, renormalized spectral decomposition, eigenvalues descending.

    Eigenvector columns carry a canonical phase: the first component with
    magnitude above 1e-8 is made real and positive, which keeps purification
    outputs reproducible under degenerate spectra.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def rank(self) -> int:
        return int(np.count_nonzero(self.eigenvalues > 0.0))

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def spectrum(state: QState) -> Spectrum:
    """Spectral decomposition of ``state`` with clipping and phase fixing."""
    w, v = np.linalg.eigh(state.matrix)
    order = np.argsort(-w, kind="stable")
    w = w[order]
    v = np.array(v[:, order])
    w = np.where(w < EIG_CLIP, 0.0, w)
    total = w.sum()
    if total > 0.0:
        w = w / total
    for k in range(v.shape[1]):
        nz = np.flatnonzero(np.abs(v[:, k]) > 1e-8)
        if nz.size:
            pivot = v[nz[0], k]
            v[:, k] = v[:, k] * (pivot.conjugate() / abs(pivot))
    return Spectrum(w, v)


def _entropy_bits(weights: np.ndarray) -> float:
    """Shannon entropy in bits of a clipped, renormalized weight vector."""
    w = np.where(weights < EIG_CLIP, 0.0, weights)
    total = w.sum()
    if total <= 0.0:
        return 0.0
    w = w / total
    pos = w[w > 0.0]
    return float(-(pos * np.log2(pos)).sum()) + 0.0


def von_neumann_entropy(state: QState) -> float:
    """Von Neumann entropy of ``state`` in bits; ``0 * log 0`` is 0."""
    return _entropy_bits(np.linalg.eigvalsh(state.matrix))


def tensor(a: QState, b: QState) -> QState:
    """Kronecker product of two states; dims are concatenated."""
    return QState(a.dims + b.dims, np.kron(a.matrix, b.matrix))


def partial_trace(state: QState, keep: Iterable[int]) -> QState:
    """Trace out every subsystem not listed in ``keep``.

    The kept subsystems stay in their original order.  Raises ``ValueError``
    for an empty or out-of-range selection.
    """
    kept = sorted({int(k) for k in keep})
    n = state.n_subsystems
    if not kept:
        raise ValueError("keep must name at least one subsystem")
    if kept[0] < 0 or kept[-1] >= n:
        raise ValueError(f"keep indices {kept} out of range for {n} subsystems")
    dims = state.dims
    t = state.matrix.reshape(dims + dims)
    for ax in reversed([i for i in range(n) if i not in kept]):
        t = np.trace(t, axis1=ax, axis2=ax + t.ndim // 2)
    kept_dims = tuple(dims[i] for i in kept)
    side = int(np.prod(kept_dims))
    return QState(kept_dims, t.reshape(side, side))


def permute_subsystems(state: QState, order: Sequence[int]) -> QState:
    """Reorder subsystems so that new position ``k`` holds old ``order[k]``."""
    order = tuple(int(o) for o in order)
    n = state.n_subsystems
    if sorted(order) != list(range(n)):
        raise ValueError(f"order {order} is not a permutation of range({n})")
    dims = state.dims
    axes = order + tuple(n + o for o in order)
    t = state.matrix.reshape(dims + dims).transpose(axes)
    new_dims = tuple(dims[o] for o in order)
    side = state.dim
    return QState(new_dims, t.reshape(side, side))


def conditional_entropy(state: QState, target: int, condition: int) -> float:
    """S(target | condition) = S(joint) - S(condition marginal), in bits.

    Both indices name single subsystems of ``state``; the joint is the
    reduction onto the pair.  May be negative for entangled states.
    """
    target, condition = int(target), int(condition)
    if target == condition:
        raise ValueError("target and condition must be distinct subsystems")
    n = state.n_subsystems
    for idx in (target, condition):
        if idx < 0 or idx >= n:
            raise ValueError(f"subsystem index {idx} out of range for {n} subsystems")
    joint = partial_trace(state, (target, condition))
    marginal = partial_trace(state, (condition,))
    return von_neumann_entropy(joint) - von_neumann_entropy(marginal)


def purity(state: QState) -> float:
    """Tr(rho^2), in (0, 1]."""
    m = state.matrix
    return float(np.real(np.trace(m @ m)))


def is_pure(state: QState, tol: float = 1e-9) -> bool:
    return purity(state) >= 1.0 - tol


def purify(state: QState) -> PureStateVector:
    """Canonical purification over an environment of dimension rank(state).

    Returns ``sum_i sqrt(l_i) |e_i> |i>`` built from the descending, clipped,
    phase-fixed spectral decomposition, so the output is reproducible.  The
    environment is appended as the last subsystem; tracing it out recovers
    ``state``.
    """
    sp = spectrum(state)
    r = sp.rank
    amps = sp.eigenvectors[:, :r] * np.sqrt(sp.eigenvalues[:r])
    return PureStateVector(state.dims + (r,), amps.reshape(-1))


def matrix_to_json(matrix: np.ndarray) -> list:
    """Complex matrix as nested lists of [re, im] pairs."""
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(matrix)]


def matrix_from_json(rows) -> np.ndarray:
    try:
        arr = np.asarray(rows, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InvalidStateError(f"matrix entries must be [re, im] pairs: {exc}") from None
    if arr.ndim != 3 or arr.shape[2] != 2 or arr.shape[0] != arr.shape[1]:
        raise InvalidStateError(
            f"matrix must be a square grid of [re, im] pairs, got shape {arr.shape}"
        )
    return arr[..., 0] + 1j * arr[..., 1]


def state_to_json(state: QState) -> dict:
    """JSON-ready dict with ``dims`` and a [re, im]-pair matrix."""
    return {"dims": list(state.dims), "matrix": matrix_to_json(state.matrix)}


def state_from_json(obj) -> QState:
    """Parse and re-validate a state from its JSON dict form."""
    if not isinstance(obj, dict):
        raise InvalidStateError("state JSON must be an object")
    for field in ("dims", "matrix"):
        if field not in obj:
            raise InvalidStateError(f"state JSON is missing the '{field}' field")
    try:
        dims = _as_dims(obj["dims"])
    except (TypeError, ValueError) as exc:
        raise InvalidStateError(f"bad 'dims' field: {exc}") from None
    return QState(dims, matrix_from_json(obj["matrix"]))
