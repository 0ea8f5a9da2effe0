"""System + apparatus unitary models of an instrument.

Composite vectors are indexed ``a * apparatus_dim + l`` (system major).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import matcore
from .errors import (
    CompletenessViolation,
    DimensionMismatch,
    IndexOutOfRange,
    NotOrthonormal,
    NotUnitary,
    ValidationError,
    ZeroProbabilityOutcome,
)
from .matcore import DEFAULT_TOL, dag, norm
from .measurement import P_FLOOR
from .quantum_types import Instrument, StateVector


@dataclass(frozen=True)
class DilationModel:
    """Apparatus ready state, pointer basis (columns) and composite unitary."""

    system_dim: int
    apparatus_dim: int
    ready_state: np.ndarray
    pointer_basis: np.ndarray
    pointer_values: tuple
    unitary: np.ndarray
    labels: Optional[tuple] = None
    tol: float = field(default=DEFAULT_TOL, repr=False, compare=False)

    def __post_init__(self):
        d1, d2 = int(self.system_dim), int(self.apparatus_dim)
        if d1 < 1 or d2 < 1:
            raise ValidationError("dimensions must be positive")
        ready = np.array(self.ready_state, dtype=np.complex128).ravel()
        chi = matcore.as_matrix(self.pointer_basis)
        u = matcore.as_matrix(self.unitary)
        if ready.shape != (d2,) or chi.shape != (d2, d2) or u.shape != (d1 * d2, d1 * d2):
            raise DimensionMismatch("model arrays do not match system/apparatus dimensions")
        if abs(np.linalg.norm(ready) - 1.0) > self.tol:
            raise ValidationError("ready state is not a unit vector")
        if not matcore.is_unitary(chi, self.tol):
            raise NotOrthonormal("pointer basis is not orthonormal and complete")
        if not matcore.is_unitary(u, self.tol):
            raise NotUnitary("composite operator is not unitary within tol")
        values = tuple(float(b) for b in self.pointer_values)
        if len(values) != d2 or len(set(values)) != d2:
            raise ValidationError("pointer values must be distinct, one per pointer state")
        labels = self.labels
        if labels is None:
            labels = tuple(f"{b:g}" for b in values)
        labels = tuple(str(x) for x in labels)
        if len(labels) != d2:
            raise ValidationError("one label per pointer state required")
        for name, a in (("ready_state", ready), ("pointer_basis", chi), ("unitary", u)):
            a.setflags(write=False)
            object.__setattr__(self, name, a)
        object.__setattr__(self, "system_dim", d1)
        object.__setattr__(self, "apparatus_dim", d2)
        object.__setattr__(self, "pointer_values", values)
        object.__setattr__(self, "labels", labels)

    @property
    def composite_dim(self) -> int:
        return self.system_dim * self.apparatus_dim


def isometry_images(transformers) -> np.ndarray:
    """Columns ``sum_l (M_l e_j) (x) e_l`` for each system basis vector e_j."""
    ms = np.asarray(transformers, dtype=np.complex128)
    k, d, _ = ms.shape
    # out[a, l, j] = (M_l)[a, j]
    return np.transpose(ms, (1, 0, 2)).reshape(d * k, d)


def dilate(inst: Instrument, tol: Optional[float] = None) -> DilationModel:
    """Composite unitary taking ``psi (x) |0>`` to ``sum_l M_l psi (x) |l>``."""
    tol = inst.tol if tol is None else tol
    ms = inst.transformers
    k, d = len(ms), inst.dim
    images = isometry_images(ms)
    gram = norm(dag(images) @ images - np.eye(d))
    if gram > tol:
        raise CompletenessViolation(
            f"isometry images are not orthonormal (residual {gram:.3e}); "
            "the completeness relation fails"
        )
    columns = np.zeros((d * k, d), dtype=np.complex128)
    columns[np.arange(d) * k, np.arange(d)] = 1.0
    u = matcore.extend_isometry(columns, images, tol=tol)
    ready = np.zeros(k, dtype=np.complex128)
    ready[0] = 1.0
    return DilationModel(
        system_dim=d,
        apparatus_dim=k,
        ready_state=ready,
        pointer_basis=np.eye(k, dtype=np.complex128),
        pointer_values=tuple(float(l) for l in range(k)),
        unitary=u,
        labels=inst.labels,
        tol=tol,
    )


def _initial_isometry(model: DilationModel) -> np.ndarray:
    """``V[(a, l), b] = <a, l| U |b, ready>``."""
    embed = np.kron(np.eye(model.system_dim), model.ready_state.reshape(-1, 1))
    return model.unitary @ embed


def extract_instrument(model: DilationModel) -> Instrument:
    """``(M_i)_{ab} = (<a| (x) <chi_i|) U (|b> (x) |ready>)``."""
    d1, d2 = model.system_dim, model.apparatus_dim
    v = _initial_isometry(model).reshape(d1, d2, d1)
    ms = np.einsum("li,alb->iab", model.pointer_basis.conj(), v)
    return Instrument(ms, model.labels, model.tol)


def final_state(model: DilationModel, psi: StateVector) -> StateVector:
    if psi.dim != model.system_dim:
        raise DimensionMismatch(f"state of dimension {psi.dim}, system is {model.system_dim}")
    out = model.unitary @ np.kron(psi.amplitudes, model.ready_state)
    return StateVector(out, model.tol)


def pointer_components(model: DilationModel, composite: StateVector) -> np.ndarray:
    """Row i is the system vector multiplying ``|chi_i>`` in ``composite``."""
    if composite.dim != model.composite_dim:
        raise DimensionMismatch("composite state dimension does not match the model")
    psi = composite.amplitudes.reshape(model.system_dim, model.apparatus_dim)
    return (psi @ model.pointer_basis.conj()).T


def read_pointer(
    model: DilationModel, composite: StateVector, outcome_index: int, p_floor: float = P_FLOOR
) -> tuple:
    """Project onto pointer state i: returns ``(p_i, system post-state)``."""
    if not 0 <= outcome_index < model.apparatus_dim:
        raise IndexOutOfRange(f"pointer index {outcome_index} out of range")
    if composite.dim != model.composite_dim:
        raise DimensionMismatch("composite state dimension does not match the model")
    d1, d2 = model.system_dim, model.apparatus_dim
    chi = model.pointer_basis[:, outcome_index]
    projected = np.kron(np.eye(d1), np.outer(chi, chi.conj())) @ composite.amplitudes
    phi = projected.reshape(d1, d2) @ chi.conj()
    p = float(np.vdot(phi, phi).real)
    if p <= p_floor:
        raise ZeroProbabilityOutcome(f"pointer outcome {outcome_index} has probability {p:.3e}")
    assert norm(projected - np.kron(phi, chi)) <= 10 * model.tol, "projection is not a product"
    return p, StateVector(phi / np.sqrt(p), model.tol)


def composite_images(inst: Instrument, vectors: np.ndarray) -> np.ndarray:
    """Composite images ``sum_l M_l psi_j (x) |l>`` of the columns of ``vectors``."""
    return isometry_images(inst.transformers) @ np.asarray(vectors, dtype=np.complex128)


def round_trip_residual(inst: Instrument, model: DilationModel) -> float:
    """Largest elementwise deviation between ``inst`` and the extracted one."""
    back = extract_instrument(model)
    if back.transformers.shape != inst.transformers.shape:
        return float("inf")
    return float(np.max(np.abs(back.transformers - inst.transformers)))


def unitarity_residual(model: DilationModel) -> float:
    u = model.unitary
    return norm(dag(u) @ u - np.eye(u.shape[0]))

