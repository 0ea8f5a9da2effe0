"""States, observables, POVMs and instruments.

Every type validates itself on construction and stores read-only arrays;
instances are immutable values. Each carries the tolerance it was
validated with (``tol``), which downstream operations reuse by default.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from . import matcore
from .errors import (
    CompletenessViolation,
    DimensionMismatch,
    IndexOutOfRange,
    NotPositive,
    NotUnitary,
    ValidationError,
)
from .matcore import DEFAULT_TOL, dag, norm

Label = Union[str, int]


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.complex128)
    a.setflags(write=False)
    return a


def _stack(mats, what: str) -> np.ndarray:
    mats = [matcore.as_matrix(m) for m in mats]
    if not mats:
        raise ValidationError(f"{what}: at least one operator required")
    d = mats[0].shape[0]
    if any(m.shape != (d, d) for m in mats):
        raise DimensionMismatch(f"{what}: operators differ in shape")
    return _frozen(np.stack(mats))


def eigenvalue_label(value: float) -> str:
    """Default outcome label for an eigenvalue: ``-1``, ``+1``, ``+0.5``."""
    return f"{value:+.15g}"


def _labels(labels, n: int, default) -> tuple:
    if labels is None:
        return tuple(default)
    labels = tuple(str(x) for x in labels)
    if len(labels) != n:
        raise ValidationError(f"{len(labels)} labels for {n} outcomes")
    if len(set(labels)) != n:
        raise ValidationError(f"outcome labels are not unique: {labels}")
    return labels


def _resolve(labels: tuple, label: Label) -> int:
    if isinstance(label, (int, np.integer)) and not isinstance(label, bool):
        if not 0 <= label < len(labels):
            raise IndexOutOfRange(f"outcome index {label} out of range 0..{len(labels) - 1}")
        return int(label)
    try:
        return labels.index(str(label))
    except ValueError:
        raise IndexOutOfRange(f"unknown outcome label {label!r}; have {list(labels)}") from None


@dataclass(frozen=True)
class StateVector:
    amplitudes: np.ndarray
    tol: float = field(default=DEFAULT_TOL, repr=False, compare=False)

    def __post_init__(self):
        psi = np.array(self.amplitudes, dtype=np.complex128).ravel()
        if psi.size == 0 or not np.all(np.isfinite(psi)):
            raise ValidationError("state vector must be nonempty and finite")
        n = np.linalg.norm(psi)
        if abs(n - 1.0) > self.tol:
            raise ValidationError(f"state vector norm {n:.12g} is not 1 within tol")
        object.__setattr__(self, "amplitudes", _frozen(psi))

    @classmethod
    def normalized(cls, amplitudes, tol: float = DEFAULT_TOL) -> "StateVector":
        psi = np.asarray(amplitudes, dtype=np.complex128).ravel()
        return cls(psi / np.linalg.norm(psi), tol)

    @classmethod
    def basis(cls, dim: int, index: int) -> "StateVector":
        psi = np.zeros(dim, dtype=np.complex128)
        psi[index] = 1.0
        return cls(psi)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def projector(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())

    def density(self) -> "DensityOperator":
        return DensityOperator(self.projector(), self.tol)

    def tensor(self, other: "StateVector") -> "StateVector":
        return StateVector(np.kron(self.amplitudes, other.amplitudes), self.tol)


@dataclass(frozen=True)
class DensityOperator:
    matrix: np.ndarray
    tol: float = field(default=DEFAULT_TOL, repr=False, compare=False)

    def __post_init__(self):
        rho = matcore.as_matrix(self.matrix)
        if not matcore.is_hermitian(rho, self.tol):
            raise ValidationError("density matrix is not Hermitian within tol")
        w = np.linalg.eigvalsh((rho + dag(rho)) / 2)
        if w[0] < -self.tol:
            raise NotPositive(f"density matrix has eigenvalue {w[0]:.3e} < -tol")
        tr = np.trace(rho).real
        if abs(tr - 1.0) > self.tol:
            raise ValidationError(f"density matrix trace {tr:.12g} is not 1 within tol")
        object.__setattr__(self, "matrix", _frozen(rho))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityOperator":
        return cls(np.eye(dim) / dim)

    def spectral(self):
        """Eigenvalues and eigenvectors (columns) of rho, ascending."""
        return np.linalg.eigh((self.matrix + dag(self.matrix)) / 2)


def as_density(state) -> DensityOperator:
    if isinstance(state, DensityOperator):
        return state
    if isinstance(state, StateVector):
        return state.density()
    raise TypeError(f"expected a StateVector or DensityOperator, got {type(state).__name__}")


@dataclass(frozen=True)
class Observable:
    """``M = sum_i m_i P_i`` with distinct ``m_i`` and a resolution of identity."""

    eigenvalues: np.ndarray
    projectors: np.ndarray
    tol: float = field(default=DEFAULT_TOL, repr=False, compare=False)

    def __post_init__(self):
        vals = np.array(self.eigenvalues, dtype=float).ravel()
        projs = _stack(self.projectors, "observable")
        if len(vals) != len(projs):
            raise ValidationError("eigenvalue and projector counts differ")
        if len(np.unique(vals)) != len(vals):
            raise ValidationError("observable eigenvalues must be distinct")
        tol = self.tol
        for i, p in enumerate(projs):
            if not matcore.is_projector(p, tol):
                raise ValidationError(f"projector {i} is not an orthogonal projector")
            if norm(p) <= tol:
                raise ValidationError(f"projector {i} is zero")
            for j in range(i):
                if norm(p @ projs[j]) > tol:
                    raise ValidationError(f"projectors {j} and {i} are not orthogonal")
        if norm(projs.sum(axis=0) - np.eye(projs.shape[1])) > tol:
            raise ValidationError("projectors do not sum to the identity")
        order = np.argsort(vals)
        vals = vals[order]
        vals.setflags(write=False)
        object.__setattr__(self, "eigenvalues", vals)
        object.__setattr__(self, "projectors", _frozen(projs[order]))

    @classmethod
    def from_matrix(
        cls, m, group_tol: Optional[float] = None, tol: float = DEFAULT_TOL
    ) -> "Observable":
        sd = matcore.hermitian_eig(m, group_tol=group_tol, tol=tol)
        return cls(sd.eigenvalues, sd.projectors, tol)

    @property
    def dim(self) -> int:
        return self.projectors.shape[1]

    @property
    def labels(self) -> tuple:
        labels = tuple(eigenvalue_label(v) for v in self.eigenvalues)
        if len(set(labels)) < len(labels):
            labels = tuple(f"{v:+.17g}" for v in self.eigenvalues)
        return labels

    @property
    def matrix(self) -> np.ndarray:
        return np.einsum("i,ijk->jk", self.eigenvalues, self.projectors)

    def index(self, label: Label) -> int:
        return _resolve(self.labels, label)

    def eigenbases(self) -> list:
        """Orthonormal basis of each eigenspace, from matcore's eigensolver."""
        out = []
        for p in self.projectors:
            w, v = np.linalg.eigh((p + dag(p)) / 2)
            out.append(v[:, w > 0.5])
        return out


@dataclass(frozen=True)
class Povm:
    effects: np.ndarray
    labels: Optional[tuple] = None
    tol: float = field(default=DEFAULT_TOL, repr=False, compare=False)

    def __post_init__(self):
        eff = _stack(self.effects, "povm")
        for i, e in enumerate(eff):
            if not matcore.is_hermitian(e, self.tol):
                raise ValidationError(f"effect {i} is not Hermitian")
            w = np.linalg.eigvalsh((e + dag(e)) / 2)
            if w[0] < -self.tol:
                raise NotPositive(f"effect {i} has eigenvalue {w[0]:.3e} < -tol")
        if norm(eff.sum(axis=0) - np.eye(eff.shape[1])) > self.tol:
            raise ValidationError("POVM effects do not sum to the identity")
        object.__setattr__(self, "effects", eff)
        object.__setattr__(
            self, "labels", _labels(self.labels, len(eff), (str(i) for i in range(len(eff))))
        )

    @property
    def dim(self) -> int:
        return self.effects.shape[1]

    def __len__(self) -> int:
        return len(self.effects)


@dataclass(frozen=True)
class Instrument:
    """State transformers ``M_i`` with ``sum_i M_i^dag M_i = 1``.

    Zero transformers are allowed.
    """

    transformers: np.ndarray
    labels: Optional[tuple] = None
    tol: float = field(default=DEFAULT_TOL, repr=False, compare=False)

    def __post_init__(self):
        ms = _stack(self.transformers, "instrument")
        resid = completeness_residual(ms)
        if resid > self.tol:
            raise CompletenessViolation(
                f"completeness relation sum_i M_i^dag M_i = 1 violated: residual {resid:.3e}"
            )
        object.__setattr__(self, "transformers", ms)
        object.__setattr__(
            self, "labels", _labels(self.labels, len(ms), (str(i) for i in range(len(ms))))
        )

    @property
    def dim(self) -> int:
        return self.transformers.shape[1]

    def __len__(self) -> int:
        return len(self.transformers)

    def index(self, label: Label) -> int:
        return _resolve(self.labels, label)

    def effects(self) -> np.ndarray:
        return np.einsum("kji,kjl->kil", self.transformers.conj(), self.transformers)


def completeness_residual(transformers) -> float:
    ms = np.asarray(transformers, dtype=np.complex128)
    total = np.einsum("kji,kjl->il", ms.conj(), ms)
    return norm(total - np.eye(ms.shape[1]))


def luders_instrument(obs: Observable) -> Instrument:
    """Instrument whose transformers are the eigenprojectors themselves."""
    return Instrument(obs.projectors, obs.labels, obs.tol)


def povm_of(inst: Instrument) -> Povm:
    return Povm(inst.effects(), inst.labels, inst.tol)


def instrument_from_povm(
    povm: Povm, unitaries: Optional[Sequence] = None, tol: Optional[float] = None
) -> Instrument:
    """Transformers ``U_i sqrt(Pi_i)``; all ``U_i`` default to the identity."""
    tol = povm.tol if tol is None else tol
    roots = [matcore.positive_sqrt(e, tol) for e in povm.effects]
    if unitaries is None:
        return Instrument(roots, povm.labels, tol)
    unitaries = [matcore.as_matrix(u) for u in unitaries]
    if len(unitaries) != len(roots):
        raise ValidationError(f"{len(unitaries)} unitaries for {len(roots)} effects")
    for i, u in enumerate(unitaries):
        if u.shape != roots[i].shape or not matcore.is_unitary(u, tol):
            raise NotUnitary(f"unitary {i} is not unitary within tol")
    return Instrument([u @ r for u, r in zip(unitaries, roots)], povm.labels, tol)


def maximal_refinement(obs: Observable) -> Observable:
    """Nondegenerate observable whose rank-1 projectors refine ``obs``.

    Eigenspace ``i`` of multiplicity ``r`` gets eigenvalues
    ``m_i + j * delta`` for ``j < r``, with
    ``delta = min_gap / (2 * max_multiplicity)`` (1 if there is a single
    eigenvalue), so refined values never cross into a neighbour's interval.
    """
    bases = obs.eigenbases()
    mult = max(b.shape[1] for b in bases)
    if len(obs.eigenvalues) > 1:
        delta = float(np.min(np.diff(obs.eigenvalues))) / (2 * mult)
    else:
        delta = 1.0
    values, projs = [], []
    for m, basis in zip(obs.eigenvalues, bases):
        for j in range(basis.shape[1]):
            v = basis[:, j]
            values.append(m + j * delta)
            projs.append(np.outer(v, v.conj()))
    return Observable(values, projs, obs.tol)


def refinement_groups(coarse: Observable, fine: Observable) -> list:
    """For each coarse eigenvalue, the indices of fine projectors inside it."""
    groups = [[] for _ in coarse.eigenvalues]
    for j, q in enumerate(fine.projectors):
        weights = [np.trace(p @ q).real for p in coarse.projectors]
        groups[int(np.argmax(weights))].append(j)
    return groups
