"""Outcome probabilities, state updates and sampling for instruments.

Sampling uses numpy's PCG64 generator seeded with the caller's integer
(``numpy.random.default_rng(seed)``). Each shot consumes one uniform double
``u`` in [0, 1); the outcome is the first index whose cumulative
probability, in instrument label order, exceeds ``u``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    IndexOutOfRange,
    InvalidDecomposition,
    ValidationError,
    ZeroProbabilityOutcome,
)
from .matcore import DEFAULT_TOL, dag, norm
from .quantum_types import (
    DensityOperator,
    Instrument,
    Label,
    Observable,
    StateVector,
    as_density,
)

P_FLOOR = 1e-12


@dataclass(frozen=True)
class OutcomeDistribution:
    labels: tuple
    probabilities: np.ndarray

    def __getitem__(self, label) -> float:
        if isinstance(label, (int, np.integer)):
            return float(self.probabilities[label])
        return float(self.probabilities[self.labels.index(str(label))])

    def as_dict(self) -> dict:
        return dict(zip(self.labels, (float(p) for p in self.probabilities)))


@dataclass(frozen=True)
class SelectiveOutcome:
    label: str
    index: int
    probability: float
    post_state: DensityOperator


def _check_dims(inst: Instrument, dim: int):
    if inst.dim != dim:
        raise DimensionMismatch(f"instrument acts on dimension {inst.dim}, state has {dim}")


def _normalize(p: np.ndarray, tol: float) -> np.ndarray:
    if np.min(p) < -tol:
        raise ValidationError(f"negative outcome probability {np.min(p):.3e}")
    p = np.clip(p, 0.0, None)
    total = p.sum()
    if abs(total - 1.0) > tol:
        raise ValidationError(f"outcome probabilities sum to {total:.12g}, not 1")
    return p / total


def probabilities(inst: Instrument, rho) -> OutcomeDistribution:
    """``p_i = Tr(rho M_i^dag M_i)``, clamped and renormalized."""
    rho = as_density(rho)
    _check_dims(inst, rho.dim)
    raw = np.einsum("ij,kji->k", rho.matrix, inst.effects()).real
    return OutcomeDistribution(inst.labels, _normalize(raw, inst.tol + rho.tol))


def pure_probabilities(inst: Instrument, psi: StateVector) -> OutcomeDistribution:
    """``p_i = ||M_i psi||^2`` computed directly on the vector."""
    _check_dims(inst, psi.dim)
    images = inst.transformers @ psi.amplitudes
    raw = np.sum(np.abs(images) ** 2, axis=1)
    return OutcomeDistribution(inst.labels, _normalize(raw, inst.tol + psi.tol))


def _post_state(m: np.ndarray, rho: DensityOperator, tol: float) -> DensityOperator:
    out = m @ rho.matrix @ dag(m)
    out = (out + dag(out)) / 2
    return DensityOperator(out / np.trace(out).real, tol)


def apply_selective(
    inst: Instrument, label: Label, rho, p_floor: float = P_FLOOR
) -> SelectiveOutcome:
    """Conditional state ``M_i rho M_i^dag / p_i`` for one outcome."""
    rho = as_density(rho)
    dist = probabilities(inst, rho)
    i = inst.index(label)
    p = float(dist.probabilities[i])
    if p <= p_floor:
        raise ZeroProbabilityOutcome(
            f"outcome {inst.labels[i]!r} has probability {p:.3e}; post-state undefined"
        )
    return SelectiveOutcome(inst.labels[i], i, p, _post_state(inst.transformers[i], rho, rho.tol))


def apply_selective_pure(
    inst: Instrument, label: Label, psi: StateVector, p_floor: float = P_FLOOR
) -> tuple:
    """Vector form of the selective update: ``(p_i, M_i psi / sqrt(p_i))``."""
    dist = pure_probabilities(inst, psi)
    i = inst.index(label)
    p = float(dist.probabilities[i])
    if p <= p_floor:
        raise ZeroProbabilityOutcome(
            f"outcome {inst.labels[i]!r} has probability {p:.3e}; post-state undefined"
        )
    phi = inst.transformers[i] @ psi.amplitudes
    return p, StateVector(phi / np.linalg.norm(phi), psi.tol)


def apply_nonselective(inst: Instrument, rho) -> DensityOperator:
    """``rho -> sum_i M_i rho M_i^dag``."""
    rho = as_density(rho)
    _check_dims(inst, rho.dim)
    ms = inst.transformers
    out = np.einsum("kij,jl,kml->im", ms, rho.matrix, ms.conj())
    return DensityOperator((out + dag(out)) / 2, rho.tol + inst.tol)


def _cdf(dist: OutcomeDistribution) -> np.ndarray:
    cdf = np.cumsum(dist.probabilities)
    cdf[-1] = 1.0
    return cdf


def sample_indices(inst: Instrument, rho, shots: int, seed: int) -> np.ndarray:
    """Outcome indices for ``shots`` independent measurements of ``rho``."""
    if shots < 1:
        raise ValueError("shots must be at least 1")
    dist = probabilities(inst, rho)
    u = np.random.default_rng(seed).random(shots)
    return np.searchsorted(_cdf(dist), u, side="right")


def sample_counts(inst: Instrument, rho, shots: int, seed: int) -> np.ndarray:
    idx = sample_indices(inst, rho, shots, seed)
    return np.bincount(idx, minlength=len(inst))


def sample_outcome(inst: Instrument, rho, seed: int) -> SelectiveOutcome:
    """Draw one outcome and return its selective update."""
    i = int(sample_indices(inst, rho, 1, seed)[0])
    return apply_selective(inst, i, rho, p_floor=0.0)


def _index(obs: Observable, label_index) -> int:
    if isinstance(label_index, (int, np.integer)):
        if not 0 <= label_index < len(obs.eigenvalues):
            raise IndexOutOfRange(f"eigenvalue index {label_index} out of range")
        return int(label_index)
    return obs.index(label_index)


def has_sharp_value(rho, obs: Observable, label_index, tol: float = DEFAULT_TOL) -> bool:
    """True iff ``Tr(rho P_i) >= 1 - tol``."""
    rho = as_density(rho)
    if rho.dim != obs.dim:
        raise DimensionMismatch("state and observable dimensions differ")
    p = obs.projectors[_index(obs, label_index)]
    return float(np.trace(rho.matrix @ p).real) >= 1.0 - tol


def sharp_value_decomposition_check(
    rho,
    obs: Observable,
    label_index,
    weights: Sequence[float],
    pure_states: Sequence[StateVector],
    tol: float = DEFAULT_TOL,
) -> bool:
    """Check that a sharp value of ``rho`` is sharp in every pure component.

    ``rho`` must equal ``sum_k weights[k] |k><k|``. Returns the truth value of
    "rho sharp at m_i implies <k|P_i|k> >= 1 - tol for every k", which holds
    vacuously when ``rho`` is not sharp.
    """
    rho = as_density(rho)
    w = np.asarray(weights, dtype=float)
    if len(w) != len(pure_states) or len(w) == 0:
        raise InvalidDecomposition("weights and pure states must be nonempty and equal in number")
    if np.any(w <= 0) or abs(w.sum() - 1.0) > tol:
        raise InvalidDecomposition("weights must be positive and sum to 1")
    mix = sum(wk * k.projector() for wk, k in zip(w, pure_states))
    resid = norm(mix - rho.matrix)
    if resid > tol:
        raise InvalidDecomposition(f"mixture does not reconstruct rho: residual {resid:.3e}")
    if not has_sharp_value(rho, obs, label_index, tol):
        return True
    p = obs.projectors[_index(obs, label_index)]
    return all(
        np.vdot(k.amplitudes, p @ k.amplitudes).real >= 1.0 - tol for k in pure_states
    )


def spectral_components(rho, cutoff: float = 1e-12) -> tuple:
    """``(weights, pure_states)`` of the eigendecomposition of ``rho``,
    keeping eigenvalues above ``cutoff``."""
    rho = as_density(rho)
    w, v = rho.spectral()
    keep = w > cutoff
    w = w[keep]
    return w / w.sum(), [StateVector(v[:, k]) for k in np.flatnonzero(keep)]
