"""Ordinary / repeatable / ideal classification of state transformers.

Two independent routes decide each verdict:

* algebraic: ``M^dag M`` is a projector ``P``; repeatable iff ``P M = M``;
* polar: the positive polar factor ``H`` is a projector ``P``; repeatable
  iff the unitary factor maps the range of ``P`` into itself,
  ``||(1 - P) U P|| <= tol``.

A disagreement raises :class:`ConsistencyFailure`.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import matcore
from .errors import ConsistencyFailure, NotSingular
from .matcore import DEFAULT_TOL, PolarFactors, dag, norm
from .quantum_types import Instrument, Observable

# Residuals within this factor of tol (either side) are flagged as borderline.
BORDERLINE_FACTOR = 10.0


class Kind(str, enum.Enum):
    IDEAL_ORDINARY = "IdealOrdinary"
    REPEATABLE_ORDINARY = "RepeatableOrdinary"
    NONREPEATABLE_ORDINARY = "NonrepeatableOrdinary"
    MIXED_REPEATABILITY = "MixedRepeatability"
    GENERALIZED = "Generalized"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class OutcomeClassification:
    label: str
    is_ordinary: bool
    projector: Optional[np.ndarray]
    is_repeatable: Optional[bool]
    polar: PolarFactors
    residuals: dict = field(default_factory=dict)
    borderline: bool = False

    @property
    def rank(self) -> Optional[int]:
        if self.projector is None:
            return None
        return int(round(np.trace(self.projector).real))

    @property
    def ideal_residual(self) -> Optional[float]:
        return self.residuals.get("ideal")


@dataclass(frozen=True)
class InstrumentClassification:
    outcomes: tuple
    kind: Kind
    observable: Optional[Observable] = None
    resolution_residual: Optional[float] = None

    @property
    def is_ideal(self) -> bool:
        return self.kind is Kind.IDEAL_ORDINARY


def _borderline(r: float, tol: float) -> bool:
    return tol / BORDERLINE_FACTOR < r <= tol * BORDERLINE_FACTOR


def classify_outcome(
    m_i, label: str = "0", tol: float = DEFAULT_TOL
) -> OutcomeClassification:
    m = matcore.as_matrix(m_i)
    d = m.shape[0]
    polar = matcore.polar_factorize(m, tol)
    h, u = polar.positive, polar.unitary
    effect = dag(m) @ m

    res = {
        "effect_idempotence": norm(effect @ effect - effect),
        "polar_idempotence": norm(h @ h - h),
    }
    ordinary_alg = res["effect_idempotence"] <= tol
    ordinary_polar = res["polar_idempotence"] <= tol
    borderline = _borderline(res["effect_idempotence"], tol) or _borderline(
        res["polar_idempotence"], tol
    )
    if ordinary_alg != ordinary_polar:
        raise ConsistencyFailure(
            f"outcome {label!r}: M^dag M projector test ({res['effect_idempotence']:.3e}) "
            f"and H projector test ({res['polar_idempotence']:.3e}) disagree"
        )
    if not ordinary_polar:
        return OutcomeClassification(label, False, None, None, polar, res, borderline)

    p = (h + dag(h)) / 2
    res["right_invariance"] = norm(m - m @ p)
    res["left_invariance"] = norm(p @ m - m)
    res["range_leak"] = norm((np.eye(d) - p) @ u @ p)
    res["ideal"] = norm(m - p)
    rep_alg = res["left_invariance"] <= tol
    rep_polar = res["range_leak"] <= tol
    borderline = borderline or _borderline(res["left_invariance"], tol) or _borderline(
        res["range_leak"], tol
    )
    if rep_alg != rep_polar:
        raise ConsistencyFailure(
            f"outcome {label!r}: P M = M test ({res['left_invariance']:.3e}) and "
            f"range invariance of U ({res['range_leak']:.3e}) disagree"
        )
    return OutcomeClassification(label, True, p, rep_alg, polar, res, borderline)


def _eigenvalues_for(labels) -> list:
    try:
        values = [float(x) for x in labels]
    except ValueError:
        return list(range(len(labels)))
    return values if len(set(values)) == len(values) else list(range(len(labels)))


def classify_instrument(inst: Instrument, tol: Optional[float] = None) -> InstrumentClassification:
    """Classify every outcome and aggregate into an instrument :class:`Kind`.

    When all outcomes are ordinary the projectors are checked to resolve the
    identity and, if they do, returned as an :class:`Observable` whose
    eigenvalues are the numeric labels (or outcome indices). Zero projectors
    are left out of that observable.
    """
    tol = inst.tol if tol is None else tol
    outcomes = tuple(
        classify_outcome(m, label, tol) for m, label in zip(inst.transformers, inst.labels)
    )
    if not all(o.is_ordinary for o in outcomes):
        return InstrumentClassification(outcomes, Kind.GENERALIZED)

    resolution = norm(sum(o.projector for o in outcomes) - np.eye(inst.dim))
    observable = None
    if resolution <= tol:
        values = _eigenvalues_for(inst.labels)
        keep = [k for k, o in enumerate(outcomes) if norm(o.projector) > tol]
        observable = Observable(
            [values[k] for k in keep], [outcomes[k].projector for k in keep], tol
        )

    repeatable = [o.is_repeatable for o in outcomes]
    if all(o.ideal_residual <= tol for o in outcomes):
        kind = Kind.IDEAL_ORDINARY
    elif all(repeatable):
        kind = Kind.REPEATABLE_ORDINARY
    elif not any(repeatable):
        kind = Kind.NONREPEATABLE_ORDINARY
    else:
        kind = Kind.MIXED_REPEATABILITY
    return InstrumentClassification(outcomes, kind, observable, resolution)


def check_remark2(m_i, tol: float = DEFAULT_TOL) -> list:
    """Distinct projectors ``E`` with ``M E = M`` for a transformer with
    singular polar factor ``H``.

    Returns ``[Q, Q + |v_1><v_1|, ..., 1]`` where ``Q`` is the range
    projector of ``H`` and ``v_j`` run over an orthonormal basis of its null
    space; the identity closes the list.
    """
    m = matcore.as_matrix(m_i)
    d = m.shape[0]
    polar = matcore.polar_factorize(m, tol)
    q = matcore.range_projector(polar.positive, tol=tol)
    rank = int(round(np.trace(q).real))
    if rank == d:
        raise NotSingular("H has full rank; every projector E with M E = M is the identity")

    null = matcore.complete_basis(np.linalg.eigh(q)[1][:, d - rank:])
    candidates = [q]
    for j in range(null.shape[1] - 1):
        v = null[:, j]
        candidates.append(q + np.outer(v, v.conj()))
    candidates.append(np.eye(d, dtype=np.complex128))

    for e in candidates:
        if norm(q @ e - q) > tol or norm(m @ e - m) > tol:
            raise ConsistencyFailure("constructed projector does not satisfy M E = M")
    return candidates
