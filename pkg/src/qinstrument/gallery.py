"""Named operators and the two-spin instrument families.

The two-spin examples live on spin 1 (x) spin 2 in the standard z basis,
``|up> = e_0``, ``|down> = e_1``. The measured observable is
``sigma_z (x) 1 = P_up - P_down`` with ``P_n = |n><n| (x) 1``. Instruments
list outcomes as ``(up, down)`` with labels ``"+1"``, ``"-1"``.
"""
from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from . import matcore
from .errors import NotLocallyNontrivial, NotUnitary, ValidationError
from .matcore import DEFAULT_TOL, norm
from .quantum_types import Instrument, Observable, StateVector, luders_instrument

_PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
}

SWAP = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=np.complex128
)
CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=np.complex128
)

P_UP = np.diag([1, 1, 0, 0]).astype(np.complex128)
P_DOWN = np.diag([0, 0, 1, 1]).astype(np.complex128)
TWO_SPIN_LABELS = ("+1", "-1")


def pauli(axis: str) -> np.ndarray:
    try:
        return _PAULI[axis.lower()].copy()
    except (KeyError, AttributeError):
        raise ValidationError(f"unknown Pauli axis {axis!r}; use x, y or z") from None


def basis_state(dim: int, index: int) -> StateVector:
    return StateVector.basis(dim, index)


def plus_state() -> StateVector:
    return StateVector(np.array([1, 1]) / np.sqrt(2))


def sigma_z_observable() -> Observable:
    """Qubit sigma_z; outcomes ordered ``(-1, +1)``."""
    return Observable.from_matrix(pauli("z"))


def bit_observable() -> Observable:
    """Qubit ``|1><1|``; its Lüders instrument is ``(|0><0|, |1><1|)``."""
    return Observable.from_matrix(np.diag([0.0, 1.0]))


def appendix_c_observable() -> Observable:
    return Observable([-1.0, 1.0], [P_DOWN, P_UP])


def is_identity_on_first(u12: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    """True iff ``u12`` equals ``1 (x) V`` within tol.

    ``V`` is the block ``(<0| (x) 1) u12 (|0> (x) 1)`` replaced by its
    unitary polar factor.
    """
    u12 = matcore.as_matrix(u12)
    v = matcore.polar_factorize(u12[:2, :2], tol).unitary
    return norm(u12 - np.kron(np.eye(2), v)) <= tol


def _unitaries(given, default, dim: int, tol: float) -> list:
    us = list(default if given is None else given)
    if len(us) != 2:
        raise ValidationError("one unitary per outcome (up, down) required")
    us = [matcore.as_matrix(u) for u in us]
    for u in us:
        if u.shape != (dim, dim) or not matcore.is_unitary(u, tol):
            raise NotUnitary(f"expected a {dim}x{dim} unitary")
    return us


def appendix_c_instrument(
    variant: str = "ideal", unitaries: Optional[Sequence] = None, tol: float = DEFAULT_TOL
) -> Instrument:
    """Two-spin instruments measuring ``sigma_z (x) 1``.

    ``ideal``: ``M_n = P_n``.
    ``repeatable``: ``M_n = (1 (x) U2(n)) P_n``; default ``U2 = (sigma_x, 1)``.
    ``nonrepeatable``: ``M_n = U12(n) P_n`` where ``U12(n)`` must not be of
    the form ``1 (x) V``; default both ``SWAP``.
    """
    projectors = (P_UP, P_DOWN)
    if variant == "ideal":
        ms = list(projectors)
    elif variant == "repeatable":
        us = _unitaries(unitaries, (pauli("x"), np.eye(2)), 2, tol)
        ms = [np.kron(np.eye(2), u) @ p for u, p in zip(us, projectors)]
    elif variant == "nonrepeatable":
        us = _unitaries(unitaries, (SWAP, SWAP), 4, tol)
        for u in us:
            if is_identity_on_first(u, tol):
                raise NotLocallyNontrivial("U12 acts as the identity on the first spin")
        ms = [u @ p for u, p in zip(us, projectors)]
    else:
        raise ValidationError(f"unknown variant {variant!r}")
    return Instrument(ms, TWO_SPIN_LABELS, tol)


PRESETS = {
    "appendix-c-ideal": lambda: appendix_c_instrument("ideal"),
    "appendix-c-repeatable": lambda: appendix_c_instrument("repeatable"),
    "appendix-c-nonrepeatable": lambda: appendix_c_instrument("nonrepeatable"),
    "appendix-c-observable": appendix_c_observable,
    "luders-z": lambda: luders_instrument(sigma_z_observable()),
    "luders-bit": lambda: luders_instrument(bit_observable()),
    "half-half": lambda: Instrument([np.eye(2) / np.sqrt(2)] * 2),
    "pauli-x": lambda: pauli("x"),
    "pauli-y": lambda: pauli("y"),
    "pauli-z": lambda: pauli("z"),
    "nilpotent": lambda: np.array([[0, 1], [0, 0]], dtype=np.complex128),
    "plus": plus_state,
    "zero": lambda: basis_state(2, 0),
    "one": lambda: basis_state(2, 1),
}


def preset(name: str):
    try:
        return PRESETS[name]()
    except KeyError:
        raise ValidationError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
