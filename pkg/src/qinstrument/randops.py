"""Seeded random states, observables, POVMs and instruments.

Every generator takes a ``numpy.random.Generator``.
"""
from __future__ import annotations

import numpy as np

from .matcore import dag
from .quantum_types import DensityOperator, Instrument, Observable, Povm, StateVector


def ginibre(rng: np.random.Generator, rows: int, cols: int = None) -> np.ndarray:
    cols = rows if cols is None else cols
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2)


def haar_unitary(rng: np.random.Generator, d: int) -> np.ndarray:
    q, r = np.linalg.qr(ginibre(rng, d))
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases


def state_vector(rng: np.random.Generator, d: int) -> StateVector:
    psi = ginibre(rng, d, 1).ravel()
    return StateVector(psi / np.linalg.norm(psi))


def density(rng: np.random.Generator, d: int, rank: int = None) -> DensityOperator:
    g = ginibre(rng, d, d if rank is None else rank)
    rho = g @ dag(g)
    return DensityOperator(rho / np.trace(rho).real)


def observable(rng: np.random.Generator, d: int, n_values: int = None) -> Observable:
    """Random eigenspaces with a random partition of the dimension."""
    n_values = int(rng.integers(1, d + 1)) if n_values is None else n_values
    cuts = np.sort(rng.choice(np.arange(1, d), size=n_values - 1, replace=False))
    bounds = np.concatenate([[0], cuts, [d]])
    u = haar_unitary(rng, d)
    projs = [u[:, a:b] @ dag(u[:, a:b]) for a, b in zip(bounds[:-1], bounds[1:])]
    values = np.sort(rng.uniform(-3, 3, size=n_values))
    while n_values > 1 and np.min(np.diff(values)) < 1e-3:
        values = np.sort(rng.uniform(-3, 3, size=n_values))
    return Observable(values, projs)


def povm(rng: np.random.Generator, d: int, k: int) -> Povm:
    """Random PSD operators normalized by ``S^{-1/2} A_i S^{-1/2}``."""
    raw = [ginibre(rng, d) for _ in range(k)]
    raw = [a @ dag(a) for a in raw]
    w, v = np.linalg.eigh(sum(raw))
    s = (v / np.sqrt(w)) @ dag(v)
    return Povm([s @ a @ s for a in raw])


def instrument(rng: np.random.Generator, d: int, k: int) -> Instrument:
    """Transformers ``(1 (x) <l|) U (1 (x) |0>)`` of a Haar unitary on ``d*k``."""
    u = haar_unitary(rng, d * k)
    v = u[:, np.arange(d) * k].reshape(d, k, d)
    return Instrument(np.transpose(v, (1, 0, 2)))


def ordinary_instrument(
    rng: np.random.Generator, d: int, k: int, repeatable=None
) -> Instrument:
    """``M_i = V_i P_i`` for a random projector resolution ``{P_i}``.

    ``repeatable[i]`` (default random) makes ``V_i`` block diagonal on
    ``R(P_i) + R(P_i)^perp`` so that ``P_i M_i = M_i``; otherwise ``V_i`` is
    Haar random and the outcome is generically nonrepeatable.
    """
    k = min(k, d)
    obs = observable(rng, d, k)
    if repeatable is None:
        repeatable = rng.integers(0, 2, size=k).astype(bool)
    ms = []
    for p, rep in zip(obs.projectors, repeatable):
        if rep:
            w, basis = np.linalg.eigh(p)
            r = int(round(np.trace(p).real))
            blocks = np.zeros((d, d), dtype=np.complex128)
            blocks[: d - r, : d - r] = haar_unitary(rng, d - r) if d > r else 0
            blocks[d - r :, d - r :] = haar_unitary(rng, r)
            v = basis @ blocks @ dag(basis)
        else:
            v = haar_unitary(rng, d)
        ms.append(v @ p)
    return Instrument(ms)


def rank_deficient(rng: np.random.Generator, d: int, zeroed: int) -> np.ndarray:
    """Random square matrix with ``zeroed`` singular values set to zero."""
    u, s, vh = np.linalg.svd(ginibre(rng, d))
    s[d - zeroed :] = 0.0
    return (u * s) @ vh
