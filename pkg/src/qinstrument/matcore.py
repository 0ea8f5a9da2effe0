"""Dense complex matrix algebra used by every other module.

All routines take and return plain ``numpy`` arrays of dtype ``complex128``.
Norms are Frobenius unless stated otherwise. Composite spaces use the
subsystem-1-major index convention: ``k = i * d2 + j``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .errors import DimensionMismatch, NotHermitian, NotOrthonormal, NotPositive

DEFAULT_TOL = 1e-9
GROUP_RTOL = 1e-8
RANK_RTOL = 1e-10
# Gram-Schmidt candidates with a smaller residual norm are rejected.
COMPLETION_REJECT = 1e-10

ArrayLike = Union[np.ndarray, Sequence]


def as_matrix(m: ArrayLike, square: bool = True) -> np.ndarray:
    """Coerce ``m`` to a finite complex128 2-D array."""
    a = np.array(m, dtype=np.complex128)
    if a.ndim != 2:
        raise DimensionMismatch(f"expected a matrix, got shape {a.shape}")
    if square and a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {a.shape}")
    if a.size == 0:
        raise DimensionMismatch("empty matrix")
    if not np.all(np.isfinite(a)):
        raise DimensionMismatch("matrix has non-finite entries")
    return a


def dag(m: np.ndarray) -> np.ndarray:
    return m.conj().T


def norm(m: np.ndarray) -> float:
    return float(np.linalg.norm(m))


def spectral_norm(m: np.ndarray) -> float:
    return float(np.linalg.norm(m, 2))


def is_hermitian(m: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    return norm(dag(m) - m) <= tol


def is_unitary(m: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return norm(dag(m) @ m - np.eye(m.shape[0])) <= tol


def is_projector(m: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    return norm(m @ m - m) <= tol and norm(dag(m) - m) <= tol


@dataclass(frozen=True)
class SpectralDecomposition:
    """Distinct eigenvalues (ascending) with their eigenprojectors.

    ``bases[i]`` holds orthonormal columns spanning the i-th eigenspace, so
    ``projectors[i] == bases[i] @ bases[i].conj().T``.
    """

    eigenvalues: np.ndarray
    projectors: tuple
    bases: tuple

    @property
    def dim(self) -> int:
        return self.projectors[0].shape[0]

    @property
    def multiplicities(self) -> list:
        return [b.shape[1] for b in self.bases]

    def reconstruct(self) -> np.ndarray:
        return sum(v * p for v, p in zip(self.eigenvalues, self.projectors))


def _check_hermitian(m: np.ndarray, tol: float) -> np.ndarray:
    resid = norm(dag(m) - m)
    if resid > tol:
        raise NotHermitian(f"||m^dag - m|| = {resid:.3e} exceeds tol {tol:.1e}")
    return (m + dag(m)) / 2


def hermitian_eig(
    m: ArrayLike, group_tol: Optional[float] = None, tol: float = DEFAULT_TOL
) -> SpectralDecomposition:
    """Spectral form of a Hermitian matrix with degenerate eigenvalues merged.

    Raw eigenvalues whose consecutive gap is at most ``group_tol`` form one
    cluster; the cluster's eigenvalue is the mean of its members.
    ``group_tol`` defaults to ``1e-8 * max(1, ||m||_2)``.
    """
    m = _check_hermitian(as_matrix(m), tol)
    w, v = np.linalg.eigh(m)
    if group_tol is None:
        group_tol = GROUP_RTOL * max(1.0, float(np.max(np.abs(w))))
    if group_tol < 0:
        raise ValueError("group_tol must be nonnegative")

    starts = [0] + [k for k in range(1, len(w)) if w[k] - w[k - 1] > group_tol]
    stops = starts[1:] + [len(w)]
    values, projectors, bases = [], [], []
    for a, b in zip(starts, stops):
        basis = v[:, a:b]
        values.append(float(np.mean(w[a:b])))
        bases.append(basis)
        projectors.append(basis @ dag(basis))
    return SpectralDecomposition(np.array(values), tuple(projectors), tuple(bases))


def _psd_eigh(m: np.ndarray, tol: float):
    m = _check_hermitian(as_matrix(m), tol)
    w, v = np.linalg.eigh(m)
    if w[0] < -tol:
        raise NotPositive(f"smallest eigenvalue {w[0]:.3e} is below -tol")
    return np.clip(w, 0.0, None), v


def positive_sqrt(m: ArrayLike, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Unique positive semidefinite square root.

    Eigenvalues in ``[-tol, 0)`` are treated as roundoff and clamped to zero,
    as are eigenvalues at or below ``1e-10 * max(1, ||m||_2)``; the square
    root would otherwise inflate a roundoff zero of 1e-16 to 1e-8.
    """
    w, v = _psd_eigh(m, tol)
    w = np.where(w > RANK_RTOL * max(1.0, float(w[-1])), w, 0.0)
    return (v * np.sqrt(w)) @ dag(v)


def range_projector(
    m: ArrayLike, rank_tol: Optional[float] = None, tol: float = DEFAULT_TOL
) -> np.ndarray:
    """Projector onto the span of eigenvectors of a PSD matrix with eigenvalue
    above ``rank_tol`` (default ``1e-10 * max(1, ||m||_2)``)."""
    w, v = _psd_eigh(m, tol)
    if rank_tol is None:
        rank_tol = RANK_RTOL * max(1.0, float(w[-1]))
    keep = v[:, w > rank_tol]
    return keep @ dag(keep)


@dataclass(frozen=True)
class PolarFactors:
    """``a = unitary @ positive = partial_isometry @ positive``."""

    unitary: np.ndarray
    positive: np.ndarray
    partial_isometry: np.ndarray
    range_projector: np.ndarray

    @property
    def rank(self) -> int:
        return int(round(np.trace(self.range_projector).real))


def polar_factorize(a: ArrayLike, tol: float = DEFAULT_TOL) -> PolarFactors:
    """Polar factors built from the spectral form of ``a^dag a``.

    With ``a^dag a = sum_i m_i Q_i`` over its positive eigenvalues,
    ``H = sum_i sqrt(m_i) Q_i`` and the partial isometry is
    ``sum_i m_i**-0.5 a Q_i``. Expanding each ``Q_i`` over its eigenbasis
    gives the per-eigenvector sums used below, which avoids averaging
    nearly-degenerate eigenvalues. The partial isometry is extended to a
    unitary with :func:`extend_isometry`'s deterministic completion.
    """
    a = as_matrix(a)
    ata = dag(a) @ a
    w, v = _psd_eigh(ata, tol=max(tol, 1e-12 * max(1.0, spectral_norm(ata))))
    rank_tol = RANK_RTOL * max(1.0, float(w[-1]))
    pos = w > rank_tol

    h = (v[:, pos] * np.sqrt(w[pos])) @ dag(v[:, pos])
    src = v[:, pos]
    img = (a @ src) / np.sqrt(w[pos])
    partial = img @ dag(src)
    q = src @ dag(src)
    u = _extend(src, img)
    return PolarFactors(unitary=u, positive=h, partial_isometry=partial, range_projector=q)


def tensor(a: ArrayLike, b: ArrayLike) -> np.ndarray:
    """Kronecker product, first factor major."""
    return np.kron(np.asarray(a, dtype=np.complex128), np.asarray(b, dtype=np.complex128))


def partial_trace_2(m: ArrayLike, d1: int, d2: int) -> np.ndarray:
    """Trace out the second (minor-index) factor of a ``d1*d2`` operator."""
    m = as_matrix(m)
    if m.shape[0] != d1 * d2:
        raise DimensionMismatch(f"matrix of size {m.shape[0]} is not {d1}*{d2}")
    return np.einsum("ijkj->ik", m.reshape(d1, d2, d1, d2))


def _as_columns(vectors, d: Optional[int]) -> np.ndarray:
    if isinstance(vectors, np.ndarray) and vectors.ndim == 2:
        return vectors.astype(np.complex128)
    vectors = list(vectors)
    if not vectors:
        if d is None:
            raise DimensionMismatch("dimension required for an empty vector list")
        return np.zeros((d, 0), dtype=np.complex128)
    return np.column_stack([np.asarray(x, dtype=np.complex128).ravel() for x in vectors])


def complete_basis(cols: np.ndarray) -> np.ndarray:
    """Orthonormal complement of ``cols`` by Gram-Schmidt over e_0, e_1, ...

    Candidates are taken in index order; one whose residual norm falls below
    ``COMPLETION_REJECT`` is skipped. Each projection is applied twice.
    """
    d, k = cols.shape
    basis = cols.copy()
    extra = []
    for idx in range(d):
        if basis.shape[1] == d:
            break
        r = np.zeros(d, dtype=np.complex128)
        r[idx] = 1.0
        for _ in range(2):
            r = r - basis @ (dag(basis) @ r)
        nr = np.linalg.norm(r)
        if nr < COMPLETION_REJECT:
            continue
        r = r / nr
        extra.append(r)
        basis = np.column_stack([basis, r])
    if basis.shape[1] != d:
        raise NotOrthonormal("could not complete the vector set to a basis")
    return np.column_stack(extra) if extra else np.zeros((d, 0), dtype=np.complex128)


def _extend(src: np.ndarray, img: np.ndarray) -> np.ndarray:
    return np.column_stack([img, complete_basis(img)]) @ dag(
        np.column_stack([src, complete_basis(src)])
    )


def extend_isometry(
    columns, images, dim: Optional[int] = None, tol: float = DEFAULT_TOL
) -> np.ndarray:
    """Unitary ``U`` with ``U @ columns[j] == images[j]`` for every j.

    Both vector sets are completed to bases by :func:`complete_basis` and
    the completions are paired in order, so the result is reproducible.
    ``columns``/``images`` may be lists of vectors or ``d x k`` arrays.
    """
    x = _as_columns(columns, dim)
    y = _as_columns(images, x.shape[0] if dim is None else dim)
    if x.shape != y.shape:
        raise DimensionMismatch(f"columns {x.shape} and images {y.shape} differ in shape")
    d, k = x.shape
    if dim is not None and d != dim:
        raise DimensionMismatch(f"vectors have dimension {d}, expected {dim}")
    if k > d:
        raise DimensionMismatch(f"{k} vectors cannot be orthonormal in dimension {d}")
    for name, s in (("columns", x), ("images", y)):
        resid = norm(dag(s) @ s - np.eye(k))
        if resid > tol:
            raise NotOrthonormal(f"{name} not orthonormal: residual {resid:.3e}")
    return _extend(x, y)
