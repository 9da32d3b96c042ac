"""Kernel, orthonormal-basis and subspace helpers."""

from __future__ import annotations

import numpy as np
import scipy.linalg

RANK_RTOL = 1e-10


def null_space(a: np.ndarray, rtol: float = RANK_RTOL, atol: float = 0.0,
               ncols: int | None = None) -> np.ndarray:
    """Orthonormal columns spanning ker(a).

    Singular values below ``max(rtol * sigma_max, atol)`` count as zero. An
    empty or all-zero ``a`` has the whole space as kernel; ``ncols`` supplies
    the column count when ``a`` has no rows.
    """
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2:
        raise ValueError("expected a matrix")
    m = a.shape[1] if ncols is None else ncols
    if a.size == 0:
        return np.eye(m, dtype=complex)
    _, s, vh = np.linalg.svd(a, full_matrices=True)
    if s.size == 0 or s[0] <= atol or s[0] == 0.0:
        return np.eye(m, dtype=complex)
    rank = int(np.count_nonzero(s > max(rtol * s[0], atol)))
    return vh[rank:].conj().T


def rank(a: np.ndarray, rtol: float = RANK_RTOL) -> int:
    a = np.asarray(a)
    if a.size == 0:
        return 0
    s = np.linalg.svd(a, compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > rtol * s[0]))


def fix_phase(v: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    """Rotate ``v`` so its first largest-magnitude entry is real positive."""
    v = np.asarray(v, dtype=complex)
    mags = np.abs(v)
    top = mags.max()
    if top == 0.0:
        return v
    first = int(np.flatnonzero(mags >= (1.0 - tol) * top)[0])
    return v * (abs(v[first]) / v[first])


def canonical_basis(cols: np.ndarray) -> np.ndarray:
    """Deterministic orthonormal basis for the column span of ``cols``.

    The result depends only on the subspace: pivot coordinates come from a
    column-pivoted QR, the span is reduced to echelon form on those pivots,
    then Gram-Schmidt runs in pivot order and each vector gets a fixed phase.
    """
    cols = np.asarray(cols, dtype=complex)
    r = cols.shape[1]
    if r == 0:
        return cols.copy()
    q, _ = np.linalg.qr(cols)
    _, _, piv = scipy.linalg.qr(q.conj().T, pivoting=True, mode="economic")
    pivots = np.sort(piv[:r])
    echelon = q @ np.linalg.inv(q[pivots, :])
    basis, _ = np.linalg.qr(echelon)
    return np.column_stack([fix_phase(basis[:, j]) for j in range(r)])


def orthonormalize(cols: np.ndarray, rtol: float = RANK_RTOL) -> np.ndarray:
    """Orthonormal basis of the span, dropping numerically dependent directions."""
    cols = np.asarray(cols, dtype=complex)
    if cols.shape[1] == 0:
        return cols
    u, s, _ = np.linalg.svd(cols, full_matrices=False)
    if s[0] == 0.0:
        return cols[:, :0]
    return u[:, s > rtol * s[0]]


def complement(basis: np.ndarray, within: np.ndarray | None = None) -> np.ndarray:
    """Orthonormal complement of span(basis) inside span(within) (default: everything)."""
    basis = np.asarray(basis, dtype=complex)
    dim = basis.shape[0]
    within = np.eye(dim, dtype=complex) if within is None else np.asarray(within, dtype=complex)
    if basis.shape[1] == 0:
        return within.copy()
    within = orthonormalize(within)
    residual = within - basis @ (basis.conj().T @ within)
    # Surviving directions keep singular value ~1 because ``within`` is orthonormal.
    u, s, _ = np.linalg.svd(residual, full_matrices=False)
    return u[:, s > 1e-6]


def subspace_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Largest principal angle between two column spans (inf on dimension mismatch)."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape[1] != b.shape[1]:
        return float("inf")
    if a.shape[1] == 0:
        return 0.0
    return float(np.max(scipy.linalg.subspace_angles(a, b)))


def is_hermitian(a: np.ndarray, atol: float = 1e-12) -> bool:
    a = np.asarray(a)
    scale = max(1.0, float(np.max(np.abs(a), initial=0.0)))
    return a.shape[0] == a.shape[1] and bool(np.max(np.abs(a - a.conj().T), initial=0.0) <= atol * scale)
