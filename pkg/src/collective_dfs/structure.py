"""Decoherence-free subspaces, su(2) irrep towers and completely-DF subspaces.

The single collective jump operator ``J`` maps W(k) into W(k-1); its kernel
on W(k) is the DF subspace V(k). A subspace of V(k) is completely
decoherence-free when it is also invariant under the bath-induced system
Hamiltonian, which is decided here by a Krylov (observability) construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

import numpy as np

from . import _linalg
from .qubit_space import (
    StateVector,
    WeightSector,
    collective_op,
    popcounts,
    sector_block,
    weight_sector,
)

MAX_DECOMPOSE_QUBITS = 8
CDF_TOL = 1e-10


@dataclass(frozen=True)
class SubspaceBasis:
    """Orthonormal columns (full ``2**n`` coordinates) spanning a subspace."""

    vectors: np.ndarray
    sector: WeightSector | None = None

    def __post_init__(self):
        vecs = np.array(self.vectors, dtype=complex, copy=True)
        if vecs.ndim == 1:
            vecs = vecs[:, None]
        gram = vecs.conj().T @ vecs
        if vecs.shape[1] and np.max(np.abs(gram - np.eye(vecs.shape[1]))) > 1e-10:
            raise ValueError("basis vectors are not orthonormal")
        if self.sector is not None and vecs.shape[1]:
            pops = popcounts(self.sector.n)
            if np.max(np.abs(vecs[pops != self.sector.k]), initial=0.0) > 1e-10:
                raise ValueError("basis vector leaves its weight sector")
        vecs.setflags(write=False)
        object.__setattr__(self, "vectors", vecs)

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def __len__(self) -> int:
        return self.dim

    @property
    def states(self) -> list[StateVector]:
        k = None if self.sector is None else self.sector.k
        return [StateVector(self.vectors[:, j], excitation=k) for j in range(self.dim)]

    def projector(self) -> np.ndarray:
        return self.vectors @ self.vectors.conj().T

    def contains(self, v, tol: float = 1e-8) -> bool:
        v = np.asarray(v, dtype=complex)
        return bool(np.linalg.norm(v - self.projector() @ v) <= tol * max(1.0, np.linalg.norm(v)))


@dataclass(frozen=True)
class IrrepTower:
    """One su(2) irrep: lowest-weight vector and its normalised raising ladder."""

    lowest_weight: StateVector
    ladder: tuple[StateVector, ...]
    spin: Fraction

    def __len__(self) -> int:
        return len(self.ladder)


@dataclass(frozen=True)
class CdfsResult:
    basis: SubspaceBasis
    iterations: int

    @property
    def dim(self) -> int:
        return self.basis.dim


def df_dimension(n: int, k: int) -> int:
    """dim V(k) = C(n, k) - C(n, k-1), clipped at zero past the middle weight."""
    if k < 0 or k > n:
        raise ValueError(f"excitation count {k} out of range 0..{n}")
    below = comb(n, k - 1) if k >= 1 else 0
    return max(0, comb(n, k) - below)


def strong_collective_dimension(n: int) -> int:
    """Dimension of the J=0 subspace of ``n`` qubits (the Catalan number C_{n/2})."""
    if n < 2 or n % 2:
        raise ValueError(f"strong-collective DFS needs an even qubit count, got {n}")
    return comb(n, n // 2) // (n // 2 + 1)


def jump_block(n: int, k: int) -> np.ndarray:
    """J restricted to W(k), as a C(n,k-1) x C(n,k) matrix (no rows when k=0)."""
    if k == 0:
        return np.zeros((0, 1), dtype=complex)
    return sector_block(collective_op(n, "J"), n, k - 1, k)


def _named_states(n: int, k: int) -> list[np.ndarray]:
    # Local import: encodings builds on dynamics, which builds on this module.
    from .encodings import named_sector_states

    return named_sector_states(n, k)


def _canonical_in_sector(coeffs: np.ndarray, sector: WeightSector) -> np.ndarray:
    """Full-space basis for a sector subspace; the named three- and four-qubit states win when they span it."""
    full = sector.embed(coeffs) if coeffs.shape[1] else np.zeros((2**sector.n, 0), dtype=complex)
    r = full.shape[1]
    if r == 0:
        return full
    proj = full @ full.conj().T
    inside = [v for v in _named_states(sector.n, sector.k)
              if np.linalg.norm(v - proj @ v) < 1e-8]
    if len(inside) == r:
        return np.column_stack(inside)
    return sector.embed(_linalg.canonical_basis(coeffs))


def df_subspace(n: int, k: int) -> SubspaceBasis:
    """Orthonormal basis of V(k) = ker J restricted to W(k)."""
    sector = weight_sector(n, k)
    kernel = _linalg.null_space(jump_block(n, k), ncols=sector.dim)
    return SubspaceBasis(_canonical_in_sector(kernel, sector), sector)


def irrep_decompose(n: int) -> list[IrrepTower]:
    """Split the ``2**n`` space into raising ladders built on lowest-weight vectors."""
    if n > MAX_DECOMPOSE_QUBITS:
        raise ValueError(f"irrep decomposition is limited to n <= {MAX_DECOMPOSE_QUBITS}")
    jdag = collective_op(n, "Jdag")
    towers = []
    for k in range(n // 2 + 1):
        spin = Fraction(n - 2 * k, 2)
        for v in df_subspace(n, k).states:
            ladder = [v]
            cur = v.amplitudes
            for step in range(1, n - 2 * k + 1):
                cur = jdag @ cur
                cur = cur / np.linalg.norm(cur)
                ladder.append(StateVector(cur, excitation=k + step))
            towers.append(IrrepTower(v, tuple(ladder), spin))
    return towers


def spin_multiplicities(towers: list[IrrepTower]) -> dict[Fraction, int]:
    counts: dict[Fraction, int] = {}
    for t in towers:
        counts[t.spin] = counts.get(t.spin, 0) + 1
    return dict(sorted(counts.items(), reverse=True))


def _check_hamiltonian(n: int, hamiltonian: np.ndarray) -> np.ndarray:
    h = np.asarray(hamiltonian, dtype=complex)
    if h.shape != (2**n, 2**n):
        raise ValueError(f"Hamiltonian shape {h.shape} does not match {n} qubits")
    if not _linalg.is_hermitian(h):
        raise ValueError("system Hamiltonian is not Hermitian")
    jz = collective_op(n, "Jz")
    scale = max(1.0, float(np.max(np.abs(h))))
    if np.max(np.abs(jz @ h - h @ jz)) > 1e-12 * scale:
        raise ValueError("system Hamiltonian does not commute with Jz")
    return h


def _shifted_block(h: np.ndarray, n: int, k: int) -> tuple[np.ndarray, float]:
    # Invariant subspaces ignore a constant shift; removing it keeps tolerances honest.
    hk = sector_block(h, n, k)
    hk = hk - np.trace(hk) / hk.shape[0] * np.eye(hk.shape[0])
    return hk, float(np.linalg.norm(hk, 2)) if hk.size else 0.0


def cdfs(n: int, k: int, hamiltonian: np.ndarray) -> CdfsResult:
    """Largest subspace of V(k) left invariant by the system Hamiltonian.

    Computed as the joint kernel of ``J H^m`` (m = 0 .. dim W(k) - 1) on
    W(k): its orthogonal complement is the block-Krylov space generated by
    ``H`` from the row space of ``J``, grown until it stops expanding.
    """
    h = _check_hamiltonian(n, hamiltonian)
    sector = weight_sector(n, k)
    hk, scale = _shifted_block(h, n, k)
    jk = jump_block(n, k)
    if jk.shape[0] == 0:
        return CdfsResult(SubspaceBasis(_canonical_in_sector(np.eye(sector.dim, dtype=complex), sector), sector), 0)
    reach = _linalg.orthonormalize(jk.conj().T)
    frontier = reach
    iterations = 0
    while frontier.shape[1] and reach.shape[1] < sector.dim and scale > 0.0:
        iterations += 1
        grown = hk @ frontier
        grown -= reach @ (reach.conj().T @ grown)
        grown -= reach @ (reach.conj().T @ grown)
        u, s, _ = np.linalg.svd(grown, full_matrices=False)
        frontier = u[:, s > CDF_TOL * scale]
        reach = np.hstack([reach, frontier])
    unreached = _linalg.complement(reach) if reach.shape[1] < sector.dim else np.zeros((sector.dim, 0), complex)
    return CdfsResult(SubspaceBasis(_canonical_in_sector(unreached, sector), sector), iterations)


def cdfs_fixpoint(n: int, k: int, hamiltonian: np.ndarray) -> CdfsResult:
    """Reference construction: shrink V(k) to {v : H v stays inside} until stable."""
    h = _check_hamiltonian(n, hamiltonian)
    sector = weight_sector(n, k)
    hk, scale = _shifted_block(h, n, k)
    q = _linalg.null_space(jump_block(n, k), ncols=sector.dim)
    iterations = 0
    while q.shape[1] and scale > 0.0:
        leak = hk @ q - q @ (q.conj().T @ hk @ q)
        keep = _linalg.null_space(leak, rtol=0.0, atol=CDF_TOL * scale)
        iterations += 1
        if keep.shape[1] == q.shape[1]:
            break
        q = _linalg.orthonormalize(q @ keep)
    return CdfsResult(SubspaceBasis(_canonical_in_sector(q, sector), sector), iterations)


def _krylov(h: np.ndarray, x: np.ndarray, tol: float) -> np.ndarray:
    basis = [x / np.linalg.norm(x)]
    for _ in range(h.shape[0]):
        w = h @ basis[-1]
        for b in basis:
            w = w - np.vdot(b, w) * b
        for b in basis:
            w = w - np.vdot(b, w) * b
        nrm = np.linalg.norm(w)
        if nrm <= tol:
            break
        basis.append(w / nrm)
    return np.column_stack(basis)


def verify_cdf_state(x, hamiltonian: np.ndarray, tol: float = CDF_TOL) -> bool:
    """True when ``J H^m x = 0`` for every power m, i.e. ``x`` never leaves ker J."""
    x = np.asarray(x, dtype=complex)
    n = x.shape[0].bit_length() - 1
    h = np.asarray(hamiltonian, dtype=complex)
    j = collective_op(n, "J")
    if np.linalg.norm(j @ x) > tol:
        return False
    shifted = h - np.trace(h) / h.shape[0] * np.eye(h.shape[0])
    scale = float(np.linalg.norm(shifted, 2))
    if scale == 0.0:
        return True
    krylov = _krylov(shifted, x, tol * scale)
    return bool(np.max(np.linalg.norm(j @ krylov, axis=0)) <= tol * max(1.0, np.sqrt(n)))


def cdf_leakage(x, hamiltonian: np.ndarray, times=None, samples: int = 20) -> np.ndarray:
    """``||J exp(-iHt) x||`` sampled over ``[0, 10/||H||]`` unless times are given."""
    x = np.asarray(x, dtype=complex)
    n = x.shape[0].bit_length() - 1
    h = np.asarray(hamiltonian, dtype=complex)
    evals, evecs = np.linalg.eigh(h)
    if times is None:
        hnorm = float(np.max(np.abs(evals))) or 1.0
        times = np.linspace(0.0, 10.0 / hnorm, samples)
    j = collective_op(n, "J")
    coeffs = evecs.conj().T @ x
    out = []
    for t in np.atleast_1d(times):
        xt = evecs @ (np.exp(-1j * evals * t) * coeffs)
        out.append(np.linalg.norm(j @ xt))
    return np.array(out)
