"""Lindblad dynamics for N qubits coupled to a common bath.

The generator is

    d rho/dt = -i [H_S, rho] + L_D[rho],
    H_S      = sum_ab b_ab  S_a^dag S_b,
    L_D[rho] = 1/2 sum_ab a_ab ([S_b, rho S_a^dag] + [S_b rho, S_a^dag]),

with ``S_a = sigma_{a-}``. The factor 1/2 is the standard GKLS
normalisation for ``a_ab = Gamma_ab + Gamma*_ba``. When ``a = (lam / N) X``
(X all ones, ``lam`` its only nonzero eigenvalue) the dissipator collapses to
``lam/(2N) (2 J rho J^dag - {J^dag J, rho})``.
"""

from __future__ import annotations

import csv
import logging
import warnings
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from . import _linalg, kernels
from .qubit_space import (
    StateVector,
    collective_op,
    popcounts,
    single_qubit_op,
    weight_sector,
)
from .structure import SubspaceBasis

logger = logging.getLogger(__name__)

STEP_GUARD = 0.1
# dense density matrices beyond this are 4096 x 4096 and larger
MAX_EVOLVE_QUBITS = 12


class StepTooLargeError(ValueError):
    """Raised when ``dt`` times the generator's spectral scale exceeds the guard."""


@dataclass(frozen=True)
class CouplingModel:
    """Hermitian coupling matrices ``a`` (rates) and ``b`` (frequencies)."""

    a: np.ndarray
    b: np.ndarray
    lam: float | None = field(default=None, compare=False)

    def __post_init__(self):
        a = np.array(self.a, dtype=complex, copy=True)
        b = np.array(self.b, dtype=complex, copy=True)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape != b.shape:
            raise ValueError(f"coupling matrices must be square and equal-sized, got {a.shape}, {b.shape}")
        if not _linalg.is_hermitian(a) or not _linalg.is_hermitian(b):
            raise ValueError("coupling matrices must be Hermitian")
        a.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        uniform = a[0, 0]
        if np.all(a == uniform) and abs(uniform.imag) == 0.0:
            object.__setattr__(self, "lam", float(uniform.real) * self.n)
        elif self.lam is not None:
            raise ValueError("lam is only defined when every a_ab is equal")

    @classmethod
    def collective(cls, lam: float, b) -> "CouplingModel":
        """DF regime: every ``a_ab`` equals ``lam / N``."""
        b = np.asarray(b)
        if lam < 0:
            raise ValueError("lam must be nonnegative")
        n = b.shape[0]
        return cls(np.full((n, n), lam / n, dtype=complex), b)

    @property
    def n(self) -> int:
        return self.a.shape[0]

    @property
    def is_collective(self) -> bool:
        return self.lam is not None

    @property
    def collective_rate(self) -> float:
        """Prefactor of ``2 J rho J^dag - {J^dag J, rho}`` in the collapsed dissipator."""
        if self.lam is None:
            raise ValueError("model is not in the collective (a_ab = a) regime")
        return self.lam / (2 * self.n)

    def without_dissipation(self) -> "CouplingModel":
        return CouplingModel(np.zeros_like(self.a), self.b)

    def jump_operators(self, tol: float = 1e-14) -> tuple[np.ndarray, np.ndarray]:
        """Eigen-channels of ``a``: returns (rates, stacked jump operators)."""
        n = self.n
        gammas, vecs = np.linalg.eigh(self.a)
        scale = max(float(np.max(np.abs(gammas))), 0.0)
        keep = [k for k in range(n) if scale > 0 and abs(gammas[k]) > tol * scale]
        lowering = [single_qubit_op(n, i, "minus") for i in range(1, n + 1)]
        ops = [sum(vecs[i, k].conj() * lowering[i] for i in range(n)) for k in keep]
        d = 2**n
        stacked = np.array(ops, dtype=complex).reshape(len(keep), d, d)
        return gammas[keep].astype(float), stacked


def system_hamiltonian(model: CouplingModel, n: int | None = None) -> np.ndarray:
    """``H_S = sum_ab b_ab sigma_{a+} sigma_{b-}`` as a dense ``2**n`` matrix."""
    if n is not None and n != model.n:
        raise ValueError(f"model has {model.n} qubits, asked for {n}")
    n = model.n
    d = 2**n
    idx = np.arange(d)
    h = np.zeros((d, d), dtype=complex)
    bits = [(idx >> (n - 1 - q)) & 1 for q in range(n)]
    for alpha in range(n):
        h[idx, idx] += model.b[alpha, alpha] * bits[alpha]
        for beta in range(n):
            if alpha == beta or model.b[alpha, beta] == 0:
                continue
            src = idx[(bits[beta] == 1) & (bits[alpha] == 0)]
            dst = src - (1 << (n - 1 - beta)) + (1 << (n - 1 - alpha))
            h[dst, src] += model.b[alpha, beta]
    return h


def dissipator(model: CouplingModel, rho: np.ndarray) -> np.ndarray:
    """Dissipator as the explicit double sum over qubit pairs."""
    n = model.n
    rho = np.asarray(rho, dtype=complex)
    lowering = [single_qubit_op(n, i, "minus") for i in range(1, n + 1)]
    out = np.zeros_like(rho)
    for alpha in range(n):
        s_a_dag = lowering[alpha].T
        for beta in range(n):
            coeff = model.a[alpha, beta]
            if coeff == 0:
                continue
            s_b = lowering[beta]
            term = (s_b @ (rho @ s_a_dag) - (rho @ s_a_dag) @ s_b
                    + (s_b @ rho) @ s_a_dag - s_a_dag @ (s_b @ rho))
            out += 0.5 * coeff * term
    return out


def collective_dissipator(rho: np.ndarray, n: int, rate: float) -> np.ndarray:
    """``rate * (2 J rho J^dag - J^dag J rho - rho J^dag J)``."""
    j = collective_op(n, "J")
    jdag = collective_op(n, "Jdag")
    jdj = jdag @ j
    rho = np.asarray(rho, dtype=complex)
    return rate * (2 * j @ rho @ jdag - jdj @ rho - rho @ jdj)


def lindblad_rhs(model: CouplingModel, rho: np.ndarray, hamiltonian: np.ndarray | None = None) -> np.ndarray:
    h = system_hamiltonian(model) if hamiltonian is None else hamiltonian
    return -1j * (h @ rho - rho @ h) + dissipator(model, rho)


def _superop_blocks(h_row, h_col, gamma_row, gamma_col):
    """-i[H, .] - 1/2 {Gamma, .} on a row-major vectorised block."""
    eye_r = np.eye(h_row.shape[0])
    eye_c = np.eye(h_col.shape[0])
    return (-1j * (np.kron(h_row, eye_c) - np.kron(eye_r, h_col.T))
            - 0.5 * (np.kron(gamma_row, eye_c) + np.kron(eye_r, gamma_col.T)))


def liouvillian_matrix(model: CouplingModel, n: int | None = None,
                       sector: tuple[int, int] | None = None) -> np.ndarray:
    """Generator acting on row-major ``vec(rho)``.

    With ``sector=(k_row, k_col)`` only the block of ``rho`` between W(k_row)
    kets and W(k_col) bras is kept. Quantum jumps always leave that block,
    so the restricted generator carries pure loss and is not trace preserving.
    """
    if n is not None and n != model.n:
        raise ValueError(f"model has {model.n} qubits, asked for {n}")
    n = model.n
    h = system_hamiltonian(model)
    rates, jumps = model.jump_operators()
    gamma = sum((g * (lk.conj().T @ lk) for g, lk in zip(rates, jumps)),
                np.zeros_like(h))
    if sector is None:
        out = _superop_blocks(h, h, gamma, gamma)
        for g, lk in zip(rates, jumps):
            out += g * np.kron(lk, lk.conj())
        return out
    k_row, k_col = sector
    if not (0 <= k_row <= n and 0 <= k_col <= n):
        raise ValueError(f"invalid sector {sector!r} for {n} qubits")
    rows = list(weight_sector(n, k_row).basis_indices)
    cols = list(weight_sector(n, k_col).basis_indices)
    return _superop_blocks(h[np.ix_(rows, rows)], h[np.ix_(cols, cols)],
                           gamma[np.ix_(rows, rows)], gamma[np.ix_(cols, cols)])


def steady_states(liouvillian: np.ndarray, rtol: float = _linalg.RANK_RTOL) -> SubspaceBasis:
    """Orthonormal basis (vectorised operators) of the generator's null space."""
    lv = np.asarray(liouvillian, dtype=complex)
    if lv.ndim != 2 or lv.shape[0] != lv.shape[1]:
        raise ValueError("Liouvillian must be square")
    kernel = _linalg.null_space(lv, rtol=rtol)
    return SubspaceBasis(_linalg.canonical_basis(kernel) if kernel.shape[1] else kernel)


def as_density_matrix(state) -> np.ndarray:
    if isinstance(state, StateVector):
        return state.projector()
    arr = np.asarray(state, dtype=complex)
    if arr.ndim == 1:
        return np.outer(arr, arr.conj())
    return arr


def validate_density_matrix(rho: np.ndarray, trace_tol: float = 1e-10) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError("density matrix must be square")
    if np.max(np.abs(rho - rho.conj().T)) > 1e-10:
        raise ValueError("density matrix is not Hermitian")
    tr = np.trace(rho).real
    if tr > 1.0 + trace_tol:
        raise ValueError(f"density matrix trace {tr} exceeds 1")
    if np.linalg.eigvalsh(rho).min() < -1e-8:
        raise ValueError("density matrix is not positive semidefinite")
    return rho


def fidelity(rho_u: np.ndarray, rho: np.ndarray) -> float:
    """Overlap ``Tr[rho_u rho]`` between the actual and the intended state."""
    rho_u = as_density_matrix(rho_u)
    rho = as_density_matrix(rho)
    if rho_u.shape != rho.shape:
        raise ValueError(f"dimension mismatch: {rho_u.shape} vs {rho.shape}")
    return float(np.real(np.sum(rho_u * rho.T)))


def energy_variance(psi, hamiltonian: np.ndarray) -> float:
    psi = np.asarray(psi, dtype=complex)
    h = np.asarray(hamiltonian, dtype=complex)
    hpsi = h @ psi
    mean = np.vdot(psi, hpsi).real
    return float(np.linalg.norm(hpsi - mean * psi) ** 2)


def transfer_rate_squared(psi, hamiltonian: np.ndarray) -> float:
    """``(1/tau_2)^2 = 2 (<H^2> - <H>^2)``."""
    return 2.0 * energy_variance(psi, hamiltonian)


def tau2(psi, hamiltonian: np.ndarray, var_floor: float = 1e-14) -> float:
    """Second-order leakage time ``[2 Var(H)]^(-1/2)``; ``inf`` for eigenstates."""
    psi = np.asarray(psi, dtype=complex)
    if abs(np.linalg.norm(psi) - 1.0) > 1e-10:
        raise ValueError("psi must be normalised")
    n = psi.shape[0].bit_length() - 1
    if np.linalg.norm(collective_op(n, "J") @ psi) > 1e-10:
        warnings.warn("tau2 evaluated on a state outside the decoherence-free subspace", stacklevel=2)
    var = energy_variance(psi, hamiltonian)
    if var < var_floor:
        return float("inf")
    return float((2.0 * var) ** -0.5)


def generator_scale(model: CouplingModel, hamiltonian: np.ndarray | None = None) -> float:
    """Upper bound on the spectral radius of the Lindblad generator."""
    h = system_hamiltonian(model) if hamiltonian is None else hamiltonian
    evals = np.linalg.eigvalsh(h)
    scale = float(evals[-1] - evals[0])
    rates, jumps = model.jump_operators()
    for g, lk in zip(rates, jumps):
        scale += 2.0 * abs(g) * float(np.linalg.norm(lk, 2)) ** 2
    return scale


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    fidelity: np.ndarray
    trace: np.ndarray
    purity: np.ndarray

    def __len__(self) -> int:
        return len(self.times)

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    def rows(self) -> Iterable[tuple[float, float, float, float]]:
        return zip(self.times, self.fidelity, self.trace, self.purity)

    def write_csv(self, fh) -> None:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["t", "fidelity", "trace", "purity"])
        for row in self.rows():
            writer.writerow([f"{x:.15g}" for x in row])


def _propagation_inputs(model: CouplingModel, include_dissipator: bool):
    h = system_hamiltonian(model)
    if include_dissipator:
        rates, jumps = model.jump_operators()
    else:
        rates, jumps = np.zeros(0), np.zeros((0,) + h.shape, dtype=complex)
    gamma = sum((g * (lk.conj().T @ lk) for g, lk in zip(rates, jumps)), np.zeros_like(h))
    heff = h - 0.5j * gamma
    used = model if include_dissipator else model.without_dissipation()
    return heff, jumps, rates, generator_scale(used, h)


def evolve(rho0, model: CouplingModel, t_final: float, dt: float, *,
           include_dissipator: bool = True, record_every: int = 1,
           backend: str | None = None) -> Trajectory:
    """Fixed-step RK4 integration from ``rho0`` to ``t_final``.

    ``dt`` is shrunk slightly if needed so that a whole number of steps lands
    on ``t_final``. Fidelity is measured against ``rho0`` (the intended
    memory state).
    """
    if t_final <= 0 or dt <= 0:
        raise ValueError("t_final and dt must be positive")
    if model.n > MAX_EVOLVE_QUBITS:
        raise ValueError(f"{model.n} qubits exceeds the evolution limit of {MAX_EVOLVE_QUBITS}")
    rho0 = validate_density_matrix(as_density_matrix(rho0))
    if rho0.shape != (2**model.n, 2**model.n):
        raise ValueError(f"state dimension {rho0.shape[0]} does not match {model.n} qubits")
    nsteps = max(1, int(np.ceil(t_final / dt - 1e-9)))
    step = t_final / nsteps
    heff, jumps, rates, scale = _propagation_inputs(model, include_dissipator)
    if step * scale > STEP_GUARD:
        raise StepTooLargeError(
            f"dt*scale = {step * scale:.3g} exceeds {STEP_GUARD} "
            f"(generator scale {scale:.4g}); use dt <= {STEP_GUARD / scale:.4g}")
    states = kernels.rk4_propagate(heff, jumps, rates, rho0, step, nsteps, record_every, backend)
    steps = list(range(0, nsteps + 1, record_every))
    if steps[-1] != nsteps:
        steps.append(nsteps)
    times = np.array(steps, dtype=float) * step
    fid = np.real(np.einsum("tij,ji->t", states, rho0))
    trace = np.real(np.einsum("tii->t", states))
    purity = np.real(np.einsum("tij,tji->t", states, states))
    logger.debug("evolved %d steps of %.3g with backend %s", nsteps, step, backend or kernels.DEFAULT_BACKEND)
    return Trajectory(times, states, fid, trace, purity)


def step_halving_error(rho0, model: CouplingModel, t_final: float, dt: float, **kwargs) -> float:
    """Frobenius distance between final states at ``dt`` and ``dt/2``."""
    coarse = evolve(rho0, model, t_final, dt, record_every=10**9, **kwargs).final
    fine = evolve(rho0, model, t_final, dt / 2, record_every=10**9, **kwargs).final
    return float(np.linalg.norm(coarse - fine))


def random_coupling(n: int, rng: np.random.Generator, low: float = -1.0, high: float = 1.0) -> np.ndarray:
    """Real symmetric couplings, off-diagonals iid uniform, one shared diagonal value.

    Identical qubits share a single self-coupling; a spread in ``b_aa`` would
    break the weight-sector block structure the small-register results use.
    """
    b = rng.uniform(low, high, size=(n, n))
    b = np.triu(b, 1)
    b = b + b.T
    np.fill_diagonal(b, rng.uniform(low, high))
    return b


def excitation_populations(rho: np.ndarray) -> np.ndarray:
    rho = np.asarray(rho)
    n = rho.shape[0].bit_length() - 1
    pops = popcounts(n)
    diag = np.real(np.diag(rho))
    return np.array([diag[pops == k].sum() for k in range(n + 1)])
