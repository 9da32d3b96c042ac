"""Computational-basis bookkeeping and spin operators on N qubits.

Conventions used throughout the package:

* qubit 1 is the leftmost tensor factor, so the bitstring ``b1 b2 ... bn``
  sits at index ``sum(b_i * 2**(n - i))``;
* ``|0>`` is the ground state, ``sigma_z |0> = -|0>`` and
  ``sigma_- |1> = |0>``.

With these choices a ket with ``k`` excitations has collective weight
``-(n - 2k)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import comb

import numpy as np

MAX_QUBITS = 12

SIGMA_MINUS = np.array([[0, 1], [0, 0]], dtype=complex)
SIGMA_PLUS = SIGMA_MINUS.T.copy()
SIGMA_Z = np.diag([-1.0, 1.0]).astype(complex)

_SINGLE = {"minus": SIGMA_MINUS, "plus": SIGMA_PLUS, "z": SIGMA_Z}


def _check_n(n: int) -> int:
    if int(n) != n or n < 1:
        raise ValueError(f"number of qubits must be a positive integer, got {n!r}")
    if n > MAX_QUBITS:
        raise ValueError(f"dense storage is capped at {MAX_QUBITS} qubits, got {n}")
    return int(n)


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class StateVector:
    """Complex amplitudes on the ``2**n`` computational basis.

    ``excitation`` is optional; when given, the amplitudes must vanish on
    every bitstring whose popcount differs from it.
    """

    amplitudes: np.ndarray
    excitation: int | None = None
    normalized: bool = field(default=True, compare=False)

    def __post_init__(self):
        amps = _readonly(np.ravel(self.amplitudes))
        dim = amps.shape[0]
        if dim < 2 or dim & (dim - 1):
            raise ValueError(f"state length must be a power of two >= 2, got {dim}")
        object.__setattr__(self, "amplitudes", amps)
        if self.normalized and abs(np.linalg.norm(amps) - 1.0) > 1e-12:
            raise ValueError("state marked normalized but has norm "
                             f"{np.linalg.norm(amps):.3e}")
        if self.excitation is not None:
            pops = popcounts(self.n)
            stray = np.abs(amps[pops != self.excitation])
            if stray.size and stray.max() > 1e-12:
                raise ValueError(f"amplitude outside the k={self.excitation} sector")

    @property
    def n(self) -> int:
        return self.amplitudes.shape[0].bit_length() - 1

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.amplitudes, dtype=dtype)

    def projector(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())

    def overlap(self, other) -> complex:
        return complex(np.vdot(self.amplitudes, np.asarray(other)))


@dataclass(frozen=True)
class WeightSector:
    """Bitstrings with exactly ``k`` ones among ``n`` qubits (the space W(k))."""

    n: int
    k: int
    basis_indices: tuple[int, ...]

    @property
    def dim(self) -> int:
        return len(self.basis_indices)

    @property
    def weight(self) -> int:
        return -(self.n - 2 * self.k)

    def embed(self, coeffs: np.ndarray) -> np.ndarray:
        """Lift sector coefficients (rows) into the full ``2**n`` space."""
        coeffs = np.asarray(coeffs, dtype=complex)
        full = np.zeros((2**self.n,) + coeffs.shape[1:], dtype=complex)
        full[list(self.basis_indices)] = coeffs
        return full

    def restrict(self, full: np.ndarray) -> np.ndarray:
        return np.asarray(full)[list(self.basis_indices)]


def bits_to_index(bits: str) -> int:
    if not bits or set(bits) - {"0", "1"}:
        raise ValueError(f"not a bitstring: {bits!r}")
    return int(bits, 2)


def index_to_bits(index: int, n: int) -> str:
    return format(index, f"0{n}b")


@lru_cache(maxsize=None)
def _popcounts(n: int) -> np.ndarray:
    idx = np.arange(2**n)
    pops = np.zeros(2**n, dtype=np.int64)
    for q in range(n):
        pops += (idx >> q) & 1
    pops.setflags(write=False)
    return pops


def popcounts(n: int) -> np.ndarray:
    return _popcounts(_check_n(n))


def computational_state(bits: str, n: int | None = None) -> StateVector:
    """Basis ket ``|bits>``; the excitation tag is the popcount of ``bits``."""
    if n is not None and len(bits) != n:
        raise ValueError(f"bitstring {bits!r} has length {len(bits)}, expected {n}")
    n = _check_n(len(bits))
    amps = np.zeros(2**n, dtype=complex)
    amps[bits_to_index(bits)] = 1.0
    return StateVector(amps, excitation=bits.count("1"))


def ket(*terms: tuple[complex, str]) -> np.ndarray:
    """Unnormalised superposition from ``(coefficient, bitstring)`` pairs."""
    n = len(terms[0][1])
    out = np.zeros(2**n, dtype=complex)
    for coeff, bits in terms:
        if len(bits) != n:
            raise ValueError("mixed bitstring lengths")
        out[bits_to_index(bits)] += coeff
    return out


@lru_cache(maxsize=None)
def _single_qubit_op(n: int, i: int, kind: str) -> np.ndarray:
    left = np.eye(2 ** (i - 1))
    right = np.eye(2 ** (n - i))
    op = np.kron(np.kron(left, _SINGLE[kind]), right)
    op.setflags(write=False)
    return op


def single_qubit_op(n: int, i: int, kind: str) -> np.ndarray:
    """``sigma_{i,kind}`` on qubit ``i`` (1-based) of an ``n``-qubit register."""
    n = _check_n(n)
    if kind not in _SINGLE:
        raise ValueError(f"kind must be one of {sorted(_SINGLE)}, got {kind!r}")
    if not 1 <= i <= n:
        raise ValueError(f"qubit index {i} out of range 1..{n}")
    return _single_qubit_op(n, int(i), kind)


@lru_cache(maxsize=None)
def _collective_op(n: int, kind: str) -> np.ndarray:
    if kind == "Jz":
        op = np.diag((2 * _popcounts(n) - n).astype(complex))
    else:
        single = "minus" if kind == "J" else "plus"
        op = sum(_single_qubit_op(n, i, single) for i in range(1, n + 1))
    op.setflags(write=False)
    return op


def collective_op(n: int, kind: str) -> np.ndarray:
    """Collective jump ``J = sum sigma_-``, its adjoint ``Jdag``, or ``Jz``."""
    n = _check_n(n)
    if kind not in ("J", "Jdag", "Jz"):
        raise ValueError(f"kind must be 'J', 'Jdag' or 'Jz', got {kind!r}")
    return _collective_op(n, kind)


@lru_cache(maxsize=None)
def weight_sector(n: int, k: int) -> WeightSector:
    n = _check_n(n)
    if not 0 <= k <= n:
        raise ValueError(f"excitation count {k} out of range 0..{n}")
    idx = tuple(int(i) for i in np.flatnonzero(_popcounts(n) == k))
    assert len(idx) == comb(n, k)
    return WeightSector(n, int(k), idx)


def sector_block(op: np.ndarray, n: int, k_row: int, k_col: int | None = None) -> np.ndarray:
    """Block of ``op`` mapping W(k_col) into W(k_row)."""
    rows = list(weight_sector(n, k_row).basis_indices)
    cols = list(weight_sector(n, k_row if k_col is None else k_col).basis_indices)
    return np.asarray(op)[np.ix_(rows, cols)]


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a
