"""Named three- and four-qubit collective bases and their logical encodings.

Letters follow the collective-basis figures: for three qubits ``a..f`` and
for four qubits ``a..j``. States whose expansions are not printed anywhere
(``a, d`` for three qubits; ``a..e`` for four) are fixed here by their
J_z weight, orthogonality to the printed states, and positive raising-ladder
coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import sqrt

import numpy as np

from .dynamics import CouplingModel, system_hamiltonian
from .qubit_space import StateVector, ket

SQ2, SQ3, SQ6 = sqrt(2.0), sqrt(3.0), sqrt(6.0)

# Closed-form coefficient formulas assume real couplings.
_REAL_TOL = 1e-12


@dataclass(frozen=True)
class NamedBasis:
    labels: tuple[str, ...]
    states: tuple[StateVector, ...]

    def __getitem__(self, label: str) -> StateVector:
        return self.states[self.labels.index(label)]

    def vector(self, label: str) -> np.ndarray:
        return self[label].amplitudes

    def matrix(self, labels=None) -> np.ndarray:
        """Columns are the requested states (all of them by default)."""
        labels = self.labels if labels is None else labels
        return np.column_stack([self.vector(x) for x in labels])

    def project(self, op: np.ndarray, labels=None) -> np.ndarray:
        """Matrix elements ``<x|op|y>`` over the requested labels."""
        m = self.matrix(labels)
        return m.conj().T @ np.asarray(op) @ m


@dataclass(frozen=True)
class OmegaPair:
    omega1: float
    omega2: float

    @property
    def norm(self) -> float:
        return float(np.hypot(self.omega1, self.omega2))


@dataclass(frozen=True)
class LogicalEncoding:
    zero_L: StateVector
    one_L: tuple[StateVector, ...]
    validity: str
    omega: OmegaPair | None = None
    degenerate: bool = False


def _state(terms, scale, k):
    return StateVector(ket(*terms) * scale, excitation=k)


@lru_cache(maxsize=None)
def three_qubit_basis() -> NamedBasis:
    states = {
        "a": _state([(1, "000")], 1.0, 0),
        "b": _state([(-2, "001"), (1, "010"), (1, "100")], 1 / SQ6, 1),
        "c": _state([(1, "010"), (-1, "100")], 1 / SQ2, 1),
        "d": _state([(1, "001"), (1, "010"), (1, "100")], 1 / SQ3, 1),
        "e": _state([(2, "110"), (-1, "101"), (-1, "011")], 1 / SQ6, 2),
        "f": _state([(1, "011"), (-1, "101")], 1 / SQ2, 2),
    }
    return NamedBasis(tuple(states), tuple(states.values()))


@lru_cache(maxsize=None)
def four_qubit_basis() -> NamedBasis:
    two = ["1100", "1010", "1001", "0110", "0101", "0011"]
    states = {
        "a": _state([(1, "1000"), (1, "0100"), (1, "0010"), (1, "0001")], 0.5, 1),
        "b": _state([(1, "0100"), (-1, "1000")], 1 / SQ2, 1),
        "c": _state([(1, "0001"), (-1, "0010")], 1 / SQ2, 1),
        "d": _state([(1, "1000"), (1, "0100"), (-1, "0010"), (-1, "0001")], 0.5, 1),
        "e": _state([(1, s) for s in two], 1 / SQ6, 2),
        "f": _state([(1, "1100"), (-1, "0011")], 1 / SQ2, 2),
        "g": _state([(1, "0110"), (1, "0101"), (-1, "1010"), (-1, "1001")], 0.5, 2),
        "h": _state([(1, "1001"), (-1, "1010"), (1, "0101"), (-1, "0110")], 0.5, 2),
        "i": _state([(1, "0101"), (-1, "0110"), (-1, "1001"), (1, "1010")], 0.5, 2),
        "j": _state([(2, "0011"), (2, "1100"), (-1, "0101"), (-1, "1010"),
                     (-1, "0110"), (-1, "1001")], 1 / sqrt(12.0), 2),
    }
    return NamedBasis(tuple(states), tuple(states.values()))


_DF_LABELS = {(3, 1): "bc", (4, 1): "bcd", (4, 2): "ij"}


def named_sector_states(n: int, k: int) -> list[np.ndarray]:
    """Printed lowest-weight states of the (n, k) sector, in label order."""
    labels = _DF_LABELS.get((n, k), "")
    basis = three_qubit_basis() if n == 3 else four_qubit_basis()
    return [basis.vector(x) for x in labels]


def named_state(n: int, label: str) -> StateVector:
    if n == 3:
        if label in ("u", "v"):
            return dict(zip("uv", uv_states()))[label]
        return three_qubit_basis()[label]
    if n == 4:
        return four_qubit_basis()[label]
    raise ValueError(f"no named basis for {n} qubits")


def _real_couplings(b, n: int) -> np.ndarray:
    b = np.asarray(b)
    if b.shape != (n, n):
        raise ValueError(f"expected a {n}x{n} coupling matrix, got {b.shape}")
    if np.max(np.abs(np.imag(b)), initial=0.0) > _REAL_TOL or np.max(np.abs(b - b.T)) > _REAL_TOL:
        raise ValueError("closed-form blocks need real symmetric couplings")
    return np.real(b)


def three_qubit_H1(b) -> np.ndarray:
    """Closed-form one-excitation block of H_S over ``(b, c, d)``.

    Off-diagonals reduce to the printed coefficients when the self-couplings
    ``b_aa`` are equal; the extra diagonal-difference terms cover the general case.
    """
    B = _real_couplings(b, 3)
    b11, b22, b33 = np.diag(B)
    b12, b13, b23 = B[0, 1], B[0, 2], B[1, 2]
    hbb = (b11 + b22 + 4 * b33 + 2 * b12 - 4 * b13 - 4 * b23) / 6
    hcc = (b11 + b22) / 2 - b12
    hdd = (b11 + b22 + b33 + 2 * (b12 + b13 + b23)) / 3
    hcb = (b13 - b23) / SQ3 + (b22 - b11) / sqrt(12.0)
    hdc = (b23 - b13) / SQ6 + (b22 - b11) / SQ6
    hdb = (2 * b12 - b13 - b23) / (3 * SQ2) + (b11 + b22 - 2 * b33) / (3 * SQ2)
    return np.array([[hbb, hcb, hdb],
                     [hcb, hcc, hdc],
                     [hdb, hdc, hdd]], dtype=complex)


@lru_cache(maxsize=None)
def uv_states() -> tuple[StateVector, StateVector]:
    """The rotated pair inside span{b, c}; ``u`` is CDF when ``b12 == b23``."""
    basis = three_qubit_basis()
    b, c = basis.vector("b"), basis.vector("c")
    u = 0.5 * c - SQ3 / 2 * b
    v = SQ3 / 2 * c + 0.5 * b
    return StateVector(u, excitation=1), StateVector(v, excitation=1)


def case_ii_couplings(b12: float, b13: float, diag: float = 0.0) -> np.ndarray:
    """Three-qubit couplings with ``b12 == b23``."""
    return np.array([[diag, b12, b13], [b12, diag, b12], [b13, b12, diag]], dtype=float)


def tau2_case_ii(b12: float, b13: float, c_u: float, c_v: float) -> float:
    """Printed closed form for ``(1/tau_2)^2`` on ``c_u|u> + c_v|v>``.

    The expression equals ``2(<H>^2 - <H^2>)`` and is therefore nonpositive;
    its magnitude is the second-order transfer rate squared. Expanded, it
    cancels catastrophically near the eigenstate ``|u>``, so it is evaluated
    in the factored form ``-(4/9) c_v^2 (b12 - b13)^2 (9 c_u^2 + c_v^2)``.
    """
    s = abs(c_u) ** 2 + abs(c_v) ** 2
    if abs(s - 1.0) > 1e-10:
        raise ValueError("coefficients must satisfy |c_u|^2 + |c_v|^2 = 1")
    cu2, cv2 = abs(c_u) ** 2, abs(c_v) ** 2
    return float(-4 / 9 * cv2 * (b12 - b13) ** 2 * (9 * cu2 + cv2) / s**2)


def tau2_case_ii_expanded(b12: float, b13: float, c_u: float, c_v: float) -> float:
    """The closed form term by term, as printed (real coefficients)."""
    cu2, cv2 = c_u**2, c_v**2
    return float(2 * (b13 * cu2 - (b13 - 4 * b12) * cv2 / 3) ** 2
                 - 2 * b13**2 * cu2
                 - 2 / 3 * (6 * b12**2 - 4 * b12 * b13 + b13**2) * cv2)


def four_qubit_blocks(b) -> tuple[np.ndarray, np.ndarray]:
    """H_S projected on ``(a, b, c, d)`` and on ``(e, f, g, h, i, j)``."""
    b = np.asarray(b)
    h = system_hamiltonian(CouplingModel(np.zeros_like(b), b))
    basis = four_qubit_basis()
    return basis.project(h, "abcd"), basis.project(h, "efghij")


def four_qubit_printed_offdiagonals(b) -> dict[tuple[str, str], float]:
    """Printed off-diagonal coefficients, valid when b14 == b23 and b13 == b24."""
    B = _real_couplings(b, 4)
    b12, b23, b24, b34 = B[0, 1], B[1, 2], B[1, 3], B[2, 3]
    return {
        ("a", "d"): (b12 - b34) / 2,
        ("b", "c"): b24 - b23,
        ("e", "i"): sqrt(2 / 3) * (b23 - b24),
        ("i", "j"): sqrt(2 / 3) * SQ2 * (b23 - b24),
        ("e", "j"): SQ2 / 3 * (b23 - b12 + b24 - b34),
    }


def four_symmetric_couplings(b12: float, b34: float, b23: float, b24: float,
                             diag: float = 0.0) -> np.ndarray:
    """Four-qubit couplings with ``b14 = b23`` and ``b13 = b24``."""
    b = np.full((4, 4), 0.0)
    b[0, 1], b[2, 3] = b12, b34
    b[1, 2], b[1, 3] = b23, b24
    b[0, 3], b[0, 2] = b23, b24
    b = b + b.T
    np.fill_diagonal(b, diag)
    return b


def omega_pair(b) -> OmegaPair:
    B = _real_couplings(b, 4)
    b13, b14, b23, b24 = B[0, 2], B[0, 3], B[1, 2], B[1, 3]
    return OmegaPair((b14 - b13 - b23 + b24) / SQ2, (b13 + b14 - b23 - b24) / SQ2)


def fgh_block(b, absorb_diagonal: bool = False) -> np.ndarray:
    """H_S on ``(f, g, h)``; optionally with its diagonal removed."""
    _, h2 = four_qubit_blocks(b)
    block = h2[1:4, 1:4]
    if absorb_diagonal:
        block = block - np.diag(np.diag(block))
    return block


def omega_encoding(b) -> LogicalEncoding:
    """Two-excitation logical qubit protected from arbitrary couplings before a jump.

    ``|0>_L`` is the zero-eigenvalue vector of the off-diagonal {f, g, h}
    block; the two ``|1>_L`` candidates are the other two eigenvectors. With
    ``Omega1 = Omega2 = 0`` the direction is undefined and ``g`` / ``h`` are
    returned with ``degenerate=True``.
    """
    om = omega_pair(b)
    basis = four_qubit_basis()
    f, g, h = (basis.vector(x) for x in "fgh")
    validity = ("two-excitation subspace, real couplings with equal self-couplings; "
                "immune to H_S until the first quantum jump")
    s = om.norm
    if s**2 <= 1e-14:
        return LogicalEncoding(StateVector(g, excitation=2),
                               (StateVector(h, excitation=2), StateVector(f, excitation=2)),
                               validity, om, degenerate=True)
    zero = (om.omega1 * g - om.omega2 * h) / s
    plus = (s * f + om.omega2 * g + om.omega1 * h) / (SQ2 * s)
    minus = (om.omega2 * g + om.omega1 * h - s * f) / (SQ2 * s)
    return LogicalEncoding(StateVector(zero, excitation=2),
                           (StateVector(plus, excitation=2), StateVector(minus, excitation=2)),
                           validity, om)


def eigen_residuals(encoding: LogicalEncoding, b) -> dict[str, float]:
    """``||O v - <v|O|v> v||`` for each encoded state, O the off-diagonal {f,g,h} block."""
    basis = four_qubit_basis()
    m = basis.matrix("fgh")
    block = fgh_block(b, absorb_diagonal=True)
    out = {}
    names = ["zero_L"] + [f"one_L[{i}]" for i in range(len(encoding.one_L))]
    for name, st in zip(names, (encoding.zero_L,) + encoding.one_L):
        coords = m.conj().T @ st.amplitudes
        w = block @ coords
        out[name] = float(np.linalg.norm(w - np.vdot(coords, w) * coords))
    return out


def _amplitudes(v: StateVector) -> list[list[float]]:
    return [[float(z.real), float(z.imag)] for z in v.amplitudes]


def encoding_to_dict(encoding: LogicalEncoding, b=None) -> dict:
    basis = four_qubit_basis()
    m = basis.matrix("fgh")

    def entry(v: StateVector) -> dict:
        coords = m.conj().T @ v.amplitudes
        return {"amplitudes": _amplitudes(v),
                "fgh": {lab: [float(z.real), float(z.imag)] for lab, z in zip("fgh", coords)}}

    out = {
        "labels": ["zero_L"] + [f"one_L[{i}]" for i in range(len(encoding.one_L))],
        "basis_order": "computational, qubit 1 leftmost",
        "omega": None if encoding.omega is None else
        {"omega1": encoding.omega.omega1, "omega2": encoding.omega.omega2},
        "degenerate": encoding.degenerate,
        "validity": encoding.validity,
        "zero_L": entry(encoding.zero_L),
        "one_L": [entry(v) for v in encoding.one_L],
    }
    if b is not None:
        out["residuals"] = eigen_residuals(encoding, b)
    return out
