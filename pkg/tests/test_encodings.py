import json
from math import sqrt

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from collective_dfs.dynamics import CouplingModel, random_coupling, system_hamiltonian
from collective_dfs.encodings import (
    case_ii_couplings,
    eigen_residuals,
    encoding_to_dict,
    fgh_block,
    four_qubit_basis,
    four_qubit_blocks,
    four_qubit_printed_offdiagonals,
    four_symmetric_couplings,
    named_state,
    omega_encoding,
    omega_pair,
    tau2_case_ii,
    tau2_case_ii_expanded,
    three_qubit_H1,
    three_qubit_basis,
    uv_states,
)
from collective_dfs.qubit_space import collective_op, ket


def hamiltonian(b):
    b = np.asarray(b)
    return system_hamiltonian(CouplingModel(np.zeros_like(b), b))


@pytest.mark.parametrize("basis,n", [(three_qubit_basis(), 3), (four_qubit_basis(), 4)])
def test_bases_are_orthonormal(basis, n):
    m = basis.matrix()
    assert np.allclose(m.conj().T @ m, np.eye(len(basis.labels)))
    assert m.shape[0] == 2**n


def test_three_qubit_printed_states_and_ladder():
    basis = three_qubit_basis()
    jd = collective_op(3, "Jdag")
    j = collective_op(3, "J")
    assert np.allclose(basis.vector("c"), ket((1, "010"), (-1, "100")) / sqrt(2))
    assert np.allclose(basis.vector("b"), ket((-2, "001"), (1, "010"), (1, "100")) / sqrt(6))
    for x in "bc":
        assert np.allclose(j @ basis.vector(x), 0)
    # J^dag b = e and J^dag c = f exactly, so <e|J^dag|b> = 1
    assert np.allclose(jd @ basis.vector("b"), basis.vector("e"))
    assert np.allclose(jd @ basis.vector("c"), basis.vector("f"))


def test_three_qubit_block_matches_printed_offdiagonals():
    rng = np.random.default_rng(0)
    basis = three_qubit_basis()
    for _ in range(20):
        b = random_coupling(3, rng)
        proj = basis.project(hamiltonian(b), "bcd")
        b12, b13, b23 = b[0, 1], b[0, 2], b[1, 2]
        assert proj[2, 1] == pytest.approx((b23 - b13) / sqrt(6))
        assert proj[1, 0] == pytest.approx((b13 - b23) / sqrt(3))
        assert proj[2, 0] == pytest.approx((2 * b12 - b13 - b23) / (3 * sqrt(2)))


def test_three_qubit_closed_form_block_general_diagonal():
    rng = np.random.default_rng(1)
    for _ in range(20):
        m = rng.normal(size=(3, 3))
        b = (m + m.T) / 2
        assert np.allclose(three_qubit_H1(b), three_qubit_basis().project(hamiltonian(b), "bcd"))
    with pytest.raises(ValueError):
        three_qubit_H1(np.eye(3) * 1j)


def test_uv_states():
    u, v = uv_states()
    assert np.allclose(u.amplitudes, ket((1, "001"), (-1, "100")) / sqrt(2))
    h = hamiltonian(case_ii_couplings(0.4, 1.1))
    hu = h @ u.amplitudes
    assert np.allclose(hu, np.vdot(u.amplitudes, hu) * u.amplitudes)
    assert named_state(3, "u") == u


def test_tau2_factored_equals_printed_expansion():
    b12, b13, cu, cv = sp.symbols("b12 b13 c_u c_v", real=True)
    printed = (2 * (b13 * cu**2 - (b13 - 4 * b12) * cv**2 / 3) ** 2 - 2 * b13**2 * cu**2
               - sp.Rational(2, 3) * (6 * b12**2 - 4 * b12 * b13 + b13**2) * cv**2)
    factored = -sp.Rational(4, 9) * cv**2 * (b12 - b13) ** 2 * (9 * cu**2 + cv**2)
    assert sp.expand((printed - factored).subs(cu**2, 1 - cv**2)) == 0
    rng = np.random.default_rng(2)
    for _ in range(50):
        x, y, th = rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(0, 6.3)
        args = (x, y, np.cos(th), np.sin(th))
        assert tau2_case_ii(*args) == pytest.approx(tau2_case_ii_expanded(*args), abs=1e-12)
    with pytest.raises(ValueError):
        tau2_case_ii(1.0, 2.0, 1.0, 1.0)


def test_four_qubit_printed_states():
    basis = four_qubit_basis()
    assert np.allclose(basis.vector("f"), ket((1, "1100"), (-1, "0011")) / sqrt(2))
    assert np.allclose(basis.vector("g"), ket((1, "0110"), (1, "0101"), (-1, "1010"), (-1, "1001")) / 2)
    assert np.allclose(basis.vector("h"), ket((1, "1001"), (-1, "1010"), (1, "0101"), (-1, "0110")) / 2)
    j = collective_op(4, "J")
    for x in "bcdij":
        assert np.allclose(j @ basis.vector(x), 0), x
    assert not np.allclose(j @ basis.vector("a"), 0)


def test_four_qubit_raising_ladder():
    # [DERIVED] J^dag a = sqrt6 e, J^dag b = sqrt2 g, J^dag c = sqrt2 h, J^dag d = sqrt2 f
    basis = four_qubit_basis()
    jd = collective_op(4, "Jdag")
    for lo, hi, c in (("a", "e", sqrt(6)), ("b", "g", sqrt(2)), ("c", "h", sqrt(2)), ("d", "f", sqrt(2))):
        assert np.allclose(jd @ basis.vector(lo), c * basis.vector(hi))


def test_four_qubit_printed_offdiagonals():
    rng = np.random.default_rng(3)
    basis = four_qubit_basis()
    idx = {x: i for i, x in enumerate("abcdefghij")}
    for _ in range(20):
        b12, b34, b23, b24, diag = rng.uniform(-1, 1, size=5)
        b = four_symmetric_couplings(b12, b34, b23, b24, diag)
        proj = basis.project(hamiltonian(b))
        for (x, y), value in four_qubit_printed_offdiagonals(b).items():
            assert proj[idx[x], idx[y]] == pytest.approx(value, abs=1e-12), (x, y)
        # b and c touch nothing else in the one-excitation block
        for x in "bc":
            others = [idx[y] for y in "abcd" if y not in "bc"]
            assert np.allclose(proj[idx[x], others], 0)


def test_block_split_needs_equal_real_couplings():
    rng = np.random.default_rng(4)
    for _ in range(20):
        _, h2 = four_qubit_blocks(random_coupling(4, rng))
        assert np.allclose(h2[np.ix_([1, 2, 3], [0, 4, 5])], 0, atol=1e-12)
    m = rng.normal(size=(4, 4))
    _, h2 = four_qubit_blocks((m + m.T) / 2)
    assert np.max(np.abs(h2[np.ix_([1, 2, 3], [0, 4, 5])])) > 1e-3


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31))
def test_fgh_offdiagonal_structure(seed):
    # holds even with unequal self-couplings: only the diagonal moves
    rng = np.random.default_rng(seed)
    m = rng.normal(size=(4, 4))
    b = (m + m.T) / 2
    om = omega_pair(b)
    block = fgh_block(b, absorb_diagonal=True)
    expected = np.array([[0, om.omega2, om.omega1], [om.omega2, 0, 0], [om.omega1, 0, 0]])
    assert np.allclose(block, expected, atol=1e-12)
    enc = omega_encoding(b)
    assert max(eigen_residuals(enc, b).values()) < 1e-10


def test_omega_encoding_orthonormal_and_in_fgh():
    b = random_coupling(4, np.random.default_rng(5))
    enc = omega_encoding(b)
    states = np.column_stack([s.amplitudes for s in (enc.zero_L,) + enc.one_L])
    assert np.allclose(states.conj().T @ states, np.eye(3))
    p = four_qubit_basis().matrix("fgh")
    assert np.allclose(p @ (p.conj().T @ states), states)
    assert not enc.degenerate


def test_omega_two_zero_gives_g():
    # b13 = b23 and b24 = b14 != b13 makes Omega2 vanish
    b = np.zeros((4, 4))
    for (i, j), v in {(0, 1): 0.3, (0, 2): 0.5, (1, 2): 0.5, (0, 3): -0.2, (1, 3): -0.2, (2, 3): 0.9}.items():
        b[i, j] = b[j, i] = v
    enc = omega_encoding(b)
    assert omega_pair(b).omega2 == pytest.approx(0)
    g = four_qubit_basis().vector("g")
    assert abs(np.vdot(g, enc.zero_L.amplitudes)) == pytest.approx(1)


def test_degenerate_encoding():
    enc = omega_encoding(np.full((4, 4), 0.7))
    assert enc.degenerate
    assert enc.omega.norm == 0


def test_omega_rejects_complex_couplings():
    b = np.full((4, 4), 0.5, dtype=complex)
    b[0, 1], b[1, 0] = 0.5 + 0.2j, 0.5 - 0.2j
    with pytest.raises(ValueError):
        omega_encoding(b)


def test_encoding_dict_is_json():
    b = random_coupling(4, np.random.default_rng(11))
    out = json.loads(json.dumps(encoding_to_dict(omega_encoding(b), b)))
    assert out["labels"] == ["zero_L", "one_L[0]", "one_L[1]"]
    assert len(out["zero_L"]["amplitudes"]) == 16
    assert max(out["residuals"].values()) < 1e-10


def test_named_state_errors():
    with pytest.raises(ValueError):
        named_state(3, "z")
    with pytest.raises(ValueError):
        named_state(5, "a")
