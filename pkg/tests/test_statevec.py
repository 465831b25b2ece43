import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ftqc import statevec as sv
from ftqc.errors import CapacityError


def test_basis_state():
    state = sv.basis_state(3, 0b101)
    assert state.amplitudes() == {0b101: 1.0 + 0j}
    assert state.support_size == 1


def test_from_amplitudes_normalizes_nothing():
    state = sv.from_amplitudes(2, {0: 0.6, 3: 0.8})
    assert state.norm() == pytest.approx(1.0)
    assert state.amplitude(3) == pytest.approx(0.8)


class TestGateSemantics:
    def test_x(self):
        state = sv.basis_state(1, 0)
        sv.apply_gate(state, sv.standard_gate("X"), (0,))
        assert state.amplitudes() == {1: 1.0 + 0j}

    def test_h_twice_is_identity(self):
        state = sv.basis_state(1, 0)
        h = sv.standard_gate("H")
        sv.apply_gate(state, h, (0,))
        assert state.support_size == 2
        sv.apply_gate(state, h, (0,))
        assert sv.fidelity(state, sv.basis_state(1, 0)) == pytest.approx(1.0)

    def test_cnot_orientation(self):
        # (control, target): |10> -> |11> with qubit 0 the control
        state = sv.basis_state(2, 0b01)
        sv.apply_gate(state, sv.standard_gate("CNOT"), (0, 1))
        assert state.amplitudes() == {0b11: 1.0 + 0j}
        # control clear: nothing happens
        state = sv.basis_state(2, 0b10)
        sv.apply_gate(state, sv.standard_gate("CNOT"), (0, 1))
        assert state.amplitudes() == {0b10: 1.0 + 0j}

    def test_toffoli_orientation(self):
        state = sv.basis_state(3, 0b011)
        sv.apply_gate(state, sv.standard_gate("TOFFOLI"), (0, 1, 2))
        assert state.amplitudes() == {0b111: 1.0 + 0j}

    def test_cz_phase(self):
        state = sv.from_amplitudes(2, {0b00: 0.5, 0b01: 0.5, 0b10: 0.5, 0b11: 0.5})
        sv.apply_gate(state, sv.standard_gate("CZ"), (0, 1))
        assert state.amplitude(0b11) == pytest.approx(-0.5)
        assert state.amplitude(0b01) == pytest.approx(0.5)

    def test_phase_gate(self):
        state = sv.from_amplitudes(1, {0: 2**-0.5, 1: 2**-0.5})
        sv.apply_gate(state, sv.standard_gate("PHASE_I"), (0,))
        assert state.amplitude(1) == pytest.approx(1j * 2**-0.5)
        sv.apply_gate(state, sv.standard_gate("PHASE_I_DG"), (0,))
        assert state.amplitude(1) == pytest.approx(2**-0.5)

    def test_cat_phase4_truth_table(self):
        # sign = (-1)^(a AND ((b AND c) XOR d)) on targets (a, b, c, d)
        gate = sv.standard_gate("CAT_PHASE4")
        for idx in range(16):
            a, b, c, d = idx & 1, (idx >> 1) & 1, (idx >> 2) & 1, (idx >> 3) & 1
            state = sv.basis_state(4, idx)
            sv.apply_gate(state, gate, (0, 1, 2, 3))
            want = (-1.0) ** (a & ((b & c) ^ d))
            assert state.amplitude(idx) == pytest.approx(want)

    def test_y_equals_ixz(self):
        a = sv.from_amplitudes(1, {0: 0.6, 1: 0.8})
        b = a.copy()
        sv.apply_gate(a, sv.standard_gate("Y"), (0,))
        sv.apply_gate(b, sv.standard_gate("Z"), (0,))
        sv.apply_gate(b, sv.standard_gate("X"), (0,))
        assert sv.fidelity(a, b) == pytest.approx(1.0)

    def test_rx_rz(self):
        state = sv.basis_state(1, 0)
        sv.apply_gate(state, sv.standard_gate("RX", angle=np.pi), (0,))
        # real rotation by pi sends |0> to |1> up to sign
        assert abs(state.amplitude(1)) == pytest.approx(1.0)
        state = sv.basis_state(1, 1)
        sv.apply_gate(state, sv.standard_gate("RZ", angle=np.pi), (0,))
        assert state.amplitude(1) == pytest.approx(1j)

    def test_unknown_gate(self):
        with pytest.raises(ValueError):
            sv.standard_gate("SWAP")

    def test_nonunitary_rejected(self):
        with pytest.raises(ValueError):
            sv.GateMatrix("BAD", 1, np.array([[1, 0], [1, 1]], dtype=complex))


def random_circuit(rng, n, depth):
    ops = []
    names_1q = ["X", "Y", "Z", "H", "PHASE_I"]
    names_2q = ["CNOT", "CZ"]
    for _ in range(depth):
        if n >= 2 and rng.random() < 0.4:
            name = names_2q[rng.integers(len(names_2q))]
            targets = tuple(rng.choice(n, size=2, replace=False))
        else:
            name = names_1q[rng.integers(len(names_1q))]
            targets = (int(rng.integers(n)),)
        ops.append((sv.standard_gate(name), targets))
    return ops


def test_sparse_matches_dense_on_random_circuits():
    rng = np.random.default_rng(20240817)
    for trial in range(100):
        n = int(rng.integers(2, 11))
        sparse = sv.basis_state(n, int(rng.integers(1 << n)))
        dense = sv.densify(sparse)
        for gate, targets in random_circuit(rng, n, 12):
            sv.apply_gate(sparse, gate, targets)
            sv.dense_apply_gate(dense, gate, targets)
        assert sv.fidelity(sparse, dense) >= 1 - 1e-10


def test_measurement_collapse_and_probability():
    rng = np.random.default_rng(3)
    state = sv.from_amplitudes(1, {0: 0.6, 1: 0.8})
    out, state = sv.measure(state, 0, rng)
    assert out.probability == pytest.approx(0.36 if out.bit == 0 else 0.64)
    assert state.norm() == pytest.approx(1.0)
    assert state.support_size == 1


def test_measurement_statistics():
    counts = 0
    for seed in range(400):
        rng = np.random.default_rng(seed)
        state = sv.from_amplitudes(1, {0: 0.6, 1: 0.8})
        out, _ = sv.measure(state, 0, rng)
        counts += out.bit
    assert 0.64 * 400 - 60 < counts < 0.64 * 400 + 60


def test_postselect():
    state = sv.from_amplitudes(2, {0b00: 0.6, 0b11: 0.8})
    prob = sv.postselect(state, 0, 1)
    assert prob == pytest.approx(0.64)
    assert state.amplitudes() == {0b11: pytest.approx(1.0 + 0j)}
    with pytest.raises(ValueError):
        sv.postselect(state, 0, 0)  # zero-probability branch


def test_tensor_and_extract():
    a = sv.from_amplitudes(1, {0: 2**-0.5, 1: 2**-0.5})
    b = sv.basis_state(2, 0b10)
    joint = a.tensor(b)
    assert joint.num_qubits == 3
    # self occupies the low bits
    assert set(joint.amplitudes()) == {0b100, 0b101}
    back = joint.extract([0])
    assert sv.fidelity(back, a) == pytest.approx(1.0)


def test_extract_requires_definite_rest():
    state = sv.from_amplitudes(2, {0b00: 2**-0.5, 0b11: 2**-0.5})
    with pytest.raises(ValueError):
        state.extract([0])


def test_extend():
    state = sv.basis_state(1, 1)
    state.extend(2)
    assert state.num_qubits == 3
    assert state.amplitudes() == {1: 1.0 + 0j}


def test_support_limit_enforced():
    state = sv.basis_state(4, 0, support_limit=8)
    h = sv.standard_gate("H")
    for q in range(3):
        sv.apply_gate(state, h, (q,))
    with pytest.raises(CapacityError):
        sv.apply_gate(state, h, (3,))


def test_qubit_count_caps():
    with pytest.raises(CapacityError):
        sv.basis_state(sv.MAX_SPARSE_QUBITS + 1, 0)
    a = sv.basis_state(30, 0)
    b = sv.basis_state(30, 0)
    with pytest.raises(CapacityError):
        a.tensor(b)


def test_dump_lines_format():
    state = sv.from_amplitudes(2, {0b01: 0.6, 0b10: 0.8j})
    lines = sv.dump_lines(state)
    # most significant qubit first in the bitstring
    assert lines == ["01 0.6 0", "10 0 0.8"]


@given(st.lists(st.complex_numbers(max_magnitude=1, allow_nan=False,
                                   allow_infinity=False),
                min_size=4, max_size=4))
def test_fidelity_phase_invariance(amps):
    vec = np.array(amps, dtype=complex)
    if np.linalg.norm(vec) < 1e-6:
        return
    vec = vec / np.linalg.norm(vec)
    a = sv.from_amplitudes(2, {i: vec[i] for i in range(4) if abs(vec[i]) > 0})
    b = sv.from_amplitudes(2, {i: vec[i] * np.exp(0.7j) for i in range(4)
                               if abs(vec[i]) > 0})
    assert sv.fidelity(a, b) == pytest.approx(1.0)


@given(st.integers(0, 15), st.integers(0, 15))
def test_fidelity_orthogonal_basis_states(i, j):
    a = sv.basis_state(4, i)
    b = sv.basis_state(4, j)
    assert sv.fidelity(a, b) == pytest.approx(1.0 if i == j else 0.0)


def test_prune_drops_cancelled_terms():
    state = sv.from_amplitudes(1, {0: 2**-0.5, 1: 2**-0.5})
    sv.apply_gate(state, sv.standard_gate("H"), (0,))
    # H|+> = |0>: the |1> component must cancel away entirely
    assert state.support_size == 1


def test_monomial_path_preserves_support_size():
    state = sv.from_amplitudes(3, {0b000: 0.5, 0b011: 0.5, 0b101: 0.5, 0b110: 0.5})
    before = state.support_size
    sv.apply_gate(state, sv.standard_gate("CNOT"), (0, 2))
    sv.apply_gate(state, sv.standard_gate("X"), (1,))
    assert state.support_size == before


def test_diagonal_path_keeps_keys():
    state = sv.from_amplitudes(2, {0: 0.5, 1: 0.5, 2: 0.5, 3: 0.5})
    keys_before = state.keys.copy()
    sv.apply_gate(state, sv.standard_gate("CZ"), (0, 1))
    assert np.array_equal(state.keys, keys_before)
