import numpy as np
import pytest

from hubcast.errors import ArgumentError, NonUnitaryError
from hubcast.statevec import (
    DensityBlock, GateOp, Outcome, PAULI, Statevector, apply_gate, apply_pauli_string,
    apply_to_columns, bell_pair_layout, equal_up_to_global_phase, fidelity, make_basis_state,
    make_bell_pairs, measure_and_discard, measure_subset_all_outcomes, partial_trace_keep,
    pauli_word_matrix, sample_measurement
)
from tests.shared import assert_amps, basis, state

r2 = 1 / np.sqrt(2)


def test_make_basis_state():
    assert_amps(make_basis_state(1, 0), [1, 0])
    assert_amps(make_basis_state(2, 3), [0, 0, 0, 1])
    # big-endian: |100> is index 4
    s = make_basis_state(3, 4)
    assert s.amps[4] == 1
    assert s.num_qubits == 3
    assert len(s) == 8


def test_make_basis_state_out_of_range():
    with pytest.raises(ArgumentError):
        make_basis_state(2, 4)
    with pytest.raises(ArgumentError):
        make_basis_state(0, 0)
    # argument errors are value errors as well
    with pytest.raises(ValueError):
        make_basis_state(1, -1)


def test_statevector_validation():
    with pytest.raises(ArgumentError):
        Statevector([1, 1])
    with pytest.raises(ArgumentError):
        Statevector([1, 0, 0])
    s = Statevector([0, 1])
    with pytest.raises(ValueError):
        s.amps[0] = 1


def test_bell_pairs():
    assert_amps(make_bell_pairs(1), [r2, 0, 0, r2])
    # c1 c2 e1 e2
    blocked = make_bell_pairs(2, 'blocked')
    assert_amps(blocked, 0.5 * np.eye(16)[[0b0000, 0b0101, 0b1010, 0b1111]].sum(axis=0))
    # c1 e1 c2 e2
    interleaved = make_bell_pairs(2, 'interleaved')
    assert_amps(interleaved, 0.5 * np.eye(16)[[0b0000, 0b0011, 0b1100, 0b1111]].sum(axis=0))
    # explicit pairs equal to the interleaved layout
    assert_amps(make_bell_pairs(2, [(0, 1), (2, 3)]), interleaved.amps)
    assert abs(blocked.norm() - 1) < 1e-12


def test_bell_pairs_layout_collision():
    with pytest.raises(ArgumentError):
        make_bell_pairs(2, [(0, 1), (1, 2)])
    with pytest.raises(ArgumentError):
        bell_pair_layout(2, [(0, 1)])
    with pytest.raises(ArgumentError):
        bell_pair_layout(1, 'diagonal')
    with pytest.raises(ArgumentError):
        make_bell_pairs(0)


def test_apply_gate_basics():
    plus = apply_gate(basis('0'), GateOp('h', 0))
    assert_amps(plus, [r2, r2])
    assert_amps(apply_gate(basis('00'), GateOp('x', 1)), [0, 1, 0, 0])
    cnot = GateOp('x', 1, controls=[0])
    assert_amps(apply_gate(state(r2, 0, r2, 0), cnot), [r2, 0, 0, r2])


def test_apply_gate_open_control():
    # fires only when qubit 0 is |0>
    gate = GateOp('x', 1, controls=[0], control_states=[0])
    assert_amps(apply_gate(basis('00'), gate), basis('01').amps)
    assert_amps(apply_gate(basis('10'), gate), basis('10').amps)


def test_apply_gate_multi_target_unitary():
    swap = np.eye(4)[[0, 2, 1, 3]]
    gate = GateOp('unitary', [0, 2], matrix=swap)
    assert_amps(apply_gate(basis('100'), gate), basis('001').amps)
    # target order matters: the first target is the most significant one
    cnot = np.eye(4)[[0, 1, 3, 2]]
    assert_amps(apply_gate(basis('100'), GateOp('unitary', [0, 2], matrix=cnot)),
                basis('101').amps)
    assert_amps(apply_gate(basis('001'), GateOp('unitary', [2, 0], matrix=cnot)),
                basis('101').amps)


def test_apply_gate_preserves_norm():
    rng = np.random.default_rng(7)
    amps = rng.normal(size=16) + 1j * rng.normal(size=16)
    psi = Statevector(amps / np.linalg.norm(amps))
    gates = [GateOp('h', 2), GateOp('ry', 1, theta=0.3), GateOp('y', 0, controls=[3]),
             GateOp('z', 3, controls=[0, 1], control_states=[0, 1]),
             GateOp('ry', 0, theta=-1.1, controls=[2])]
    for gate in gates:
        psi = apply_gate(psi, gate)
        assert abs(psi.norm() - 1) < 1e-10


def test_gate_validation():
    with pytest.raises(NonUnitaryError):
        GateOp('unitary', 0, matrix=[[1, 1], [0, 1]])
    with pytest.raises(ArgumentError):
        GateOp('x', 0, controls=[0])
    with pytest.raises(ArgumentError):
        GateOp('ry', 0)
    with pytest.raises(ArgumentError):
        GateOp('toffoli', 0)
    with pytest.raises(ArgumentError):
        GateOp('unitary', [0, 1], matrix=np.eye(2))
    with pytest.raises(ArgumentError):
        apply_gate(basis('00'), GateOp('x', 2))


def test_large_matrix_validation():
    dim = 2048
    with pytest.raises(NonUnitaryError):
        GateOp('unitary', range(11), matrix=np.ones((dim, dim)))
    # normalized columns, but two of them coincide
    repeated = np.eye(dim)
    repeated[:, 1] = repeated[:, 0]
    with pytest.raises(NonUnitaryError):
        GateOp('unitary', range(11), matrix=repeated)
    reversal = np.eye(dim)[::-1]
    gate = GateOp('unitary', range(11), matrix=reversal)
    psi = apply_gate(make_basis_state(11, 0), gate)
    assert abs(psi.norm() - 1) < 1e-10
    assert abs(psi.amps[dim - 1] - 1) < 1e-12


def test_gate_adjoint_and_controls():
    gate = GateOp('ry', 1, theta=0.7, controls=[0])
    assert gate.adjoint().theta == -0.7
    assert gate.adjoint().controls == (0,)
    controlled = gate.with_controls([2], [0])
    assert controlled.controls == (2, 0)
    assert controlled.control_states == (0, 1)
    assert gate.relabeled([3, 4]).qubits == (3, 4)
    u = GateOp('unitary', 0, matrix=pauli_word_matrix('XZ'))
    assert np.allclose(u.adjoint().matrix @ u.matrix, np.eye(2))
    assert GateOp('h', 0) == GateOp('h', 0)
    assert GateOp('h', 0) != GateOp('h', 1)


def test_apply_to_columns_matches_apply_gate():
    gate = GateOp('ry', 0, theta=0.4, controls=[1], control_states=[0])
    columns = np.eye(4, dtype=complex)
    out = apply_to_columns(columns, 2, gate)
    for i in range(4):
        expected = apply_gate(make_basis_state(2, i), gate).amps
        assert np.allclose(out[:, i], expected)


def test_pauli_word_matrix():
    assert np.array_equal(pauli_word_matrix('XZ'), PAULI['X'] @ PAULI['Z'])
    assert np.array_equal(pauli_word_matrix(''), PAULI['I'])
    assert np.array_equal(pauli_word_matrix('zx'), PAULI['Z'] @ PAULI['X'])
    with pytest.raises(ArgumentError):
        pauli_word_matrix('XQ')


def test_apply_pauli_string():
    # (XZ)|1> = -|0>
    assert_amps(apply_pauli_string(basis('1'), [(0, 'XZ')]), [-1, 0])
    # Y|0> = i|1>
    assert_amps(apply_pauli_string(basis('0'), [(0, 'Y')]), [0, 1j])
    # (ZX)|0> = -|1> and Y|1> = -i|0>
    assert_amps(apply_pauli_string(basis('01'), [(0, 'ZX'), (1, 'Y')]), 1j * basis('10').amps)
    assert_amps(apply_pauli_string(basis('0'), [(0, 'Z')]), [1, 0])
    assert_amps(apply_pauli_string(basis('011'), [(0, 'X'), (1, 'Z'), (2, 'I')]),
                -basis('111').amps)
    with pytest.raises(ArgumentError):
        apply_pauli_string(basis('00'), [(0, 'X'), (0, 'Z')])


def test_measure_bell_qubit():
    bell = make_bell_pairs(1)
    results = measure_subset_all_outcomes(bell, [0])
    assert [str(s) for s, _, _ in results] == ['0', '1']
    assert all(abs(p - 0.5) < 1e-12 for _, p, _ in results)
    assert_amps(results[0][2], basis('00').amps)
    assert_amps(results[1][2], basis('11').amps)


def test_measure_basis_state():
    results = measure_subset_all_outcomes(basis('1'), [0])
    assert len(results) == 1
    outcome, p, post = results[0]
    assert outcome == Outcome((1,))
    assert p == 1.0
    assert_amps(post, [0, 1])


def test_measure_errors():
    with pytest.raises(ArgumentError):
        measure_subset_all_outcomes(basis('00'), [])
    with pytest.raises(ArgumentError):
        measure_subset_all_outcomes(basis('00'), [0, 0])
    with pytest.raises(ArgumentError):
        measure_and_discard(basis('00'), [0, 1])


def test_measure_born_rule_against_projectors():
    rng = np.random.default_rng(3)
    amps = rng.normal(size=16) + 1j * rng.normal(size=16)
    psi = Statevector(amps / np.linalg.norm(amps))
    results = measure_subset_all_outcomes(psi, [2, 0])
    assert abs(sum(p for _, p, _ in results) - 1) < 1e-10
    for outcome, p, post in results:
        # project with explicit projectors on qubits 2 and 0
        mask = [((i >> 1) & 1, (i >> 3) & 1) == outcome.bits for i in range(16)]
        projected = np.where(mask, psi.amps, 0)
        assert abs(np.vdot(projected, projected).real - p) < 1e-12
        assert np.allclose(post.amps, projected / np.sqrt(p))
        assert abs(post.norm() - 1) < 1e-10


def test_measure_and_discard():
    bell = make_bell_pairs(2, 'blocked')
    results = measure_and_discard(bell, [0, 1])
    assert len(results) == 4
    for outcome, p, remaining in results:
        assert remaining.num_qubits == 2
        assert abs(p - 0.25) < 1e-12
        assert_amps(remaining, make_basis_state(2, outcome.as_integer).amps)


def test_outcome_conversions():
    s = Outcome.from_integer(6, 3)
    assert s.bits == (1, 1, 0)
    assert s.as_integer == 6
    assert str(s) == '110'
    assert Outcome.from_string('110') == s
    with pytest.raises(ArgumentError):
        Outcome.from_integer(8, 3)
    with pytest.raises(ArgumentError):
        Outcome.from_string('12')


def test_sample_measurement_deterministic():
    bell = make_bell_pairs(1)
    first = sample_measurement(bell, [0], 42)
    second = sample_measurement(bell, [0], 42)
    assert first[0] == second[0]
    assert first[0].bits[0] in (0, 1)
    outcome, post = sample_measurement(basis('101'), [0, 2], 1)
    assert outcome.bits == (1, 1)
    assert_amps(post, basis('101').amps)


def test_sample_measurement_statistics():
    bell = make_bell_pairs(1)
    rng = np.random.default_rng(2024)
    zeros = sum(sample_measurement(bell, [0], rng)[0].bits[0] == 0 for _ in range(100000))
    assert abs(zeros / 100000 - 0.5) < 0.01


def test_partial_trace():
    bell = make_bell_pairs(1)
    assert np.allclose(partial_trace_keep(bell, [0]).entries, np.eye(2) / 2)
    assert np.allclose(partial_trace_keep(basis('01'), [0]).entries, np.diag([1, 0]))
    full = partial_trace_keep(basis('01'), [0, 1])
    assert np.allclose(full.entries, np.outer(basis('01').amps, basis('01').amps))
    with pytest.raises(ArgumentError):
        partial_trace_keep(bell, [2])
    with pytest.raises(ArgumentError):
        partial_trace_keep(bell, [])


def test_partial_trace_product_state():
    a = Statevector(np.array([0.6, 0.8j]))
    b = Statevector(np.array([r2, 0, 0, -r2]))
    reduced = partial_trace_keep(a.tensor(b), [0])
    assert np.max(np.abs(reduced.entries - np.outer(a.amps, a.amps.conj()))) < 1e-10
    assert abs(reduced.trace() - 1) < 1e-10
    assert abs(reduced.purity() - 1) < 1e-10
    assert reduced.num_qubits == 1


def test_density_block_validation():
    with pytest.raises(ArgumentError):
        DensityBlock(np.array([[1, 1], [0, 0]]))
    with pytest.raises(ArgumentError):
        DensityBlock(np.ones(3))


def test_equal_up_to_global_phase():
    assert equal_up_to_global_phase(basis('0'), state(-1, 0), 1e-10)
    assert not equal_up_to_global_phase(basis('0'), basis('1'), 1e-10)
    assert equal_up_to_global_phase(state(r2, r2), state(1j * r2, 1j * r2))
    with pytest.raises(ArgumentError):
        equal_up_to_global_phase(basis('0'), basis('00'))


def test_fidelity():
    assert abs(fidelity(basis('0'), state(r2, r2)) - 0.5) < 1e-12
    assert fidelity(basis('1'), state(0, -1)) == 1.0
