import math

import numpy as np
import pytest

from hubcast.allocators import build_ghz_unitary, build_w_unitary, ghz_state, w_state
from hubcast.circuits import (
    Circuit, circuit_to_matrix, comparator_circuit, ghz_circuit, increment_circuit,
    lcu_block_encoding, lcu_circuit, lcu_select_circuit, max_deviation_up_to_phase,
    r_gate_matrix, uniform_superposition_circuit, w_circuit_n3_ladder, w_circuit_recursive
)
from hubcast.errors import ArgumentError, ResourceLimitError
from hubcast.statevec import GateOp, HADAMARD, PAULI, equal_up_to_global_phase, make_basis_state
from tests.shared import basis, skip_if_quick

X, Z, I = PAULI['X'], PAULI['Z'], PAULI['I']


def test_circuit_to_matrix_basics():
    assert np.allclose(circuit_to_matrix(Circuit(2)), np.eye(4))
    assert np.allclose(circuit_to_matrix(Circuit(1, [GateOp('h', 0)])), HADAMARD)
    # ops apply left to right
    c = Circuit(1, [GateOp('x', 0), GateOp('z', 0)])
    assert np.allclose(circuit_to_matrix(c), Z @ X)


def test_circuit_to_matrix_limit():
    with pytest.raises(ResourceLimitError):
        circuit_to_matrix(Circuit(15))


def test_circuit_validation():
    with pytest.raises(ArgumentError):
        Circuit(2, [GateOp('x', 2)])
    with pytest.raises(ArgumentError):
        Circuit(0)
    with pytest.raises(ArgumentError):
        Circuit(2, ancillas={'flags': (1, 3)})


def test_circuit_adjoint():
    c = Circuit(2, [GateOp('h', 0), GateOp('ry', 1, theta=0.3, controls=[0]),
                    GateOp('unitary', 0, matrix=r_gate_matrix(0.6))], name='c')
    m = circuit_to_matrix(c)
    adjoint = c.adjoint()
    assert adjoint.name == 'c_dg'
    assert np.max(np.abs(circuit_to_matrix(adjoint) @ m - np.eye(4))) < 1e-12


def test_gate_counts():
    counts = w_circuit_n3_ladder().gate_counts()
    assert counts == {'ccx': 4, 'cunitary': 2, 'unitary': 1}


def test_r_gate():
    assert np.allclose(r_gate_matrix(0.6) @ [1, 0], [0.6, 0.8])


@pytest.mark.parametrize('n', range(2, 11))
def test_w_circuit_recursive(n):
    c = w_circuit_recursive(n)
    assert c.num_qubits == n
    assert np.max(np.abs(circuit_to_matrix(c) - build_w_unitary(n))) < 1e-9


def test_w_circuit_recursive_small():
    assert w_circuit_recursive(2).name == 'w2'
    expected = (np.kron(X, I) + np.kron(Z, X)) / np.sqrt(2)
    assert np.max(np.abs(circuit_to_matrix(w_circuit_recursive(2)) - expected)) < 1e-12
    assert equal_up_to_global_phase(w_circuit_recursive(4).apply(basis('0000')), w_state(4))
    with pytest.raises(ArgumentError):
        w_circuit_recursive(1)


def test_w_circuit_ladder():
    c = w_circuit_n3_ladder()
    assert len(c) == 7
    assert np.max(np.abs(circuit_to_matrix(c) - build_w_unitary(3))) < 1e-9
    assert equal_up_to_global_phase(c.apply(basis('000')), w_state(3))


@pytest.mark.parametrize('n', range(2, 9))
def test_ghz_circuit(n):
    assert np.max(np.abs(circuit_to_matrix(ghz_circuit(n)) - build_ghz_unitary(n))) < 1e-12


@skip_if_quick
@pytest.mark.parametrize('n', range(9, 13))
def test_ghz_circuit_large(n):
    assert np.max(np.abs(circuit_to_matrix(ghz_circuit(n)) - build_ghz_unitary(n))) < 1e-12


def test_ghz_circuit_examples():
    cnot = np.eye(4)[[0, 1, 3, 2]]
    assert np.allclose(circuit_to_matrix(ghz_circuit(2)), np.kron(HADAMARD, I) @ cnot)
    # the transpose maps |000> to the GHZ state
    m = circuit_to_matrix(ghz_circuit(3))
    assert np.allclose(m.T @ make_basis_state(3, 0).amps, ghz_state(3).amps)
    assert np.allclose(np.abs(m @ ghz_state(3).amps) ** 2, [1, 0, 0, 0, 0, 0, 0, 0])
    probabilities = np.abs(m @ np.full(8, 1 / np.sqrt(8))) ** 2
    assert abs(probabilities.sum() - 1) < 1e-12
    with pytest.raises(ArgumentError):
        ghz_circuit(1)


def read_flags(n_bits: int, a: int, b: int):
    c = comparator_circuit(n_bits)
    index = (a << (n_bits + 2)) | (b << 2)
    out = c.apply(make_basis_state(c.num_qubits, index))
    hit = int(np.argmax(np.abs(out.amps)))
    assert abs(abs(out.amps[hit]) - 1) < 1e-12
    # operands are restored
    assert hit >> 2 == index >> 2
    return hit & 3


def test_comparator_examples():
    assert read_flags(2, 1, 1) == 0b00
    assert read_flags(2, 0, 1) == 0b01
    assert read_flags(2, 3, 2) == 0b10


@pytest.mark.parametrize('n_bits', range(1, 5))
def test_comparator_exhaustive(n_bits):
    for a in range(2 ** n_bits):
        for b in range(2 ** n_bits):
            expected = 0b00 if a == b else (0b01 if a < b else 0b10)
            assert read_flags(n_bits, a, b) == expected


def test_comparator_layout():
    c = comparator_circuit(3)
    assert c.num_qubits == 8
    assert c.ancillas == {'flags': (6, 8)}
    with pytest.raises(ArgumentError):
        comparator_circuit(0)


@pytest.mark.parametrize('width', range(1, 5))
def test_increment(width):
    m = circuit_to_matrix(increment_circuit(width))
    dim = 2 ** width
    expected = np.zeros((dim, dim))
    expected[(np.arange(dim) + 1) % dim, np.arange(dim)] = 1
    assert np.allclose(m, expected)


@pytest.mark.parametrize('count', [1, 2, 3, 4, 5, 6, 7, 8, 11])
def test_uniform_superposition(count):
    c = uniform_superposition_circuit(count)
    out = c.apply(make_basis_state(c.num_qubits, 0)).amps
    expected = np.zeros(2 ** c.num_qubits)
    expected[:count] = 1 / math.sqrt(count)
    assert np.max(np.abs(out - expected)) < 1e-12


def test_uniform_superposition_errors():
    with pytest.raises(ArgumentError):
        uniform_superposition_circuit(0)
    assert uniform_superposition_circuit(4).gate_counts() == {'ry': 2}


@pytest.mark.parametrize('flags, expected', [
    ('00', X),
    ('01', I),
    ('10', Z),
])
def test_lcu_select(flags, expected):
    c = lcu_select_circuit(1, 3)
    m = circuit_to_matrix(c)
    f = int(flags, 2) << 3
    # the block acting on the system when the flags hold `flags`
    block = m[f:f + 8, f:f + 8]
    assert np.allclose(block, np.kron(np.kron(I, expected), I))
    with pytest.raises(ArgumentError):
        lcu_select_circuit(3, 3)


def test_lcu_circuit_layout():
    c = lcu_circuit(3)
    assert c.num_qubits == 2 + 2 + 2 + 3
    assert c.ancillas == {'select': (0, 2), 'counter': (2, 4), 'flags': (4, 6)}
    with pytest.raises(ArgumentError):
        lcu_circuit(7)
    with pytest.raises(ArgumentError):
        lcu_circuit(1)


@pytest.mark.parametrize('n', [2, 3, 4])
def test_lcu_block_encoding(n):
    _, certificate = lcu_block_encoding(n)
    assert certificate.n_system == n
    assert certificate.max_block_deviation < 1e-9
    assert len(certificate.singular_values) == 2 ** n
    assert all(abs(sv - 1 / math.sqrt(n)) < 1e-9 for sv in certificate.singular_values)
    assert abs(certificate.subnormalization - 1 / math.sqrt(n)) < 1e-9
    assert certificate.garbage_norm < 1e-9
    assert certificate.passes()


def test_lcu_block_encoding_n3_subnormalization():
    circuit, certificate = lcu_block_encoding(3)
    assert abs(certificate.subnormalization - 0.5773502691896258) < 1e-9
    assert certificate.num_qubits == circuit.num_qubits == 9
    assert certificate.n_ancilla == 6
    assert certificate.gate_counts == circuit.gate_counts()


@skip_if_quick
@pytest.mark.parametrize('n', [5, 6])
def test_lcu_block_encoding_large(n):
    _, certificate = lcu_block_encoding(n)
    assert certificate.passes()
    assert certificate.garbage_norm < 1e-9


def test_max_deviation_up_to_phase():
    a = build_w_unitary(3)
    assert max_deviation_up_to_phase(a, 1j * a) < 1e-12
    assert max_deviation_up_to_phase(a, np.eye(8)) > 0.1
    with pytest.raises(ArgumentError):
        max_deviation_up_to_phase(a, np.eye(4))
