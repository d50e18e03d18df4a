import math

import numpy as np
import pytest

from hubcast.circuits import (
    Circuit, circuit_to_matrix, comparator_circuit, lcu_circuit, w_circuit_n3_ladder,
    w_circuit_recursive
)
from hubcast.errors import ArgumentError, GatelistParseError, UnsupportedFormatError
from hubcast.gatelist import export_circuit, format_op, parse_circuit
from hubcast.statevec import GateOp


def test_format_op():
    assert format_op(GateOp('h', 0)) == 'h q0'
    assert format_op(GateOp('ry', 1, theta=math.pi / 2)) == 'ry(1.5707963267948966) q1'
    assert format_op(GateOp('x', 2, controls=[0, 1], control_states=[1, 0])) == 'cox q0,q1,q2'
    assert format_op(GateOp('unitary', 0, matrix=np.array([[0, 1], [1, 0]]))) == \
        'unitary(0,0,1,0,1,0,0,0) q0'


def test_export_header():
    c = Circuit(2, [GateOp('h', 0), GateOp('x', 1, controls=[0])], name='bell',
                ancillas={'flags': (1, 2)})
    assert export_circuit(c) == '# gatelist-v1\nqubits 2\nname bell\nancilla flags 1 2\n' \
                                'h q0\ncx q0,q1\n'


def test_export_is_deterministic():
    assert export_circuit(w_circuit_recursive(4)) == export_circuit(w_circuit_recursive(4))


@pytest.mark.parametrize('build', [
    w_circuit_n3_ladder,
    lambda: w_circuit_recursive(5),
    lambda: comparator_circuit(2),
])
def test_roundtrip_matrix(build):
    c = build()
    parsed = parse_circuit(export_circuit(c))
    assert parsed == c
    assert np.max(np.abs(circuit_to_matrix(parsed) - circuit_to_matrix(c))) < 1e-12


def test_roundtrip_keeps_ancillas():
    c = lcu_circuit(3)
    parsed = parse_circuit(export_circuit(c))
    assert parsed.ancillas == c.ancillas
    assert parsed.name == 'lcu_w3'
    assert len(parsed) == len(c)


def test_parse_comments_and_blank_lines():
    text = '# gatelist-v1\n\nqubits 2  # two qubits\n# a comment\nh q0\noz q0,q1\n'
    c = parse_circuit(text)
    assert c.num_qubits == 2
    assert c.ops == [GateOp('h', 0), GateOp('z', 1, controls=[0], control_states=[0])]


@pytest.mark.parametrize('text, line_no', [
    ('qubits 2\nh q2\n', 2),
    ('qubits 2\nfoo q0\n', 2),
    ('qubits 2\nry q0\n', 2),
    ('qubits 2\nry(0.1,0.2) q0\n', 2),
    ('qubits 2\nh(0.1) q0\n', 2),
    ('qubits 2\nh 0\n', 2),
    ('qubits 2\nunitary(1,0) q0\n', 2),
    ('qubits 1\nunitary(1,0,1,0,0,0,1,0) q0\n', 2),
    ('h q0\n', 1),
    ('qubits two\n', 1),
    ('qubits 1\nqubits 2\n', 2),
])
def test_parse_errors(text, line_no):
    with pytest.raises(GatelistParseError) as e:
        parse_circuit(text)
    assert e.value.line_no == line_no
    assert f"line {line_no}" in str(e.value)


def test_parse_missing_qubits():
    with pytest.raises(GatelistParseError):
        parse_circuit('# gatelist-v1\n')


def test_unsupported_format():
    with pytest.raises(UnsupportedFormatError) as e:
        export_circuit(Circuit(1), format='qasm2')
    assert 'gatelist-v1' in str(e.value)
    with pytest.raises(UnsupportedFormatError):
        parse_circuit('qubits 1\n', format='qasm2')


@pytest.mark.parametrize('name', ['w#3 test', 'w3\nh q0', ' w3', 'w3\r'])
def test_export_rejects_unwritable_names(name):
    c = w_circuit_n3_ladder()
    c.name = name
    with pytest.raises(ArgumentError):
        export_circuit(c)


def test_export_rejects_unwritable_ancilla_labels():
    with pytest.raises(ArgumentError):
        export_circuit(Circuit(2, ancillas={'two words': (0, 1)}))
    with pytest.raises(ArgumentError):
        export_circuit(Circuit(2, ancillas={'flag#1': (0, 1)}))


def test_roundtrip_keeps_names_with_spaces():
    c = Circuit(1, [GateOp('h', 0)], name='w3 ladder, v2')
    assert parse_circuit(export_circuit(c)).name == 'w3 ladder, v2'
