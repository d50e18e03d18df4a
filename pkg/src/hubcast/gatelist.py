"""
The ``gatelist-v1`` text format for circuits.

A document is UTF-8 text with one statement per line; ``#`` starts a comment::

    # gatelist-v1
    qubits 3
    name w3_ladder
    ancilla flags 1 3
    h q0
    ry(1.5707963267948966) q1
    cox q0,q1,q2
    unitary(0.5,0,...) q0,q1

An op is written as ``<controls><kind>[(params)] <qubits>``. Each control contributes one
prefix letter, ``c`` for a control that fires on ``|1>`` and ``o`` for one that fires on
``|0>``; the qubit list names the controls first, then the targets. ``ry`` takes the angle in
radians, ``unitary`` takes the real and imaginary part of every matrix entry in row-major
order. Numbers are written with 17 significant digits, so parsing restores them exactly.
"""
import logging
from typing import List, Tuple

import numpy as np

from hubcast.circuits import Circuit
from hubcast.errors import (
    ArgumentError, GatelistParseError, NonUnitaryError, UnsupportedFormatError
)
from hubcast.statevec import GateOp

logger = logging.getLogger('hubcast')

FORMATS = ('gatelist-v1',)
"""supported export formats"""
_HEADER = '# gatelist-v1'


def _number(x: float) -> str:
    return format(float(x), '.17g')


def _check_format(fmt: str):
    if fmt not in FORMATS:
        raise UnsupportedFormatError(fmt, FORMATS)


def _check_text(what: str, value: str):
    # a line break would start a new statement, '#' a comment
    if '#' in value or value != value.strip() or len(value.splitlines()) > 1:
        raise ArgumentError(f"{what} {value!r} cannot be written to a gatelist document")


def format_op(op: GateOp) -> str:
    """a single op in gatelist-v1 notation, e.g. ``cx q0,q1``"""
    prefix = ''.join('c' if state else 'o' for state in op.control_states)
    if op.kind == 'ry':
        params = f"({_number(op.theta)})"
    elif op.kind == 'unitary':
        values = [v for entry in op.matrix.reshape(-1) for v in (entry.real, entry.imag)]
        params = f"({','.join(_number(v) for v in values)})"
    else:
        params = ''
    qubits = ','.join(f"q{q}" for q in op.controls + op.targets)
    return f"{prefix}{op.kind}{params} {qubits}"


def export_circuit(c: Circuit, format: str = 'gatelist-v1') -> str:
    """
    Serialize a circuit. The output is deterministic and ends with a newline.

    :param c: the circuit
    :param format: the export format, only ``gatelist-v1`` is supported
    :return: the text document
    """
    _check_format(format)
    _check_text('circuit name', c.name)
    for label in c.ancillas:
        _check_text('ancilla label', label)
        if not label or label.split() != [label]:
            raise ArgumentError(f"ancilla label {label!r} must be one word")
    lines = [_HEADER, f"qubits {c.num_qubits}"]
    if c.name:
        lines.append(f"name {c.name}")
    for label, (start, stop) in c.ancillas.items():
        lines.append(f"ancilla {label} {start} {stop}")
    lines.extend(format_op(op) for op in c.ops)
    return '\n'.join(lines) + '\n'


def _split_mnemonic(mnemonic: str) -> Tuple[str, List[int]]:
    states = []
    i = 0
    while i < len(mnemonic) and mnemonic[i:] not in GateOp.KINDS and mnemonic[i] in 'co':
        states.append(1 if mnemonic[i] == 'c' else 0)
        i += 1
    kind = mnemonic[i:]
    if kind not in GateOp.KINDS:
        raise ValueError(f"unknown gate '{mnemonic}'")
    return kind, states


def _parse_qubit(token: str) -> int:
    if not token.startswith('q') or not token[1:].isdigit():
        raise ValueError(f"'{token}' is not a qubit reference like q0")
    return int(token[1:])


def _parse_op(statement: str) -> GateOp:
    head, _, qubit_list = statement.partition(' ')
    params = []
    if '(' in head:
        if not head.endswith(')'):
            raise ValueError("unbalanced parameter list")
        head, _, raw = head[:-1].partition('(')
        params = [float(v) for v in raw.split(',')]
    kind, states = _split_mnemonic(head)
    qubits = [_parse_qubit(t.strip()) for t in qubit_list.split(',') if t.strip()]
    controls, targets = qubits[:len(states)], qubits[len(states):]
    if kind == 'ry':
        if len(params) != 1:
            raise ValueError(f"'ry' takes one angle, got {len(params)} parameters")
        return GateOp('ry', targets, theta=params[0], controls=controls, control_states=states)
    if kind == 'unitary':
        values = np.array(params, dtype=float)
        dim = 2 ** len(targets)
        if values.size != 2 * dim * dim:
            raise ValueError(f"a unitary on {len(targets)} qubit(s) takes {2 * dim * dim} "
                             f"parameters, got {values.size}")
        matrix = (values[0::2] + 1j * values[1::2]).reshape(dim, dim)
        return GateOp('unitary', targets, matrix=matrix, controls=controls, control_states=states)
    if params:
        raise ValueError(f"gate '{kind}' takes no parameters")
    return GateOp(kind, targets, controls=controls, control_states=states)


def parse_circuit(text: str, format: str = 'gatelist-v1') -> Circuit:
    """
    Parse a document written by :func:`export_circuit`.

    :param text: the document
    :param format: the document format, only ``gatelist-v1`` is supported
    :return: the circuit
    :raises GatelistParseError: if a line cannot be parsed
    """
    _check_format(format)
    circuit = None
    name = ''
    ancillas = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        statement = line.split('#', 1)[0].strip()
        if not statement:
            continue
        keyword, _, rest = statement.partition(' ')
        try:
            if keyword == 'qubits':
                if circuit is not None:
                    raise ValueError("duplicate qubit count")
                circuit = Circuit(int(rest))
            elif keyword == 'name':
                name = rest.strip()
            elif keyword == 'ancilla':
                label, start, stop = rest.split()
                ancillas.append((label, int(start), int(stop)))
            elif circuit is None:
                raise ValueError("the qubit count has to be declared before the first gate")
            else:
                circuit.append(_parse_op(statement))
        except (ValueError, NonUnitaryError) as e:
            raise GatelistParseError(line_no, line, str(e)) from e
    if circuit is None:
        raise GatelistParseError(0, '', "missing 'qubits' declaration")
    circuit.name = name
    for label, start, stop in ancillas:
        try:
            circuit.add_ancilla(label, start, stop)
        except ArgumentError as e:
            raise GatelistParseError(0, f"ancilla {label} {start} {stop}", str(e)) from e
    logger.debug(f"parsed circuit '{name}' with {len(circuit)} ops on {circuit.num_qubits} qubits")
    return circuit
