"""
Gate-level realizations of the central unitaries and of the block-encoding of ``W_N / sqrt(N)``.

Circuits are ordered lists of :class:`~hubcast.statevec.GateOp`; ops are applied from left to
right, so the dense matrix of ``[g1, g2]`` is ``M(g2) @ M(g1)``.
"""
import logging
import math
from collections import Counter
from typing import Dict, Iterable, Iterator, List, Sequence, Tuple

import numpy as np

from hubcast.allocators import build_w_unitary
from hubcast.errors import ArgumentError, ResourceLimitError
from hubcast.models import BlockEncodingCertificate
from hubcast.statevec import (
    GateOp, PAULI, Statevector, apply_gate, apply_to_columns, ry_matrix
)

logger = logging.getLogger('hubcast')

MAX_DENSE_QUBITS = 14
"""largest circuit that :func:`circuit_to_matrix` turns into a dense matrix"""
LCU_RANGE = (2, 6)
"""supported numbers of system qubits of :func:`lcu_block_encoding`"""


class Circuit:
    """
    An ordered list of gates on ``num_qubits`` qubits.

    :param num_qubits: the register size
    :param ops: the gates, in application order
    :param name: a name that is written to exports
    :param ancillas: named half-open ranges ``(start, stop)`` of ancilla qubits
    """

    def __init__(self, num_qubits: int, ops: Iterable[GateOp] = (), name: str = '',
                 ancillas: Dict[str, Tuple[int, int]] = None):
        if num_qubits < 1:
            raise ArgumentError(f"a circuit needs at least one qubit, got {num_qubits}")
        self.num_qubits = num_qubits
        self.name = name
        self.ancillas = {}
        self.ops: List[GateOp] = []
        for label, (start, stop) in (ancillas or {}).items():
            self.add_ancilla(label, start, stop)
        self.extend(ops)

    def add_ancilla(self, label: str, start: int, stop: int):
        if not 0 <= start < stop <= self.num_qubits:
            raise ArgumentError(f"ancilla range '{label}' [{start}, {stop}) is out of range "
                                f"for {self.num_qubits} qubits")
        self.ancillas[label] = (start, stop)

    def append(self, op: GateOp) -> 'Circuit':
        for q in op.qubits:
            if q >= self.num_qubits:
                raise ArgumentError(f"{op} acts on qubit {q}, but the circuit only has "
                                    f"{self.num_qubits} qubits")
        self.ops.append(op)
        return self

    def extend(self, ops: Iterable[GateOp]) -> 'Circuit':
        for op in ops:
            self.append(op)
        return self

    def adjoint(self) -> 'Circuit':
        """the inverse circuit: reversed order, every gate replaced by its adjoint"""
        return Circuit(self.num_qubits, [op.adjoint() for op in reversed(self.ops)],
                       name=f"{self.name}_dg" if self.name else '', ancillas=self.ancillas)

    def embedded(self, mapping: Sequence[int]) -> List[GateOp]:
        """the ops of this circuit with every qubit ``q`` moved to ``mapping[q]``"""
        return [op.relabeled(mapping) for op in self.ops]

    def controlled_ops(self, controls: Sequence[int], states: Sequence[int] = None) \
            -> List[GateOp]:
        """the ops of this circuit, each with the given additional controls"""
        return [op.with_controls(controls, states) for op in self.ops]

    def apply(self, state: Statevector) -> Statevector:
        for op in self.ops:
            state = apply_gate(state, op)
        return state

    def gate_counts(self) -> Dict[str, int]:
        """number of ops per gate type, e.g. ``{'ccx': 4, 'cunitary': 2, 'unitary': 1}``"""
        return dict(Counter('c' * len(op.controls) + op.kind for op in self.ops))

    def __len__(self):
        return len(self.ops)

    def __iter__(self) -> Iterator[GateOp]:
        return iter(self.ops)

    def __eq__(self, other):
        return (isinstance(other, Circuit) and self.num_qubits == other.num_qubits
                and self.name == other.name and self.ancillas == other.ancillas
                and self.ops == other.ops)

    def __repr__(self):
        return f"Circuit(name={self.name!r}, num_qubits={self.num_qubits}, ops={len(self.ops)})"


def circuit_to_matrix(c: Circuit) -> np.ndarray:
    """
    The dense unitary of a circuit (ops applied left to right).

    :param c: the circuit, at most ``MAX_DENSE_QUBITS`` qubits
    :return: the ``2^n x 2^n`` complex matrix
    """
    if c.num_qubits > MAX_DENSE_QUBITS:
        raise ResourceLimitError(c.num_qubits, MAX_DENSE_QUBITS, what="dense circuit matrix")
    return apply_circuit_to_columns(c, np.eye(2 ** c.num_qubits, dtype=complex))


def apply_circuit_to_columns(c: Circuit, columns: np.ndarray) -> np.ndarray:
    for op in c.ops:
        if op.kind != 'i':
            columns = apply_to_columns(columns, c.num_qubits, op)
    return columns


def r_gate_matrix(x: float) -> np.ndarray:
    """``R(x) = Ry(2 arccos(x)) . Z``, maps ``|0>`` to ``x|0> + sqrt(1-x^2)|1>``"""
    return ry_matrix(2 * math.acos(x)) @ PAULI['Z']


def w_circuit_recursive(n: int) -> Circuit:
    """
    Build ``W_n`` from two copies of ``W_(n-1)`` and one rotation on the first qubit:
    ``W_(n-1)`` on qubits ``1..n-1`` controlled by ``q0 = 1``, then
    ``A = Ry(2 arccos(sqrt((n-1)/n))) . Z`` on ``q0``, then ``W_(n-1)`` controlled by ``q0 = 0``.
    ``W_2`` is a two-qubit unitary block.

    :param n: number of qubits (>= 2)
    :return: a circuit whose matrix equals :func:`~hubcast.allocators.build_w_unitary`
    """
    if n < 2:
        raise ArgumentError(f"the W circuit needs n >= 2, got {n}")
    if n == 2:
        return Circuit(2, [GateOp('unitary', [0, 1], matrix=build_w_unitary(2))], name='w2')
    sub = Circuit(n, w_circuit_recursive(n - 1).embedded(list(range(1, n))))
    theta = 2 * math.acos(math.sqrt((n - 1) / n))
    circuit = Circuit(n, name=f"w{n}")
    circuit.extend(sub.controlled_ops([0], [1]))
    circuit.append(GateOp('z', 0))
    circuit.append(GateOp('ry', 0, theta=theta))
    circuit.extend(sub.controlled_ops([0], [0]))
    logger.debug(f"built the recursive W circuit for n={n} with {len(circuit)} ops")
    return circuit


def w_circuit_n3_ladder() -> Circuit:
    """
    The explicit three-qubit W circuit: two ``R(sqrt(1/2))`` rotations on ``q1`` and one
    ``R(sqrt(2/3))`` on ``q0``, with Toffolis onto ``q2`` in all four control polarities.
    """
    r_half = r_gate_matrix(math.sqrt(1 / 2))
    r_two_thirds = r_gate_matrix(math.sqrt(2 / 3))
    ops = [
        GateOp('x', 2, controls=[0, 1], control_states=[1, 1]),
        GateOp('unitary', 1, matrix=r_half, controls=[0], control_states=[1]),
        GateOp('x', 2, controls=[0, 1], control_states=[1, 0]),
        GateOp('unitary', 0, matrix=r_two_thirds),
        GateOp('x', 2, controls=[0, 1], control_states=[0, 1]),
        GateOp('unitary', 1, matrix=r_half, controls=[0], control_states=[0]),
        GateOp('x', 2, controls=[0, 1], control_states=[0, 0]),
    ]
    return Circuit(3, ops, name='w3_ladder')


def ghz_circuit(n: int) -> Circuit:
    """CNOT fan-out from ``q0`` onto ``q1..q(n-1)``, then H on ``q0``"""
    if n < 2:
        raise ArgumentError(f"the GHZ circuit needs n >= 2, got {n}")
    ops = [GateOp('x', k, controls=[0]) for k in range(1, n)] + [GateOp('h', 0)]
    return Circuit(n, ops, name=f"ghz{n}")


def comparator_ops(a: Sequence[int], b: Sequence[int], flags: Tuple[int, int]) -> List[GateOp]:
    """
    Gates of the full comparator on the registers ``a``, ``b`` (most significant bit first)
    and the flag pair ``(f0, f1)``, which ends up in ``|00>`` for ``a = b``,
    ``|01>`` for ``a < b`` and ``|10>`` for ``a > b``.
    ``b`` temporarily holds ``a xor b``, the leading set bit of it is the first difference.
    """
    if len(a) != len(b) or not a:
        raise ArgumentError(f"comparator registers must have the same non-zero width, "
                            f"got {len(a)} and {len(b)}")
    f0, f1 = flags
    ops = [GateOp('x', bj, controls=[aj]) for aj, bj in zip(a, b)]
    for i in range(len(a)):
        controls = list(b[:i]) + [b[i], a[i]]
        prefix = [0] * i
        ops.append(GateOp('x', f0, controls=controls, control_states=prefix + [1, 1]))
        ops.append(GateOp('x', f1, controls=controls, control_states=prefix + [1, 0]))
    ops.extend(GateOp('x', bj, controls=[aj]) for aj, bj in zip(a, b))
    return ops


def comparator_circuit(n_bits: int) -> Circuit:
    """
    The comparator ``P_n`` on ``2 n_bits + 2`` qubits: register ``a`` on ``0..n-1``,
    register ``b`` on ``n..2n-1`` and the flags on ``2n, 2n+1``.

    :param n_bits: operand width (>= 1)
    :return: the circuit
    """
    if n_bits < 1:
        raise ArgumentError(f"the comparator needs n_bits >= 1, got {n_bits}")
    a = list(range(n_bits))
    b = list(range(n_bits, 2 * n_bits))
    ops = comparator_ops(a, b, (2 * n_bits, 2 * n_bits + 1))
    return Circuit(2 * n_bits + 2, ops, name=f"cmp{n_bits}",
                   ancillas={'flags': (2 * n_bits, 2 * n_bits + 2)})


def increment_ops(register: Sequence[int]) -> List[GateOp]:
    # msb first: bit r flips iff all lower bits are set
    ops = []
    for r, qubit in enumerate(register):
        lower = list(register[r + 1:])
        ops.append(GateOp('x', qubit, controls=lower))
    return ops


def increment_circuit(width: int) -> Circuit:
    """``|k> -> |k + 1 mod 2^width>`` on a register of ``width`` qubits (msb first)"""
    if width < 1:
        raise ArgumentError(f"the incrementer needs width >= 1, got {width}")
    return Circuit(width, increment_ops(list(range(width))), name=f"inc{width}")


def uniform_superposition_ops(count: int, register: Sequence[int]) -> List[GateOp]:
    """
    Gates that prepare ``(1/sqrt(count)) sum_{s < count} |s>`` from ``|0>`` on ``register``.
    Each qubit is rotated by ``Ry(2 arctan(sqrt(w1 / w0)))``, controlled by the value of the
    preceding qubits, where ``w0``/``w1`` count the admissible values below that prefix.
    Uniform rotations of a level are applied without controls.
    """
    width = len(register)
    if not 1 <= count <= 2 ** width:
        raise ArgumentError(f"cannot prepare {count} basis states on {width} qubits")
    ops = []
    for j, qubit in enumerate(register):
        span = 2 ** (width - j - 1)
        angles = {}
        for prefix in range(2 ** j):
            low = prefix * 2 * span
            w0 = min(max(count - low, 0), span)
            w1 = min(max(count - low - span, 0), span)
            if w0 + w1:
                angles[prefix] = 2 * math.atan2(math.sqrt(w1), math.sqrt(w0))
        if len(angles) == 2 ** j and len(set(angles.values())) == 1:
            theta = angles[0]
            if theta:
                ops.append(GateOp('ry', qubit, theta=theta))
            continue
        for prefix, theta in angles.items():
            if theta:
                states = [(prefix >> (j - 1 - i)) & 1 for i in range(j)]
                ops.append(GateOp('ry', qubit, theta=theta, controls=register[:j],
                                  control_states=states))
    return ops


def uniform_superposition_circuit(count: int) -> Circuit:
    """the preparation circuit ``D_N`` on ``ceil(log2(count))`` qubits (at least one)"""
    if count < 1:
        raise ArgumentError(f"need at least one basis state, got {count}")
    width = max(1, math.ceil(math.log2(count)))
    return Circuit(width, uniform_superposition_ops(count, list(range(width))), name=f"d{count}")


def lcu_select_ops(k: int, flags: Tuple[int, int], system_qubit: int) -> List[GateOp]:
    """
    The selection gates ``Q^k`` for system qubit ``k``: X if the flags read ``|00>``,
    Z if they read ``|10>`` and nothing for ``|01>``.
    """
    f0, f1 = flags
    return [
        GateOp('x', system_qubit, controls=[f1], control_states=[0]),
        GateOp('unitary', system_qubit, matrix=PAULI['Z'] @ PAULI['X'], controls=[f0],
               control_states=[1]),
    ]


def lcu_select_circuit(k: int, n_system: int) -> Circuit:
    """``Q^k`` on a register of two flags (qubits 0, 1) followed by ``n_system`` system qubits"""
    if not 0 <= k < n_system:
        raise ArgumentError(f"system qubit {k} is out of range for {n_system} qubits")
    return Circuit(2 + n_system, lcu_select_ops(k, (0, 1), 2 + k), name=f"q{k}",
                   ancillas={'flags': (0, 2)})


def lcu_circuit(n_end: int) -> Circuit:
    """
    The block-encoding circuit of ``W_N / sqrt(N)`` for ``N = n_end``. The register holds
    the selection index ``s`` (``m = ceil(log2 N)`` qubits), the counter (``m`` qubits), the
    two comparator flags and the ``N`` system qubits, in this order.
    """
    if not LCU_RANGE[0] <= n_end <= LCU_RANGE[1]:
        raise ArgumentError(f"the block-encoding supports {LCU_RANGE[0]} <= n <= "
                            f"{LCU_RANGE[1]} system qubits, got {n_end}")
    m = math.ceil(math.log2(n_end))
    select = list(range(m))
    counter = list(range(m, 2 * m))
    flags = (2 * m, 2 * m + 1)
    system = list(range(2 * m + 2, 2 * m + 2 + n_end))
    circuit = Circuit(2 * m + 2 + n_end, name=f"lcu_w{n_end}",
                      ancillas={'select': (0, m), 'counter': (m, 2 * m),
                                'flags': (2 * m, 2 * m + 2)})
    prepare = uniform_superposition_ops(n_end, select)
    compare = comparator_ops(select, counter, flags)
    circuit.extend(prepare)
    for k in range(n_end):
        circuit.extend(compare)
        circuit.extend(lcu_select_ops(k, flags, system[k]))
        circuit.extend(op.adjoint() for op in reversed(compare))
        if k < n_end - 1:
            circuit.extend(increment_ops(counter))
    # the counter holds N-1, flip its set bits to return to |0>
    last = n_end - 1
    circuit.extend(GateOp('x', q) for i, q in enumerate(counter) if (last >> (m - 1 - i)) & 1)
    circuit.extend(op.adjoint() for op in reversed(prepare))
    return circuit


def lcu_block_encoding(n_end: int) -> Tuple[Circuit, BlockEncodingCertificate]:
    """
    Build the block-encoding circuit (see :func:`lcu_circuit`) and certify it: the block
    with every ancilla in ``|0>`` is compared with ``W_N / sqrt(N)``, and the norm that the
    counter and flag registers leave outside of ``|0>`` is measured.

    :param n_end: number of system qubits, ``2 <= n_end <= 6``
    :return: the circuit and its certificate
    """
    circuit = lcu_circuit(n_end)
    dim_sys = 2 ** n_end
    n_ancilla = circuit.num_qubits - n_end
    columns = np.zeros((2 ** circuit.num_qubits, dim_sys), dtype=complex)
    columns[np.arange(dim_sys), np.arange(dim_sys)] = 1
    out = apply_circuit_to_columns(circuit, columns)
    block = out[:dim_sys, :]
    expected = build_w_unitary(n_end) / math.sqrt(n_end)
    singular_values = np.linalg.svd(block, compute_uv=False)
    m = math.ceil(math.log2(n_end))
    # axes: select, counter and flags, system, input column
    split = out.reshape(2 ** m, 2 ** (m + 2), dim_sys, dim_sys)
    garbage = np.sqrt(np.sum(np.abs(split[:, 1:, :, :]) ** 2, axis=(0, 1, 2)))
    certificate = BlockEncodingCertificate(
        n_system=n_end, n_ancilla=n_ancilla,
        subnormalization=float(singular_values[0]),
        max_block_deviation=float(np.max(np.abs(block - expected))),
        singular_values=[float(v) for v in singular_values],
        garbage_norm=float(np.max(garbage)),
        num_qubits=circuit.num_qubits, gate_counts=circuit.gate_counts())
    logger.debug(f"block-encoding of W_{n_end}: deviation {certificate.max_block_deviation:.3e}, "
                 f"garbage {certificate.garbage_norm:.3e}")
    return circuit, certificate


def max_deviation_up_to_phase(a: np.ndarray, b: np.ndarray) -> float:
    """
    The largest entrywise deviation ``max |a - e^(i phi) b|`` for the global phase ``phi``
    that aligns the largest entry of ``b`` with ``a``.
    """
    if a.shape != b.shape:
        raise ArgumentError(f"cannot compare matrices of shapes {a.shape} and {b.shape}")
    index = np.unravel_index(np.argmax(np.abs(b)), b.shape)
    if abs(a[index]) < 1e-12:
        return float(np.max(np.abs(a - b)))
    phase = a[index] / b[index]
    phase /= abs(phase)
    return float(np.max(np.abs(a - phase * b)))
