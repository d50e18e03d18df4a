"""
Construction of the one-way allocation protocols of a central hub as data:
the W state protocol, the GHZ state protocol and the teleportation baseline.

A protocol is described by the operations of the central system (a list of gates on the
central register), the measured central qubits, the message ``alpha_i(s)`` sent to each
end node for an outcome ``s`` and the recovery that node applies, which only depends on
``alpha_i(s)``. Recoveries are Pauli words (see :func:`hubcast.statevec.pauli_word_matrix`).

The central register of a protocol consists of ``num_local`` freshly prepared qubits
followed by the central halves ``c_1 ... c_n`` of the Bell pairs.
"""
import logging
import math
from itertools import product
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from hubcast.errors import ArgumentError, ResourceLimitError
from hubcast.models import Message, ResourceReport, log_once
from hubcast.statevec import (
    GateOp, Outcome, PAULI, Statevector, apply_pauli_string, pauli_word_matrix
)

logger = logging.getLogger('hubcast')

MAX_ENUMERATED_OUTCOMES = 2 ** 16
"""above this number of outcomes, message statistics are taken from the declared alphabets"""
MAX_GRAM_OUTCOMES = 4096
"""largest outcome family for which a Gram matrix is computed"""

W_NODE1_WORDS = {1: 'I', 2: 'XZ'}
W_NODE2_WORDS = {1: 'I', 2: 'X'}
W_NODE_K_WORDS = {1: 'I', 2: 'X', 3: 'Z', 4: 'ZX'}
GHZ_NODE1_WORDS = {1: 'I', 2: 'Z'}
GHZ_NODE_K_WORDS = {1: 'I', 2: 'X'}
TELEPORT_WORDS = {1: 'I', 2: 'X', 3: 'Z', 4: 'XZ'}


def _check_n(n: int, minimum: int = 2):
    if not isinstance(n, (int, np.integer)) or n < minimum:
        raise ArgumentError(f"the number of end nodes must be an integer >= {minimum}, got {n!r}")


# --- target states and central unitaries ---

def w_state(n: int) -> Statevector:
    """the n-qubit W state, amplitude ``1/sqrt(n)`` on every weight-1 basis string"""
    _check_n(n, 1)
    amps = np.zeros(2 ** n, dtype=complex)
    amps[[1 << k for k in range(n)]] = 1 / np.sqrt(n)
    return Statevector(amps)


def ghz_state(n: int) -> Statevector:
    """the n-qubit GHZ state ``(|0...0> + |1...1>) / sqrt(2)``"""
    _check_n(n, 1)
    amps = np.zeros(2 ** n, dtype=complex)
    amps[0] = amps[-1] = 1 / np.sqrt(2)
    return Statevector(amps)


def _w_term_signs(n: int, x: np.ndarray, r: int) -> np.ndarray:
    # phase of Z^(r) on the leading r qubits: parity of the top r bits of x
    top = x >> (n - r)
    parity = np.zeros_like(top)
    while np.any(top):
        parity ^= top & 1
        top >>= 1
    return 1 - 2 * parity


def build_w_unitary(n: int) -> np.ndarray:
    """
    The W allocation unitary ``W_n = (1/sqrt(n)) sum_r Z^(r-1) (x) X (x) I^(n-r)``.
    It is real, symmetric and unitary (it squares to the identity).

    :param n: number of qubits (>= 2)
    :return: the real ``2^n x 2^n`` matrix
    """
    _check_n(n)
    dim = 2 ** n
    x = np.arange(dim, dtype=np.int64)
    matrix = np.zeros((dim, dim), dtype=float)
    for r in range(n):
        matrix[x ^ (1 << (n - 1 - r)), x] = _w_term_signs(n, x, r) / np.sqrt(n)
    return matrix


def w_unitary_row(n: int, s: int) -> np.ndarray:
    """row ``s`` of :func:`build_w_unitary`, i.e. ``W_n^T |s>``, without the dense matrix"""
    _check_n(n)
    row = np.zeros(2 ** n, dtype=complex)
    s_arr = np.array([s], dtype=np.int64)
    for r in range(n):
        row[s ^ (1 << (n - 1 - r))] = _w_term_signs(n, s_arr, r)[0] / np.sqrt(n)
    return row


def build_ghz_unitary(n: int) -> np.ndarray:
    """
    The GHZ allocation unitary ``(H (x) I^(n-1)) . C(X^(n-1))``, where the block-controlled
    X flips qubits ``2..n`` if qubit 1 is set.

    :param n: number of qubits (>= 2)
    :return: the real ``2^n x 2^n`` matrix
    """
    _check_n(n)
    dim, half = 2 ** n, 2 ** (n - 1)
    x = np.arange(dim, dtype=np.int64)
    y = np.where(x >= half, x ^ (half - 1), x)
    msb, rest = y >> (n - 1), y & (half - 1)
    matrix = np.zeros((dim, dim), dtype=float)
    matrix[rest, x] = 1 / np.sqrt(2)
    matrix[rest | half, x] = (1 - 2 * msb) / np.sqrt(2)
    return matrix


def ghz_unitary_row(n: int, s: int) -> np.ndarray:
    """row ``s`` of :func:`build_ghz_unitary`"""
    _check_n(n)
    half = 2 ** (n - 1)
    rest = s & (half - 1)
    row = np.zeros(2 ** n, dtype=complex)
    row[rest] = 1 / np.sqrt(2)
    row[half | (rest ^ (half - 1))] = (-1) ** (s >> (n - 1)) / np.sqrt(2)
    return row


# --- protocols ---

class AllocationProtocol:
    """
    A one-way LOCC protocol of a central hub with ``n`` end nodes.

    :param name: protocol name, e.g. ``'w'``, ``'ghz'`` or ``'teleport(w)'``
    :param n: number of end nodes
    :param target_state: the state that the end nodes hold after recovery
    :param central_ops: gates on the central register (``num_local`` prepared qubits followed
           by the Bell halves ``c_1 ... c_n``)
    :param measured: measured central register qubits, in outcome bit order
    :param alpha: maps an outcome to the messages ``alpha_i(s)`` (1-based integers, one per node)
    :param recovery_tables: for each node, the Pauli word applied for each message value
    :param analytic_branch: maps an outcome to its unrecovered end state and probability
    :param local_state: state of the prepared central qubits (``None`` if there are none)
    :param central_unitary: callable that returns the dense unitary of the central operations
           (only available for protocols whose central operation is a single unitary)
    :param extension: ``True`` for parameters outside of the published protocol range
    """

    def __init__(self, name: str, n: int, target_state: Statevector,
                 central_ops: Optional[List[GateOp]],
                 measured: Sequence[int], alpha: Callable[[Outcome], List[int]],
                 recovery_tables: List[Dict[int, str]],
                 analytic_branch: Callable[[Outcome], Tuple[Statevector, float]],
                 local_state: Statevector = None,
                 central_unitary: Callable[[], np.ndarray] = None, extension: bool = False):
        if target_state.num_qubits != n:
            raise ArgumentError(f"target state has {target_state.num_qubits} qubits, "
                                f"but the protocol has {n} end nodes")
        if len(recovery_tables) != n:
            raise ArgumentError(f"expected {n} recovery tables, got {len(recovery_tables)}")
        self.name = name
        self.n = n
        self.target_state = target_state
        self._central_ops = None if central_ops is None else list(central_ops)
        self.measured = tuple(measured)
        self.local_state = local_state
        self.num_local = 0 if local_state is None else local_state.num_qubits
        self.recovery_tables = [dict(t) for t in recovery_tables]
        self.extension = extension
        self._alpha = alpha
        self._analytic_branch = analytic_branch
        self._central_unitary = central_unitary
        self._unitary_cache = None
        if sorted(self.measured) != list(range(self.num_central)):
            raise ArgumentError(f"every central qubit has to be measured exactly once, "
                                f"got {self.measured}")

    @property
    def central_ops(self) -> List[GateOp]:
        """gates on the central register; derived from the central unitary if none were given"""
        if self._central_ops is None:
            self._central_ops = [GateOp('unitary', list(range(self.num_central)),
                                        matrix=self.central_unitary)]
        return self._central_ops

    @property
    def num_central(self) -> int:
        """size of the central register"""
        return self.num_local + self.n

    @property
    def num_outcomes(self) -> int:
        return 2 ** len(self.measured)

    @property
    def central_memory_qubits(self) -> int:
        """peak number of qubits the central system holds before the measurement"""
        return self.num_central

    @property
    def end_memory_qubits(self) -> int:
        return self.n

    @property
    def alphabet_sizes(self) -> List[int]:
        """number of distinct messages each node can receive"""
        return [len(t) for t in self.recovery_tables]

    @property
    def central_unitary(self) -> np.ndarray:
        """the dense central unitary (built on first access)"""
        if self._central_unitary is None:
            raise ArgumentError(f"protocol '{self.name}' has no single central unitary")
        if self._unitary_cache is None:
            self._unitary_cache = self._central_unitary()
        return self._unitary_cache

    def outcomes(self) -> List[Outcome]:
        width = len(self.measured)
        return [Outcome.from_integer(v, width) for v in range(self.num_outcomes)]

    def _check_outcome(self, s: Outcome):
        if len(s.bits) != len(self.measured):
            raise ArgumentError(f"protocol '{self.name}' expects {len(self.measured)} outcome "
                                f"bits, got {len(s.bits)}")

    def alpha(self, s: Outcome) -> List[int]:
        """the messages ``alpha_1(s) ... alpha_n(s)``"""
        self._check_outcome(s)
        return self._alpha(s)

    def message_plan(self, s: Outcome) -> List[Message]:
        bits = self.bits_per_node_declared()
        return [Message(node=i + 1, alpha=a, bits=bits[i]) for i, a in enumerate(self.alpha(s))]

    def recovery_plan(self, s: Outcome) -> List[str]:
        """the Pauli word that each end node applies for the outcome ``s``"""
        return [table[a] for table, a in zip(self.recovery_tables, self.alpha(s))]

    def recovery_matrices(self, s: Outcome) -> List[np.ndarray]:
        return [pauli_word_matrix(word) for word in self.recovery_plan(s)]

    def analytic_branch(self, s: Outcome) -> Tuple[Statevector, float]:
        """the unrecovered end state for the outcome ``s`` and its probability"""
        self._check_outcome(s)
        return self._analytic_branch(s)

    def recover(self, end_state: Statevector, s: Outcome) -> Statevector:
        """apply the recovery of every end node to the end register"""
        return apply_pauli_string(end_state, list(enumerate(self.recovery_plan(s))))

    def bits_per_node_declared(self) -> List[int]:
        return [_bits_for(size) for size in self.alphabet_sizes]

    def __repr__(self):
        return (f"AllocationProtocol(name={self.name!r}, n={self.n}, "
                f"central_qubits={self.num_central}, extension={self.extension})")


def _bits_for(max_alpha: int) -> int:
    return int(math.ceil(math.log2(max_alpha))) if max_alpha > 1 else 0


def _w_alpha(s: Outcome) -> List[int]:
    bits = s.bits
    alphas = [1 + bits[0]]
    if len(bits) > 1:
        alphas.append(1 + bits[1])
    kappa = 0
    for k in range(2, len(bits)):
        # kappa_k is the parity of s_2 ... s_(k-1)
        kappa ^= bits[k - 1]
        alphas.append(1 + 2 * kappa + bits[k])
    return alphas


def build_w_protocol(n: int) -> AllocationProtocol:
    """
    The W state protocol: the central system applies ``W_n`` to its Bell halves and measures
    them. Node 1 recovers with ``(XZ)^s_1``, node 2 with ``X^s_2`` and node ``k >= 3`` with
    ``Z^kappa_k X^s_k``, where ``kappa_k`` is the parity of ``s_2 ... s_(k-1)``.
    This costs ``2n - 2`` classical bits. ``n = 2`` is supported as an extension.

    :param n: number of end nodes (>= 2)
    :return: the protocol
    """
    _check_n(n)
    extension = n == 2
    if extension:
        log_once(logging.INFO, "the W protocol for n=2 is an extension of the n >= 3 protocol")
    tables = [W_NODE1_WORDS, W_NODE2_WORDS] + [W_NODE_K_WORDS] * (n - 2)
    scale = 2.0 ** (-n / 2)

    def branch(s: Outcome) -> Tuple[Statevector, float]:
        return Statevector._trusted(w_unitary_row(n, s.as_integer)), scale ** 2

    def unitary() -> np.ndarray:
        return build_w_unitary(n)

    logger.debug(f"built the W protocol for n={n}")
    return AllocationProtocol(
        name='w', n=n, target_state=w_state(n), central_ops=None, measured=range(n),
        alpha=_w_alpha, recovery_tables=tables, analytic_branch=branch,
        central_unitary=unitary, extension=extension)


def build_ghz_protocol(n: int) -> AllocationProtocol:
    """
    The GHZ state protocol: the central system applies ``(H (x) I) . C(X^(n-1))`` and measures.
    The post-measurement end state is ``U^T |s>``, node 1 recovers with ``Z^s_1`` and every
    other node with ``X^s_k``, so every node receives one bit.

    :param n: number of end nodes (>= 2)
    :return: the protocol
    """
    _check_n(n)
    tables = [GHZ_NODE1_WORDS] + [GHZ_NODE_K_WORDS] * (n - 1)
    scale = 2.0 ** (-n / 2)

    def branch(s: Outcome) -> Tuple[Statevector, float]:
        return Statevector._trusted(ghz_unitary_row(n, s.as_integer)), scale ** 2

    def unitary() -> np.ndarray:
        return build_ghz_unitary(n)

    logger.debug(f"built the GHZ protocol for n={n}")
    return AllocationProtocol(
        name='ghz', n=n, target_state=ghz_state(n), central_ops=None, measured=range(n),
        alpha=lambda s: [1 + b for b in s.bits], recovery_tables=tables, analytic_branch=branch,
        central_unitary=unitary)


def build_teleport_protocol(n: int, target: Statevector, name: str = 'teleport') \
        -> AllocationProtocol:
    """
    The teleportation baseline: the central system prepares ``target`` on ``n`` fresh qubits
    ``p_1 ... p_n`` and teleports ``p_i`` through the Bell pair ``(c_i, e_i)``.
    The outcome bits are ordered ``a_1 b_1 a_2 b_2 ...`` (``a_i`` from ``p_i``, ``b_i`` from
    ``c_i``), node ``i`` receives ``alpha_i = 1 + 2 a_i + b_i`` and recovers with
    ``X^b_i Z^a_i``. Costs ``2n`` bits and ``2n`` central memory qubits.

    :param n: number of end nodes (>= 1)
    :param target: the n-qubit state to distribute
    :param name: protocol name used in reports
    :return: the protocol
    """
    _check_n(n, 1)
    if target.num_qubits != n:
        raise ArgumentError(f"target state has {target.num_qubits} qubits, expected {n}")
    ops = []
    for i in range(n):
        ops.append(GateOp('x', n + i, controls=[i]))
        ops.append(GateOp('h', i))
    measured = [q for i in range(n) for q in (i, n + i)]
    scale = 4.0 ** (-n)

    def alpha(s: Outcome) -> List[int]:
        return [1 + 2 * s.bits[2 * i] + s.bits[2 * i + 1] for i in range(n)]

    def branch(s: Outcome) -> Tuple[Statevector, float]:
        # the end register holds the target up to the Pauli frame X^b_i Z^a_i on each node
        frame = [(i, ('X' if s.bits[2 * i + 1] else '') + ('Z' if s.bits[2 * i] else '') or 'I')
                 for i in range(n)]
        return apply_pauli_string(target, frame), scale

    logger.debug(f"built the teleportation protocol for n={n}")
    return AllocationProtocol(
        name=name, n=n, target_state=target, central_ops=ops, measured=measured, alpha=alpha,
        recovery_tables=[TELEPORT_WORDS] * n, analytic_branch=branch, local_state=target)


# --- reports and premises ---

def resource_report(p: AllocationProtocol) -> ResourceReport:
    """
    Count the classical bits and the memory of a protocol. The fidelity fields are left
    empty, they are filled in by the verifier.

    ``bits_per_node[i]`` is ``ceil(log2(max_s alpha_i(s)))``, the maximum is taken over all
    outcomes while there are at most ``MAX_ENUMERATED_OUTCOMES``, beyond that the declared
    message alphabets of the nodes are used.

    :param p: the protocol
    :return: the report
    """
    if p.num_outcomes <= MAX_ENUMERATED_OUTCOMES:
        seen = [set() for _ in range(p.n)]
        for s in p.outcomes():
            for i, a in enumerate(p.alpha(s)):
                seen[i].add(a)
        max_alpha = [max(values) for values in seen]
        distinct = [len(values) for values in seen]
    else:
        max_alpha = distinct = p.alphabet_sizes
    return ResourceReport(
        protocol=p.name, n=p.n, bits_per_node=[_bits_for(m) for m in max_alpha],
        communication_cost=float(sum(math.log2(d) for d in distinct)),
        central_memory_qubits=p.central_memory_qubits, end_memory_qubits=p.end_memory_qubits,
        extension=p.extension)


def outcome_state_gram(p: AllocationProtocol) -> np.ndarray:
    """
    The Gram matrix ``G[s, t] = <b_s|b_t>`` of the unrecovered end states of all outcomes
    (from :meth:`AllocationProtocol.analytic_branch`). For the W and GHZ protocols the family
    ``{U^T |s>}`` is an orthonormal basis, i.e. ``G`` is the identity.

    :param p: the protocol
    :return: the ``2^m x 2^m`` Gram matrix, ``m`` being the number of measured qubits
    """
    if p.num_outcomes > MAX_GRAM_OUTCOMES:
        raise ResourceLimitError(len(p.measured), int(math.log2(MAX_GRAM_OUTCOMES)),
                                 what="outcome Gram matrix")
    vectors = np.array([p.analytic_branch(s)[0].amps for s in p.outcomes()])
    return vectors.conj() @ vectors.T


def recovery_identity_table() -> List[Dict[str, object]]:
    """
    The single-qubit Pauli identities that make the W recovery work, one entry per identity
    and bit value ``s``: ``(XZ)^s X|s> = |1>``, ``(XZ)^s Z|s> = |0>``, ``X^s I|s> = |0>``,
    ``X^s X|s> = |1>`` and ``X^s Z|s> = (-1)^s |0>``.
    Each entry holds the identity as text, ``s``, the word that is applied to ``|s>`` and the
    expected result vector.
    """
    families = [
        ('(XZ)^s X|s> = |1>', 'XZ', 'X', lambda s: [0, 1]),
        ('(XZ)^s Z|s> = |0>', 'XZ', 'Z', lambda s: [1, 0]),
        ('X^s I|s> = |0>', 'X', 'I', lambda s: [1, 0]),
        ('X^s X|s> = |1>', 'X', 'X', lambda s: [0, 1]),
        ('X^s Z|s> = (-1)^s |0>', 'X', 'Z', lambda s: [(-1) ** s, 0]),
    ]
    table = []
    for (identity, power_word, tail, expected), s in product(families, (0, 1)):
        word = (power_word if s else '') + tail
        table.append({'identity': identity, 's': s, 'word': word,
                      'expected': np.array(expected(s), dtype=complex)})
    return table


def check_recovery_identities(tol: float = 1e-12) -> List[Tuple[str, int, float]]:
    """
    Evaluate :func:`recovery_identity_table` with exact 2x2 matrices.

    :return: ``(identity, s, deviation)`` for every entry
    """
    results = []
    for entry in recovery_identity_table():
        basis = PAULI['I'][:, entry['s']]
        actual = pauli_word_matrix(entry['word']) @ basis
        deviation = float(np.max(np.abs(actual - entry['expected'])))
        if deviation > tol:
            logger.warning(f"identity {entry['identity']} fails for s={entry['s']}: "
                           f"deviation {deviation:.3e}")
        results.append((entry['identity'], entry['s'], deviation))
    return results
