"""
Dense statevector engine: state construction, gate application, computational-basis
measurement, partial trace and phase-insensitive comparison.

Qubit 0 is the leftmost tensor factor and the most significant bit of a basis index
(big-endian), so a register written as ``|q0 q1 ... q(n-1)>`` has the index
``q0 * 2^(n-1) + ... + q(n-1)``.
"""
import logging
from typing import Iterable, List, NamedTuple, Sequence, Tuple, Union

import numpy as np

from hubcast.errors import ArgumentError, NonUnitaryError

logger = logging.getLogger('hubcast')

UNITARY_TOL = 1e-10
"""tolerance of the unitarity check for matrix payloads"""
NORM_TOL = 1e-10
"""tolerance of the normalization check for state vectors"""
ZERO_PROBABILITY = 1e-14
"""measurement outcomes with a probability at or below this threshold are omitted"""
UNITARY_CHECK_MAX_DIM = 1024
"""up to this dimension ``U^dagger U`` is computed, above it sampled vectors are checked"""
UNITARY_CHECK_VECTORS = 8
"""number of random vectors whose norms are checked for matrices above ``UNITARY_CHECK_MAX_DIM``"""
UNITARY_CHECK_SEED = 0

PAULI = {
    'I': np.array([[1, 0], [0, 1]], dtype=complex),
    'X': np.array([[0, 1], [1, 0]], dtype=complex),
    'Y': np.array([[0, -1j], [1j, 0]], dtype=complex),
    'Z': np.array([[1, 0], [0, -1]], dtype=complex),
}
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)

RngLike = Union[int, np.random.Generator]


def ry_matrix(theta: float) -> np.ndarray:
    """the rotation ``Ry(theta) = exp(-i theta Y / 2)``"""
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def pauli_word_matrix(word: str) -> np.ndarray:
    """
    Multiply a word of Pauli letters into a single 2x2 matrix.
    The leftmost letter is the leftmost matrix factor, i.e. it is applied last:
    ``pauli_word_matrix('XZ')`` equals ``X @ Z``. The empty word is the identity.

    :param word: a string over the letters I, X, Y, Z (case insensitive)
    :return: the product matrix
    """
    matrix = PAULI['I']
    for letter in word.upper():
        if letter not in PAULI:
            raise ArgumentError(f"'{letter}' in Pauli word '{word}' is not one of I, X, Y, Z")
        matrix = matrix @ PAULI[letter]
    return matrix


def check_unitary(matrix: np.ndarray, tol: float = UNITARY_TOL) -> np.ndarray:
    """
    Validate that the matrix is square, has a power-of-two dimension and is unitary.

    :param matrix: the matrix to check
    :param tol: max. entrywise deviation of ``U^dagger U`` from the identity
    :return: the matrix as complex numpy array
    """
    matrix = np.asarray(matrix, dtype=complex)
    dim = matrix.shape[0] if matrix.ndim == 2 else 0
    if matrix.ndim != 2 or matrix.shape != (dim, dim) or dim < 2 or dim & (dim - 1):
        raise ArgumentError(f"expected a square matrix with a power-of-two dimension, "
                            f"got shape {matrix.shape}")
    if dim > UNITARY_CHECK_MAX_DIM:
        deviation = _unitarity_deviation_sampled(matrix)
    else:
        deviation = float(np.max(np.abs(matrix.conj().T @ matrix - np.eye(dim))))
    if deviation > tol:
        raise NonUnitaryError(matrix.shape, deviation, tol)
    return matrix


def _unitarity_deviation_sampled(matrix: np.ndarray) -> float:
    # column norms plus the norms of a few seeded random images; all equal 1 for a unitary
    dim = matrix.shape[0]
    deviation = float(np.max(np.abs(np.sum(np.abs(matrix) ** 2, axis=0) - 1)))
    rng = np.random.default_rng(UNITARY_CHECK_SEED)
    vectors = rng.normal(size=(dim, UNITARY_CHECK_VECTORS)) \
        + 1j * rng.normal(size=(dim, UNITARY_CHECK_VECTORS))
    vectors /= np.linalg.norm(vectors, axis=0)
    norms = np.linalg.norm(matrix @ vectors, axis=0) ** 2
    return max(deviation, float(np.max(np.abs(norms - 1))))


class Outcome(NamedTuple):
    """
    A computational-basis measurement result ``s = s_1 ... s_N``.
    ``bits[0]`` belongs to the first measured qubit and is the most significant bit.
    """
    bits: Tuple[int, ...]

    @property
    def as_integer(self) -> int:
        value = 0
        for bit in self.bits:
            value = (value << 1) | bit
        return value

    @classmethod
    def from_integer(cls, value: int, width: int) -> 'Outcome':
        if not 0 <= value < 2 ** width:
            raise ArgumentError(f"{value} does not fit into {width} bits")
        return cls(tuple((value >> (width - 1 - i)) & 1 for i in range(width)))

    @classmethod
    def from_string(cls, bitstring: str) -> 'Outcome':
        if not bitstring or set(bitstring) - {'0', '1'}:
            raise ArgumentError(f"'{bitstring}' is not a bitstring")
        return cls(tuple(int(b) for b in bitstring))

    def __str__(self) -> str:
        return ''.join(str(b) for b in self.bits)


class Statevector:
    """
    A normalized pure state of ``num_qubits`` qubits. The amplitude array is read-only,
    operations return new instances.

    :param amps: the ``2^num_qubits`` complex amplitudes
    """

    def __init__(self, amps: Iterable[complex]):
        amps = np.array(amps, dtype=complex)
        if amps.ndim != 1 or amps.size < 2 or amps.size & (amps.size - 1):
            raise ArgumentError(f"expected 2^n amplitudes with n >= 1, got shape {amps.shape}")
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1) > NORM_TOL:
            raise ArgumentError(f"state is not normalized (squared norm {norm!r})")
        amps.setflags(write=False)
        self.amps = amps
        self.num_qubits = amps.size.bit_length() - 1

    @classmethod
    def _trusted(cls, amps: np.ndarray) -> 'Statevector':
        # skips validation, for amplitudes produced by unitary evolution inside this module
        state = cls.__new__(cls)
        amps = np.ascontiguousarray(amps, dtype=complex).reshape(-1)
        amps.setflags(write=False)
        state.amps = amps
        state.num_qubits = amps.size.bit_length() - 1
        return state

    def tensor(self, other: 'Statevector') -> 'Statevector':
        """the product state ``self ⊗ other`` (``self`` holds the leading qubits)"""
        return Statevector._trusted(np.kron(self.amps, other.amps))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amps) ** 2

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def __len__(self):
        return self.amps.size

    def __repr__(self) -> str:
        terms = [f"({amp:.4g})|{i:0{self.num_qubits}b}>"
                 for i, amp in enumerate(self.amps[:1024]) if abs(amp) > 1e-12]
        if len(terms) > 8:
            terms = terms[:8] + ['...']
        return f"Statevector[{self.num_qubits}]({' + '.join(terms)})"


class DensityBlock:
    """
    A reduced density matrix, as returned by :func:`partial_trace_keep`.

    :param entries: the ``dim x dim`` Hermitian matrix
    """

    def __init__(self, entries: np.ndarray):
        entries = np.array(entries, dtype=complex)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise ArgumentError(f"expected a square matrix, got shape {entries.shape}")
        if np.max(np.abs(entries - entries.conj().T)) > NORM_TOL:
            raise ArgumentError("density matrix is not Hermitian")
        entries.setflags(write=False)
        self.entries = entries
        self.dim = entries.shape[0]

    @property
    def num_qubits(self) -> int:
        return self.dim.bit_length() - 1

    def trace(self) -> float:
        return float(np.trace(self.entries).real)

    def purity(self) -> float:
        return float(np.trace(self.entries @ self.entries).real)

    def __repr__(self) -> str:
        return f"DensityBlock(dim={self.dim}, diag={np.round(np.diag(self.entries).real, 6)})"


class GateOp:
    """
    A (possibly controlled) gate on a list of target qubits.

    Fixed kinds (``i``, ``x``, ``y``, ``z``, ``h``) and ``ry`` act on one target, ``unitary``
    carries an arbitrary ``2^k x 2^k`` matrix for ``k`` targets (the first target is the
    most significant one). Controls fire on the given ``control_states``: 1 is a filled
    control dot, 0 an open one.

    :param kind: one of ``GateOp.KINDS``
    :param targets: target qubit index or list of indices
    :param theta: rotation angle in radians (only for ``ry``)
    :param matrix: the unitary matrix (only for ``unitary``)
    :param controls: control qubit indices
    :param control_states: firing value of each control (default: all 1)
    """

    KINDS = ('i', 'x', 'y', 'z', 'h', 'ry', 'unitary')
    _FIXED = {'i': PAULI['I'], 'x': PAULI['X'], 'y': PAULI['Y'], 'z': PAULI['Z'], 'h': HADAMARD}

    def __init__(self, kind: str, targets: Union[int, Sequence[int]], theta: float = None,
                 matrix: np.ndarray = None, controls: Sequence[int] = (),
                 control_states: Sequence[int] = None):
        kind = kind.lower()
        if kind not in self.KINDS:
            raise ArgumentError(f"unknown gate kind '{kind}', expected one of {self.KINDS}")
        targets = (int(targets),) if isinstance(targets, (int, np.integer)) else \
            tuple(int(t) for t in targets)
        controls = tuple(int(c) for c in controls)
        if control_states is None:
            control_states = (1,) * len(controls)
        control_states = tuple(int(v) for v in control_states)
        if not targets:
            raise ArgumentError("a gate needs at least one target")
        if len(control_states) != len(controls) or set(control_states) - {0, 1}:
            raise ArgumentError(f"invalid control states {control_states} for controls {controls}")
        qubits = controls + targets
        if len(set(qubits)) != len(qubits) or min(qubits) < 0:
            raise ArgumentError(f"gate qubits must be distinct and non-negative, got {qubits}")
        if kind == 'unitary':
            if matrix is None:
                raise ArgumentError("a 'unitary' gate needs a matrix")
            matrix = check_unitary(matrix)
            if matrix.shape[0] != 2 ** len(targets):
                raise ArgumentError(f"a {matrix.shape[0]}-dimensional matrix does not fit "
                                    f"{len(targets)} target qubit(s)")
            theta = None
        else:
            if len(targets) != 1:
                raise ArgumentError(f"gate '{kind}' acts on exactly one target")
            if kind == 'ry':
                if theta is None:
                    raise ArgumentError("an 'ry' gate needs an angle")
                theta = float(theta)
                matrix = ry_matrix(theta)
            else:
                theta = None
                matrix = self._FIXED[kind]
        matrix = np.array(matrix, dtype=complex)
        matrix.setflags(write=False)
        self.kind = kind
        self.targets = targets
        self.theta = theta
        self.controls = controls
        self.control_states = control_states
        self._matrix = matrix

    @property
    def matrix(self) -> np.ndarray:
        """the matrix acting on the targets (without the controls)"""
        return self._matrix

    @property
    def qubits(self) -> Tuple[int, ...]:
        return self.controls + self.targets

    def with_controls(self, controls: Sequence[int], states: Sequence[int] = None) -> 'GateOp':
        """this gate with additional (leading) controls"""
        states = (1,) * len(controls) if states is None else tuple(states)
        return self._copy(controls=tuple(controls) + self.controls,
                          control_states=tuple(states) + self.control_states)

    def relabeled(self, mapping: Sequence[int]) -> 'GateOp':
        """this gate with every qubit index ``q`` replaced by ``mapping[q]``"""
        return self._copy(targets=tuple(mapping[t] for t in self.targets),
                          controls=tuple(mapping[c] for c in self.controls))

    def adjoint(self) -> 'GateOp':
        if self.kind == 'ry':
            return self._copy(theta=-self.theta)
        if self.kind == 'unitary':
            return self._copy(matrix=self._matrix.conj().T)
        return self

    def _copy(self, **changes) -> 'GateOp':
        params = dict(kind=self.kind, targets=self.targets, theta=self.theta,
                      matrix=self._matrix if self.kind == 'unitary' else None,
                      controls=self.controls, control_states=self.control_states)
        params.update(changes)
        return GateOp(**params)

    def __eq__(self, other):
        if not isinstance(other, GateOp):
            return False
        return (self.kind == other.kind and self.targets == other.targets
                and self.controls == other.controls
                and self.control_states == other.control_states
                and self.theta == other.theta
                and np.array_equal(self._matrix, other._matrix))

    def __hash__(self):
        return hash((self.kind, self.targets, self.controls, self.control_states, self.theta))

    def __repr__(self) -> str:
        param = f"({self.theta!r})" if self.theta is not None else ""
        ctrl = f" ctrl={self.controls}/{self.control_states}" if self.controls else ""
        return f"GateOp({self.kind}{param} {self.targets}{ctrl})"


def make_basis_state(num_qubits: int, index: int) -> Statevector:
    """
    The computational basis state ``|index>`` on ``num_qubits`` qubits.

    :param num_qubits: register size (>= 1)
    :param index: big-endian basis index, ``0 <= index < 2^num_qubits``
    :return: the basis state
    """
    if num_qubits < 1:
        raise ArgumentError(f"need at least one qubit, got {num_qubits}")
    if not 0 <= index < 2 ** num_qubits:
        raise ArgumentError(f"basis index {index} is out of range for {num_qubits} qubits")
    amps = np.zeros(2 ** num_qubits, dtype=complex)
    amps[index] = 1
    return Statevector._trusted(amps)


def bell_pair_layout(n_pairs: int, layout: Union[str, Sequence[Tuple[int, int]]] = 'blocked') \
        -> List[Tuple[int, int]]:
    """
    Resolve a layout descriptor into a list of ``(c_i, e_i)`` qubit index pairs.

    * ``'blocked'``: ``c_1 ... c_n e_1 ... e_n``
    * ``'interleaved'``: ``c_1 e_1 c_2 e_2 ...``
    * an explicit sequence of ``(c_i, e_i)`` pairs

    :param n_pairs: number of Bell pairs
    :param layout: the layout descriptor
    :return: the explicit list of index pairs
    """
    if n_pairs < 1:
        raise ArgumentError(f"need at least one Bell pair, got {n_pairs}")
    if layout == 'blocked':
        return [(i, n_pairs + i) for i in range(n_pairs)]
    if layout == 'interleaved':
        return [(2 * i, 2 * i + 1) for i in range(n_pairs)]
    if isinstance(layout, str):
        raise ArgumentError(f"unknown layout '{layout}', use 'blocked', 'interleaved' or pairs")
    pairs = [(int(c), int(e)) for c, e in layout]
    used = sorted(q for pair in pairs for q in pair)
    if len(pairs) != n_pairs or used != list(range(2 * n_pairs)):
        raise ArgumentError(f"layout {pairs} must assign the {2 * n_pairs} roles to distinct "
                            f"qubit indices 0..{2 * n_pairs - 1}")
    return pairs


def make_bell_pairs(n_pairs: int, layout: Union[str, Sequence[Tuple[int, int]]] = 'blocked') \
        -> Statevector:
    """
    The product of ``n_pairs`` Bell states ``(|00> + |11>)/sqrt(2)``, one per ``(c_i, e_i)``
    pair of the layout (see :func:`bell_pair_layout`).

    :param n_pairs: number of Bell pairs
    :param layout: which global qubit holds ``c_i`` and which holds ``e_i``
    :return: the ``2 * n_pairs`` qubit state
    """
    pairs = bell_pair_layout(n_pairs, layout)
    num_qubits = 2 * n_pairs
    x = np.arange(2 ** n_pairs, dtype=np.int64)
    index = np.zeros_like(x)
    for i, (c, e) in enumerate(pairs):
        bit = (x >> (n_pairs - 1 - i)) & 1
        index |= (bit << (num_qubits - 1 - c)) | (bit << (num_qubits - 1 - e))
    amps = np.zeros(2 ** num_qubits, dtype=complex)
    amps[index] = 2.0 ** (-n_pairs / 2)
    return Statevector._trusted(amps)


def _apply_to_tensor(tensor: np.ndarray, num_qubits: int, gate: GateOp) -> np.ndarray:
    # tensor has shape (2,) * num_qubits, optionally followed by batch axes
    out = tensor.copy()
    index = [slice(None)] * num_qubits
    for c, v in zip(gate.controls, gate.control_states):
        index[c] = v
    index = tuple(index)
    remaining = [q for q in range(num_qubits) if q not in gate.controls]
    axes = [remaining.index(t) for t in gate.targets]
    k = len(gate.targets)
    op = gate.matrix.reshape((2,) * (2 * k))
    moved = np.tensordot(op, tensor[index], axes=(list(range(k, 2 * k)), axes))
    out[index] = np.moveaxis(moved, list(range(k)), axes)
    return out


def _check_indices(num_qubits: int, qubits: Sequence[int], what: str = "qubit"):
    if len(set(qubits)) != len(qubits):
        raise ArgumentError(f"{what} indices must be distinct, got {list(qubits)}")
    for q in qubits:
        if not 0 <= q < num_qubits:
            raise ArgumentError(f"{what} index {q} is out of range for {num_qubits} qubits")


def apply_gate(state: Statevector, gate: GateOp) -> Statevector:
    """
    Apply a gate to a state.

    :param state: the input state
    :param gate: the gate; all of its qubit indices must be valid for the state
    :return: the new state
    """
    _check_indices(state.num_qubits, gate.qubits)
    if gate.kind == 'i':
        return state
    n = state.num_qubits
    out = _apply_to_tensor(state.amps.reshape((2,) * n), n, gate)
    return Statevector._trusted(out)


def apply_to_columns(columns: np.ndarray, num_qubits: int, gate: GateOp) -> np.ndarray:
    """
    Apply a gate to every column of a ``2^num_qubits x b`` array at once.

    :param columns: the column vectors
    :param num_qubits: the register size of each column
    :param gate: the gate to apply
    :return: a new array of the same shape
    """
    _check_indices(num_qubits, gate.qubits)
    batch = columns.shape[1]
    tensor = columns.reshape((2,) * num_qubits + (batch,))
    return _apply_to_tensor(tensor, num_qubits, gate).reshape(2 ** num_qubits, batch)


def apply_pauli_string(state: Statevector, paulis: Sequence[Tuple[int, str]]) -> Statevector:
    """
    Apply a tensor product of single-qubit Pauli words, e.g.
    ``[(0, 'XZ'), (1, 'X'), (2, 'Z')]`` applies ``X.Z`` to qubit 0, ``X`` to qubit 1 and
    ``Z`` to qubit 2 (see :func:`pauli_word_matrix` for the word convention).

    :param state: the input state
    :param paulis: list of ``(qubit, word)`` entries with distinct qubits
    :return: the new state
    """
    _check_indices(state.num_qubits, [q for q, _ in paulis])
    for qubit, word in paulis:
        matrix = pauli_word_matrix(word)
        if not np.array_equal(matrix, PAULI['I']):
            state = apply_gate(state, GateOp('unitary', qubit, matrix=matrix))
    return state


def _split_register(state: Statevector, qubits: Sequence[int]) -> Tuple[np.ndarray, np.ndarray]:
    # rows: outcomes of the measured qubits, columns: basis states of the other qubits
    if not qubits:
        raise ArgumentError("need at least one qubit to measure")
    qubits = list(qubits)
    _check_indices(state.num_qubits, qubits)
    n, m = state.num_qubits, len(qubits)
    tensor = state.amps.reshape((2,) * n)
    moved = np.moveaxis(tensor, qubits, list(range(m))).reshape(2 ** m, -1)
    probabilities = np.sum(np.abs(moved) ** 2, axis=1)
    return moved, probabilities


def _collapse(moved: np.ndarray, value: int, probability: float, n: int,
              qubits: Sequence[int]) -> Statevector:
    m = len(qubits)
    collapsed = np.zeros_like(moved)
    collapsed[value] = moved[value] / np.sqrt(probability)
    full = np.moveaxis(collapsed.reshape((2,) * n), list(range(m)), list(qubits))
    return Statevector._trusted(full)


def measure_subset_all_outcomes(state: Statevector, qubits: Sequence[int]) \
        -> List[Tuple[Outcome, float, Statevector]]:
    """
    Enumerate every outcome of a computational-basis measurement of ``qubits``.
    Outcomes with probability <= ``ZERO_PROBABILITY`` are omitted.

    :param state: the state to measure
    :param qubits: the measured qubits; ``qubits[0]`` gives the first outcome bit
    :return: ``(outcome, probability, post-measurement state on the full register)`` triples,
             ordered by outcome value
    """
    moved, probabilities = _split_register(state, qubits)
    results = []
    for value in np.flatnonzero(probabilities > ZERO_PROBABILITY):
        p = float(probabilities[value])
        outcome = Outcome.from_integer(int(value), len(qubits))
        results.append((outcome, p, _collapse(moved, value, p, state.num_qubits, qubits)))
    return results


def measure_and_discard(state: Statevector, qubits: Sequence[int]) \
        -> List[Tuple[Outcome, float, Statevector]]:
    """
    Like :func:`measure_subset_all_outcomes`, but the measured qubits are dropped from the
    post-measurement states, which then live on the remaining qubits (in their original order).
    """
    if len(qubits) >= state.num_qubits:
        raise ArgumentError("at least one qubit has to remain after discarding the measured ones")
    moved, probabilities = _split_register(state, qubits)
    results = []
    for value in np.flatnonzero(probabilities > ZERO_PROBABILITY):
        p = float(probabilities[value])
        outcome = Outcome.from_integer(int(value), len(qubits))
        results.append((outcome, p, Statevector._trusted(moved[value] / np.sqrt(p))))
    return results


def sample_measurement(state: Statevector, qubits: Sequence[int], rng_seed: RngLike) \
        -> Tuple[Outcome, Statevector]:
    """
    Draw a single measurement outcome according to the Born rule.

    :param state: the state to measure
    :param qubits: the measured qubits
    :param rng_seed: a seed or a ``numpy.random.Generator`` (reused across calls)
    :return: the outcome and the post-measurement state on the full register
    """
    rng = rng_seed if isinstance(rng_seed, np.random.Generator) \
        else np.random.default_rng(rng_seed)
    moved, probabilities = _split_register(state, qubits)
    value = int(rng.choice(len(probabilities), p=probabilities / probabilities.sum()))
    p = float(probabilities[value])
    outcome = Outcome.from_integer(value, len(qubits))
    return outcome, _collapse(moved, value, p, state.num_qubits, qubits)


def partial_trace_keep(state: Statevector, keep: Sequence[int]) -> DensityBlock:
    """
    The reduced density matrix of the ``keep`` qubits (all other qubits traced out).

    :param state: a pure state
    :param keep: the kept qubits, in the order of the reduced register
    :return: the reduced state
    """
    if not keep:
        raise ArgumentError("need at least one qubit to keep")
    keep = list(keep)
    _check_indices(state.num_qubits, keep)
    n, k = state.num_qubits, len(keep)
    moved = np.moveaxis(state.amps.reshape((2,) * n), keep, list(range(k))).reshape(2 ** k, -1)
    return DensityBlock(moved @ moved.conj().T)


def _overlap(a: Statevector, b: Statevector) -> complex:
    if a.num_qubits != b.num_qubits:
        raise ArgumentError(f"cannot compare states of {a.num_qubits} and {b.num_qubits} qubits")
    return complex(np.vdot(a.amps, b.amps))


def equal_up_to_global_phase(a: Statevector, b: Statevector, tol: float = NORM_TOL) -> bool:
    """``True`` iff ``|<a|b>| >= 1 - tol``"""
    return abs(_overlap(a, b)) >= 1 - tol


def fidelity(a: Statevector, b: Statevector) -> float:
    """the pure-state fidelity ``|<a|b>|^2``"""
    return min(1.0, abs(_overlap(a, b)) ** 2)

