"""
End-to-end execution of allocation protocols in a central hub: the joint state of the
central system and the end nodes is built, the central operations are applied, the central
register is measured and discarded, messages are dispatched and the end nodes recover.
"""
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, Iterator, List, Sequence, Tuple

import numpy as np

from hubcast.allocators import (
    AllocationProtocol, build_ghz_protocol, build_teleport_protocol, build_w_protocol, ghz_state,
    resource_report, w_state
)
from hubcast.errors import ArgumentError, ResourceLimitError
from hubcast.models import ResourceReport, RunTrace
from hubcast.statevec import (
    Outcome, RngLike, Statevector, apply_gate, fidelity, make_bell_pairs, measure_and_discard
)

logger = logging.getLogger('hubcast')

Branch = Tuple[Outcome, float, Statevector]
"""an outcome, its probability and the unrecovered end state"""


class HubTopology:
    """
    Assignment of the Bell pairs of a hub to qubits of the joint register:
    central node ``i`` holds qubit ``central_indices[i]``, its end node holds
    ``end_indices[i]``. Both lists together partition ``0 ... 2n-1``.
    """

    def __init__(self, n: int, central_indices: Sequence[int], end_indices: Sequence[int]):
        self.n = n
        self.central_indices = [int(i) for i in central_indices]
        self.end_indices = [int(i) for i in end_indices]
        if len(self.central_indices) != n or len(self.end_indices) != n:
            raise ArgumentError(f"a hub with {n} end nodes needs {n} central and {n} end indices")
        if sorted(self.central_indices + self.end_indices) != list(range(2 * n)):
            raise ArgumentError(f"central {self.central_indices} and end {self.end_indices} "
                                f"indices do not partition 0..{2 * n - 1}")

    @classmethod
    def blocked(cls, n: int) -> 'HubTopology':
        """central qubits first, end qubits second"""
        return cls(n, range(n), range(n, 2 * n))

    @classmethod
    def interleaved(cls, n: int) -> 'HubTopology':
        return cls(n, range(0, 2 * n, 2), range(1, 2 * n, 2))

    def pairs(self) -> List[Tuple[int, int]]:
        return list(zip(self.central_indices, self.end_indices))

    def __repr__(self):
        return f"HubTopology(n={self.n}, central={self.central_indices}, end={self.end_indices})"


def _reorder(state: Statevector, order: Sequence[int]) -> Statevector:
    # qubit i of the result is qubit order[i] of the input
    if list(order) == sorted(order):
        return state
    tensor = state.amps.reshape((2,) * state.num_qubits)
    return Statevector._trusted(np.transpose(tensor, order))


class HubSimulator:
    """
    Runs allocation protocols.

    :param threads: number of worker threads that score the outcomes of a protocol
           (if not provided, defaults to the ``HUBCAST_THREADS`` environment variable, or 1)
    :param direct_limit: largest joint register (in qubits) that ``auto`` simulates directly
    :param layout: ``'blocked'`` or ``'interleaved'`` placement of the Bell pairs
    """

    DIRECT_LIMIT = 16
    """joint register size up to which ``auto`` uses the direct joint-state simulation"""
    MAX_END_NODES = 12
    """largest number of end nodes a protocol may have"""
    MAX_TRACED_OUTCOMES = 2 ** 16
    """largest number of outcomes that are turned into individual traces"""
    VERIFY_OUTCOMES = 4096
    """above this number of outcomes, the verifier checks a seeded sample of this size"""
    METHODS = ('auto', 'direct', 'analytic')

    def __init__(self, threads: int = None, direct_limit: int = DIRECT_LIMIT,
                 layout: str = 'blocked'):
        value = threads or os.getenv('HUBCAST_THREADS') or 1
        try:
            self.threads = int(value)
        except ValueError:
            self.threads = 0
        if self.threads < 1:
            raise ArgumentError(f"the number of threads (HUBCAST_THREADS) must be a positive "
                                f"integer, got {value!r}")
        self.direct_limit = direct_limit
        if layout not in ('blocked', 'interleaved'):
            raise ArgumentError(f"unknown layout '{layout}', use 'blocked' or 'interleaved'")
        self.layout = layout

    def topology(self, n: int) -> HubTopology:
        return HubTopology.blocked(n) if self.layout == 'blocked' else HubTopology.interleaved(n)

    # --- branch enumeration ---

    def _check_protocol(self, p: AllocationProtocol):
        if p.n > self.MAX_END_NODES:
            raise ResourceLimitError(p.n, self.MAX_END_NODES, what="hub simulation (end nodes)")

    def _resolve_method(self, p: AllocationProtocol, method: str) -> str:
        if method not in self.METHODS:
            raise ArgumentError(f"unknown method '{method}', expected one of {self.METHODS}")
        joint = p.num_local + 2 * p.n
        if method == 'auto':
            return 'direct' if joint <= self.direct_limit else 'analytic'
        if method == 'direct' and joint > self.direct_limit:
            raise ResourceLimitError(joint, self.direct_limit, what="direct joint simulation")
        return method

    def direct_branches(self, p: AllocationProtocol) -> List[Branch]:
        """
        Simulate the joint register: Bell pairs (and the prepared central qubits), central
        operations, measurement of the central register. The measured qubits are dropped,
        the remaining end register is ordered by end node.
        """
        self._check_protocol(p)
        topology = self.topology(p.n)
        m = p.num_local
        joint = make_bell_pairs(p.n, topology.pairs())
        if p.local_state is not None:
            joint = p.local_state.tensor(joint)
        central = list(range(m)) + [m + c for c in topology.central_indices]
        for op in p.central_ops:
            joint = apply_gate(joint, op.relabeled(central))
        end = [m + e for e in topology.end_indices]
        ranks = sorted(end)
        order = [ranks.index(q) for q in end]
        branches = measure_and_discard(joint, [central[q] for q in p.measured])
        logger.debug(f"direct simulation of '{p.name}' (n={p.n}) on {joint.num_qubits} qubits: "
                     f"{len(branches)} outcomes")
        return [(s, prob, _reorder(state, order)) for s, prob, state in branches]

    def analytic_branches(self, p: AllocationProtocol,
                          outcomes: Sequence[Outcome] = None) -> Iterator[Branch]:
        """the branches from the protocol's closed-form post-measurement states"""
        self._check_protocol(p)
        for s in (p.outcomes() if outcomes is None else outcomes):
            state, prob = p.analytic_branch(s)
            yield s, prob, state

    def branches(self, p: AllocationProtocol, method: str = 'auto') -> Iterator[Branch]:
        method = self._resolve_method(p, method)
        if method == 'direct':
            return iter(self.direct_branches(p))
        return self.analytic_branches(p)

    def _map(self, fn: Callable, items) -> List:
        if self.threads == 1:
            return [fn(item) for item in items]
        with ThreadPoolExecutor(max_workers=self.threads) as pool:
            return list(pool.map(fn, items))

    # --- traces ---

    @staticmethod
    def trace_branch(p: AllocationProtocol, branch: Branch) -> RunTrace:
        """dispatch the messages of one branch and apply the recovery of every end node"""
        s, prob, end_state = branch
        recovered = p.recover(end_state, s)
        return RunTrace(outcome=s, probability=prob, messages=p.message_plan(s),
                        recovery_applied=p.recovery_plan(s), final_end_state=recovered,
                        fidelity_to_target=fidelity(recovered, p.target_state))

    def run_all_outcomes(self, p: AllocationProtocol, method: str = 'auto') -> List[RunTrace]:
        """
        Execute the protocol for every outcome with non-zero probability.

        :param p: the protocol (at most ``MAX_END_NODES`` end nodes)
        :param method: ``direct`` simulates the joint register, ``analytic`` uses the
               closed-form post-measurement states, ``auto`` picks by register size
        :return: one trace per outcome, ordered by outcome
        """
        if p.num_outcomes > self.MAX_TRACED_OUTCOMES:
            raise ResourceLimitError(len(p.measured), self.MAX_TRACED_OUTCOMES.bit_length() - 1,
                                     what="tracing every outcome (measured qubits)")
        return self._map(lambda b: self.trace_branch(p, b), self.branches(p, method))

    def run_sampled(self, p: AllocationProtocol, shots: int, seed: RngLike = 0) \
            -> Tuple[List[RunTrace], Dict[str, int]]:
        """
        Execute the protocol ``shots`` times; outcomes are drawn from the Born distribution
        of the central measurement with a seeded generator.

        :param p: the protocol
        :param shots: number of executions (>= 1)
        :param seed: seed or ``numpy.random.Generator``
        :return: one trace per shot and the histogram ``{bitstring: count}``
        """
        if shots < 1:
            raise ArgumentError(f"need at least one shot, got {shots}")
        traces = self.run_all_outcomes(p)
        probabilities = np.array([t.probability for t in traces])
        rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
        picks = rng.choice(len(traces), size=shots, p=probabilities / probabilities.sum())
        histogram = {}
        for index in picks:
            key = str(traces[index].outcome)
            histogram[key] = histogram.get(key, 0) + 1
        return [traces[i] for i in picks], dict(sorted(histogram.items()))

    # --- verification ---

    def verify_exactness(self, p: AllocationProtocol, method: str = 'auto',
                         seed: int = 0) -> ResourceReport:
        """
        Check that every outcome recovers the target state and that the outcomes are
        uniformly distributed, and fill in the resource report.

        Protocols with more than ``VERIFY_OUTCOMES`` outcomes are checked on a seeded
        uniform sample of outcomes (method ``analytic-sampled``).

        :param p: the protocol
        :param method: see :meth:`run_all_outcomes`
        :param seed: seed of the outcome sample
        :return: the resource report including the minimum fidelity
        """
        report = resource_report(p)
        if p.num_outcomes > self.VERIFY_OUTCOMES:
            self._check_protocol(p)
            rng = np.random.default_rng(seed)
            picks = rng.choice(p.num_outcomes, size=self.VERIFY_OUTCOMES, replace=False)
            width = len(p.measured)
            outcomes = [Outcome.from_integer(int(v), width) for v in sorted(picks)]
            branches = self.analytic_branches(p, outcomes)
            method, exhaustive = 'analytic-sampled', False
        else:
            method = self._resolve_method(p, method)
            branches = self.branches(p, method)
            exhaustive = True

        def score(branch: Branch) -> Tuple[float, float]:
            s, prob, end_state = branch
            return prob, fidelity(p.recover(end_state, s), p.target_state)

        scores = self._map(score, branches)
        probabilities = np.array([prob for prob, _ in scores])
        expected = 1 / p.num_outcomes
        deviation = float(np.max(np.abs(probabilities - expected)))
        if exhaustive:
            if len(scores) < p.num_outcomes:
                deviation = max(deviation, expected)
            total = float(probabilities.sum())
            if abs(total - 1) > 1e-10:
                logger.warning(f"outcome probabilities of '{p.name}' sum to {total!r}")
        report.min_fidelity_over_outcomes = float(min(f for _, f in scores))
        report.max_probability_deviation = deviation
        report.outcomes_checked = len(scores)
        report.method = method
        logger.info(f"verified '{p.name}' (n={p.n}) with {method} simulation: min fidelity "
                    f"{report.min_fidelity_over_outcomes:.12f}, {report.total_bits} bits")
        return report

    def compare_resources(self, n: int, seed: int = 0) -> List[ResourceReport]:
        """
        Verify the W, GHZ and the two teleportation protocols for ``n`` end nodes.

        :param n: number of end nodes, ``2 <= n <= MAX_END_NODES``
        :param seed: seed for sampled verification of the teleportation baseline
        :return: the rows ``w``, ``ghz``, ``teleport(w)`` and ``teleport(ghz)``
        """
        if not 2 <= n <= self.MAX_END_NODES:
            raise ArgumentError(f"n must be in 2..{self.MAX_END_NODES}, got {n}")
        protocols = [
            build_w_protocol(n),
            build_ghz_protocol(n),
            build_teleport_protocol(n, w_state(n), name='teleport(w)'),
            build_teleport_protocol(n, ghz_state(n), name='teleport(ghz)'),
        ]
        return [self.verify_exactness(p, seed=seed) for p in protocols]

    def post_measurement_gram(self, p: AllocationProtocol) -> np.ndarray:
        """
        The Gram matrix of the directly simulated, unrecovered end states, each scaled by
        ``sqrt(2^m * probability)``. Missing outcomes leave zero rows.
        """
        if p.num_outcomes > 4096:
            raise ResourceLimitError(len(p.measured), 12, what="post-measurement Gram matrix")
        vectors = np.zeros((p.num_outcomes, 2 ** p.n), dtype=complex)
        for s, prob, state in self.branches(p, 'direct'):
            vectors[s.as_integer] = np.sqrt(p.num_outcomes * prob) * state.amps
        return vectors.conj() @ vectors.T


def run_all_outcomes(p: AllocationProtocol, method: str = 'auto') -> List[RunTrace]:
    return HubSimulator().run_all_outcomes(p, method)


def run_sampled(p: AllocationProtocol, shots: int, seed: RngLike = 0) \
        -> Tuple[List[RunTrace], Dict[str, int]]:
    return HubSimulator().run_sampled(p, shots, seed)


def verify_exactness(p: AllocationProtocol, method: str = 'auto') -> ResourceReport:
    return HubSimulator().verify_exactness(p, method)


def compare_resources(n: int, seed: int = 0) -> List[ResourceReport]:
    return HubSimulator().compare_resources(n, seed)


def post_measurement_gram(p: AllocationProtocol) -> np.ndarray:
    return HubSimulator().post_measurement_gram(p)
