"""
Record types that are produced by the simulator and written to reports
"""
import json
import logging
from typing import Any, Dict, List, NamedTuple, Set, Type, TypeVar

from hubcast.errors import ArgumentError
from hubcast.mapping import (
    BooleanFieldMapping, ComplexArrayFieldMapping, FieldMapping, JsonFieldMapping,
    ListFieldMapping, NamedTupleFieldMapping, NumericFieldMapping, OutcomeFieldMapping
)
from hubcast.statevec import Outcome, Statevector

logger = logging.getLogger('hubcast')

SCHEMA_VERSION = 'hubcast-report/1'
"""identifies the layout of the json documents written by :class:`ReportDocument`"""


class Message(NamedTuple):
    """
    A classical message of a one-way protocol. Messages are always sent by the central system
    to one end node (1-based ``node``); ``bits`` is the width of that node's message register.
    """
    node: int
    alpha: int
    bits: int
    sender: str = 'central'


ReportResourceType = TypeVar('ReportResourceType', bound='ReportResource')


class ReportResource:
    """
    Base class of all records that end up in a report.
    Subclasses list their serialized fields in ``_field_mapping_list``, the constructor
    parameters must be named like the ``class_field`` of each mapping.
    """

    _field_mapping_list: List[FieldMapping] = []
    """all fields of this record and their type definitions"""

    @classmethod
    def _field_mapping(cls) -> Dict[str, FieldMapping]:
        return {fm.report_field: fm for fm in cls._field_mapping_list}

    @classmethod
    def from_dict(cls: Type[ReportResourceType], d: Dict[str, Any]) -> ReportResourceType:
        """
        Create an instance of this record from a dictionary, e.g. from a parsed report.

        :param d: create an instance from this data
        :return: a new instance of this class based on the provided data
        """
        return cls(**cls._map_fields(d))

    def to_dict(self) -> Dict[str, Any]:
        """
        Convert this record to a json compatible dictionary.

        :return: the record as dictionary (fields with value ``None`` are skipped)
        """
        d = {}
        for mapping in self._field_mapping_list:
            value = getattr(self, mapping.class_field)
            if value is not None:
                d[mapping.report_field] = mapping.serialize(value)
        return d

    @classmethod
    def _map_fields(cls, d: Dict[str, Any]) -> Dict[str, Any]:
        kwargs = {}
        field_mapping_dict = cls._field_mapping()
        for key, value in d.items():
            if key in field_mapping_dict:
                field_mapping = field_mapping_dict[key]
                if value is not None:
                    value = field_mapping.deserialize(value)
                kwargs[field_mapping.class_field] = value
            else:
                log_once(logging.WARNING, f"unexpected field '{key}' in class {cls.__name__}")
        return kwargs

    def __eq__(self, other):
        if isinstance(other, ReportResource) and type(self) == type(other):
            return self.to_dict() == other.to_dict()
        return False

    def __hash__(self):
        return hash(json.dumps(self.to_dict(), sort_keys=True, default=str))

    def __repr__(self) -> str:
        return f"{self.__class__.__name__} {self.__dict__}"

    def __str__(self) -> str:
        fields = ', '.join(f'{k}={v}' for k, v in self.__dict__.items() if not k.startswith('_'))
        return f"{self.__class__.__name__}({fields})"


class RunTrace(ReportResource):
    """
    The record of one protocol execution for a single measurement outcome: the outcome
    and its probability, the messages sent to the end nodes, the recovery words that were
    applied and the resulting end state.
    """

    _field_mapping_list = [
        OutcomeFieldMapping('outcome', 'outcome'),
        NumericFieldMapping('probability', 'probability', float),
        ListFieldMapping(NamedTupleFieldMapping('messages', 'messages', Message)),
        ListFieldMapping(FieldMapping('recovery_applied', 'recovery_applied', str)),
        ComplexArrayFieldMapping('final_end_state', 'final_end_state', Statevector),
        NumericFieldMapping('fidelity_to_target', 'fidelity_to_target', float),
    ]

    def __init__(self, outcome: Outcome = None, probability: float = None,
                 messages: List[Message] = None, recovery_applied: List[str] = None,
                 final_end_state: Statevector = None, fidelity_to_target: float = None):
        if probability is not None and not 0 < probability <= 1 + 1e-12:
            raise ArgumentError(f"trace probability must be in (0, 1], got {probability}")
        if fidelity_to_target is not None and not -1e-12 <= fidelity_to_target <= 1 + 1e-12:
            raise ArgumentError(f"fidelity must be in [0, 1], got {fidelity_to_target}")
        for message in messages or []:
            if message.sender != 'central':
                raise ArgumentError(f"one-way protocols only send messages from the central "
                                    f"system, got a message from '{message.sender}'")
        self.outcome = outcome
        self.probability = probability
        self.messages = messages or []
        self.recovery_applied = recovery_applied or []
        self.final_end_state = final_end_state
        self.fidelity_to_target = fidelity_to_target

    def to_dict(self, include_state: bool = True) -> Dict[str, Any]:
        d = super().to_dict()
        if not include_state:
            d.pop('final_end_state', None)
        return d


class ResourceReport(ReportResource):
    """
    Classical communication and quantum memory spent by one protocol, together with the
    outcome of its exactness check.

    ``total_bits`` is always the sum of ``bits_per_node``; ``communication_cost`` is the
    base-2 logarithm of the number of distinct message combinations.
    """

    _field_mapping_list = [
        FieldMapping('protocol', 'protocol', str),
        NumericFieldMapping('n', 'n', int),
        ListFieldMapping(NumericFieldMapping('bits_per_node', 'bits_per_node', int)),
        NumericFieldMapping('total_bits', 'total_bits', int),
        NumericFieldMapping('communication_cost', 'communication_cost', float),
        NumericFieldMapping('central_memory_qubits', 'central_memory_qubits', int),
        NumericFieldMapping('end_memory_qubits', 'end_memory_qubits', int),
        NumericFieldMapping('min_fidelity_over_outcomes', 'min_fidelity_over_outcomes', float),
        NumericFieldMapping('max_probability_deviation', 'max_probability_deviation', float),
        NumericFieldMapping('outcomes_checked', 'outcomes_checked', int),
        FieldMapping('method', 'method', str),
        BooleanFieldMapping('extension', 'extension'),
    ]

    def __init__(self, protocol: str = None, n: int = None, bits_per_node: List[int] = None,
                 total_bits: int = None, communication_cost: float = None,
                 central_memory_qubits: int = None, end_memory_qubits: int = None,
                 min_fidelity_over_outcomes: float = None,
                 max_probability_deviation: float = None, outcomes_checked: int = None,
                 method: str = None, extension: bool = False):
        self.bits_per_node = list(bits_per_node or [])
        if total_bits is not None and total_bits != sum(self.bits_per_node):
            raise ArgumentError(f"total_bits {total_bits} does not match the sum of "
                                f"bits_per_node {self.bits_per_node}")
        self.protocol = protocol
        self.n = n
        self.communication_cost = communication_cost
        self.central_memory_qubits = central_memory_qubits
        self.end_memory_qubits = end_memory_qubits
        self.min_fidelity_over_outcomes = min_fidelity_over_outcomes
        self.max_probability_deviation = max_probability_deviation
        self.outcomes_checked = outcomes_checked
        self.method = method
        self.extension = extension

    @property
    def total_bits(self) -> int:
        return sum(self.bits_per_node)

    def is_exact(self, tol: float = 1e-10) -> bool:
        """``True`` if the verifier filled in a minimum fidelity of at least ``1 - tol``"""
        return self.min_fidelity_over_outcomes is not None and \
            self.min_fidelity_over_outcomes >= 1 - tol

    def as_row(self) -> List[Any]:
        fidelity = self.min_fidelity_over_outcomes
        return [self.protocol, self.n, self.total_bits, self.central_memory_qubits,
                'n/a' if fidelity is None else f"{fidelity:.12f}",
                self.method or '', 'yes' if self.extension else '']


class BlockEncodingCertificate(ReportResource):
    """
    Numbers that certify that the ancilla-``|0>`` block of a circuit encodes ``W_N / sqrt(N)``.
    """

    _field_mapping_list = [
        NumericFieldMapping('n_system', 'n_system', int),
        NumericFieldMapping('n_ancilla', 'n_ancilla', int),
        NumericFieldMapping('subnormalization', 'subnormalization', float),
        NumericFieldMapping('max_block_deviation', 'max_block_deviation', float),
        ListFieldMapping(NumericFieldMapping('singular_values', 'singular_values', float)),
        NumericFieldMapping('garbage_norm', 'garbage_norm', float),
        NumericFieldMapping('num_qubits', 'num_qubits', int),
        JsonFieldMapping('gate_counts', 'gate_counts', dict),
    ]

    def __init__(self, n_system: int = None, n_ancilla: int = None,
                 subnormalization: float = None, max_block_deviation: float = None,
                 singular_values: List[float] = None, garbage_norm: float = None,
                 num_qubits: int = None, gate_counts: Dict[str, int] = None):
        self.n_system = n_system
        self.n_ancilla = n_ancilla
        self.subnormalization = subnormalization
        self.max_block_deviation = max_block_deviation
        self.singular_values = list(singular_values or [])
        self.garbage_norm = garbage_norm
        self.num_qubits = num_qubits
        self.gate_counts = dict(gate_counts or {})

    def passes(self, tol: float = 1e-9) -> bool:
        """the block matches ``W_N / sqrt(N)`` and every singular value equals ``1 / sqrt(N)``"""
        expected = self.n_system ** -0.5
        return (self.max_block_deviation < tol
                and all(abs(sv - expected) < tol for sv in self.singular_values))


class ReportDocument(ReportResource):
    """
    The self-describing json document that the command line interface writes.

    :param command: the cli command that produced the report
    :param parameters: the (parsed) command line parameters
    :param results: the command specific payload
    :param timings: milliseconds per phase (``build``, ``simulate``, ``verify``, ``export``)
    :param schema_version: layout version of the document
    """

    _field_mapping_list = [
        FieldMapping('schema_version', 'schema_version', str),
        FieldMapping('command', 'command', str),
        JsonFieldMapping('parameters', 'parameters', dict),
        JsonFieldMapping('results', 'results', dict),
        JsonFieldMapping('timings', 'timings', dict),
    ]

    def __init__(self, command: str = None, parameters: Dict[str, Any] = None,
                 results: Dict[str, Any] = None, timings: Dict[str, float] = None,
                 schema_version: str = SCHEMA_VERSION):
        if schema_version != SCHEMA_VERSION:
            log_once(logging.WARNING, f"report schema '{schema_version}' differs from the "
                                      f"supported schema '{SCHEMA_VERSION}'")
        self.schema_version = schema_version
        self.command = command
        self.parameters = dict(parameters or {})
        self.results = dict(results or {})
        self.timings = dict(timings or {})

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> 'ReportDocument':
        return cls.from_dict(json.loads(text))


_unique_logs: Set[str] = set()


def log_once(level: int, message: str):
    if message not in _unique_logs:
        logger.log(level, message)
        _unique_logs.add(message)
