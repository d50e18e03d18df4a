"""
Types of Errors specified by hubcast
"""
from typing import Sequence, Tuple


class HubcastError(Exception):
    """A generic error caused by hubcast"""


class ArgumentError(HubcastError, ValueError):
    """an argument is outside of the range that the operation accepts"""


class NonUnitaryError(HubcastError):
    """
    A matrix that was expected to be unitary failed the unitarity check.

    :param shape: the shape of the offending matrix
    :param deviation: the largest entrywise deviation of U^dagger U from the identity
    :param tolerance: the tolerance that was exceeded
    """

    def __init__(self, shape: Tuple[int, ...], deviation: float, tolerance: float):
        super().__init__()
        self.shape = shape
        self.deviation = deviation
        self.tolerance = tolerance

    def __str__(self):
        return (f"matrix of shape {self.shape} is not unitary: max deviation of U^dagger U "
                f"from the identity is {self.deviation:.3e} (tolerance {self.tolerance:.0e})")


class ResourceLimitError(HubcastError):
    """
    A dense simulation was requested that exceeds the supported register size.

    :param num_qubits: the number of qubits that was requested
    :param limit: the largest supported number of qubits
    :param what: a short description of the operation
    """

    def __init__(self, num_qubits: int, limit: int, what: str = "dense simulation"):
        super().__init__()
        self.num_qubits = num_qubits
        self.limit = limit
        self.what = what

    def __str__(self):
        return f"{self.what} supports at most {self.limit} qubits, got {self.num_qubits}"


class UnsupportedFormatError(HubcastError):
    """this export format is not supported (but there might be a similar one)"""

    def __init__(self, fmt: str, supported: Sequence[str]):
        super().__init__()
        self.fmt = fmt
        self.supported = tuple(supported)

    def __str__(self):
        return f"format '{self.fmt}' is not supported, choose one of {', '.join(self.supported)}"


class GatelistParseError(HubcastError):
    """
    A line of a gatelist document could not be parsed.

    :param line_no: the 1-based line number
    :param line: the offending line
    :param reason: what is wrong with it
    """

    def __init__(self, line_no: int, line: str, reason: str):
        super().__init__()
        self.line_no = line_no
        self.line = line
        self.reason = reason

    def __str__(self):
        return f"line {self.line_no}: {self.reason}: '{self.line.strip()}'"
