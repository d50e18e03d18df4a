"""
hubcast

simulation and exact verification of W and GHZ state allocation through a central quantum
network hub
"""

__title__ = "hubcast"

from .version import __version__
from .errors import (
    HubcastError,
    ArgumentError,
    GatelistParseError,
    NonUnitaryError,
    ResourceLimitError,
    UnsupportedFormatError,
)
from .statevec import (
    DensityBlock,
    GateOp,
    Outcome,
    Statevector,
)
from .models import (
    BlockEncodingCertificate,
    Message,
    ReportDocument,
    ResourceReport,
    RunTrace,
)
from .allocators import (
    AllocationProtocol,
    build_ghz_protocol,
    build_ghz_unitary,
    build_teleport_protocol,
    build_w_protocol,
    build_w_unitary,
    resource_report,
)
from .circuits import (
    Circuit,
    circuit_to_matrix,
    comparator_circuit,
    ghz_circuit,
    lcu_block_encoding,
    w_circuit_n3_ladder,
    w_circuit_recursive,
)
from .gatelist import export_circuit, parse_circuit
from .hubsim import HubSimulator, HubTopology
