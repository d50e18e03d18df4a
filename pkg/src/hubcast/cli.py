"""
Command line interface of hubcast.

Exit codes: 0 if every check passed, 1 if a check failed, 2 for usage errors.
"""
import argparse
import logging
import math
import sys
import time
from contextlib import contextmanager
from typing import Any, Callable, Dict, Iterator, List, Tuple

import numpy as np

from hubcast import __version__
from hubcast.allocators import (
    AllocationProtocol, build_ghz_protocol, build_ghz_unitary, build_w_protocol,
    build_w_unitary, check_recovery_identities, ghz_state, outcome_state_gram, w_state
)
from hubcast.circuits import (
    Circuit, circuit_to_matrix, ghz_circuit, lcu_block_encoding, max_deviation_up_to_phase,
    w_circuit_n3_ladder, w_circuit_recursive
)
from hubcast.errors import HubcastError
from hubcast.gatelist import FORMATS, export_circuit, parse_circuit
from hubcast.hubsim import HubSimulator
from hubcast.models import ReportDocument, ResourceReport
from hubcast.statevec import GateOp, partial_trace_keep

logger = logging.getLogger('hubcast')

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2

FIDELITY_TOL = 1e-10
MATRIX_TOL = 1e-9
MAX_REPORTED_TRACES = 32
"""``run`` reports at most this many individual traces"""
MAX_CIRCUIT_QUBITS = 10
"""largest circuit that ``circuit`` verifies against its dense reference"""

PROTOCOL_BUILDERS: Dict[str, Callable[[int], AllocationProtocol]] = {
    'w': build_w_protocol,
    'ghz': build_ghz_protocol,
}
"""protocol constructors by state name"""


class UsageError(HubcastError):
    """the command line arguments are not valid for this command"""


def expected_bits_per_node(state: str, n: int) -> List[int]:
    """the per-node bit counts of the published protocols"""
    if state == 'w':
        return [1, 1] + [2] * (n - 2)
    if state == 'ghz':
        return [1] * n
    return [2] * n


def _check_range(name: str, value: int, low: int, high: int):
    if not low <= value <= high:
        raise UsageError(f"--{name} must be in {low}..{high}, got {value}")


class Timings:
    """milliseconds spent per phase"""

    def __init__(self):
        self.phases: Dict[str, float] = {}

    @contextmanager
    def phase(self, name: str) -> Iterator[None]:
        start = time.perf_counter()
        try:
            yield
        finally:
            elapsed = (time.perf_counter() - start) * 1000
            self.phases[name] = round(self.phases.get(name, 0.0) + elapsed, 3)


# --- commands ---
# every command returns (exit code, results, human readable text)

CommandResult = Tuple[int, Dict[str, Any], str]


def cmd_verify(args: argparse.Namespace, timings: Timings) -> CommandResult:
    _check_range('n', args.n, 2, HubSimulator.MAX_END_NODES)
    with timings.phase('build'):
        protocol = PROTOCOL_BUILDERS[args.state](args.n)
    with timings.phase('verify'):
        report = HubSimulator().verify_exactness(protocol, method=args.method)
    expected = expected_bits_per_node(args.state, args.n)
    checks = {
        'exact': report.is_exact(FIDELITY_TOL),
        'uniform': report.max_probability_deviation < 1e-10,
        'bits': report.bits_per_node == expected,
    }
    results = {
        'report': report.to_dict(),
        'expected_bits_per_node': expected,
        'expected_total_bits': sum(expected),
        'checks': checks,
    }
    text = (f"{args.state} protocol, n={args.n} ({report.method} simulation, "
            f"{report.outcomes_checked} outcomes)\n"
            f"  bits per node:   {report.bits_per_node} (expected {expected})\n"
            f"  total bits:      {report.total_bits}\n"
            f"  central memory:  {report.central_memory_qubits} qubits\n"
            f"  min fidelity:    {report.min_fidelity_over_outcomes:.12f}\n"
            f"  max |p - 2^-n|:  {report.max_probability_deviation:.3e}\n"
            f"  result:          {'PASS' if all(checks.values()) else 'FAIL'}")
    return (EXIT_OK if all(checks.values()) else EXIT_CHECK_FAILED), results, text


def _format_table(header: List[str], rows: List[List[Any]]) -> str:
    cells = [header] + [[str(c) for c in row] for row in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(header))]
    lines = ['  '.join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in cells]
    lines.insert(1, '  '.join('-' * w for w in widths))
    return '\n'.join(lines)


def _closed_form(report: ResourceReport) -> Tuple[int, int]:
    n = report.n
    if report.protocol == 'w':
        return 2 * n - 2, n
    if report.protocol == 'ghz':
        return n, n
    return 2 * n, 2 * n


def cmd_compare(args: argparse.Namespace, timings: Timings) -> CommandResult:
    _check_range('n', args.n, 2, HubSimulator.MAX_END_NODES)
    with timings.phase('verify'):
        reports = HubSimulator().compare_resources(args.n, seed=args.seed)
    rows, ok = [], True
    for report in reports:
        expected = _closed_form(report)
        matches = (report.total_bits, report.central_memory_qubits) == expected
        ok = ok and matches and report.is_exact(FIDELITY_TOL)
        rows.append(report.as_row() + [f"{expected[0]}/{expected[1]}"])
    header = ['protocol', 'n', 'bits', 'memory', 'min fidelity', 'method', 'extension',
              'expected bits/memory']
    results = {'rows': [r.to_dict() for r in reports], 'all_match': ok}
    return (EXIT_OK if ok else EXIT_CHECK_FAILED), results, _format_table(header, rows)


def cmd_run(args: argparse.Namespace, timings: Timings) -> CommandResult:
    _check_range('n', args.n, 2, HubSimulator.MAX_END_NODES)
    if args.shots < 1:
        raise UsageError(f"--shots must be at least 1, got {args.shots}")
    with timings.phase('build'):
        protocol = PROTOCOL_BUILDERS[args.state](args.n)
    with timings.phase('simulate'):
        traces, histogram = HubSimulator().run_sampled(protocol, args.shots, args.seed)
    min_fidelity = min(t.fidelity_to_target for t in traces)
    ok = min_fidelity >= 1 - FIDELITY_TOL
    results = {
        'histogram': histogram,
        'shots': args.shots,
        'min_fidelity': min_fidelity,
        'traces': [t.to_dict(include_state=False) for t in traces[:MAX_REPORTED_TRACES]],
        'traces_truncated': len(traces) > MAX_REPORTED_TRACES,
    }
    lines = [f"{args.state} protocol, n={args.n}, {args.shots} shot(s), seed {args.seed}"]
    for trace in traces[:min(len(traces), 4)]:
        messages = ', '.join(f"e{m.node}<-{m.alpha} ({m.bits} bit)" for m in trace.messages)
        lines.append(f"  s={trace.outcome} p={trace.probability:.6f} messages: {messages}; "
                     f"recovery {'/'.join(trace.recovery_applied)}; "
                     f"fidelity {trace.fidelity_to_target:.12f}")
    lines.append("  histogram:")
    lines.extend(f"    {key}: {count} ({count / args.shots:.4f})"
                 for key, count in histogram.items())
    return (EXIT_OK if ok else EXIT_CHECK_FAILED), results, '\n'.join(lines)


def _build_circuit(state: str, n: int, variant: str) -> Tuple[Circuit, np.ndarray]:
    # returns the circuit and its dense reference matrix
    if state == 'w':
        reference = build_w_unitary(n)
        if variant == 'recursive':
            return w_circuit_recursive(n), reference
        if variant == 'ladder3':
            if n != 3:
                raise UsageError(f"the ladder3 variant only exists for n=3, got {n}")
            return w_circuit_n3_ladder(), reference
    else:
        reference = build_ghz_unitary(n)
        if variant == 'ghz':
            return ghz_circuit(n), reference
    if variant == 'direct':
        op = GateOp('unitary', list(range(n)), matrix=reference)
        return Circuit(n, [op], name=f"{state}{n}_direct"), reference
    raise UsageError(f"variant '{variant}' is not available for the {state} state")


def cmd_circuit(args: argparse.Namespace, timings: Timings) -> CommandResult:
    _check_range('n', args.n, 2, MAX_CIRCUIT_QUBITS)
    variant = args.variant or ('recursive' if args.state == 'w' else 'ghz')
    with timings.phase('build'):
        circuit, reference = _build_circuit(args.state, args.n, variant)
    with timings.phase('verify'):
        deviation = max_deviation_up_to_phase(circuit_to_matrix(circuit), reference)
    with timings.phase('export'):
        text = export_circuit(circuit, args.format)
        reparsed = circuit_to_matrix(parse_circuit(text, args.format))
        roundtrip = float(np.max(np.abs(reparsed - circuit_to_matrix(circuit))))
    ok = deviation < MATRIX_TOL and roundtrip < MATRIX_TOL
    if ok and args.out:
        with open(args.out, 'w', encoding='utf-8') as f:
            f.write(text)
    results = {
        'variant': variant,
        'num_qubits': circuit.num_qubits,
        'gate_counts': circuit.gate_counts(),
        'max_deviation': deviation,
        'roundtrip_deviation': roundtrip,
        'written_to': args.out if ok else None,
    }
    summary = (f"{circuit.name}: {len(circuit)} ops, deviation from reference {deviation:.3e}, "
               f"round trip {roundtrip:.3e} -> {'PASS' if ok else 'FAIL'}")
    output = summary if args.out else text.rstrip('\n') + '\n# ' + summary
    return (EXIT_OK if ok else EXIT_CHECK_FAILED), results, output


def cmd_blockenc(args: argparse.Namespace, timings: Timings) -> CommandResult:
    _check_range('n', args.n, 2, 6)
    with timings.phase('build'):
        circuit, certificate = lcu_block_encoding(args.n)
    ok = certificate.passes(MATRIX_TOL) and certificate.garbage_norm < MATRIX_TOL
    if args.out_circuit:
        with timings.phase('export'):
            with open(args.out_circuit, 'w', encoding='utf-8') as f:
                f.write(export_circuit(circuit))
    results = {'certificate': certificate.to_dict(), 'passes': ok}
    text = (f"block-encoding of W_{args.n} / sqrt({args.n}) on {certificate.num_qubits} qubits "
            f"({certificate.n_ancilla} ancillas, {len(circuit)} ops)\n"
            f"  subnormalization:   {certificate.subnormalization:.12f} "
            f"(expected {1 / math.sqrt(args.n):.12f})\n"
            f"  max deviation:      {certificate.max_block_deviation:.3e}\n"
            f"  singular values:    "
            f"{', '.join(f'{v:.12f}' for v in certificate.singular_values[:8])}"
            f"{' ...' if len(certificate.singular_values) > 8 else ''}\n"
            f"  ancilla garbage:    {certificate.garbage_norm:.3e}\n"
            f"  result:             {'PASS' if ok else 'FAIL'}")
    return (EXIT_OK if ok else EXIT_CHECK_FAILED), results, text


def cmd_premises(args: argparse.Namespace, timings: Timings) -> CommandResult:
    _check_range('n', args.n, 2, 6)
    n = args.n
    checks = {}
    with timings.phase('verify'):
        identities = check_recovery_identities()
        checks['pauli_identities'] = max(d for _, _, d in identities)
        w_expected = np.diag([(n - 1) / n, 1 / n])
        checks['w_reduced_state'] = max(
            float(np.max(np.abs(partial_trace_keep(w_state(n), [q]).entries - w_expected)))
            for q in range(n))
        checks['ghz_reduced_state'] = max(
            float(np.max(np.abs(partial_trace_keep(ghz_state(n), [q]).entries - np.eye(2) / 2)))
            for q in range(n))
        for name, builder in PROTOCOL_BUILDERS.items():
            gram = outcome_state_gram(builder(n))
            checks[f'{name}_gram'] = float(np.max(np.abs(gram - np.eye(len(gram)))))
    tolerances = {'pauli_identities': 1e-12, 'w_reduced_state': 1e-10,
                  'ghz_reduced_state': 1e-10, 'w_gram': MATRIX_TOL, 'ghz_gram': MATRIX_TOL}
    passed = {k: v <= tolerances[k] for k, v in checks.items()}
    ok = all(passed.values())
    results = {'deviations': checks, 'passed': passed}
    lines = [f"premises for n={n}"]
    lines.extend(f"  {k:<18} {v:.3e}  {'ok' if passed[k] else 'FAILED'}" for k, v in checks.items())
    return (EXIT_OK if ok else EXIT_CHECK_FAILED), results, '\n'.join(lines)


# --- argument parsing ---

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='hubcast', description="Simulate and verify W and GHZ state allocation through "
                                    "a central quantum network hub.")
    parser.add_argument('--version', action='version', version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--json', action='store_true', help="print the report as json")
    common.add_argument('--out', metavar='PATH', help="write the output to this file")
    common.add_argument('-v', '--verbose', action='store_true', help="enable debug logging")
    common.add_argument('--seed', type=int, default=0, help="seed of all randomness")
    sub = parser.add_subparsers(dest='command', metavar='COMMAND')
    sub.required = True

    def state_and_n(p: argparse.ArgumentParser, states=('w', 'ghz')):
        p.add_argument('--state', choices=states, default='w')
        p.add_argument('--n', type=int, required=True, help="number of end nodes")

    p = sub.add_parser('verify', parents=[common], help="verify a protocol for every outcome")
    state_and_n(p)
    p.add_argument('--method', choices=HubSimulator.METHODS, default='auto')
    p.set_defaults(func=cmd_verify, params=('state', 'n', 'method'))

    p = sub.add_parser('compare', parents=[common], help="resource table of all protocols")
    p.add_argument('--n', type=int, required=True, help="number of end nodes")
    p.set_defaults(func=cmd_compare, params=('n', 'seed'))

    p = sub.add_parser('run', parents=[common], help="sampled protocol execution")
    state_and_n(p)
    p.add_argument('--shots', type=int, default=1)
    p.set_defaults(func=cmd_run, params=('state', 'n', 'shots', 'seed'))

    p = sub.add_parser('circuit', parents=[common], help="export a verified circuit")
    state_and_n(p)
    p.add_argument('--variant', choices=('direct', 'recursive', 'ladder3', 'ghz'))
    p.add_argument('--format', choices=FORMATS, default=FORMATS[0])
    p.set_defaults(func=cmd_circuit, params=('state', 'n', 'variant', 'format'))

    p = sub.add_parser('blockenc', parents=[common], help="certify the W block-encoding")
    p.add_argument('--n', type=int, required=True, help="number of system qubits")
    p.add_argument('--out-circuit', metavar='PATH', help="write the circuit as gatelist-v1")
    p.set_defaults(func=cmd_blockenc, params=('n',))

    p = sub.add_parser('premises', parents=[common], help="check the optimality premises")
    p.add_argument('--n', type=int, required=True, help="number of end nodes")
    p.set_defaults(func=cmd_premises, params=('n',))
    return parser


def main(argv: List[str] = None) -> int:
    """
    Run the command line interface.

    :param argv: the arguments (default: ``sys.argv[1:]``)
    :return: the exit code
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    if args.verbose:
        logging.basicConfig(level=logging.DEBUG)
    timings = Timings()
    try:
        code, results, text = args.func(args, timings)
    except HubcastError as e:
        print(f"hubcast {args.command}: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    document = ReportDocument(
        command=args.command, parameters={k: getattr(args, k) for k in args.params},
        results=results, timings=timings.phases)
    if args.json:
        print(document.to_json())
    else:
        print(text)
    if args.out and args.command != 'circuit':
        logger.debug(f"writing the report to {args.out}")
        with open(args.out, 'w', encoding='utf-8') as f:
            f.write(document.to_json() + '\n')
    return code


if __name__ == '__main__':
    sys.exit(main())
