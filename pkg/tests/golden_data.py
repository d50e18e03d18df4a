import json

# output of `hubcast verify --state w --n 3 --json` (timings are not compared)
json_string_verify_w3 = """
{
  "command": "verify",
  "parameters": {
    "method": "auto",
    "n": 3,
    "state": "w"
  },
  "results": {
    "checks": {
      "bits": true,
      "exact": true,
      "uniform": true
    },
    "expected_bits_per_node": [1, 1, 2],
    "expected_total_bits": 4,
    "report": {
      "bits_per_node": [1, 1, 2],
      "central_memory_qubits": 3,
      "communication_cost": 4.0,
      "end_memory_qubits": 3,
      "extension": false,
      "max_probability_deviation": 0.0,
      "method": "direct",
      "min_fidelity_over_outcomes": 1.0,
      "n": 3,
      "outcomes_checked": 8,
      "protocol": "w",
      "total_bits": 4
    }
  },
  "schema_version": "hubcast-report/1",
  "timings": {}
}
"""

# output of `hubcast verify --state ghz --n 4 --method analytic --json`
json_string_verify_ghz4 = """
{
  "command": "verify",
  "parameters": {
    "method": "analytic",
    "n": 4,
    "state": "ghz"
  },
  "results": {
    "checks": {
      "bits": true,
      "exact": true,
      "uniform": true
    },
    "expected_bits_per_node": [1, 1, 1, 1],
    "expected_total_bits": 4,
    "report": {
      "bits_per_node": [1, 1, 1, 1],
      "central_memory_qubits": 4,
      "communication_cost": 4.0,
      "end_memory_qubits": 4,
      "extension": false,
      "max_probability_deviation": 0.0,
      "method": "analytic",
      "min_fidelity_over_outcomes": 1.0,
      "n": 4,
      "outcomes_checked": 16,
      "protocol": "ghz",
      "total_bits": 4
    }
  },
  "schema_version": "hubcast-report/1",
  "timings": {}
}
"""

# a trace as written by RunTrace.to_dict() for the W protocol, n=2, outcome 10
json_string_trace_w2 = """
{
  "outcome": "10",
  "probability": 0.25,
  "messages": [
    {"node": 1, "alpha": 2, "bits": 1, "sender": "central"},
    {"node": 2, "alpha": 1, "bits": 1, "sender": "central"}
  ],
  "recovery_applied": ["XZ", "I"],
  "final_end_state": [[0.0, 0.0], [0.7071067811865476, 0.0], [0.7071067811865476, 0.0], [0.0, 0.0]],
  "fidelity_to_target": 1.0
}
"""

golden_verify_w3 = json.loads(json_string_verify_w3)
golden_verify_ghz4 = json.loads(json_string_verify_ghz4)
golden_trace_w2 = json.loads(json_string_trace_w2)
