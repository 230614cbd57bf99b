"""Quorum-based atomic read/write register protocols, simulated and verified.

The pieces compose in layers: pure protocol state machines (protocols)
over quorum systems (quorum, views), driven by a deterministic
discrete-event network (netsim), checked for atomicity (checker),
measured (metrics), and orchestrated from configs and the CLI (config,
workload, harness, cli).
"""

from regsim.checker import (
    Verdict,
    brute_force_linearizable,
    check_atomicity_tagged,
    extract_history,
)
from regsim.config import ConfigError, ScenarioConfig, parse_config, validate, with_overrides
from regsim.core import (
    INITIAL_TAG,
    INITIAL_VALUE,
    History,
    Message,
    MessageKind,
    OperationRecord,
    ProcessId,
    Role,
    Tag,
    reader,
    server,
    writer,
)
from regsim.harness import (
    RunResult,
    parse_grid,
    run_scenario,
    sweep,
    trace_from_text,
    trace_to_text,
)
from regsim.metrics import OpStats, Summary, attribute_messages, summarize
from regsim.netsim import Network, TopologySpec, Trace, WorkItem, build_topology, run
from regsim.protocols import ALGORITHMS, Algorithm, get_algorithm
from regsim.quorum import QuorumSystem, build_majority, build_matrix
from regsim.views import ViewClass, classify, iterative_analyze
from regsim.workload import build_workload

__version__ = "0.1.0"

__all__ = [
    "ALGORITHMS",
    "Algorithm",
    "ConfigError",
    "History",
    "INITIAL_TAG",
    "INITIAL_VALUE",
    "Message",
    "MessageKind",
    "Network",
    "OperationRecord",
    "OpStats",
    "ProcessId",
    "QuorumSystem",
    "Role",
    "RunResult",
    "ScenarioConfig",
    "Summary",
    "Tag",
    "TopologySpec",
    "Trace",
    "Verdict",
    "ViewClass",
    "WorkItem",
    "attribute_messages",
    "brute_force_linearizable",
    "build_majority",
    "build_matrix",
    "build_topology",
    "build_workload",
    "check_atomicity_tagged",
    "classify",
    "extract_history",
    "get_algorithm",
    "iterative_analyze",
    "parse_config",
    "parse_grid",
    "reader",
    "run",
    "run_scenario",
    "server",
    "summarize",
    "sweep",
    "trace_from_text",
    "trace_to_text",
    "validate",
    "with_overrides",
    "writer",
]
