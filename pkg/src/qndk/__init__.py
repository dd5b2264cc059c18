"""Quantum Network Development Kit.

A deterministic discrete-event quantum network simulator with a stock
protocol library (BB84, Cascade reconciliation, entanglement distribution),
a portable simulation-document format that compiles to runnable plans, a
job-execution service with persisted experiments, and a CLI.
"""

__version__ = "0.1.0"

from .canonical import canonical_bytes, canonical_dumps
from .document import (
    BackendDescriptor,
    BackendRegistry,
    DocError,
    compile_document,
    default_backends,
    document_hash,
    export_document,
    export_plan,
    import_document,
    plan_hash,
    validate,
)
from .errors import (
    CapabilityError,
    DeadQubitError,
    DocumentError,
    DuplicateRoleError,
    GateError,
    GroupSizeError,
    MemoryFullError,
    NoConnectionError,
    QndkError,
    QubitNotStoredError,
    RoleAborted,
    UnknownEngineError,
    UnknownRoleError,
)
from .events import EventQueue, SimEvent
from .framework import (
    ParamSpec,
    ProtocolGroup,
    QubitArrival,
    RoleBinding,
    RoleContext,
    RoleRegistry,
    RoleResult,
    run_groups,
)
from .network import (
    ConnectionSpec,
    Network,
    NodeSpec,
    QuantumMemory,
    Topology,
    classical_latency,
    emit_qubit,
    propagation_delay,
    survival_probability,
    transmit_qubit,
)
from .protocols import default_registry
from .qstate import (
    EntanglementGroup,
    NoiseChannelSpec,
    QuantumState,
    QubitHandle,
    amplitude_damping,
    dephasing,
    depolarizing,
    loss,
)
from .rng import RandomStream
from .runner import execute_single_run, run_plan, strip_wall_clock

__all__ = [
    "__version__",
    "BackendDescriptor",
    "BackendRegistry",
    "CapabilityError",
    "ConnectionSpec",
    "DeadQubitError",
    "DocError",
    "DocumentError",
    "DuplicateRoleError",
    "EntanglementGroup",
    "EventQueue",
    "GateError",
    "GroupSizeError",
    "MemoryFullError",
    "Network",
    "NodeSpec",
    "NoConnectionError",
    "NoiseChannelSpec",
    "ParamSpec",
    "ProtocolGroup",
    "QndkError",
    "QuantumMemory",
    "QuantumState",
    "QubitArrival",
    "QubitHandle",
    "QubitNotStoredError",
    "RandomStream",
    "RoleAborted",
    "RoleBinding",
    "RoleContext",
    "RoleRegistry",
    "RoleResult",
    "SimEvent",
    "Topology",
    "UnknownEngineError",
    "UnknownRoleError",
    "amplitude_damping",
    "canonical_bytes",
    "canonical_dumps",
    "classical_latency",
    "compile_document",
    "default_backends",
    "default_registry",
    "dephasing",
    "depolarizing",
    "document_hash",
    "emit_qubit",
    "execute_single_run",
    "export_document",
    "export_plan",
    "import_document",
    "loss",
    "plan_hash",
    "propagation_delay",
    "run_groups",
    "run_plan",
    "strip_wall_clock",
    "survival_probability",
    "transmit_qubit",
    "validate",
]
