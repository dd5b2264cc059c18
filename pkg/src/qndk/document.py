"""Simulation documents: validation, canonical export/import, and compilation.

A document is the portable unit of sharing and job submission: topology,
protocol-group assignments, and run configuration, serialized as canonical
JSON (file extension .qnsim.json). Compiling fills every documented default,
normalizes units to seconds, assigns stable per-role instance ids and rng
substream keys, and yields a self-contained plan (.qnplan.json) that can be
executed with no reference back to the source document.

Validation returns every violation with a stable error code and a document
path such as /topology/connections/0/endpoint_b. Unknown engines and
capability gaps are compile-time errors.

Document units: km for lengths, dB/km for attenuation, Hz for emission
frequency, seconds for T1/T2/latencies. Layout and other UI concerns live
under the top-level "extensions" key, which survives round-trips verbatim
but is otherwise ignored.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Optional

from . import network
from .canonical import canonical_bytes, loads
from .errors import CapabilityError, DocumentError, UnknownEngineError
from .framework import RoleRegistry

SCHEMA_VERSION = "1"
DOCUMENT_EXTENSION = ".qnsim.json"
PLAN_EXTENSION = ".qnplan.json"

NODE_DEFAULTS = {
    "label": "",
    "memory_slots": network.DEFAULT_MEMORY_SLOTS,
    "t1": network.DEFAULT_T1_S,
    "t2": network.DEFAULT_T2_S,
    "source_fidelity": network.DEFAULT_SOURCE_FIDELITY,
    "emission_frequency": network.DEFAULT_EMISSION_FREQUENCY_HZ,
}

CONNECTION_DEFAULTS = {
    "length_km": 0.0,
    "attenuation_db_per_km": network.DEFAULT_ATTENUATION_DB_PER_KM,
    "noise_depolarizing_p": 0.0,
    "classical_latency": "auto",
}

RUN_CONFIG_DEFAULTS = {"runs": 1, "max_sim_time": None}

_SEED_MAX = 2**63 - 1


@dataclass(frozen=True)
class DocError:
    code: str
    path: str
    message: str

    def to_json(self) -> dict:
        return {"code": self.code, "path": self.path, "message": self.message}


@dataclass(frozen=True)
class BackendDescriptor:
    engine_id: str
    channel_kinds: frozenset[str]
    roles: frozenset[str]


class BackendRegistry:
    def __init__(self):
        self._backends: dict[str, BackendDescriptor] = {}

    def register(self, descriptor: BackendDescriptor):
        self._backends[descriptor.engine_id] = descriptor

    def __contains__(self, engine_id: str) -> bool:
        return engine_id in self._backends

    def get(self, engine_id: str) -> BackendDescriptor:
        if engine_id not in self._backends:
            raise UnknownEngineError(f"engine {engine_id!r} is not in the backend registry")
        return self._backends[engine_id]


def native_backend(registry: RoleRegistry) -> BackendDescriptor:
    return BackendDescriptor(
        "native",
        frozenset({"depolarizing", "dephasing", "amplitude_damping", "loss"}),
        frozenset(registry.names()),
    )


def default_backends(registry: RoleRegistry) -> BackendRegistry:
    backends = BackendRegistry()
    backends.register(native_backend(registry))
    return backends


# -- validation -----------------------------------------------------------------


class _Checker:
    def __init__(self):
        self.errors: list[DocError] = []

    def add(self, code: str, path: str, message: str):
        self.errors.append(DocError(code, path, message))

    def require(self, obj: dict, key: str, types, path: str, code: str = "E_STRUCTURE"):
        if key not in obj:
            self.add(code, f"{path}/{key}", f"missing required field '{key}'")
            return None
        value = obj[key]
        if types is not None and not _is_type(value, types):
            self.add(code, f"{path}/{key}", f"'{key}' has the wrong type")
            return None
        return value


def _is_type(value, types) -> bool:
    if types == "number":
        return isinstance(value, (int, float)) and not isinstance(value, bool)
    if types == "int":
        return isinstance(value, int) and not isinstance(value, bool)
    return isinstance(value, types)


def validate(doc, registry: RoleRegistry, backends: Optional[BackendRegistry] = None) -> list[DocError]:
    """Every violation in the document, with stable codes and paths. Empty = valid."""
    if backends is None:
        backends = default_backends(registry)
    c = _Checker()
    if not isinstance(doc, dict):
        c.add("E_STRUCTURE", "/", "document must be a JSON object")
        return c.errors

    version = c.require(doc, "schema_version", str, "")
    if version is not None and version != SCHEMA_VERSION:
        c.add("E_SCHEMA_VERSION", "/schema_version", f"unknown schema version {version!r}")
    c.require(doc, "name", str, "")
    engine = c.require(doc, "engine", str, "")
    if engine is not None and engine not in backends:
        c.add("E_ENGINE_UNKNOWN", "/engine", f"engine {engine!r} cannot be resolved")

    node_ids = _validate_topology(c, doc.get("topology"))
    _validate_groups(c, doc.get("protocol_groups"), node_ids, registry)
    _validate_run_config(c, doc.get("run_config"))

    extensions = doc.get("extensions")
    if extensions is not None and not isinstance(extensions, dict):
        c.add("E_STRUCTURE", "/extensions", "'extensions' must be an object")

    known = {"schema_version", "name", "engine", "topology", "protocol_groups", "run_config", "extensions"}
    for key in doc:
        if key not in known:
            c.add("E_STRUCTURE", f"/{key}", f"unknown top-level field {key!r}")
    return c.errors


def _validate_topology(c: _Checker, topology) -> set[str]:
    node_ids: set[str] = set()
    if not isinstance(topology, dict):
        c.add("E_STRUCTURE", "/topology", "'topology' must be an object")
        return node_ids
    nodes = topology.get("nodes")
    if not isinstance(nodes, list) or not nodes:
        c.add("E_STRUCTURE", "/topology/nodes", "'nodes' must be a non-empty array")
        nodes = []
    for i, node in enumerate(nodes):
        path = f"/topology/nodes/{i}"
        if not isinstance(node, dict):
            c.add("E_STRUCTURE", path, "node must be an object")
            continue
        node_id = c.require(node, "id", str, path)
        if node_id is not None:
            if node_id in node_ids:
                c.add("E_DUPLICATE_ID", f"{path}/id", f"duplicate node id {node_id!r}")
            node_ids.add(node_id)
        _check_node_params(c, node, path)

    connections = topology.get("connections")
    if connections is None:
        connections = []
    if not isinstance(connections, list):
        c.add("E_STRUCTURE", "/topology/connections", "'connections' must be an array")
        connections = []
    seen_conn: set[str] = set()
    for i, conn in enumerate(connections):
        path = f"/topology/connections/{i}"
        if not isinstance(conn, dict):
            c.add("E_STRUCTURE", path, "connection must be an object")
            continue
        conn_id = c.require(conn, "id", str, path)
        if conn_id is not None:
            if conn_id in seen_conn:
                c.add("E_DUPLICATE_ID", f"{path}/id", f"duplicate connection id {conn_id!r}")
            seen_conn.add(conn_id)
        a = c.require(conn, "endpoint_a", str, path)
        b = c.require(conn, "endpoint_b", str, path)
        if a is not None and a not in node_ids:
            c.add("E_TOPOLOGY", f"{path}/endpoint_a", f"endpoint {a!r} is not a node")
        if b is not None and b not in node_ids:
            c.add("E_TOPOLOGY", f"{path}/endpoint_b", f"endpoint {b!r} is not a node")
        if a is not None and b is not None and a == b:
            c.add("E_TOPOLOGY", f"{path}/endpoint_b", "endpoints must be distinct nodes")
        _check_connection_params(c, conn, path)
    return node_ids


def _check_number(c, obj, key, path, code, *, minimum=None, maximum=None,
                  exclusive_min=None, integer=False):
    if key not in obj:
        return
    value = obj[key]
    kind = "int" if integer else "number"
    if not _is_type(value, kind):
        c.add(code, f"{path}/{key}", f"'{key}' must be a{'n integer' if integer else ' number'}")
        return
    if minimum is not None and value < minimum:
        c.add(code, f"{path}/{key}", f"'{key}' must be >= {minimum}")
    if exclusive_min is not None and value <= exclusive_min:
        c.add(code, f"{path}/{key}", f"'{key}' must be > {exclusive_min}")
    if maximum is not None and value > maximum:
        c.add(code, f"{path}/{key}", f"'{key}' must be <= {maximum}")


def _check_node_params(c: _Checker, node: dict, path: str):
    code = "E_NODE_PARAM"
    _check_number(c, node, "memory_slots", path, code, minimum=0, integer=True)
    _check_number(c, node, "t1", path, code, exclusive_min=0)
    _check_number(c, node, "t2", path, code, exclusive_min=0)
    _check_number(c, node, "source_fidelity", path, code, exclusive_min=0.5, maximum=1.0)
    _check_number(c, node, "emission_frequency", path, code, exclusive_min=0)
    t1, t2 = node.get("t1", network.DEFAULT_T1_S), node.get("t2", network.DEFAULT_T2_S)
    if _is_type(t1, "number") and _is_type(t2, "number") and t1 > 0 and t2 > 2 * t1:
        c.add(code, f"{path}/t2", f"t2 ({t2}) exceeds 2*t1 ({2 * t1})")
    label = node.get("label")
    if label is not None and not isinstance(label, str):
        c.add("E_STRUCTURE", f"{path}/label", "'label' must be a string")
    known = {"id", "label", "memory_slots", "t1", "t2", "source_fidelity", "emission_frequency"}
    for key in node:
        if key not in known:
            c.add("E_STRUCTURE", f"{path}/{key}", f"unknown node field {key!r}")


def _check_connection_params(c: _Checker, conn: dict, path: str):
    code = "E_CONNECTION_PARAM"
    _check_number(c, conn, "length_km", path, code, minimum=0)
    _check_number(c, conn, "attenuation_db_per_km", path, code, minimum=0)
    _check_number(c, conn, "noise_depolarizing_p", path, code, minimum=0, maximum=1)
    latency = conn.get("classical_latency")
    if latency is not None and latency != "auto":
        if not _is_type(latency, "number") or latency < 0:
            c.add(code, f"{path}/classical_latency", "'classical_latency' must be >= 0 or \"auto\"")
    known = {"id", "endpoint_a", "endpoint_b", "length_km", "attenuation_db_per_km",
             "noise_depolarizing_p", "classical_latency"}
    for key in conn:
        if key not in known:
            c.add("E_STRUCTURE", f"{path}/{key}", f"unknown connection field {key!r}")


def _validate_groups(c: _Checker, groups, node_ids: set[str], registry: RoleRegistry):
    if not isinstance(groups, list):
        c.add("E_STRUCTURE", "/protocol_groups", "'protocol_groups' must be an array")
        return
    for gi, group in enumerate(groups):
        gpath = f"/protocol_groups/{gi}"
        if not isinstance(group, dict):
            c.add("E_STRUCTURE", gpath, "group must be an object")
            continue
        name = group.get("name")
        if name is not None and not isinstance(name, str):
            c.add("E_STRUCTURE", f"{gpath}/name", "'name' must be a string")
        stages = group.get("stages")
        if not isinstance(stages, list) or not stages:
            c.add("E_STRUCTURE", f"{gpath}/stages", "'stages' must be a non-empty array")
            continue
        for si, stage in enumerate(stages):
            spath = f"{gpath}/stages/{si}"
            if not isinstance(stage, list) or not stage:
                c.add("E_STRUCTURE", spath, "stage must be a non-empty array of bindings")
                continue
            for bi, binding in enumerate(stage):
                _validate_binding(c, binding, f"{spath}/{bi}", node_ids, registry)


def _validate_binding(c: _Checker, binding, path: str, node_ids: set[str], registry: RoleRegistry):
    if not isinstance(binding, dict):
        c.add("E_STRUCTURE", path, "binding must be an object")
        return
    node_id = c.require(binding, "node", str, path)
    if node_id is not None and node_id not in node_ids:
        c.add("E_ROLE_NODE", f"{path}/node", f"binding references missing node {node_id!r}")
    role_name = c.require(binding, "role", str, path)
    params = binding.get("params", {})
    if not isinstance(params, dict):
        c.add("E_STRUCTURE", f"{path}/params", "'params' must be an object")
        params = {}
    if role_name is not None:
        if role_name not in registry:
            c.add("E_ROLE_UNKNOWN", f"{path}/role", f"unknown role {role_name!r}")
        else:
            spec = registry.get(role_name)
            schema = {p.name: p for p in spec.params}
            for pname, pvalue in params.items():
                if pname not in schema:
                    c.add("E_ROLE_PARAM", f"{path}/params/{pname}",
                          f"role {role_name!r} has no parameter {pname!r}")
                    continue
                problem = schema[pname].check(pvalue)
                if problem:
                    c.add("E_ROLE_PARAM", f"{path}/params/{pname}", problem)
    known = {"node", "role", "params"}
    for key in binding:
        if key not in known:
            c.add("E_STRUCTURE", f"{path}/{key}", f"unknown binding field {key!r}")


def _validate_run_config(c: _Checker, run_config):
    if run_config is None:
        c.add("E_STRUCTURE", "/run_config", "missing required field 'run_config'")
        return
    if not isinstance(run_config, dict):
        c.add("E_STRUCTURE", "/run_config", "'run_config' must be an object")
        return
    seed = c.require(run_config, "seed", "int", "/run_config", code="E_RUN_CONFIG")
    if seed is not None and not 0 <= seed <= _SEED_MAX:
        c.add("E_RUN_CONFIG", "/run_config/seed", f"seed must lie in [0, {_SEED_MAX}]")
    runs = run_config.get("runs")
    if runs is not None:
        if not _is_type(runs, "int") or runs < 1:
            c.add("E_RUN_CONFIG", "/run_config/runs", "'runs' must be an integer >= 1")
    max_sim_time = run_config.get("max_sim_time")
    if max_sim_time is not None:
        if not _is_type(max_sim_time, "number") or max_sim_time <= 0:
            c.add("E_RUN_CONFIG", "/run_config/max_sim_time",
                  "'max_sim_time' must be a positive number or null")
    known = {"seed", "runs", "max_sim_time"}
    for key in run_config:
        if key not in known:
            c.add("E_STRUCTURE", f"/run_config/{key}", f"unknown run_config field {key!r}")


# -- export / import ----------------------------------------------------------


def export_document(doc: dict) -> bytes:
    """Canonical bytes of a document (sorted keys, canonical numbers, LF)."""
    return canonical_bytes(doc)


def import_document(data: bytes) -> dict:
    """Parse document bytes; rejects malformed JSON and unknown schema versions."""
    try:
        doc = loads(data)
    except Exception as exc:
        raise DocumentError([DocError("E_MALFORMED", "/", f"not valid JSON: {exc}")]) from exc
    if not isinstance(doc, dict):
        raise DocumentError([DocError("E_STRUCTURE", "/", "document must be a JSON object")])
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise DocumentError(
            [DocError("E_SCHEMA_VERSION", "/schema_version", f"unknown schema version {version!r}")]
        )
    return doc


def document_hash(doc: dict) -> str:
    """SHA-256 hex digest of the canonical document bytes."""
    return hashlib.sha256(export_document(doc)).hexdigest()


# -- compilation ----------------------------------------------------------------


def compile_document(doc: dict, registry: RoleRegistry,
                     backends: Optional[BackendRegistry] = None) -> dict:
    """Resolve defaults, units, instance ids, and rng keys into a runnable plan."""
    if backends is None:
        backends = default_backends(registry)
    errors = validate(doc, registry, backends)
    if errors:
        raise DocumentError(errors)
    engine = doc["engine"]
    backend = backends.get(engine)

    required_roles = {
        binding["role"]
        for group in doc["protocol_groups"]
        for stage in group["stages"]
        for binding in stage
    }
    missing = required_roles - set(backend.roles)
    if missing:
        raise CapabilityError(engine, {f"role:{name}" for name in missing})

    nodes = []
    for node in doc["topology"]["nodes"]:
        resolved = dict(NODE_DEFAULTS)
        resolved.update(node)
        resolved["t1"] = float(resolved["t1"])
        resolved["t2"] = float(resolved["t2"])
        resolved["source_fidelity"] = float(resolved["source_fidelity"])
        resolved["emission_frequency"] = float(resolved["emission_frequency"])
        nodes.append(resolved)

    connections = []
    for conn in doc["topology"].get("connections", []):
        resolved = dict(CONNECTION_DEFAULTS)
        resolved.update(conn)
        resolved["length_km"] = float(resolved["length_km"])
        resolved["attenuation_db_per_km"] = float(resolved["attenuation_db_per_km"])
        resolved["noise_depolarizing_p"] = float(resolved["noise_depolarizing_p"])
        spec = network.ConnectionSpec(
            id=resolved["id"],
            endpoint_a=resolved["endpoint_a"],
            endpoint_b=resolved["endpoint_b"],
            length_km=resolved["length_km"],
            attenuation_db_per_km=resolved["attenuation_db_per_km"],
            noise_depolarizing_p=resolved["noise_depolarizing_p"],
            classical_latency=resolved["classical_latency"],
        )
        resolved["classical_latency"] = network.classical_latency(spec)
        resolved["propagation_delay"] = network.propagation_delay(spec)
        resolved["survival_probability"] = network.survival_probability(spec)
        connections.append(resolved)

    groups = []
    for gi, group in enumerate(doc["protocol_groups"]):
        stages = []
        for si, stage in enumerate(group["stages"]):
            bindings = []
            for bi, binding in enumerate(stage):
                instance_id = f"g{gi}.s{si}.b{bi}.{binding['node']}.{binding['role']}"
                spec = registry.get(binding["role"])
                bindings.append({
                    "node": binding["node"],
                    "role": binding["role"],
                    "params": spec.resolve_params(binding.get("params", {})),
                    "instance_id": instance_id,
                    "rng_key": hashlib.sha256(instance_id.encode("utf-8")).hexdigest()[:16],
                })
            stages.append(bindings)
        groups.append({"name": group.get("name", f"group-{gi}"), "stages": stages})

    run_config = dict(RUN_CONFIG_DEFAULTS)
    run_config.update(doc["run_config"])

    return {
        "plan_version": "1",
        "name": doc["name"],
        "engine": engine,
        "source_document_hash": document_hash(doc),
        "topology": {"nodes": nodes, "connections": connections},
        "protocol_groups": groups,
        "run_config": run_config,
    }


def export_plan(plan: dict) -> bytes:
    return canonical_bytes(plan)


def plan_hash(plan: dict) -> str:
    return hashlib.sha256(export_plan(plan)).hexdigest()
