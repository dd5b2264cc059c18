"""Execute compiled plans: independent seeded runs aggregated into a report.

A plan with run_config.runs = N and seed = S executes N runs seeded
S, S+1, ..., S+N-1, each on a fresh event queue, quantum state, and
network. Reports are deterministic for a given (plan, seed): wall-clock
data is isolated under the "wall_clock" key so everything else can be
compared byte-for-byte.
"""

from __future__ import annotations

import time
from typing import Optional

from .events import EventQueue
from .framework import ProtocolGroup, RoleBinding, RoleRegistry, run_groups
from .network import ConnectionSpec, Network, NodeSpec, Topology
from .qstate import QuantumState
from .document import plan_hash

REPORT_VERSION = "1"


def topology_from_plan(plan: dict) -> Topology:
    nodes = [
        NodeSpec(
            id=n["id"],
            label=n.get("label", ""),
            memory_slots=n["memory_slots"],
            t1=n["t1"],
            t2=n["t2"],
            source_fidelity=n["source_fidelity"],
            emission_frequency=n["emission_frequency"],
        )
        for n in plan["topology"]["nodes"]
    ]
    connections = [
        ConnectionSpec(
            id=c["id"],
            endpoint_a=c["endpoint_a"],
            endpoint_b=c["endpoint_b"],
            length_km=c["length_km"],
            attenuation_db_per_km=c["attenuation_db_per_km"],
            noise_depolarizing_p=c["noise_depolarizing_p"],
            classical_latency=c["classical_latency"],
        )
        for c in plan["topology"]["connections"]
    ]
    return Topology(nodes, connections)


def groups_from_plan(plan: dict) -> list[ProtocolGroup]:
    groups = []
    for group in plan["protocol_groups"]:
        stages = tuple(
            tuple(
                RoleBinding(
                    node_id=b["node"],
                    role_name=b["role"],
                    params=b["params"],
                    instance_id=b["instance_id"],
                )
                for b in stage
            )
            for stage in group["stages"]
        )
        groups.append(ProtocolGroup(group["name"], stages))
    return groups


def execute_single_run(plan: dict, registry: RoleRegistry, seed: int) -> dict:
    """One independent run of the plan at the given seed."""
    topology = topology_from_plan(plan)
    state = QuantumState()
    net = Network(topology, state)
    queue = EventQueue()
    groups = groups_from_plan(plan)
    results = run_groups(
        groups,
        registry=registry,
        network=net,
        queue=queue,
        seed=seed,
        max_sim_time=plan["run_config"].get("max_sim_time"),
    )
    return {
        "seed": seed,
        "sim_time_end": queue.now,
        "results": [r.to_json() for r in results],
    }


def run_plan(plan: dict, registry: RoleRegistry, seed_override: Optional[int] = None) -> dict:
    """All configured runs; returns the RunReport as a JSON-ready dict."""
    if plan.get("engine") != "native":
        raise ValueError(f"only the native engine can execute plans, got {plan.get('engine')!r}")
    base_seed = plan["run_config"]["seed"] if seed_override is None else int(seed_override)
    n_runs = plan["run_config"].get("runs", 1)
    started = time.time()
    runs = [execute_single_run(plan, registry, base_seed + i) for i in range(n_runs)]
    duration = time.time() - started
    return {
        "report_version": REPORT_VERSION,
        "name": plan["name"],
        "engine": plan["engine"],
        "plan_hash": plan_hash(plan),
        "seeds": [base_seed + i for i in range(n_runs)],
        "runs": runs,
        "wall_clock": {"started_at_unix": started, "duration_s": duration},
    }


def strip_wall_clock(report: dict) -> dict:
    """Copy of a report without its wall-clock fields, for determinism checks."""
    out = dict(report)
    out.pop("wall_clock", None)
    return out
