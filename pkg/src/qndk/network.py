"""Network topology and the physics of qubit transport and storage.

Nodes carry memory slots, T1/T2 times, source fidelity, and emission
frequency. Connections carry fiber length, dB/km attenuation, a per-transit
depolarizing probability, and a classical latency ("auto" derives it from
the fiber length). Signal speed is fixed at 2e8 m/s (fiber index ~1.5).

The classical channel is reliable and in-order with no loss; the quantum
channel loses a photon with probability 1 - 10^(-attenuation*length/10) and
depolarizes survivors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

from .errors import DeadQubitError, MemoryFullError, QubitNotStoredError
from .events import EventQueue
from .qstate import (
    QuantumState,
    QubitHandle,
    amplitude_damping,
    dephasing,
    depolarizing,
)
from .rng import RandomStream

SIGNAL_SPEED_M_PER_S = 2.0e8

DEFAULT_ATTENUATION_DB_PER_KM = 0.2
DEFAULT_MEMORY_SLOTS = 8
DEFAULT_T1_S = 1.0
DEFAULT_T2_S = 1.0
DEFAULT_SOURCE_FIDELITY = 1.0
DEFAULT_EMISSION_FREQUENCY_HZ = 1.0e6


@dataclass(frozen=True)
class NodeSpec:
    id: str
    label: str = ""
    memory_slots: int = DEFAULT_MEMORY_SLOTS
    t1: float = DEFAULT_T1_S
    t2: float = DEFAULT_T2_S
    source_fidelity: float = DEFAULT_SOURCE_FIDELITY
    emission_frequency: float = DEFAULT_EMISSION_FREQUENCY_HZ

    def __post_init__(self):
        if self.memory_slots < 0:
            raise ValueError("memory_slots must be >= 0")
        if self.t1 <= 0 or self.t2 <= 0:
            raise ValueError("T1 and T2 must be positive")
        if self.t2 > 2.0 * self.t1:
            raise ValueError(f"T2 ({self.t2}) exceeds 2*T1 ({2 * self.t1})")
        if not 0.5 < self.source_fidelity <= 1.0:
            raise ValueError("source_fidelity must lie in (0.5, 1]")
        if self.emission_frequency <= 0:
            raise ValueError("emission_frequency must be positive")


@dataclass(frozen=True)
class ConnectionSpec:
    id: str
    endpoint_a: str
    endpoint_b: str
    length_km: float = 0.0
    attenuation_db_per_km: float = DEFAULT_ATTENUATION_DB_PER_KM
    noise_depolarizing_p: float = 0.0
    classical_latency: object = "auto"  # seconds, or "auto"

    def __post_init__(self):
        if self.endpoint_a == self.endpoint_b:
            raise ValueError("connection endpoints must be distinct")
        if self.length_km < 0:
            raise ValueError("length_km must be >= 0")
        if self.attenuation_db_per_km < 0:
            raise ValueError("attenuation_db_per_km must be >= 0")
        if not 0.0 <= self.noise_depolarizing_p <= 1.0:
            raise ValueError("noise_depolarizing_p must lie in [0, 1]")
        if self.classical_latency != "auto" and float(self.classical_latency) < 0:
            raise ValueError("classical_latency must be >= 0 or 'auto'")


@dataclass
class Topology:
    nodes: list[NodeSpec]
    connections: list[ConnectionSpec]

    def __post_init__(self):
        node_ids = [n.id for n in self.nodes]
        if len(set(node_ids)) != len(node_ids):
            raise ValueError("duplicate node ids")
        conn_ids = [c.id for c in self.connections]
        if len(set(conn_ids)) != len(conn_ids):
            raise ValueError("duplicate connection ids")
        known = set(node_ids)
        for c in self.connections:
            if c.endpoint_a not in known or c.endpoint_b not in known:
                raise ValueError(f"connection {c.id} references a missing node")

    def node(self, node_id: str) -> NodeSpec:
        for n in self.nodes:
            if n.id == node_id:
                return n
        raise KeyError(node_id)


def survival_probability(c: ConnectionSpec) -> float:
    """Photon survival over the fiber: 10^(-attenuation * length / 10)."""
    return 10.0 ** (-c.attenuation_db_per_km * c.length_km / 10.0)


def propagation_delay(c: ConnectionSpec) -> float:
    """One-way transit time in seconds at 2e8 m/s."""
    return c.length_km * 1000.0 / SIGNAL_SPEED_M_PER_S


def classical_latency(c: ConnectionSpec) -> float:
    """Classical message delay; 'auto' resolves to the propagation delay."""
    if c.classical_latency == "auto":
        return propagation_delay(c)
    return float(c.classical_latency)


def transmit_qubit(
    c: ConnectionSpec,
    q: QubitHandle,
    state: QuantumState,
    rng: RandomStream,
    queue: EventQueue,
    deliver: Callable[[Optional[QubitHandle]], None],
) -> bool:
    """Send q over the fiber; deliver(handle or None-if-lost) fires after the delay.

    Returns whether the photon survived. A lost photon is destroyed
    immediately (traced out of its group); the receiver still gets the
    None delivery so pulse accounting stays aligned.
    """
    if not q.alive:
        raise DeadQubitError(f"qubit {q.id} is not alive")
    delay = propagation_delay(c)
    if rng.random() >= survival_probability(c):
        state.discard(q, rng)
        queue.schedule(delay, deliver, None)
        return False
    if c.noise_depolarizing_p > 0:
        state.apply_channel(q, depolarizing(c.noise_depolarizing_p), rng)
    queue.schedule(delay, deliver, q)
    return True


def emit_qubit(node: NodeSpec, basis_state: int, state: QuantumState, rng: RandomStream) -> QubitHandle:
    """Allocate the intended Z eigenstate, degraded to the node's source fidelity.

    Depolarizing with p = 3(1 - F)/2 makes the expected fidelity to the
    intended pure state equal F.
    """
    q = state.allocate(basis_state)
    p = 3.0 * (1.0 - node.source_fidelity) / 2.0
    if p > 0:
        state.apply_channel(q, depolarizing(p), rng)
    return q


class QuantumMemory:
    """Fixed-capacity qubit store; retrieval applies T1/T2 decay for the dwell time."""

    def __init__(self, node: NodeSpec, state: QuantumState):
        self.node = node
        self._state = state
        self._stored: dict[int, tuple[QubitHandle, float]] = {}

    @property
    def occupancy(self) -> int:
        return len(self._stored)

    def store(self, q: QubitHandle, now: float):
        if not q.alive:
            raise DeadQubitError(f"qubit {q.id} is not alive")
        if len(self._stored) >= self.node.memory_slots:
            raise MemoryFullError(
                f"memory of {self.node.id} is full ({self.node.memory_slots} slots)"
            )
        self._stored[q.id] = (q, now)

    def retrieve(self, q: QubitHandle, now: float, rng: RandomStream) -> QubitHandle:
        if q.id not in self._stored:
            raise QubitNotStoredError(f"qubit {q.id} is not stored in {self.node.id}")
        handle, stored_at = self._stored.pop(q.id)
        dt = now - stored_at
        gamma = 1.0 - math.exp(-dt / self.node.t1)
        self._state.apply_channel(handle, amplitude_damping(gamma), rng)
        p_phase = 1.0 - math.exp(-dt / self.node.t2)
        self._state.apply_channel(handle, dephasing(p_phase), rng)
        return handle


class Network:
    """Resolved topology plus per-run runtime state (memories, emission pacing)."""

    def __init__(self, topology: Topology, state: QuantumState):
        self.topology = topology
        self.state = state
        self.memories = {n.id: QuantumMemory(n, state) for n in topology.nodes}
        self._last_emission: dict[str, float] = {}
        self._conns: dict[frozenset, ConnectionSpec] = {}
        for c in topology.connections:
            self._conns.setdefault(frozenset((c.endpoint_a, c.endpoint_b)), c)

    def connection_between(self, a: str, b: str) -> Optional[ConnectionSpec]:
        return self._conns.get(frozenset((a, b)))

    def peers_of(self, node_id: str) -> list[str]:
        out = []
        for c in self.topology.connections:
            if c.endpoint_a == node_id:
                out.append(c.endpoint_b)
            elif c.endpoint_b == node_id:
                out.append(c.endpoint_a)
        return sorted(set(out))

    def emission_ready_at(self, node_id: str) -> float:
        """Earliest time the node's source may emit the next qubit."""
        last = self._last_emission.get(node_id)
        if last is None:
            return 0.0
        node = self.topology.node(node_id)
        return last + 1.0 / node.emission_frequency

    def mark_emission(self, node_id: str, t: float):
        self._last_emission[node_id] = t
