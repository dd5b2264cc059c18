"""Protocol execution: roles as simulated-time coroutines in staged groups.

A role is a generator function `role(ctx, params)` that yields suspension
requests (wait, receive) and performs everything else through the RoleContext.
Groups run in listed order; stages within a group run in order with a hard
barrier; roles within a stage interleave in simulated time on the event
queue. No real threads are involved, so runs are bit-reproducible.

Cross-stage handoff goes through a per-node blackboard that survives stage
and group boundaries within one run.
"""

from __future__ import annotations

import logging
import traceback
from collections import deque
from dataclasses import dataclass
from typing import Any, Callable, Generator, Optional

log = logging.getLogger("qndk.framework")

from .errors import (
    DuplicateRoleError,
    NoConnectionError,
    RoleAborted,
    UnknownRoleError,
)
from .events import EventQueue
from .network import Network, classical_latency, emit_qubit, transmit_qubit
from .qstate import NoiseChannelSpec, QuantumState, QubitHandle
from .rng import RandomStream

# -- suspension requests ----------------------------------------------------


@dataclass(frozen=True)
class Wait:
    delay: float


@dataclass(frozen=True)
class ReceiveClassical:
    peer: str


@dataclass(frozen=True)
class ReceiveQubit:
    peer: str


@dataclass(frozen=True)
class QubitArrival:
    """Delivery record for one pulse: the handle, or a loss notification."""

    pulse_index: int
    qubit: Optional[QubitHandle]

    @property
    def lost(self) -> bool:
        return self.qubit is None


# -- registry -----------------------------------------------------------------


@dataclass(frozen=True)
class ParamSpec:
    name: str
    type: str  # "int" | "float"
    default: Any
    minimum: Optional[float] = None
    maximum: Optional[float] = None

    def check(self, value) -> Optional[str]:
        """Returns an error string, or None when the value fits."""
        if self.type == "int":
            if isinstance(value, bool) or not isinstance(value, int):
                return f"{self.name} must be an integer"
        elif self.type == "float":
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                return f"{self.name} must be a number"
        if self.minimum is not None and value < self.minimum:
            return f"{self.name} must be >= {self.minimum}"
        if self.maximum is not None and value > self.maximum:
            return f"{self.name} must be <= {self.maximum}"
        return None

    def to_json(self) -> dict:
        out = {"name": self.name, "type": self.type, "default": self.default}
        if self.minimum is not None:
            out["minimum"] = self.minimum
        if self.maximum is not None:
            out["maximum"] = self.maximum
        return out


@dataclass(frozen=True)
class RoleSpec:
    name: str
    factory: Callable[["RoleContext", dict], Generator]
    params: tuple[ParamSpec, ...] = ()

    def resolve_params(self, given: dict) -> dict:
        resolved = {p.name: p.default for p in self.params}
        resolved.update(given)
        return resolved


class RoleRegistry:
    """Named protocol roles with published parameter schemas."""

    def __init__(self):
        self._roles: dict[str, RoleSpec] = {}

    def register(self, name: str, factory, params: tuple[ParamSpec, ...] = ()):
        if name in self._roles:
            raise DuplicateRoleError(f"role {name!r} already registered")
        self._roles[name] = RoleSpec(name, factory, params)

    def get(self, name: str) -> RoleSpec:
        if name not in self._roles:
            raise UnknownRoleError(f"role {name!r} is not registered")
        return self._roles[name]

    def __contains__(self, name: str) -> bool:
        return name in self._roles

    def names(self) -> list[str]:
        return sorted(self._roles)

    def schemas(self) -> list[dict]:
        return [
            {"name": spec.name, "params": [p.to_json() for p in spec.params]}
            for _, spec in sorted(self._roles.items())
        ]


# -- bindings, groups, results -------------------------------------------------


@dataclass(frozen=True)
class RoleBinding:
    node_id: str
    role_name: str
    params: dict
    instance_id: str


@dataclass(frozen=True)
class ProtocolGroup:
    name: str
    stages: tuple[tuple[RoleBinding, ...], ...]


@dataclass
class RoleResult:
    instance_id: str
    node_id: str
    role_name: str
    status: str  # completed | aborted | failed
    metrics: dict[str, float]
    outputs: dict[str, Any]
    error: Optional[str]
    started_at: float
    finished_at: float

    def to_json(self) -> dict:
        return {
            "instance_id": self.instance_id,
            "node": self.node_id,
            "role": self.role_name,
            "status": self.status,
            "metrics": self.metrics,
            "outputs": self.outputs,
            "error": self.error,
            "started_at": self.started_at,
            "finished_at": self.finished_at,
        }


# -- runtime --------------------------------------------------------------------


class _RoleRuntime:
    def __init__(self, binding: RoleBinding, ctx: "RoleContext", gen: Generator):
        self.binding = binding
        self.ctx = ctx
        self.gen = gen
        self.running = True
        self.waiting: Any = None
        self.result: Optional[RoleResult] = None
        self.started_at = 0.0

    def describe_block(self) -> str:
        if isinstance(self.waiting, ReceiveClassical):
            return f"receive_classical from {self.waiting.peer}"
        if isinstance(self.waiting, ReceiveQubit):
            return f"receive_qubit from {self.waiting.peer}"
        return "event wait"


class RoleContext:
    """Everything a role may touch: node binding, I/O, blackboard, rng, clock.

    Roles depend only on this interface, never on engine internals.
    """

    def __init__(self, kernel: "_Kernel", binding: RoleBinding, rng: RandomStream, params: dict):
        self._kernel = kernel
        self._binding = binding
        self.rng = rng
        self.params = params
        self._metrics: dict[str, float] = {}
        self._outputs: dict[str, Any] = {}

    # identity and clock

    @property
    def node_id(self) -> str:
        return self._binding.node_id

    @property
    def instance_id(self) -> str:
        return self._binding.instance_id

    @property
    def now(self) -> float:
        return self._kernel.queue.now

    @property
    def blackboard(self) -> dict:
        return self._kernel.blackboards.setdefault(self.node_id, {})

    def peers(self) -> list[str]:
        return self._kernel.network.peers_of(self.node_id)

    def single_peer(self) -> str:
        peers = self.peers()
        if len(peers) != 1:
            raise NoConnectionError(
                f"{self.node_id} needs exactly one peer connection, has {len(peers)}"
            )
        return peers[0]

    # quantum operations (immediate)

    def allocate_qubit(self, basis_state: int = 0) -> QubitHandle:
        return self._kernel.state.allocate(basis_state)

    def apply_gate(self, gate: str, *targets: QubitHandle):
        self._kernel.state.apply_gate(gate, *targets)

    def apply_channel(self, q: QubitHandle, ch: NoiseChannelSpec) -> bool:
        return self._kernel.state.apply_channel(q, ch, self.rng)

    def measure(self, q: QubitHandle, basis: str = "Z") -> int:
        return self._kernel.state.measure(q, basis, self.rng)

    def discard(self, q: QubitHandle):
        self._kernel.state.discard(q, self.rng)

    def store_qubit(self, q: QubitHandle):
        self._kernel.network.memories[self.node_id].store(q, self.now)

    def retrieve_qubit(self, q: QubitHandle) -> QubitHandle:
        return self._kernel.network.memories[self.node_id].retrieve(q, self.now, self.rng)

    def emit_qubit(self, basis_state: int):
        """Paced source emission; use `q = yield from ctx.emit_qubit(bit)`."""
        ready = self._kernel.network.emission_ready_at(self.node_id)
        if ready > self.now:
            yield Wait(ready - self.now)
        self._kernel.network.mark_emission(self.node_id, self.now)
        node = self._kernel.network.topology.node(self.node_id)
        return emit_qubit(node, basis_state, self._kernel.state, self.rng)

    # classical and quantum I/O

    def send_classical(self, peer: str, payload: bytes):
        conn = self._connection_to(peer)
        self._kernel.send_classical(self.node_id, peer, payload, classical_latency(conn))

    def receive_classical(self, peer: str) -> ReceiveClassical:
        self._connection_to(peer)
        return ReceiveClassical(peer)

    def send_qubit(self, peer: str, q: QubitHandle) -> int:
        """Transmit q to peer; returns this pulse's index on the link."""
        conn = self._connection_to(peer)
        return self._kernel.send_qubit(conn, self.node_id, peer, q, self.rng)

    def receive_qubit(self, peer: str) -> ReceiveQubit:
        self._connection_to(peer)
        return ReceiveQubit(peer)

    def wait(self, delay: float) -> Wait:
        return Wait(delay)

    def _connection_to(self, peer: str):
        conn = self._kernel.network.connection_between(self.node_id, peer)
        if conn is None:
            raise NoConnectionError(f"no connection between {self.node_id} and {peer}")
        return conn

    # results

    def metric(self, name: str, value: float):
        self._metrics[name] = float(value)

    def output(self, name: str, value):
        self._outputs[name] = value

    def abort(self, reason: str):
        raise RoleAborted(reason)


class _Kernel:
    """Per-run owner of the queue, state, mailboxes, and role scheduling."""

    def __init__(self, network: Network, queue: EventQueue, state: QuantumState, seed: int):
        self.network = network
        self.queue = queue
        self.state = state
        self.seed = seed
        self.blackboards: dict[str, dict] = {}
        self._mailboxes: dict[tuple[str, str], deque] = {}
        self._classical_waiters: dict[tuple[str, str], deque] = {}
        self._qubit_inbox: dict[tuple[str, str], deque] = {}
        self._qubit_waiters: dict[tuple[str, str], deque] = {}
        self._pulse_counter: dict[tuple[str, str], int] = {}

    # classical transport

    def send_classical(self, sender: str, receiver: str, payload: bytes, latency: float):
        self.queue.schedule(latency, self._deliver_classical, (receiver, sender, payload))

    def _deliver_classical(self, item):
        receiver, sender, payload = item
        key = (receiver, sender)
        waiters = self._classical_waiters.get(key)
        if waiters:
            rt = waiters.popleft()
            rt.waiting = None
            self._advance(rt, payload)
        else:
            self._mailboxes.setdefault(key, deque()).append(payload)

    # quantum transport

    def send_qubit(self, conn, sender: str, receiver: str, q: QubitHandle, rng: RandomStream) -> int:
        key = (sender, receiver)
        idx = self._pulse_counter.get(key, 0)
        self._pulse_counter[key] = idx + 1
        transmit_qubit(
            conn,
            q,
            self.state,
            rng,
            self.queue,
            lambda handle, _key=(receiver, sender), _idx=idx: self._deliver_qubit(
                _key, QubitArrival(_idx, handle)
            ),
        )
        return idx

    def _deliver_qubit(self, key: tuple[str, str], arrival: QubitArrival):
        waiters = self._qubit_waiters.get(key)
        if waiters:
            rt = waiters.popleft()
            rt.waiting = None
            self._advance(rt, arrival)
        else:
            self._qubit_inbox.setdefault(key, deque()).append(arrival)

    # role scheduling

    def spawn(self, binding: RoleBinding, spec, resolved_params: dict) -> _RoleRuntime:
        rng = RandomStream.substream(self.seed, binding.instance_id)
        ctx = RoleContext(self, binding, rng, resolved_params)
        gen = spec.factory(ctx, resolved_params)
        rt = _RoleRuntime(binding, ctx, gen)
        self.queue.schedule(0.0, self._start, rt)
        return rt

    def _start(self, rt: _RoleRuntime):
        rt.started_at = self.queue.now
        self._advance(rt, None)

    def _resume(self, rt: _RoleRuntime):
        rt.waiting = None
        self._advance(rt, None)

    def _advance(self, rt: _RoleRuntime, value):
        while True:
            try:
                request = rt.gen.send(value)
            except StopIteration:
                self._finish(rt, "completed", None)
                return
            except RoleAborted as exc:
                self._finish(rt, "aborted", str(exc))
                return
            except Exception:
                self._finish(rt, "failed", traceback.format_exc(limit=4))
                return
            if isinstance(request, Wait):
                if request.delay < 0:
                    self._finish(rt, "failed", f"negative wait {request.delay}")
                    return
                rt.waiting = request
                self.queue.schedule(request.delay, self._resume, rt)
                return
            if isinstance(request, ReceiveClassical):
                key = (rt.binding.node_id, request.peer)
                box = self._mailboxes.get(key)
                if box:
                    value = box.popleft()
                    continue
                rt.waiting = request
                self._classical_waiters.setdefault(key, deque()).append(rt)
                return
            if isinstance(request, ReceiveQubit):
                key = (rt.binding.node_id, request.peer)
                box = self._qubit_inbox.get(key)
                if box:
                    value = box.popleft()
                    continue
                rt.waiting = request
                self._qubit_waiters.setdefault(key, deque()).append(rt)
                return
            self._finish(rt, "failed", f"role yielded unsupported request {request!r}")
            return

    def _finish(self, rt: _RoleRuntime, status: str, error: Optional[str]):
        rt.running = False
        rt.waiting = None
        rt.result = RoleResult(
            instance_id=rt.binding.instance_id,
            node_id=rt.binding.node_id,
            role_name=rt.binding.role_name,
            status=status,
            metrics=dict(rt.ctx._metrics),
            outputs=dict(rt.ctx._outputs),
            error=error,
            started_at=rt.started_at,
            finished_at=self.queue.now,
        )

    def _drop_waiter(self, rt: _RoleRuntime):
        for table in (self._classical_waiters, self._qubit_waiters):
            for q in table.values():
                try:
                    q.remove(rt)
                except ValueError:
                    pass


def run_groups(
    groups: list[ProtocolGroup],
    *,
    registry: RoleRegistry,
    network: Network,
    queue: EventQueue,
    seed: int,
    max_sim_time: Optional[float] = None,
) -> list[RoleResult]:
    """Execute all groups in order; stages in order with barriers; collect results.

    A failing role never stops its siblings; later stages still run and see
    the blackboard as-is. When the event queue empties while roles are still
    blocked on receives, the blocked roles fail with a blocked-roles report.
    """
    kernel = _Kernel(network, queue, network.state, seed)
    results: list[RoleResult] = []
    for group in groups:
        for stage in group.stages:
            per_node: dict[str, int] = {}
            for binding in stage:
                per_node[binding.node_id] = per_node.get(binding.node_id, 0) + 1
            for node_id, count in per_node.items():
                if count > 1:
                    log.warning("node %s holds %d roles in one stage of group %s",
                                node_id, count, group.name)
            runtimes = []
            for binding in stage:
                spec = registry.get(binding.role_name)
                runtimes.append(kernel.spawn(binding, spec, spec.resolve_params(binding.params)))
            _drive_stage(kernel, runtimes, max_sim_time)
            results.extend(rt.result for rt in runtimes)
    return results


def _drive_stage(kernel: _Kernel, runtimes: list[_RoleRuntime], max_sim_time: Optional[float]):
    while any(rt.running for rt in runtimes):
        if kernel.queue.empty:
            blocked = [rt for rt in runtimes if rt.running]
            report = "; ".join(
                f"{rt.binding.instance_id} blocked on {rt.describe_block()}" for rt in blocked
            )
            for rt in blocked:
                kernel._drop_waiter(rt)
                kernel._finish(rt, "failed", f"deadlock: {report}")
            return
        next_time = kernel.queue.peek_time()
        if max_sim_time is not None and next_time is not None and next_time > max_sim_time:
            stuck = [rt for rt in runtimes if rt.running]
            for rt in stuck:
                kernel._drop_waiter(rt)
                kernel._finish(rt, "failed", f"simulated time limit {max_sim_time}s exceeded")
            return
        kernel.queue.step()
