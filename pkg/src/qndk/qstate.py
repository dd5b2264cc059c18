"""Pure-state trajectory simulator for small groups of entangled qubits.

States are complex amplitude vectors over dynamically merged qubit groups.
Noise is realized by Monte Carlo trajectory sampling: one Kraus branch is
drawn per application with probability <psi|K^dag K|psi> and the state is
renormalized. Groups are capped at 16 qubits so worst-case memory stays
bounded; exceeding the cap is a hard error.

Measurement consumes the qubit (photonic semantics): the outcome is sampled
from the Born rule, the state is projected, and the handle goes dead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DeadQubitError, GateError, GroupSizeError
from .rng import RandomStream

GROUP_CAP = 16
NORM_TOL = 1e-9

_SQ2 = 1.0 / math.sqrt(2.0)

SINGLE_QUBIT_GATES = {
    "H": np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=np.complex128),
    "X": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "Z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
    "S": np.array([[1, 0], [0, 1j]], dtype=np.complex128),
}

TWO_QUBIT_GATES = {
    "CNOT": np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=np.complex128
    ),
    "CZ": np.diag([1, 1, 1, -1]).astype(np.complex128),
}


@dataclass(eq=False)
class QubitHandle:
    """Token for one qubit. Ids are never reused within a run."""

    id: int
    alive: bool = True

    def __repr__(self):
        return f"QubitHandle({self.id}, alive={self.alive})"


@dataclass
class NoiseChannelSpec:
    """One of the supported single-qubit noise channels."""

    kind: str  # depolarizing | dephasing | amplitude_damping | loss
    p: float

    def __post_init__(self):
        if self.kind not in ("depolarizing", "dephasing", "amplitude_damping", "loss"):
            raise ValueError(f"unknown channel kind {self.kind!r}")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"channel probability {self.p} outside [0, 1]")


def depolarizing(p: float) -> NoiseChannelSpec:
    return NoiseChannelSpec("depolarizing", p)


def dephasing(p: float) -> NoiseChannelSpec:
    return NoiseChannelSpec("dephasing", p)


def amplitude_damping(gamma: float) -> NoiseChannelSpec:
    return NoiseChannelSpec("amplitude_damping", gamma)


def loss(p_loss: float) -> NoiseChannelSpec:
    return NoiseChannelSpec("loss", p_loss)


@dataclass
class EntanglementGroup:
    """Ordered member qubits and their joint amplitude vector.

    Member i maps to bit position i counted from the most significant end of
    the flat amplitude index.
    """

    members: list[int]
    amplitudes: np.ndarray = field(repr=False)

    @property
    def size(self) -> int:
        return len(self.members)

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amplitudes) ** 2)))


class QuantumState:
    """Owner of every qubit and entanglement group in one simulation run."""

    def __init__(self):
        self._next_id = 0
        self._handles: dict[int, QubitHandle] = {}
        self._group_of: dict[int, EntanglementGroup] = {}

    # -- allocation and bookkeeping --------------------------------------

    def allocate(self, basis_state: int = 0) -> QubitHandle:
        """New qubit in |0> or |1>, in its own singleton group."""
        if basis_state not in (0, 1):
            raise ValueError(f"basis_state must be 0 or 1, got {basis_state}")
        handle = QubitHandle(self._next_id)
        self._next_id += 1
        amps = np.zeros(2, dtype=np.complex128)
        amps[basis_state] = 1.0
        group = EntanglementGroup([handle.id], amps)
        self._handles[handle.id] = handle
        self._group_of[handle.id] = group
        return handle

    def group_of(self, q: QubitHandle) -> EntanglementGroup:
        self._check_alive(q)
        return self._group_of[q.id]

    def alive_ids(self) -> set[int]:
        return set(self._group_of.keys())

    def groups(self) -> list[EntanglementGroup]:
        seen: list[EntanglementGroup] = []
        for g in self._group_of.values():
            if not any(g is s for s in seen):
                seen.append(g)
        return seen

    def _check_alive(self, q: QubitHandle):
        if not q.alive or q.id not in self._group_of:
            raise DeadQubitError(f"qubit {q.id} is not alive")

    # -- gates ------------------------------------------------------------

    def apply_gate(self, gate: str, *targets: QubitHandle):
        if gate in SINGLE_QUBIT_GATES:
            if len(targets) != 1:
                raise GateError(f"{gate} takes exactly 1 target, got {len(targets)}")
            q = targets[0]
            self._check_alive(q)
            self._apply_unitary(self._group_of[q.id], SINGLE_QUBIT_GATES[gate], [q.id])
        elif gate in TWO_QUBIT_GATES:
            if len(targets) != 2:
                raise GateError(f"{gate} takes exactly 2 targets, got {len(targets)}")
            a, b = targets
            if a.id == b.id:
                raise GateError("two-qubit gate targets must be distinct")
            self._check_alive(a)
            self._check_alive(b)
            group = self._merge(a, b)
            self._apply_unitary(group, TWO_QUBIT_GATES[gate], [a.id, b.id])
        else:
            raise GateError(f"unknown gate {gate!r}")

    def _merge(self, a: QubitHandle, b: QubitHandle) -> EntanglementGroup:
        ga, gb = self._group_of[a.id], self._group_of[b.id]
        if ga is gb:
            return ga
        if ga.size + gb.size > GROUP_CAP:
            raise GroupSizeError(
                f"merge of {ga.size}+{gb.size} qubits exceeds the {GROUP_CAP}-qubit cap"
            )
        merged = EntanglementGroup(ga.members + gb.members, np.kron(ga.amplitudes, gb.amplitudes))
        for qid in merged.members:
            self._group_of[qid] = merged
        return merged

    def _apply_unitary(self, group: EntanglementGroup, u: np.ndarray, target_ids: list[int]):
        k = group.size
        positions = [group.members.index(qid) for qid in target_ids]
        tensor = group.amplitudes.reshape((2,) * k)
        m = len(positions)
        u_tensor = u.reshape((2,) * (2 * m))
        tensor = np.tensordot(u_tensor, tensor, axes=(list(range(m, 2 * m)), positions))
        tensor = np.moveaxis(tensor, list(range(m)), positions)
        group.amplitudes = np.ascontiguousarray(tensor.reshape(-1))

    # -- measurement and removal ------------------------------------------

    def prob_one(self, q: QubitHandle) -> float:
        """Probability of outcome 1 for a Z measurement of q (pure read)."""
        self._check_alive(q)
        group = self._group_of[q.id]
        pos = group.members.index(q.id)
        tensor = group.amplitudes.reshape((2,) * group.size)
        slab = np.take(tensor, 1, axis=pos)
        return float(np.sum(np.abs(slab) ** 2))

    def measure(self, q: QubitHandle, basis: str, rng: RandomStream) -> int:
        """Sample a Z or X measurement; project, renormalize, consume q."""
        self._check_alive(q)
        if basis not in ("Z", "X"):
            raise ValueError(f"basis must be 'Z' or 'X', got {basis!r}")
        if basis == "X":
            self._apply_unitary(self._group_of[q.id], SINGLE_QUBIT_GATES["H"], [q.id])
        p1 = self.prob_one(q)
        outcome = 1 if rng.random() < p1 else 0
        self._project_out(q, outcome)
        return outcome

    def discard(self, q: QubitHandle, rng: RandomStream):
        """Trace q out: Z measurement with the outcome thrown away."""
        self._check_alive(q)
        p1 = self.prob_one(q)
        outcome = 1 if rng.random() < p1 else 0
        self._project_out(q, outcome)

    def _project_out(self, q: QubitHandle, outcome: int):
        group = self._group_of[q.id]
        pos = group.members.index(q.id)
        tensor = group.amplitudes.reshape((2,) * group.size)
        reduced = np.take(tensor, outcome, axis=pos).reshape(-1)
        norm = np.sqrt(np.sum(np.abs(reduced) ** 2))
        if norm > 0:
            reduced = reduced / norm
        group.members.pop(pos)
        group.amplitudes = np.ascontiguousarray(reduced)
        del self._group_of[q.id]
        q.alive = False

    # -- noise channels -----------------------------------------------------

    def apply_channel(self, q: QubitHandle, ch: NoiseChannelSpec, rng: RandomStream) -> bool:
        """Sample one Kraus branch of ch on q. Returns whether q is still alive."""
        self._check_alive(q)
        if ch.kind == "depolarizing":
            if rng.random() >= 1.0 - ch.p:
                pauli = ("X", "Y", "Z")[rng.integers(3)]
                self._apply_unitary(self._group_of[q.id], SINGLE_QUBIT_GATES[pauli], [q.id])
            return True
        if ch.kind == "dephasing":
            if rng.random() < ch.p / 2.0:
                self._apply_unitary(self._group_of[q.id], SINGLE_QUBIT_GATES["Z"], [q.id])
            return True
        if ch.kind == "amplitude_damping":
            gamma = ch.p
            p_decay = gamma * self.prob_one(q)
            group = self._group_of[q.id]
            pos = group.members.index(q.id)
            tensor = group.amplitudes.reshape((2,) * group.size)
            if rng.random() < p_decay:
                # K1: |1> -> sqrt(gamma)|0>
                new = np.zeros_like(tensor)
                idx0 = [slice(None)] * group.size
                idx1 = [slice(None)] * group.size
                idx0[pos], idx1[pos] = 0, 1
                new[tuple(idx0)] = tensor[tuple(idx1)]
                tensor = new
            else:
                # K0 = diag(1, sqrt(1 - gamma))
                idx1 = [slice(None)] * group.size
                idx1[pos] = 1
                tensor = tensor.copy()
                tensor[tuple(idx1)] *= math.sqrt(1.0 - gamma)
            flat = tensor.reshape(-1)
            norm = np.sqrt(np.sum(np.abs(flat) ** 2))
            if norm > 0:
                flat = flat / norm
            group.amplitudes = np.ascontiguousarray(flat)
            return True
        if ch.kind == "loss":
            if rng.random() < ch.p:
                self.discard(q, rng)
                return False
            return True
        raise ValueError(f"unknown channel kind {ch.kind!r}")
