"""BB84 prepare-and-measure key distribution, sender and receiver roles.

The sender emits pulses with independent uniform bit and basis (Z/X), paced
at the node's emission frequency. The receiver measures each arrival in an
independent random basis, then announces arrived pulse indices and bases;
the sender replies with the indices where bases matched. A random fraction
of the sifted positions is disclosed to estimate the QBER and discarded
from the key. Both sides write "sifted_key" and "qber_estimate" to their
node blackboards for later stages.

All classical payloads are canonical JSON bytes, so both sides derive
identical sample sets and identical QBER estimates without extra messages.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from ..framework import ParamSpec, RoleContext, RoleRegistry

DEFAULT_NUM_PULSES = 10_000
DEFAULT_SAMPLE_FRACTION = 0.1
DEFAULT_QBER_ABORT_THRESHOLD = 0.11


@dataclass(frozen=True)
class SiftedKeyRecord:
    bits: str
    qber_estimate: float
    pulse_count: int
    sift_count: int
    sample_count: int

    def __post_init__(self):
        if self.sift_count > self.pulse_count:
            raise ValueError("sift_count cannot exceed pulse_count")
        if len(self.bits) != self.sift_count - self.sample_count:
            raise ValueError("key length must equal sift_count - sample_count")

PARAMS = (
    ParamSpec("num_pulses", "int", DEFAULT_NUM_PULSES, minimum=1),
    ParamSpec("sample_fraction", "float", DEFAULT_SAMPLE_FRACTION, minimum=0.0, maximum=1.0),
    ParamSpec("qber_abort_threshold", "float", DEFAULT_QBER_ABORT_THRESHOLD, minimum=0.0, maximum=1.0),
)


def _dumps(obj) -> bytes:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")).encode("utf-8")


def _loads(payload: bytes):
    return json.loads(payload.decode("utf-8"))


def _sample_positions(rng, sift_count: int, fraction: float) -> list[int]:
    """Positions (into the sifted list) disclosed for QBER estimation."""
    k = int(round(fraction * sift_count))
    if k <= 0:
        return []
    return sorted(int(i) for i in rng.permutation(sift_count)[:k])


def _finish(ctx: RoleContext, bits: list[int], sample_positions: list[int],
            sample_mine: list[int], sample_theirs: list[int],
            pulse_count: int, arrival_count: int, threshold: float):
    """Shared tail: estimate QBER, strip the sample, publish key and metrics."""
    sift_count = len(bits)
    sample_count = len(sample_positions)
    if sample_count > 0:
        mismatches = sum(1 for a, b in zip(sample_mine, sample_theirs) if a != b)
        qber = mismatches / sample_count
    else:
        qber = 0.0
    sampled = set(sample_positions)
    key = "".join(str(b) for i, b in enumerate(bits) if i not in sampled)
    record = SiftedKeyRecord(key, qber, pulse_count, sift_count, sample_count)

    ctx.blackboard["sifted_key"] = record.bits
    ctx.blackboard["qber_estimate"] = record.qber_estimate
    ctx.metric("pulse_count", record.pulse_count)
    ctx.metric("arrival_count", arrival_count)
    ctx.metric("sift_count", record.sift_count)
    ctx.metric("sample_count", record.sample_count)
    ctx.metric("sift_fraction", sift_count / arrival_count if arrival_count else 0.0)
    ctx.metric("qber_estimate", record.qber_estimate)
    ctx.metric("key_length", len(record.bits))
    ctx.output("sifted_key", record.bits)
    if qber > threshold:
        ctx.abort(f"QBER estimate {qber:.4f} exceeds threshold {threshold}")


def bb84_sender(ctx: RoleContext, params: dict):
    peer = ctx.single_peer()
    n = params["num_pulses"]
    threshold = params["qber_abort_threshold"]

    ctx.send_classical(peer, _dumps({"t": "begin", "pulses": n}))

    bits = ctx.rng.bits(n)
    bases = ctx.rng.bits(n)
    for i in range(n):
        q = yield from ctx.emit_qubit(int(bits[i]))
        if bases[i]:
            ctx.apply_gate("H", q)
        ctx.send_qubit(peer, q)

    announce = _loads((yield ctx.receive_classical(peer)))
    arrived = announce["arrived"]
    their_bases = announce["bases"]
    matched = [idx for idx, b in zip(arrived, their_bases) if b == int(bases[idx])]
    ctx.send_classical(peer, _dumps({"t": "sift", "indices": matched}))

    if not matched:
        raise RuntimeError(f"no sifted bits ({len(arrived)} arrivals out of {n} pulses)")

    positions = _sample_positions(ctx.rng, len(matched), params["sample_fraction"])
    my_sample = [int(bits[matched[p]]) for p in positions]
    ctx.send_classical(peer, _dumps({"t": "sample", "positions": positions, "bits": my_sample}))
    reply = _loads((yield ctx.receive_classical(peer)))
    their_sample = reply["bits"]

    sifted_bits = [int(bits[idx]) for idx in matched]
    _finish(ctx, sifted_bits, positions, my_sample, their_sample, n, len(arrived), threshold)


def bb84_receiver(ctx: RoleContext, params: dict):
    peer = ctx.single_peer()
    threshold = params["qber_abort_threshold"]

    begin = _loads((yield ctx.receive_classical(peer)))
    n = begin["pulses"]

    outcomes: dict[int, int] = {}
    my_bases: dict[int, int] = {}
    arrived: list[int] = []
    for _ in range(n):
        arrival = yield ctx.receive_qubit(peer)
        if arrival.lost:
            continue
        basis = ctx.rng.bit()
        outcome = ctx.measure(arrival.qubit, "X" if basis else "Z")
        arrived.append(arrival.pulse_index)
        my_bases[arrival.pulse_index] = basis
        outcomes[arrival.pulse_index] = outcome
    arrived.sort()

    ctx.send_classical(
        peer, _dumps({"t": "bases", "arrived": arrived, "bases": [my_bases[i] for i in arrived]})
    )
    sift = _loads((yield ctx.receive_classical(peer)))
    matched = sift["indices"]
    if not matched:
        raise RuntimeError(f"no sifted bits ({len(arrived)} arrivals out of {n} pulses)")

    sample = _loads((yield ctx.receive_classical(peer)))
    positions = sample["positions"]
    their_sample = sample["bits"]
    my_sample = [outcomes[matched[p]] for p in positions]
    ctx.send_classical(peer, _dumps({"t": "sample_bits", "bits": my_sample}))

    sifted_bits = [outcomes[idx] for idx in matched]
    _finish(ctx, sifted_bits, positions, my_sample, their_sample, n, len(arrived), threshold)


def register(registry: RoleRegistry):
    registry.register("bb84_sender", bb84_sender, PARAMS)
    registry.register("bb84_receiver", bb84_receiver, PARAMS)
