"""Entanglement distribution: Bell pairs over a fiber, with Z correlation stats.

The source prepares |00> + |11> (H then CNOT), parks its half in quantum
memory while the other half is in flight, and measures it once the receiver
acknowledges the pulse. Each acknowledgment carries the receiver's Z
outcome, so the source can tally the correlation rate directly and report
it back at the end for symmetric metrics.
"""

from __future__ import annotations

import json

from ..framework import ParamSpec, RoleContext, RoleRegistry

DEFAULT_NUM_PAIRS = 1000

SOURCE_PARAMS = (ParamSpec("num_pairs", "int", DEFAULT_NUM_PAIRS, minimum=1),)
RECEIVER_PARAMS = ()


def _dumps(obj) -> bytes:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")).encode("utf-8")


def _loads(payload: bytes):
    return json.loads(payload.decode("utf-8"))


def ent_dist_source(ctx: RoleContext, params: dict):
    peer = ctx.single_peer()
    n = params["num_pairs"]
    ctx.send_classical(peer, _dumps({"t": "begin", "pairs": n}))

    delivered = 0
    matches = 0
    for _ in range(n):
        kept = yield from ctx.emit_qubit(0)
        flying = yield from ctx.emit_qubit(0)
        ctx.apply_gate("H", kept)
        ctx.apply_gate("CNOT", kept, flying)
        ctx.store_qubit(kept)
        ctx.send_qubit(peer, flying)
        ack = _loads((yield ctx.receive_classical(peer)))
        kept = ctx.retrieve_qubit(kept)
        mine = ctx.measure(kept, "Z")
        if ack["arrived"]:
            delivered += 1
            if mine == ack["outcome"]:
                matches += 1

    rate = matches / delivered if delivered else 0.0
    ctx.send_classical(peer, _dumps({"t": "stats", "delivered": delivered, "rate": rate}))
    ctx.metric("num_pairs", n)
    ctx.metric("delivered_pairs", delivered)
    ctx.metric("correlation_rate", rate)


def ent_dist_receiver(ctx: RoleContext, params: dict):
    peer = ctx.single_peer()
    begin = _loads((yield ctx.receive_classical(peer)))
    n = begin["pairs"]

    for _ in range(n):
        arrival = yield ctx.receive_qubit(peer)
        if arrival.lost:
            ctx.send_classical(peer, _dumps({"t": "ack", "arrived": False, "outcome": None}))
        else:
            outcome = ctx.measure(arrival.qubit, "Z")
            ctx.send_classical(peer, _dumps({"t": "ack", "arrived": True, "outcome": outcome}))

    stats = _loads((yield ctx.receive_classical(peer)))
    ctx.metric("num_pairs", n)
    ctx.metric("delivered_pairs", stats["delivered"])
    ctx.metric("correlation_rate", stats["rate"])


def register(registry: RoleRegistry):
    registry.register("ent_dist_source", ent_dist_source, SOURCE_PARAMS)
    registry.register("ent_dist_receiver", ent_dist_receiver, RECEIVER_PARAMS)
