"""Cascade error reconciliation: block parities, BINARY search, backtracking.

The receiver corrects its key toward the sender's. Pass 1 splits the key
into blocks of size clamp(ceil(coefficient / max(qber, 1/n)), 1, n); every
later pass doubles the block size and shuffles the key with a fresh seed
announced over the classical channel, so both sides agree on the
permutation in-band. A block whose parity disagrees with the sender's is
resolved by binary parity search (one bit fixed per search). Every fix
flips the error parity of all earlier blocks containing that bit, which are
re-searched smallest-first until no known block disagrees: the cascade.

The reconciliation logic is a plain generator over parity questions, so the
same implementation runs both inside the simulator (questions carried by
classical messages) and standalone against an in-memory oracle.

Leakage accounting: leaked_bits counts parity-bearing messages, i.e. the
sender's parity replies. Final key verification by direct comparison is a
simulation diagnostic only and is never counted.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from ..framework import ParamSpec, RoleContext, RoleRegistry
from ..rng import RandomStream

DEFAULT_PASSES = 4
DEFAULT_BLOCK_COEFFICIENT = 0.73

PARAMS = (
    ParamSpec("passes", "int", DEFAULT_PASSES, minimum=1),
    ParamSpec("block_coefficient", "float", DEFAULT_BLOCK_COEFFICIENT, minimum=0.0),
)


@dataclass(frozen=True)
class ReconciliationRecord:
    corrected_bits: str
    leaked_bits: int
    corrections_made: int

    def __post_init__(self):
        if self.leaked_bits < self.corrections_made:
            raise ValueError("each correction costs at least one disclosed parity")


# -- protocol questions yielded by the reconciliation generator ---------------


@dataclass(frozen=True)
class ParityAsk:
    """Ask the reference side for its parity over these key positions."""

    positions: tuple[int, ...]


@dataclass(frozen=True)
class ShuffleAnnounce:
    """Tell the reference side the seed of the next pass's permutation."""

    seed: int


def initial_block_size(qber_estimate: float, n: int, coefficient: float) -> int:
    """Pass-1 block size, guarded against a zero QBER estimate."""
    k = math.ceil(coefficient / max(qber_estimate, 1.0 / n))
    return max(1, min(k, n))


class _Block:
    __slots__ = ("positions", "reference_parity", "size", "birth")

    def __init__(self, positions: tuple[int, ...], reference_parity: int, birth: tuple[int, int]):
        self.positions = positions
        self.reference_parity = reference_parity
        self.size = len(positions)
        self.birth = birth  # (pass index, block index) for deterministic ordering


def reconcile(key_bits: list[int], qber_estimate: float, passes: int,
              coefficient: float, rng: RandomStream, trace: list | None = None):
    """Generator implementing the correcting side.

    Yields ParityAsk and ShuffleAnnounce; the driver must send back an int
    parity for every ParityAsk (and anything, e.g. None, for announcements).
    Returns (corrected bits list, leaked_bits, corrections_made). When a
    trace list is given, every top-level block is appended to it as
    (pass index, positions) for post-run auditing.
    """
    n = len(key_bits)
    if n == 0:
        return [], 0, 0
    working = list(key_bits)
    leaked = 0
    corrections = 0
    known_blocks: list[_Block] = []
    member_of: dict[int, list[_Block]] = {i: [] for i in range(n)}

    def local_parity(positions) -> int:
        return sum(working[i] for i in positions) & 1

    def binary(block: _Block):
        """Locate and flip exactly one error inside a block with odd error parity."""
        nonlocal leaked, corrections
        positions = block.positions
        ref_parity = block.reference_parity
        while len(positions) > 1:
            half = (len(positions) + 1) // 2
            left = positions[:half]
            left_ref = yield ParityAsk(left)
            leaked += 1
            if local_parity(left) != left_ref:
                positions, ref_parity = left, left_ref
            else:
                positions = positions[half:]
                ref_parity = ref_parity ^ left_ref
        flipped = positions[0]
        working[flipped] ^= 1
        corrections += 1
        return flipped

    def drain(pending: set[_Block]):
        """Re-search known odd-parity blocks, smallest first, to quiescence."""
        while pending:
            block = min(pending, key=lambda b: (b.size, b.birth))
            pending.discard(block)
            if local_parity(block.positions) == block.reference_parity:
                continue
            flipped = yield from binary(block)
            for other in member_of[flipped]:
                if other is not block and local_parity(other.positions) != other.reference_parity:
                    pending.add(other)

    k1 = initial_block_size(qber_estimate, n, coefficient)
    for pass_idx in range(passes):
        size = max(1, min(k1 * (2**pass_idx), n))
        if pass_idx == 0:
            order = list(range(n))
        else:
            shuffle_seed = rng.integer64()
            yield ShuffleAnnounce(shuffle_seed)
            order = [int(i) for i in RandomStream(shuffle_seed).permutation(n)]
        for block_idx, start in enumerate(range(0, n, size)):
            positions = tuple(order[start:start + size])
            if trace is not None:
                trace.append((pass_idx, positions))
            ref = yield ParityAsk(positions)
            leaked += 1
            block = _Block(positions, ref, (pass_idx, block_idx))
            known_blocks.append(block)
            for i in positions:
                member_of[i].append(block)
            if local_parity(positions) != ref:
                pending = {block}
                yield from drain(pending)

    return working, leaked, corrections


def reconcile_offline(receiver_key: list[int], sender_key: list[int], qber_estimate: float,
                      passes: int = DEFAULT_PASSES, coefficient: float = DEFAULT_BLOCK_COEFFICIENT,
                      seed: int = 0, trace: list | None = None):
    """Run reconciliation against an in-memory parity oracle (no simulator).

    Returns (corrected key list, leaked_bits, corrections_made).
    """
    gen = reconcile(receiver_key, qber_estimate, passes, coefficient, RandomStream(seed), trace)
    reply = None
    while True:
        try:
            question = gen.send(reply)
        except StopIteration as stop:
            return stop.value
        if isinstance(question, ParityAsk):
            reply = sum(sender_key[i] for i in question.positions) & 1
        else:
            reply = None


# -- simulator roles -----------------------------------------------------------


def _dumps(obj) -> bytes:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")).encode("utf-8")


def _loads(payload: bytes):
    return json.loads(payload.decode("utf-8"))


def _read_blackboard(ctx: RoleContext) -> tuple[list[int], float]:
    key = ctx.blackboard.get("sifted_key")
    qber = ctx.blackboard.get("qber_estimate")
    if key is None or qber is None:
        raise RuntimeError(
            "blackboard is missing 'sifted_key'/'qber_estimate'; "
            "run a key-distribution stage first"
        )
    return [int(b) for b in key], float(qber)


def _publish(ctx: RoleContext, record: ReconciliationRecord):
    ctx.blackboard["reconciled_key"] = record.corrected_bits
    ctx.metric("key_length", len(record.corrected_bits))
    ctx.metric("leaked_bits", record.leaked_bits)
    ctx.metric("corrections_made", record.corrections_made)
    ctx.output("reconciled_key", record.corrected_bits)


def cascade_receiver(ctx: RoleContext, params: dict):
    peer = ctx.single_peer()
    key, qber = _read_blackboard(ctx)
    gen = reconcile(key, qber, params["passes"], params["block_coefficient"], ctx.rng)
    reply = None
    leaked = 0
    while True:
        try:
            question = gen.send(reply)
        except StopIteration as stop:
            corrected, leaked, corrections = stop.value
            break
        if isinstance(question, ParityAsk):
            ctx.send_classical(peer, _dumps({"t": "parity", "positions": list(question.positions)}))
            answer = _loads((yield ctx.receive_classical(peer)))
            reply = int(answer["parity"])
        else:
            ctx.send_classical(peer, _dumps({"t": "shuffle", "seed": question.seed}))
            reply = None
    ctx.send_classical(peer, _dumps({"t": "done", "corrections": corrections}))
    _publish(ctx, ReconciliationRecord("".join(str(b) for b in corrected), leaked, corrections))


def cascade_sender(ctx: RoleContext, params: dict):
    peer = ctx.single_peer()
    key, _ = _read_blackboard(ctx)
    leaked = 0
    while True:
        message = _loads((yield ctx.receive_classical(peer)))
        kind = message["t"]
        if kind == "parity":
            parity = sum(key[i] for i in message["positions"]) & 1
            ctx.send_classical(peer, _dumps({"t": "parity_reply", "parity": parity}))
            leaked += 1
        elif kind == "shuffle":
            continue
        elif kind == "done":
            corrections = int(message["corrections"])
            break
        else:
            raise RuntimeError(f"unexpected reconciliation message {kind!r}")
    _publish(ctx, ReconciliationRecord("".join(str(b) for b in key), leaked, corrections))


def register(registry: RoleRegistry):
    registry.register("cascade_sender", cascade_sender, PARAMS)
    registry.register("cascade_receiver", cascade_receiver, PARAMS)
