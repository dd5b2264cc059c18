"""Role runtime: stages, barriers, blackboards, messaging, deadlock detection."""

import pytest

from qndk.errors import DuplicateRoleError
from qndk.events import EventQueue
from qndk.framework import (
    ProtocolGroup,
    RoleBinding,
    RoleRegistry,
    run_groups,
)
from qndk.network import ConnectionSpec, Network, NodeSpec, Topology
from qndk.qstate import QuantumState


def two_node_network(latency="auto", length_km=0.0, attenuation=0.2):
    topology = Topology(
        [NodeSpec("A"), NodeSpec("B")],
        [ConnectionSpec("C1", "A", "B", length_km, attenuation, 0.0, latency)],
    )
    return Network(topology, QuantumState())


def binding(node, role, instance=None, params=None):
    return RoleBinding(node, role, params or {}, instance or f"{node}.{role}")


def execute(registry, network, groups, seed=1, max_sim_time=None):
    queue = EventQueue()
    results = run_groups(
        groups, registry=registry, network=network, queue=queue, seed=seed,
        max_sim_time=max_sim_time,
    )
    return results, queue


def test_register_duplicate_rejected():
    registry = RoleRegistry()
    registry.register("noop", lambda ctx, params: iter(()))
    with pytest.raises(DuplicateRoleError):
        registry.register("noop", lambda ctx, params: iter(()))


def test_empty_group_list():
    network = two_node_network()
    results, queue = execute(RoleRegistry(), network, [])
    assert results == []
    assert queue.now == 0.0


def test_two_noop_roles_complete():
    registry = RoleRegistry()

    def noop(ctx, params):
        ctx.metric("done", 1)
        return
        yield  # makes this a generator

    registry.register("noop", noop)
    network = two_node_network()
    group = ProtocolGroup("g", ((binding("A", "noop", "i1"), binding("B", "noop", "i2")),))
    results, _ = execute(registry, network, [group])
    assert [r.status for r in results] == ["completed", "completed"]
    assert [r.instance_id for r in results] == ["i1", "i2"]


def test_classical_zero_latency_same_time():
    registry = RoleRegistry()
    record = {}

    def sender(ctx, params):
        ctx.send_classical("B", b"ping")
        record["sent_at"] = ctx.now
        return
        yield

    def receiver(ctx, params):
        msg = yield ctx.receive_classical("A")
        record["got"] = msg
        record["got_at"] = ctx.now

    registry.register("sender", sender)
    registry.register("receiver", receiver)
    network = two_node_network(latency="auto", length_km=0.0)
    group = ProtocolGroup("g", ((binding("A", "sender"), binding("B", "receiver")),))
    results, _ = execute(registry, network, [group])
    assert all(r.status == "completed" for r in results)
    assert record["got"] == b"ping"
    assert record["got_at"] == record["sent_at"]


def test_classical_latency_adds_delay():
    registry = RoleRegistry()
    record = {}

    def sender(ctx, params):
        record["sent_at"] = ctx.now
        ctx.send_classical("B", b"x")
        return
        yield

    def receiver(ctx, params):
        yield ctx.receive_classical("A")
        record["got_at"] = ctx.now

    registry.register("sender", sender)
    registry.register("receiver", receiver)
    network = two_node_network(latency=1e-3)
    group = ProtocolGroup("g", ((binding("A", "sender"), binding("B", "receiver")),))
    execute(registry, network, [group])
    assert record["got_at"] == pytest.approx(record["sent_at"] + 1e-3)


def test_classical_messages_in_order():
    registry = RoleRegistry()
    got = []

    def sender(ctx, params):
        for i in range(5):
            ctx.send_classical("B", bytes([i]))
        return
        yield

    def receiver(ctx, params):
        for _ in range(5):
            msg = yield ctx.receive_classical("A")
            got.append(msg[0])

    registry.register("sender", sender)
    registry.register("receiver", receiver)
    group = ProtocolGroup("g", ((binding("A", "sender"), binding("B", "receiver")),))
    execute(registry, two_node_network(), [group])
    assert got == [0, 1, 2, 3, 4]


def test_send_to_unconnected_node_fails_role():
    registry = RoleRegistry()

    def sender(ctx, params):
        ctx.send_classical("Z", b"nope")
        return
        yield

    registry.register("sender", sender)
    group = ProtocolGroup("g", ((binding("A", "sender"),),))
    results, _ = execute(registry, two_node_network(), [group])
    assert results[0].status == "failed"
    assert "no connection" in results[0].error.lower()


def test_qubit_transfer_preserves_state():
    registry = RoleRegistry()
    outcomes = []

    def sender(ctx, params):
        q = ctx.allocate_qubit(1)
        ctx.send_qubit("B", q)
        return
        yield

    def receiver(ctx, params):
        arrival = yield ctx.receive_qubit("A")
        assert not arrival.lost
        outcomes.append(ctx.measure(arrival.qubit, "Z"))

    registry.register("sender", sender)
    registry.register("receiver", receiver)
    group = ProtocolGroup("g", ((binding("A", "sender"), binding("B", "receiver")),))
    results, _ = execute(registry, two_node_network(attenuation=0.0), [group])
    assert all(r.status == "completed" for r in results)
    assert outcomes == [1]


def test_loss_notifications_match_destroyed_pulses():
    registry = RoleRegistry()
    tally = {"sent_lost": 0, "notified_lost": 0, "delivered": 0}

    def sender(ctx, params):
        for _ in range(2000):
            q = ctx.allocate_qubit(0)
            ctx.send_qubit("B", q)
            if not q.alive:
                tally["sent_lost"] += 1
        return
        yield

    def receiver(ctx, params):
        for _ in range(2000):
            arrival = yield ctx.receive_qubit("A")
            if arrival.lost:
                tally["notified_lost"] += 1
            else:
                tally["delivered"] += 1
                ctx.discard(arrival.qubit)

    registry.register("sender", sender)
    registry.register("receiver", receiver)
    group = ProtocolGroup("g", ((binding("A", "sender"), binding("B", "receiver")),))
    execute(registry, two_node_network(length_km=50.0, attenuation=0.2), [group])
    assert tally["notified_lost"] == tally["sent_lost"] > 0
    assert tally["delivered"] + tally["notified_lost"] == 2000


def test_blackboard_crosses_stages_and_groups():
    registry = RoleRegistry()
    seen = {}

    def writer(ctx, params):
        ctx.blackboard["token"] = "stage-one"
        return
        yield

    def reader(ctx, params):
        seen[ctx.instance_id] = ctx.blackboard.get("token")
        return
        yield

    registry.register("writer", writer)
    registry.register("reader", reader)
    groups = [
        ProtocolGroup("g1", ((binding("A", "writer"),), (binding("A", "reader", "r-stage"),))),
        ProtocolGroup("g2", ((binding("A", "reader", "r-group"),),)),
    ]
    results, _ = execute(registry, two_node_network(), groups)
    assert all(r.status == "completed" for r in results)
    assert seen == {"r-stage": "stage-one", "r-group": "stage-one"}


def test_stage_barrier_timestamps():
    registry = RoleRegistry()

    def slow(ctx, params):
        yield ctx.wait(2.0)

    def fast(ctx, params):
        yield ctx.wait(0.5)

    registry.register("slow", slow)
    registry.register("fast", fast)
    groups = [
        ProtocolGroup(
            "g",
            (
                (binding("A", "slow", "s1"), binding("B", "fast", "f1")),
                (binding("A", "fast", "f2"), binding("B", "slow", "s2")),
            ),
        )
    ]
    results, _ = execute(registry, two_node_network(), groups)
    stage1 = [r for r in results if r.instance_id in ("s1", "f1")]
    stage2 = [r for r in results if r.instance_id in ("f2", "s2")]
    assert max(r.finished_at for r in stage1) <= min(r.started_at for r in stage2)


def test_failure_does_not_stop_siblings_or_later_stages():
    registry = RoleRegistry()
    ran = []

    def bad(ctx, params):
        raise RuntimeError("intentional")
        yield

    def good(ctx, params):
        yield ctx.wait(1.0)
        ran.append(ctx.instance_id)

    registry.register("bad", bad)
    registry.register("good", good)
    groups = [
        ProtocolGroup(
            "g",
            (
                (binding("A", "bad", "bad1"), binding("B", "good", "good1")),
                (binding("A", "good", "good2"),),
            ),
        )
    ]
    results, _ = execute(registry, two_node_network(), groups)
    by_id = {r.instance_id: r for r in results}
    assert by_id["bad1"].status == "failed"
    assert "intentional" in by_id["bad1"].error
    assert by_id["good1"].status == "completed"
    assert by_id["good2"].status == "completed"
    assert ran == ["good1", "good2"]


def test_deadlock_detector_fires_on_mutual_receive():
    registry = RoleRegistry()

    def stuck(ctx, params):
        peer = "B" if ctx.node_id == "A" else "A"
        yield ctx.receive_classical(peer)

    registry.register("stuck", stuck)
    group = ProtocolGroup("g", ((binding("A", "stuck", "x"), binding("B", "stuck", "y")),))
    results, _ = execute(registry, two_node_network(), [group])
    assert all(r.status == "failed" for r in results)
    assert all("deadlock" in r.error for r in results)
    assert "blocked on receive_classical" in results[0].error


def test_normal_exchange_never_deadlocks():
    registry = RoleRegistry()

    def ping(ctx, params):
        ctx.send_classical("B", b"ping")
        yield ctx.receive_classical("B")

    def pong(ctx, params):
        yield ctx.receive_classical("A")
        ctx.send_classical("A", b"pong")

    registry.register("ping", ping)
    registry.register("pong", pong)
    group = ProtocolGroup("g", ((binding("A", "ping"), binding("B", "pong")),))
    results, _ = execute(registry, two_node_network(), [group])
    assert all(r.status == "completed" for r in results)


def test_rng_isolated_from_sibling_order():
    draws = {}

    def drawer(ctx, params):
        draws.setdefault(ctx.instance_id, []).append([ctx.rng.random() for _ in range(5)])
        return
        yield

    for order in (("i-a", "i-b"), ("i-b", "i-a")):
        registry = RoleRegistry()
        registry.register("drawer", drawer)
        group = ProtocolGroup(
            "g", ((binding("A", "drawer", order[0]), binding("B", "drawer", order[1])),)
        )
        execute(registry, two_node_network(), [group], seed=77)
    assert draws["i-a"][0] == draws["i-a"][1]
    assert draws["i-b"][0] == draws["i-b"][1]
    assert draws["i-a"][0] != draws["i-b"][0]


def test_max_sim_time_fails_overrunning_roles():
    registry = RoleRegistry()

    def sleeper(ctx, params):
        yield ctx.wait(100.0)

    registry.register("sleeper", sleeper)
    group = ProtocolGroup("g", ((binding("A", "sleeper"),),))
    results, _ = execute(registry, two_node_network(), [group], max_sim_time=1.0)
    assert results[0].status == "failed"
    assert "time limit" in results[0].error


def test_abort_maps_to_aborted_status():
    registry = RoleRegistry()

    def quitter(ctx, params):
        ctx.abort("threshold exceeded")
        yield

    registry.register("quitter", quitter)
    group = ProtocolGroup("g", ((binding("A", "quitter"),),))
    results, _ = execute(registry, two_node_network(), [group])
    assert results[0].status == "aborted"
    assert results[0].error == "threshold exceeded"


def test_single_peer_helper():
    registry = RoleRegistry()
    seen = {}

    def who(ctx, params):
        seen[ctx.node_id] = ctx.single_peer()
        return
        yield

    registry.register("who", who)
    group = ProtocolGroup("g", ((binding("A", "who"),),))
    execute(registry, two_node_network(), [group])
    assert seen == {"A": "B"}


def test_deadlock_document_end_to_end():
    from qndk.protocols import default_registry
    from qndk.sample_documents import mutual_deadlock_document
    from qndk.document import compile_document
    from qndk.runner import execute_single_run

    registry = default_registry()
    plan = compile_document(mutual_deadlock_document(), registry)
    run = execute_single_run(plan, registry, seed=1)
    assert [r["status"] for r in run["results"]] == ["failed", "failed"]
    assert all("deadlock" in r["error"] for r in run["results"])


def test_results_deterministic_for_seed():
    from qndk.protocols import default_registry
    from qndk.sample_documents import two_node_bb84_cascade
    from qndk.document import compile_document
    from qndk.runner import execute_single_run

    registry = default_registry()
    plan = compile_document(two_node_bb84_cascade(num_pulses=300), registry)
    a = execute_single_run(plan, registry, seed=5)
    b = execute_single_run(plan, registry, seed=5)
    c = execute_single_run(plan, registry, seed=6)
    assert a == b
    assert a != c
