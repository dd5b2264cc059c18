"""Document validation codes, round trips, compilation, and plan execution."""

import copy

import pytest

from conftest import golden_bytes
from doc_generator import random_document
from qndk.document import (
    BackendDescriptor,
    BackendRegistry,
    compile_document,
    document_hash,
    export_document,
    export_plan,
    import_document,
    validate,
)
from qndk.errors import CapabilityError, DocumentError
from qndk.rng import RandomStream
from qndk.runner import run_plan, strip_wall_clock
from qndk.sample_documents import two_node_bb84_cascade


def codes(errors):
    return {e.code for e in errors}


def paths(errors):
    return {e.path for e in errors}


# -- validation ------------------------------------------------------------------


def test_golden_document_is_valid(registry):
    doc = import_document(golden_bytes())
    assert validate(doc, registry) == []


def test_golden_fixture_matches_builder(registry):
    assert golden_bytes() == export_document(two_node_bb84_cascade())


def test_dangling_endpoint_is_topology_error(registry):
    doc = two_node_bb84_cascade()
    doc["topology"]["connections"][0]["endpoint_b"] = "N3"
    errors = validate(doc, registry)
    assert "E_TOPOLOGY" in codes(errors)
    assert "/topology/connections/0/endpoint_b" in paths(errors)


def test_identical_endpoints_rejected(registry):
    doc = two_node_bb84_cascade()
    doc["topology"]["connections"][0]["endpoint_b"] = "N1"
    assert "E_TOPOLOGY" in codes(validate(doc, registry))


def test_duplicate_node_id(registry):
    doc = two_node_bb84_cascade()
    doc["topology"]["nodes"][1]["id"] = "N1"
    errors = validate(doc, registry)
    assert "E_DUPLICATE_ID" in codes(errors)


def test_duplicate_connection_id(registry):
    doc = two_node_bb84_cascade()
    doc["topology"]["connections"].append(dict(doc["topology"]["connections"][0]))
    assert "E_DUPLICATE_ID" in codes(validate(doc, registry))


def test_unknown_role(registry):
    doc = two_node_bb84_cascade()
    doc["protocol_groups"][0]["stages"][0][0]["role"] = "bb85_sender"
    errors = validate(doc, registry)
    assert "E_ROLE_UNKNOWN" in codes(errors)


def test_binding_to_missing_node(registry):
    doc = two_node_bb84_cascade()
    doc["protocol_groups"][0]["stages"][0][0]["node"] = "N9"
    assert "E_ROLE_NODE" in codes(validate(doc, registry))


def test_role_param_out_of_schema(registry):
    doc = two_node_bb84_cascade()
    doc["protocol_groups"][0]["stages"][0][0]["params"] = {"num_pulses": 0}
    assert "E_ROLE_PARAM" in codes(validate(doc, registry))
    doc["protocol_groups"][0]["stages"][0][0]["params"] = {"frobnicate": 3}
    assert "E_ROLE_PARAM" in codes(validate(doc, registry))


def test_node_param_violations(registry):
    doc = two_node_bb84_cascade()
    doc["topology"]["nodes"][0]["t1"] = 1.0
    doc["topology"]["nodes"][0]["t2"] = 2.5
    assert "E_NODE_PARAM" in codes(validate(doc, registry))
    doc = two_node_bb84_cascade()
    doc["topology"]["nodes"][0]["source_fidelity"] = 0.4
    assert "E_NODE_PARAM" in codes(validate(doc, registry))


def test_connection_param_violations(registry):
    doc = two_node_bb84_cascade()
    doc["topology"]["connections"][0]["length_km"] = -1.0
    assert "E_CONNECTION_PARAM" in codes(validate(doc, registry))
    doc = two_node_bb84_cascade()
    doc["topology"]["connections"][0]["noise_depolarizing_p"] = 1.5
    assert "E_CONNECTION_PARAM" in codes(validate(doc, registry))


def test_run_config_violations(registry):
    doc = two_node_bb84_cascade()
    doc["run_config"]["seed"] = -1
    assert "E_RUN_CONFIG" in codes(validate(doc, registry))
    doc = two_node_bb84_cascade()
    doc["run_config"]["runs"] = 0
    assert "E_RUN_CONFIG" in codes(validate(doc, registry))
    doc = two_node_bb84_cascade()
    doc["run_config"]["max_sim_time"] = -5
    assert "E_RUN_CONFIG" in codes(validate(doc, registry))


def test_unknown_engine(registry):
    doc = two_node_bb84_cascade()
    doc["engine"] = "netsquid"
    assert "E_ENGINE_UNKNOWN" in codes(validate(doc, registry))


def test_unknown_schema_version(registry):
    doc = two_node_bb84_cascade()
    doc["schema_version"] = "99"
    assert "E_SCHEMA_VERSION" in codes(validate(doc, registry))


def test_structure_errors(registry):
    assert "E_STRUCTURE" in codes(validate([], registry))
    doc = two_node_bb84_cascade()
    del doc["topology"]
    assert "E_STRUCTURE" in codes(validate(doc, registry))
    doc = two_node_bb84_cascade()
    doc["bogus"] = 1
    assert "E_STRUCTURE" in codes(validate(doc, registry))


def test_extensions_ignored_by_validation(registry):
    doc = two_node_bb84_cascade()
    doc["extensions"] = {"layout": {"N1": {"x": 10, "y": 20}}}
    assert validate(doc, registry) == []


# -- export / import ---------------------------------------------------------------


def test_round_trip_golden_bytes(registry):
    data = golden_bytes()
    doc = import_document(data)
    assert export_document(doc) == data


def test_import_rejects_unknown_version():
    with pytest.raises(DocumentError) as err:
        import_document(b'{"schema_version":"99"}\n')
    assert err.value.errors[0].code == "E_SCHEMA_VERSION"


def test_import_rejects_malformed_bytes():
    with pytest.raises(DocumentError) as err:
        import_document(b"{nope")
    assert err.value.errors[0].code == "E_MALFORMED"


def test_field_order_does_not_matter():
    doc = two_node_bb84_cascade()
    shuffled = dict(reversed(list(doc.items())))
    assert export_document(doc) == export_document(shuffled)


def test_export_import_export_identity_on_random_documents(registry):
    rng = RandomStream(20260808)
    for _ in range(50):
        doc = random_document(rng)
        assert validate(doc, registry) == [], doc
        once = export_document(doc)
        twice = export_document(import_document(once))
        assert once == twice


def test_extensions_survive_round_trip(registry):
    doc = two_node_bb84_cascade()
    doc["extensions"] = {"layout": {"N1": {"x": 12.5, "y": 7.0}}}
    data = export_document(doc)
    back = import_document(data)
    assert back["extensions"] == {"layout": {"N1": {"x": 12.5, "y": 7.0}}}
    assert export_document(back) == data


# -- compile -------------------------------------------------------------------------


def test_compile_fills_documented_defaults(registry):
    doc = two_node_bb84_cascade()
    del doc["topology"]["connections"][0]["attenuation_db_per_km"]
    del doc["topology"]["connections"][0]["noise_depolarizing_p"]
    plan = compile_document(doc, registry)
    conn = plan["topology"]["connections"][0]
    assert conn["attenuation_db_per_km"] == 0.2
    assert conn["noise_depolarizing_p"] == 0.0
    node = plan["topology"]["nodes"][0]
    assert node["memory_slots"] == 8
    assert node["t1"] == 1.0 and node["t2"] == 1.0
    assert node["source_fidelity"] == 1.0
    assert node["emission_frequency"] == 1.0e6
    assert plan["run_config"]["runs"] == 1


def test_compile_resolves_units_and_derived_values(registry):
    doc = two_node_bb84_cascade(length_km=200.0)
    plan = compile_document(doc, registry)
    conn = plan["topology"]["connections"][0]
    assert conn["classical_latency"] == pytest.approx(1.0e-3)
    assert conn["propagation_delay"] == pytest.approx(1.0e-3)
    assert conn["survival_probability"] == pytest.approx(10 ** (-0.2 * 200 / 10))


def test_compile_rejects_invalid_document(registry):
    doc = two_node_bb84_cascade()
    doc["protocol_groups"][0]["stages"][0][0]["role"] = "nope"
    with pytest.raises(DocumentError):
        compile_document(doc, registry)


def test_compile_unknown_engine(registry):
    doc = two_node_bb84_cascade()
    doc["engine"] = "netsquid"
    with pytest.raises(DocumentError) as err:
        compile_document(doc, registry)
    assert any(e.code == "E_ENGINE_UNKNOWN" for e in err.value.errors)


def test_compile_capability_gap_lists_missing(registry):
    backends = BackendRegistry()
    backends.register(BackendDescriptor("native", frozenset({"loss"}), frozenset({"bb84_sender"})))
    doc = two_node_bb84_cascade()
    with pytest.raises(CapabilityError) as err:
        compile_document(doc, registry, backends)
    assert "role:cascade_receiver" in err.value.missing
    assert "role:bb84_receiver" in err.value.missing


def test_compile_deterministic(registry):
    doc = two_node_bb84_cascade()
    a = export_plan(compile_document(doc, registry))
    b = export_plan(compile_document(copy.deepcopy(doc), registry))
    assert a == b


def test_compile_assigns_stable_instance_ids(registry):
    plan = compile_document(two_node_bb84_cascade(), registry)
    ids = [b["instance_id"] for g in plan["protocol_groups"] for s in g["stages"] for b in s]
    assert ids == [
        "g0.s0.b0.N1.bb84_sender",
        "g0.s0.b1.N2.bb84_receiver",
        "g1.s0.b0.N1.cascade_sender",
        "g1.s0.b1.N2.cascade_receiver",
    ]
    assert len({b["rng_key"] for g in plan["protocol_groups"] for s in g["stages"] for b in s}) == 4


# -- run_plan ---------------------------------------------------------------------------


def test_run_plan_seed_sequence(registry):
    doc = two_node_bb84_cascade(num_pulses=50, seed=7, runs=3)
    plan = compile_document(doc, registry)
    report = run_plan(plan, registry)
    assert report["seeds"] == [7, 8, 9]
    assert [r["seed"] for r in report["runs"]] == [7, 8, 9]


def test_run_plan_contains_all_bindings(registry):
    plan = compile_document(two_node_bb84_cascade(num_pulses=200), registry)
    report = run_plan(plan, registry)
    assert len(report["runs"][0]["results"]) == 4
    roles = {r["role"] for r in report["runs"][0]["results"]}
    assert roles == {"bb84_sender", "bb84_receiver", "cascade_sender", "cascade_receiver"}


def test_run_plan_deterministic_modulo_wall_clock(registry):
    plan = compile_document(two_node_bb84_cascade(num_pulses=200), registry)
    a = run_plan(plan, registry)
    b = run_plan(plan, registry)
    assert strip_wall_clock(a) == strip_wall_clock(b)
    assert a["wall_clock"]["duration_s"] >= 0


def test_run_plan_seed_override(registry):
    plan = compile_document(two_node_bb84_cascade(num_pulses=100, seed=1), registry)
    a = run_plan(plan, registry, seed_override=55)
    assert a["seeds"] == [55]


def test_document_hash_is_canonical(registry):
    doc = two_node_bb84_cascade()
    shuffled = dict(reversed(list(doc.items())))
    assert document_hash(doc) == document_hash(shuffled)
