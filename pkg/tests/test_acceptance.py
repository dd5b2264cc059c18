"""Acceptance suite: one test per release criterion, at the stated tolerances.

Run with `pytest tests/test_acceptance.py -v -s` to get one PASS line per
criterion. Everything here is desk-scale and uses only the primary
component (library + CLI + job service); no frontend required.
"""

import math
import threading
import time

import pytest
import requests

from conftest import golden_bytes, run_document
from doc_generator import random_document
from qndk.cli import main as cli_main
from qndk.canonical import loads
from qndk.document import export_document, import_document, validate
from qndk.errors import DocumentError
from qndk.events import EventQueue
from qndk.network import ConnectionSpec, NodeSpec, QuantumMemory, transmit_qubit
from qndk.protocols.cascade import reconcile_offline
from qndk.qstate import QuantumState
from qndk.rng import RandomStream
from qndk.runner import strip_wall_clock
from qndk.sample_documents import two_node_bb84_cascade
from qndk.service import JobService, make_server

SEEDS = list(range(100, 120))  # 20 seeds


def announce(name):
    print(f"\nACCEPTANCE PASS: {name}")


# -- 1. ideal BB84 ----------------------------------------------------------------


def test_ideal_bb84_twenty_seeds(registry):
    doc = import_document(golden_bytes())
    for seed in SEEDS:
        t0 = time.monotonic()
        _, by_role = run_document(doc, registry, seed=seed)
        elapsed = time.monotonic() - t0
        sender = by_role[("N1", "bb84_sender")]
        receiver = by_role[("N2", "bb84_receiver")]
        assert sender["metrics"]["qber_estimate"] == 0.0, f"seed {seed}"
        assert receiver["metrics"]["qber_estimate"] == 0.0, f"seed {seed}"
        assert 0.48 <= sender["metrics"]["sift_fraction"] <= 0.52, f"seed {seed}"
        assert sender["outputs"]["sifted_key"] == receiver["outputs"]["sifted_key"], f"seed {seed}"
        assert elapsed < 5.0, f"run took {elapsed:.2f}s at seed {seed}"
    announce("ideal BB84: zero QBER, sifted fraction in [0.48, 0.52], equal keys, <5s/run")


# -- 2. noisy BB84 ----------------------------------------------------------------


def test_noisy_bb84_twenty_seeds(registry):
    analytic = 2 * 0.1 / 3
    doc = two_node_bb84_cascade(num_pulses=10_000, noise_depolarizing_p=0.1)
    doc["protocol_groups"] = doc["protocol_groups"][:1]
    for binding in doc["protocol_groups"][0]["stages"][0]:
        binding["params"]["qber_abort_threshold"] = 1.0
    for seed in SEEDS:
        _, by_role = run_document(doc, registry, seed=seed)
        sender = by_role[("N1", "bb84_sender")]
        estimate = sender["metrics"]["qber_estimate"]
        n_sample = sender["metrics"]["sample_count"]
        se = math.sqrt(analytic * (1 - analytic) / n_sample)
        assert abs(estimate - analytic) <= 4 * se, (
            f"seed {seed}: estimate {estimate:.4f} vs {analytic:.4f} (4se={4 * se:.4f})"
        )
    announce("noisy BB84: QBER estimate within 4 SE of 2p/3 for 20 seeds")


# -- 3. loss law -------------------------------------------------------------------


def test_loss_law_three_lengths():
    shots = 10_000
    for length, expected in ((0.0, 1.0), (10.0, 0.631), (50.0, 0.1)):
        conn = ConnectionSpec("C", "A", "B", length_km=length, attenuation_db_per_km=0.2)
        state = QuantumState()
        rng = RandomStream(2000 + int(length))
        queue = EventQueue()
        delivered = 0
        for _ in range(shots):
            q = state.allocate(0)
            survived = transmit_qubit(conn, q, state, rng, queue, lambda _: None)
            delivered += survived
            if survived:
                state.discard(q, rng)
        queue.run_until()
        rate = delivered / shots
        se = math.sqrt(expected * (1 - expected) / shots)
        assert abs(rate - expected) <= max(4 * se, 1e-12), (
            f"L={length}: rate {rate:.4f} vs {expected}"
        )
    announce("loss law: delivery within 4 SE of {1, 0.631, 0.1} at 0, 10, 50 km")


# -- 4. memory decoherence ------------------------------------------------------------


def test_memory_decoherence_survival():
    expected = math.exp(-1.0)
    shots = 10_000
    node = NodeSpec("M", memory_slots=1, t1=1.0, t2=1.0)
    rng = RandomStream(31415)
    survived = 0
    for _ in range(shots):
        state = QuantumState()
        memory = QuantumMemory(node, state)
        q = state.allocate(1)
        memory.store(q, now=0.0)
        out = memory.retrieve(q, now=node.t1, rng=rng)
        survived += state.measure(out, "Z", rng) == 1
    rate = survived / shots
    se = math.sqrt(expected * (1 - expected) / shots)
    assert abs(rate - expected) <= 4 * se, f"survival {rate:.4f} vs e^-1 {expected:.4f}"
    announce("memory decoherence: survival after T1 within 4 SE of e^-1")


# -- 5. cascade --------------------------------------------------------------------


def test_cascade_hundred_trials():
    healed = 0
    for seed in range(100):
        rng = RandomStream(seed)
        n = 10_000
        sender = [rng.bit() for _ in range(n)]
        receiver = list(sender)
        for i in rng.permutation(n)[:500]:  # exactly 5% mismatch
            receiver[i] ^= 1
        corrected, leaked, corrections = reconcile_offline(
            receiver, sender, 0.05, passes=4, seed=seed
        )
        healed += corrected == sender
        assert leaked >= corrections
    assert healed >= 90, f"only {healed}/100 trials converged"
    announce(f"cascade: {healed}/100 trials identical after 4 passes (need >= 90)")


def test_cascade_eight_bit_fixture():
    sender = [1, 0, 1, 1, 0, 0, 1, 0]
    receiver = list(sender)
    receiver[3] ^= 1
    corrected, leaked, corrections = reconcile_offline(
        receiver, sender, 0.01, passes=1, coefficient=1.0
    )
    assert corrected == sender
    assert corrections == 1
    assert leaked == 4, f"disclosed {leaked} parities, hand trace says 4"
    announce("cascade: 8-bit single-error fixture discloses exactly 4 parities")


# -- 6. protocol-group barrier ---------------------------------------------------------


def test_stage_barrier_twenty_seeds(registry):
    doc = two_node_bb84_cascade(num_pulses=500)
    for seed in SEEDS:
        run, _ = run_document(doc, registry, seed=seed)
        results = run["results"]
        bb84 = [r for r in results if r["role"].startswith("bb84")]
        cascade = [r for r in results if r["role"].startswith("cascade")]
        assert len(bb84) == len(cascade) == 2
        assert max(r["finished_at"] for r in bb84) <= min(r["started_at"] for r in cascade), (
            f"seed {seed}: barrier violated"
        )
        assert all(r["status"] == "completed" for r in results)
    announce("protocol groups: stage barrier holds on the demonstration document, 20 seeds")


# -- 7. determinism CLI vs service ------------------------------------------------------


def test_determinism_cli_and_service(registry, tmp_path):
    doc = two_node_bb84_cascade(num_pulses=800, seed=4242)
    doc_path = tmp_path / "doc.qnsim.json"
    doc_path.write_bytes(export_document(doc))

    cli_reports = []
    for i in range(2):
        out = tmp_path / f"cli-{i}.json"
        assert cli_main(["run", str(doc_path), "--seed", "4242", "--out", str(out)]) == 0
        cli_reports.append(loads(out.read_bytes()))

    service = JobService(data_dir=tmp_path / "data", workers=2)
    service.start()
    try:
        ids = [service.submit(export_document(doc)) for _ in range(2)]
        service_reports = []
        for job_id in ids:
            deadline = time.time() + 60
            while service.job_record(job_id)["status"] not in ("succeeded", "failed"):
                assert time.time() < deadline
                time.sleep(0.02)
            assert service.job_record(job_id)["status"] == "succeeded"
            service_reports.append(service.results(job_id))
    finally:
        service.stop()

    reference = strip_wall_clock(cli_reports[0])
    for report in cli_reports[1:] + service_reports:
        assert strip_wall_clock(report) == reference
    announce("determinism: CLI and service reports identical modulo wall-clock")


# -- 8. document round-trip and error codes ----------------------------------------------


def test_round_trip_two_hundred_documents(registry):
    rng = RandomStream(8_080_088)
    for i in range(200):
        doc = random_document(rng)
        assert validate(doc, registry) == [], f"generated doc {i} invalid"
        once = export_document(doc)
        twice = export_document(import_document(once))
        assert once == twice, f"doc {i} not canonical-stable"
    announce("round-trip: export-import-export byte identity on 200 random documents")


def test_every_validation_code_has_a_fixture(registry):
    def broken(mutate):
        doc = two_node_bb84_cascade()
        mutate(doc)
        return doc

    fixtures = {
        "E_SCHEMA_VERSION": broken(lambda d: d.update(schema_version="99")),
        "E_ENGINE_UNKNOWN": broken(lambda d: d.update(engine="netsquid")),
        "E_TOPOLOGY": broken(lambda d: d["topology"]["connections"][0].update(endpoint_b="N9")),
        "E_DUPLICATE_ID": broken(lambda d: d["topology"]["nodes"][1].update(id="N1")),
        "E_NODE_PARAM": broken(lambda d: d["topology"]["nodes"][0].update(t1=1.0, t2=3.0)),
        "E_CONNECTION_PARAM": broken(
            lambda d: d["topology"]["connections"][0].update(length_km=-2)),
        "E_ROLE_UNKNOWN": broken(
            lambda d: d["protocol_groups"][0]["stages"][0][0].update(role="bb85_sender")),
        "E_ROLE_NODE": broken(
            lambda d: d["protocol_groups"][0]["stages"][0][0].update(node="N9")),
        "E_ROLE_PARAM": broken(
            lambda d: d["protocol_groups"][0]["stages"][0][0]["params"].update(num_pulses=-1)),
        "E_RUN_CONFIG": broken(lambda d: d["run_config"].update(runs=0)),
        "E_STRUCTURE": broken(lambda d: d.update(bogus=1)),
    }
    for code, doc in fixtures.items():
        got = {e.code for e in validate(doc, registry)}
        assert code in got, f"{code} not raised (got {got})"

    with pytest.raises(DocumentError) as err:
        import_document(b"not json at all")
    assert err.value.errors[0].code == "E_MALFORMED"
    announce("validation: every error code exercised by a dedicated fixture")


# -- 9. service lifecycle ------------------------------------------------------------------


def test_service_lifecycle_and_error_paths(tmp_path):
    service = JobService(data_dir=tmp_path / "data", workers=2)
    service.start()
    server = make_server(service, "127.0.0.1", 0)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    base = f"http://127.0.0.1:{server.server_address[1]}/api/v1"
    try:
        # full lifecycle with no backward transitions
        body = export_document(two_node_bb84_cascade(num_pulses=2000, seed=77))
        resp = requests.post(f"{base}/simulations", data=body)
        assert resp.status_code == 202
        job_id = resp.json()["job_id"]
        rank = {"queued": 0, "running": 1, "succeeded": 2, "failed": 2}
        seen = []
        while True:
            status = requests.get(f"{base}/jobs/{job_id}").json()["status"]
            seen.append(status)
            if status in ("succeeded", "failed"):
                break
            time.sleep(0.01)
        assert seen[-1] == "succeeded"
        assert [rank[s] for s in seen] == sorted(rank[s] for s in seen)

        # artifact integrity
        import base64
        import hashlib
        import io
        import zipfile

        download = requests.get(f"{base}/experiments/{job_id}/download")
        assert download.status_code == 200
        digest = base64.b64encode(hashlib.sha256(download.content).digest()).decode()
        assert download.headers["Content-Digest"] == f"sha-256=:{digest}:"
        with zipfile.ZipFile(io.BytesIO(download.content)) as z:
            doc_hash = hashlib.sha256(z.read("document.qnsim.json")).hexdigest()
        assert doc_hash == requests.get(f"{base}/jobs/{job_id}").json()["document_hash"]

        # 422
        bad = two_node_bb84_cascade()
        bad["protocol_groups"][0]["stages"][0][0]["role"] = "bb85_sender"
        assert requests.post(f"{base}/simulations", data=export_document(bad)).status_code == 422
        # 404
        assert requests.get(f"{base}/jobs/{'a' * 32}").status_code == 404
        # 409
        slow = export_document(two_node_bb84_cascade(num_pulses=10_000, runs=3, seed=5))
        slow_id = requests.post(f"{base}/simulations", data=slow).json()["job_id"]
        assert requests.get(f"{base}/jobs/{slow_id}/results").status_code == 409
        # 413
        assert requests.post(f"{base}/simulations",
                             data=b"y" * (5 * 1024 * 1024 + 1)).status_code == 413
    finally:
        server.shutdown()
        server.server_close()
        service.stop()
    announce("service lifecycle: forward-only transitions, artifact hash, 422/404/409/413")
