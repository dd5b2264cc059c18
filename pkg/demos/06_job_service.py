"""The cloud-execution path: submit a document to a live service and poll it.

Starts the job service in-process on an ephemeral port, submits the
two-node demonstration, polls the job to completion, lists experiments,
and downloads the result bundle, exactly as the web interface would.
"""

import tempfile
import threading
import time
import urllib.request

from qndk import export_document
from qndk.sample_documents import two_node_bb84_cascade
from qndk.service import JobService, make_server


def get(url):
    with urllib.request.urlopen(url) as resp:
        return resp.read(), dict(resp.headers)


with tempfile.TemporaryDirectory() as data_dir:
    service = JobService(data_dir=data_dir, workers=2)
    service.start()
    server = make_server(service, "127.0.0.1", 0)
    threading.Thread(target=server.serve_forever, daemon=True).start()
    base = f"http://127.0.0.1:{server.server_address[1]}/api/v1"
    print(f"service on {base}, experiments stored in {data_dir}")

    body = export_document(two_node_bb84_cascade(num_pulses=2_000, seed=2026))
    request = urllib.request.Request(f"{base}/simulations", data=body, method="POST")
    with urllib.request.urlopen(request) as resp:
        import json

        job_id = json.loads(resp.read())["job_id"]
        print(f"submitted: job {job_id} ({resp.status})")

    while True:
        record, _ = get(f"{base}/jobs/{job_id}")
        status = json.loads(record)["status"]
        print(f"  poll -> {status}")
        if status in ("succeeded", "failed"):
            break
        time.sleep(0.2)

    report = json.loads(get(f"{base}/jobs/{job_id}/results")[0])
    for result in report["runs"][0]["results"]:
        print(f"  {result['role']:<18} {result['status']:<10} "
              f"key_length={result['metrics'].get('key_length', '-')}")

    experiments = json.loads(get(f"{base}/experiments")[0])
    print(f"experiments listed: {experiments['total']}")

    bundle, headers = get(f"{base}/experiments/{job_id}/download")
    print(f"downloaded artifact: {len(bundle)} bytes, digest {headers['Content-Digest'][:30]}...")

    server.shutdown()
    server.server_close()
    service.stop()
