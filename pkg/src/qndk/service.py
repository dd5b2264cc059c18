"""Job-execution service: submit documents, run them, persist experiments.

HTTP/1.1 + JSON over the stdlib threading server; no web framework, no
database, so a deployment is one process and one directory. Endpoints live
under /api/v1:

    POST /simulations                submit document bytes -> 202 {job_id}
    GET  /jobs/{id}                  job record
    GET  /jobs/{id}/results          run report (409 until terminal)
    GET  /experiments?limit&offset   terminal jobs, newest first
    GET  /experiments/{id}/download  zip bundle (document + plan + report)
    GET  /health                     {status, version, queue_depth}
    GET  /roles                      registered role parameter schemas

Jobs move strictly queued -> running -> succeeded | failed; finished jobs
are immutable. A worker pool executes jobs concurrently; each simulation
run owns all of its state, so workers never share anything mutable.
Responses carry permissive CORS headers for the browser client.
"""

from __future__ import annotations

import base64
import hashlib
import io
import json
import logging
import queue
import re
import threading
import time
import uuid
import zipfile
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Optional
from urllib.parse import parse_qs, urlparse

from . import __version__
from .canonical import canonical_bytes
from .document import compile_document, export_document, export_plan, import_document, validate
from .errors import DocumentError, QndkError
from .framework import RoleRegistry
from .protocols import default_registry
from .runner import run_plan
from .storage import ExperimentStore

log = logging.getLogger("qndk.service")

MAX_BODY_BYTES = 5 * 1024 * 1024
DEFAULT_PORT = 8080
DEFAULT_DATA_DIR = "./qndk-data"

TERMINAL = ("succeeded", "failed")


class ServiceError(QndkError):
    def __init__(self, status: int, code: str, message: str, details=None):
        super().__init__(message)
        self.status = status
        self.code = code
        self.details = details if details is not None else []


class JobService:
    """Owns job state, the worker pool, and the experiment store."""

    def __init__(self, data_dir=DEFAULT_DATA_DIR, registry: Optional[RoleRegistry] = None,
                 workers: Optional[int] = None):
        self.registry = registry or default_registry()
        self.store = ExperimentStore(data_dir)
        self._lock = threading.Lock()
        self._jobs: dict[str, dict] = {}
        self._queue: queue.Queue = queue.Queue()
        self._submit_counter = 0
        self._workers: list[threading.Thread] = []
        self._stopping = threading.Event()
        self._worker_count = workers or os_cpu_count()

        requeue = self.store.recover()
        for meta in self.store.all_metas():
            self._jobs[meta["job_id"]] = meta
            self._submit_counter = max(self._submit_counter, meta.get("submitted_seq", 0))
        for job_id in requeue:
            self._queue.put(job_id)

    # -- lifecycle ---------------------------------------------------------

    def start(self):
        for i in range(self._worker_count):
            t = threading.Thread(target=self._worker_loop, name=f"qndk-worker-{i}", daemon=True)
            t.start()
            self._workers.append(t)

    def stop(self):
        self._stopping.set()
        for _ in self._workers:
            self._queue.put(None)
        for t in self._workers:
            t.join(timeout=10)

    @property
    def queue_depth(self) -> int:
        with self._lock:
            return sum(1 for m in self._jobs.values() if m["status"] in ("queued", "running"))

    # -- job operations ------------------------------------------------------

    def submit(self, body: bytes) -> str:
        try:
            doc = import_document(body)
        except DocumentError as exc:
            raise ServiceError(422, "E_VALIDATION", "document could not be imported",
                               [e.to_json() for e in exc.errors]) from exc
        errors = validate(doc, self.registry)
        if errors:
            raise ServiceError(422, "E_VALIDATION", "document failed validation",
                               [e.to_json() for e in errors])
        canonical = export_document(doc)
        job_id = uuid.uuid4().hex
        with self._lock:
            self._submit_counter += 1
            meta = {
                "job_id": job_id,
                "document_hash": hashlib.sha256(canonical).hexdigest(),
                "name": doc.get("name", ""),
                "status": "queued",
                "submitted_at": time.time(),
                "submitted_seq": self._submit_counter,
                "started_at": None,
                "finished_at": None,
                "seeds": [],
                "error": None,
            }
            self.store.create(job_id, canonical, meta)
            self._jobs[job_id] = meta
        self._queue.put(job_id)
        return job_id

    def job_record(self, job_id: str) -> dict:
        with self._lock:
            meta = self._jobs.get(job_id)
            if meta is None:
                raise ServiceError(404, "E_NOT_FOUND", f"no job {job_id!r}")
            return dict(meta)

    def results(self, job_id: str) -> dict:
        meta = self.job_record(job_id)
        if meta["status"] not in TERMINAL:
            raise ServiceError(409, "E_NOT_TERMINAL",
                               f"job {job_id} is {meta['status']}; results are not ready")
        if meta["status"] == "failed":
            return {"status": "failed", "job_id": job_id, "error": meta["error"]}
        report = self.store.read_file(job_id, "report.json")
        return json.loads(report.decode("utf-8"))

    def experiments(self, limit: int = 50, offset: int = 0) -> dict:
        with self._lock:
            terminal = [dict(m) for m in self._jobs.values() if m["status"] in TERMINAL]
        terminal.sort(key=lambda m: (-m["submitted_at"], -m["submitted_seq"]))
        window = terminal[offset:offset + limit]
        return {
            "total": len(terminal),
            "experiments": [
                {
                    "experiment_id": m["job_id"],
                    "name": m["name"],
                    "status": m["status"],
                    "submitted_at": m["submitted_at"],
                    "finished_at": m["finished_at"],
                    "document_hash": m["document_hash"],
                    "seeds": m["seeds"],
                    "error": m["error"],
                }
                for m in window
            ],
        }

    def artifact(self, job_id: str) -> bytes:
        meta = self.job_record(job_id)
        if meta["status"] not in TERMINAL:
            raise ServiceError(409, "E_NOT_TERMINAL", f"job {job_id} is not finished")
        buffer = io.BytesIO()
        with zipfile.ZipFile(buffer, "w", zipfile.ZIP_DEFLATED) as bundle:
            def add(name, data):
                info = zipfile.ZipInfo(name, date_time=(1980, 1, 1, 0, 0, 0))
                bundle.writestr(info, data)

            add("document.qnsim.json", self.store.read_document(job_id))
            add("meta.json", json.dumps(meta, sort_keys=True, indent=1))
            plan = self.store.read_file(job_id, "plan.qnplan.json")
            if plan is not None:
                add("plan.qnplan.json", plan)
            report = self.store.read_file(job_id, "report.json")
            if report is not None:
                add("report.json", report)
        return buffer.getvalue()

    def role_schemas(self) -> dict:
        return {"roles": self.registry.schemas()}

    # -- worker pool -----------------------------------------------------------

    def _worker_loop(self):
        while not self._stopping.is_set():
            job_id = self._queue.get()
            if job_id is None:
                return
            try:
                self._execute(job_id)
            except Exception:
                log.exception("worker crashed on job %s", job_id)

    def _transition(self, job_id: str, **changes):
        with self._lock:
            meta = self._jobs[job_id]
            meta.update(changes)
            self.store.write_meta(job_id, meta)

    def _execute(self, job_id: str):
        self._transition(job_id, status="running", started_at=time.time())
        try:
            doc = import_document(self.store.read_document(job_id))
            plan = compile_document(doc, self.registry)
            self.store.write_plan(job_id, export_plan(plan))
            report = run_plan(plan, self.registry)
            self.store.write_report(job_id, canonical_bytes(report))
            self._transition(job_id, status="succeeded", finished_at=time.time(),
                             seeds=report["seeds"])
        except Exception as exc:
            log.warning("job %s failed: %s", job_id, exc)
            self._transition(job_id, status="failed", finished_at=time.time(), error=str(exc))


def os_cpu_count() -> int:
    import os

    return os.cpu_count() or 2


# -- HTTP layer ---------------------------------------------------------------------


_ROUTES = [
    ("POST", re.compile(r"^/api/v1/simulations$"), "submit"),
    ("GET", re.compile(r"^/api/v1/jobs/([0-9a-f]+)$"), "job"),
    ("GET", re.compile(r"^/api/v1/jobs/([0-9a-f]+)/results$"), "results"),
    ("GET", re.compile(r"^/api/v1/experiments$"), "experiments"),
    ("GET", re.compile(r"^/api/v1/experiments/([0-9a-f]+)/download$"), "download"),
    ("GET", re.compile(r"^/api/v1/health$"), "health"),
    ("GET", re.compile(r"^/api/v1/roles$"), "roles"),
]


class _Handler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    service: JobService = None  # injected by make_server

    # -- plumbing -----------------------------------------------------------

    def log_message(self, fmt, *args):
        log.debug("%s " + fmt, self.address_string(), *args)

    def _send(self, status: int, body: bytes, content_type="application/json",
              extra_headers=()):
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        for name, value in extra_headers:
            self.send_header(name, value)
        self.end_headers()
        self.wfile.write(body)

    def _send_json(self, status: int, payload, extra_headers=()):
        self._send(status, canonical_bytes(payload), extra_headers=extra_headers)

    def _send_error_envelope(self, status, code, message, details=None):
        self._send_json(status, {"code": code, "message": message, "details": details or []})

    def do_OPTIONS(self):
        self.send_response(204)
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.send_header("Content-Length", "0")
        self.end_headers()

    def do_GET(self):
        self._route("GET")

    def do_POST(self):
        self._route("POST")

    def _route(self, method: str):
        parsed = urlparse(self.path)
        for verb, pattern, name in _ROUTES:
            match = pattern.match(parsed.path)
            if match:
                if verb != method:
                    self._send_error_envelope(405, "E_METHOD", f"{method} not allowed here")
                    return
                try:
                    getattr(self, f"_handle_{name}")(match, parse_qs(parsed.query))
                except ServiceError as exc:
                    self._send_error_envelope(exc.status, exc.code, str(exc), exc.details)
                except Exception as exc:  # pragma: no cover - defensive
                    log.exception("handler error")
                    self._send_error_envelope(500, "E_INTERNAL", str(exc))
                return
        self._send_error_envelope(404, "E_NOT_FOUND", f"no route {parsed.path}")

    # -- handlers ------------------------------------------------------------

    def _handle_submit(self, match, query):
        length = int(self.headers.get("Content-Length", 0))
        if length > MAX_BODY_BYTES:
            self._send_error_envelope(413, "E_TOO_LARGE",
                                      f"body exceeds {MAX_BODY_BYTES} bytes")
            self.close_connection = True
            return
        body = self.rfile.read(length)
        job_id = self.service.submit(body)
        self._send_json(202, {"job_id": job_id})

    def _handle_job(self, match, query):
        self._send_json(200, self.service.job_record(match.group(1)))

    def _handle_results(self, match, query):
        self._send_json(200, self.service.results(match.group(1)))

    def _handle_experiments(self, match, query):
        limit = int(query.get("limit", ["50"])[0])
        offset = int(query.get("offset", ["0"])[0])
        self._send_json(200, self.service.experiments(limit=limit, offset=offset))

    def _handle_download(self, match, query):
        job_id = match.group(1)
        data = self.service.artifact(job_id)
        digest = base64.b64encode(hashlib.sha256(data).digest()).decode("ascii")
        self._send(
            200,
            data,
            content_type="application/zip",
            extra_headers=[
                ("Content-Digest", f"sha-256=:{digest}:"),
                ("Content-Disposition", f'attachment; filename="experiment-{job_id}.zip"'),
            ],
        )

    def _handle_health(self, match, query):
        self._send_json(200, {
            "status": "ok",
            "version": __version__,
            "queue_depth": self.service.queue_depth,
        })

    def _handle_roles(self, match, query):
        self._send_json(200, self.service.role_schemas())


def make_server(service: JobService, host: str = "127.0.0.1", port: int = DEFAULT_PORT):
    """ThreadingHTTPServer bound to host:port, serving the given JobService."""
    handler = type("BoundHandler", (_Handler,), {"service": service})
    return ThreadingHTTPServer((host, port), handler)


def serve(data_dir=DEFAULT_DATA_DIR, host="127.0.0.1", port=DEFAULT_PORT,
          workers: Optional[int] = None):
    """Blocking entry point used by the CLI."""
    service = JobService(data_dir=data_dir, workers=workers)
    service.start()
    server = make_server(service, host, port)
    log.info("serving on %s:%s, data dir %s", host, port, data_dir)
    try:
        server.serve_forever()
    finally:
        server.server_close()
        service.stop()
