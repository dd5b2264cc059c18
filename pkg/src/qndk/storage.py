"""Experiment persistence: one directory per job plus an append-only index.

Layout under the data dir:

    experiments/<job_id>/document.qnsim.json   submitted document, canonical
    experiments/<job_id>/plan.qnplan.json      compiled plan (terminal jobs)
    experiments/<job_id>/report.json           run report (succeeded jobs)
    experiments/<job_id>/meta.json             job record, rewritten per transition
    index.jsonl                                append-only submission log

No external database: everything is inspectable with a text editor. Meta
writes go through a temp file + rename so a crash never leaves a torn
record. On restart, jobs that were running are marked failed
("interrupted"); queued jobs are handed back for re-execution.
"""

from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Optional


class ExperimentStore:
    def __init__(self, data_dir):
        self.root = Path(data_dir)
        self.experiments_dir = self.root / "experiments"
        self.experiments_dir.mkdir(parents=True, exist_ok=True)
        self.index_path = self.root / "index.jsonl"

    def job_dir(self, job_id: str) -> Path:
        return self.experiments_dir / job_id

    # -- writes -------------------------------------------------------------

    def create(self, job_id: str, document_bytes: bytes, meta: dict):
        d = self.job_dir(job_id)
        d.mkdir(parents=True, exist_ok=False)
        (d / "document.qnsim.json").write_bytes(document_bytes)
        self.write_meta(job_id, meta)
        with open(self.index_path, "a", encoding="utf-8") as f:
            f.write(json.dumps({"job_id": job_id, "submitted_at": meta["submitted_at"]}) + "\n")

    def write_meta(self, job_id: str, meta: dict):
        path = self.job_dir(job_id) / "meta.json"
        tmp = path.with_suffix(".json.tmp")
        tmp.write_text(json.dumps(meta, sort_keys=True, indent=1), encoding="utf-8")
        os.replace(tmp, path)

    def write_plan(self, job_id: str, plan_bytes: bytes):
        (self.job_dir(job_id) / "plan.qnplan.json").write_bytes(plan_bytes)

    def write_report(self, job_id: str, report_bytes: bytes):
        (self.job_dir(job_id) / "report.json").write_bytes(report_bytes)

    # -- reads --------------------------------------------------------------

    def read_meta(self, job_id: str) -> Optional[dict]:
        path = self.job_dir(job_id) / "meta.json"
        if not path.exists():
            return None
        return json.loads(path.read_text(encoding="utf-8"))

    def read_document(self, job_id: str) -> bytes:
        return (self.job_dir(job_id) / "document.qnsim.json").read_bytes()

    def read_file(self, job_id: str, name: str) -> Optional[bytes]:
        path = self.job_dir(job_id) / name
        return path.read_bytes() if path.exists() else None

    def all_metas(self) -> list[dict]:
        metas = []
        for meta_path in sorted(self.experiments_dir.glob("*/meta.json")):
            try:
                metas.append(json.loads(meta_path.read_text(encoding="utf-8")))
            except (OSError, json.JSONDecodeError):
                continue
        return metas

    # -- recovery -------------------------------------------------------------

    def recover(self) -> list[str]:
        """Repair state after an unclean stop; returns queued job ids to re-run."""
        requeue = []
        for meta in self.all_metas():
            if meta["status"] == "running":
                meta["status"] = "failed"
                meta["error"] = "interrupted: service stopped while the job was running"
                meta["finished_at"] = meta.get("started_at") or meta["submitted_at"]
                self.write_meta(meta["job_id"], meta)
            elif meta["status"] == "queued":
                requeue.append(meta["job_id"])
        requeue.sort(key=lambda job_id: self.read_meta(job_id)["submitted_seq"])
        return requeue
