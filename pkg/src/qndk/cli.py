"""qndk command line: validate, compile, run, export, import, serve.

Exit codes: 0 success, 1 runtime failure, 2 usage or validation error.
Reports go to stdout unless --out is given; machine-readable errors go to
stderr as JSON lines; human logs stay on stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import __version__
from .canonical import canonical_bytes
from .document import (
    compile_document,
    export_document,
    export_plan,
    import_document,
    validate,
)
from .errors import DocumentError, QndkError
from .protocols import default_registry
from .runner import run_plan
from .service import DEFAULT_DATA_DIR, DEFAULT_PORT, serve

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2


def _error_line(code: str, message: str, details=None):
    sys.stderr.write(json.dumps({"code": code, "message": message,
                                 "details": details or []}) + "\n")


def _emit_doc_errors(errors):
    for e in errors:
        _error_line(e.code, e.message, [{"path": e.path}])


def _read_document(path: str):
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        _error_line("E_IO", f"cannot read {path}: {exc}")
        return None
    try:
        return import_document(data)
    except DocumentError as exc:
        _emit_doc_errors(exc.errors)
        return None


def _write_output(data: bytes, out: str | None):
    if out:
        Path(out).write_bytes(data)
    else:
        sys.stdout.buffer.write(data)


def cmd_validate(args) -> int:
    doc = _read_document(args.file)
    if doc is None:
        return EXIT_USAGE
    errors = validate(doc, default_registry())
    if errors:
        _emit_doc_errors(errors)
        return EXIT_USAGE
    return EXIT_OK


def cmd_compile(args) -> int:
    doc = _read_document(args.file)
    if doc is None:
        return EXIT_USAGE
    try:
        plan = compile_document(doc, default_registry())
    except DocumentError as exc:
        _emit_doc_errors(exc.errors)
        return EXIT_USAGE
    except QndkError as exc:
        _error_line("E_COMPILE", str(exc))
        return EXIT_USAGE
    _write_output(export_plan(plan), args.out)
    return EXIT_OK


def cmd_run(args) -> int:
    doc = _read_document(args.file)
    if doc is None:
        return EXIT_USAGE
    if args.runs is not None:
        doc.setdefault("run_config", {})["runs"] = args.runs
    registry = default_registry()
    try:
        plan = compile_document(doc, registry)
    except DocumentError as exc:
        _emit_doc_errors(exc.errors)
        return EXIT_USAGE
    except QndkError as exc:
        _error_line("E_COMPILE", str(exc))
        return EXIT_USAGE
    try:
        report = run_plan(plan, registry, seed_override=args.seed)
    except Exception as exc:
        _error_line("E_RUN", str(exc))
        return EXIT_RUNTIME
    _write_output(canonical_bytes(report), args.out)
    return EXIT_OK


def cmd_export(args) -> int:
    doc = _read_document(args.file)
    if doc is None:
        return EXIT_USAGE
    errors = validate(doc, default_registry())
    if errors:
        _emit_doc_errors(errors)
        return EXIT_USAGE
    _write_output(export_document(doc), args.out)
    return EXIT_OK


def cmd_import(args) -> int:
    # imports a shared bundle and re-emits it in canonical form
    return cmd_export(args)


def cmd_serve(args) -> int:
    logging.basicConfig(level=logging.INFO, stream=sys.stderr,
                        format="%(asctime)s %(name)s %(levelname)s %(message)s")
    data_dir = args.data_dir or os.environ.get("QNDK_DATA_DIR") or DEFAULT_DATA_DIR
    try:
        serve(data_dir=data_dir, host=args.host, port=args.port, workers=args.workers)
    except KeyboardInterrupt:
        return EXIT_OK
    except OSError as exc:
        _error_line("E_SERVE", str(exc))
        return EXIT_RUNTIME
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qndk",
        description="Quantum network simulation: documents, runs, and the job service.",
    )
    parser.add_argument("--version", action="version", version=f"qndk {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a simulation document")
    p.add_argument("file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("compile", help="compile a document into a runnable plan")
    p.add_argument("file")
    p.add_argument("-o", "--out", help="plan output path (stdout when omitted)")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("run", help="compile and execute a document")
    p.add_argument("file")
    p.add_argument("--seed", type=int, help="override the document seed")
    p.add_argument("--runs", type=int, help="override the configured run count")
    p.add_argument("--out", help="report output path (stdout when omitted)")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("export", help="emit the canonical bytes of a document")
    p.add_argument("file")
    p.add_argument("-o", "--out", help="output path (stdout when omitted)")
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("import", help="import a shared document bundle")
    p.add_argument("file")
    p.add_argument("-o", "--out", help="output path (stdout when omitted)")
    p.set_defaults(func=cmd_import)

    p = sub.add_parser("serve", help="start the job-execution service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=DEFAULT_PORT)
    p.add_argument("--data-dir", help="experiment storage directory "
                                       f"(default $QNDK_DATA_DIR or {DEFAULT_DATA_DIR})")
    p.add_argument("--workers", type=int, help="worker pool size (default: cpu count)")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
