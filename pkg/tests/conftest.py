"""Shared helpers: run documents end-to-end, locate golden fixtures."""

from pathlib import Path

import pytest

from qndk.document import compile_document
from qndk.protocols import default_registry
from qndk.runner import execute_single_run, run_plan

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def registry():
    return default_registry()


def run_document(doc, registry, seed=None):
    """Compile and execute one run; returns results keyed by (node, role)."""
    plan = compile_document(doc, registry)
    run = execute_single_run(plan, registry, seed if seed is not None else doc["run_config"]["seed"])
    by_role = {(r["node"], r["role"]): r for r in run["results"]}
    return run, by_role


def run_full_report(doc, registry, seed_override=None):
    plan = compile_document(doc, registry)
    return run_plan(plan, registry, seed_override=seed_override)


def golden_bytes() -> bytes:
    return (FIXTURES / "two_node_bb84_cascade.qnsim.json").read_bytes()
