"""Ready-made simulation documents used by tests, demos, and the UI."""

from __future__ import annotations


def two_node_bb84_cascade(
    *,
    num_pulses: int = 10_000,
    length_km: float = 0.0,
    noise_depolarizing_p: float = 0.0,
    seed: int = 42,
    runs: int = 1,
) -> dict:
    """Two quantum nodes running BB84 key distribution then Cascade reconciliation."""
    return {
        "schema_version": "1",
        "name": "two-node-bb84-cascade",
        "engine": "native",
        "topology": {
            "nodes": [
                {"id": "N1", "label": "Alice"},
                {"id": "N2", "label": "Bob"},
            ],
            "connections": [
                {
                    "id": "C1",
                    "endpoint_a": "N1",
                    "endpoint_b": "N2",
                    "length_km": length_km,
                    "attenuation_db_per_km": 0.2,
                    "noise_depolarizing_p": noise_depolarizing_p,
                    "classical_latency": "auto",
                }
            ],
        },
        "protocol_groups": [
            {
                "name": "key-distribution",
                "stages": [
                    [
                        {"node": "N1", "role": "bb84_sender", "params": {"num_pulses": num_pulses}},
                        {"node": "N2", "role": "bb84_receiver", "params": {"num_pulses": num_pulses}},
                    ]
                ],
            },
            {
                "name": "error-correction",
                "stages": [
                    [
                        {"node": "N1", "role": "cascade_sender", "params": {}},
                        {"node": "N2", "role": "cascade_receiver", "params": {}},
                    ]
                ],
            },
        ],
        "run_config": {"seed": seed, "runs": runs, "max_sim_time": None},
    }


def two_node_entanglement(*, num_pairs: int = 1000, length_km: float = 0.0,
                          noise_depolarizing_p: float = 0.0, seed: int = 7) -> dict:
    """Bell-pair distribution demo document."""
    return {
        "schema_version": "1",
        "name": "two-node-entanglement",
        "engine": "native",
        "topology": {
            "nodes": [
                {"id": "N1", "label": "Source"},
                {"id": "N2", "label": "Receiver"},
            ],
            "connections": [
                {
                    "id": "C1",
                    "endpoint_a": "N1",
                    "endpoint_b": "N2",
                    "length_km": length_km,
                    "attenuation_db_per_km": 0.2,
                    "noise_depolarizing_p": noise_depolarizing_p,
                    "classical_latency": "auto",
                }
            ],
        },
        "protocol_groups": [
            {
                "name": "entanglement-distribution",
                "stages": [
                    [
                        {"node": "N1", "role": "ent_dist_source", "params": {"num_pairs": num_pairs}},
                        {"node": "N2", "role": "ent_dist_receiver", "params": {}},
                    ]
                ],
            }
        ],
        "run_config": {"seed": seed, "runs": 1, "max_sim_time": None},
    }


def mutual_deadlock_document() -> dict:
    """Two roles that both wait for a message first: trips the deadlock detector."""
    return {
        "schema_version": "1",
        "name": "mutual-deadlock",
        "engine": "native",
        "topology": {
            "nodes": [{"id": "N1"}, {"id": "N2"}],
            "connections": [{"id": "C1", "endpoint_a": "N1", "endpoint_b": "N2"}],
        },
        "protocol_groups": [
            {
                "name": "deadlock",
                "stages": [
                    [
                        {"node": "N1", "role": "bb84_receiver", "params": {}},
                        {"node": "N2", "role": "bb84_receiver", "params": {}},
                    ]
                ],
            }
        ],
        "run_config": {"seed": 1, "runs": 1, "max_sim_time": None},
    }
