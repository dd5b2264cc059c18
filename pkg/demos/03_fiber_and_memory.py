"""Fiber loss versus length, and quantum-memory decay versus dwell time."""

import math

from qndk import (
    ConnectionSpec,
    EventQueue,
    NodeSpec,
    QuantumMemory,
    QuantumState,
    RandomStream,
    propagation_delay,
    survival_probability,
    transmit_qubit,
)

print("fiber at 0.2 dB/km")
print(f"{'km':>6} {'survival':>9} {'delay':>10} {'measured':>9}")
rng = RandomStream(77)
for length in (0.0, 10.0, 25.0, 50.0, 100.0):
    conn = ConnectionSpec("C", "A", "B", length_km=length, attenuation_db_per_km=0.2)
    shots = 5_000
    delivered = 0
    state = QuantumState()
    queue = EventQueue()
    for _ in range(shots):
        q = state.allocate(0)
        if transmit_qubit(conn, q, state, rng, queue, lambda _: None):
            delivered += 1
            state.discard(q, rng)
    queue.run_until()
    print(f"{length:>6} {survival_probability(conn):>9.4f} "
          f"{propagation_delay(conn) * 1e3:>8.3f}ms {delivered / shots:>9.4f}")

print()
print("memory storing |1>, T1 = 1 s (survival = e^(-dt/T1))")
print(f"{'dwell':>6} {'theory':>8} {'measured':>9}")
node = NodeSpec("M", memory_slots=1, t1=1.0, t2=1.0)
for dwell in (0.0, 0.25, 0.5, 1.0, 2.0):
    shots = 5_000
    survived = 0
    for _ in range(shots):
        state = QuantumState()
        memory = QuantumMemory(node, state)
        q = state.allocate(1)
        memory.store(q, now=0.0)
        out = memory.retrieve(q, now=dwell, rng=rng)
        survived += state.measure(out, "Z", rng) == 1
    print(f"{dwell:>5}s {math.exp(-dwell):>8.4f} {survived / shots:>9.4f}")
