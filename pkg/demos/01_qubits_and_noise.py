"""Qubits, gates, measurement statistics, and trajectory-sampled noise.

Walks through the state layer on its own: allocate qubits, entangle them,
measure, and compare Monte Carlo channel statistics against closed forms.
"""

import math

from qndk import QuantumState, RandomStream, amplitude_damping, dephasing, depolarizing

rng = RandomStream(2026)

# A Hadamard turns |0> into an even superposition: ~50% of Z measurements read 0.
shots = 20_000
zeros = 0
for _ in range(shots):
    state = QuantumState()
    q = state.allocate(0)
    state.apply_gate("H", q)
    zeros += state.measure(q, "Z", rng) == 0
print(f"H|0> measured in Z:  P(0) = {zeros / shots:.4f}   (theory 0.5)")

# Bell pair: outcomes agree in every shot.
agree = 0
for _ in range(2_000):
    state = QuantumState()
    a, b = state.allocate(0), state.allocate(0)
    state.apply_gate("H", a)
    state.apply_gate("CNOT", a, b)
    agree += state.measure(a, "Z", rng) == state.measure(b, "Z", rng)
print(f"Bell pair Z-Z agreement: {agree / 2_000:.4f}   (theory 1.0)")

# Depolarizing channel: a Z eigenstate flips with probability 2p/3.
for p in (0.05, 0.15, 0.3):
    flips = 0
    for _ in range(shots):
        state = QuantumState()
        q = state.allocate(0)
        state.apply_channel(q, depolarizing(p), rng)
        flips += state.measure(q, "Z", rng) == 1
    print(f"depolarizing p={p:<4}: flip rate {flips / shots:.4f}   (theory {2 * p / 3:.4f})")

# Amplitude damping: |1> survives with probability 1 - gamma = e^(-t/T1).
for t_over_t1 in (0.5, 1.0, 2.0):
    gamma = 1.0 - math.exp(-t_over_t1)
    survived = 0
    for _ in range(shots):
        state = QuantumState()
        q = state.allocate(1)
        state.apply_channel(q, amplitude_damping(gamma), rng)
        survived += state.measure(q, "Z", rng) == 1
    print(f"damping t/T1={t_over_t1:<3}: survival {survived / shots:.4f}   "
          f"(theory {math.exp(-t_over_t1):.4f})")

# Dephasing never touches Z populations; it erodes X coherence at p/2.
p = 0.4
x_flips = 0
for _ in range(shots):
    state = QuantumState()
    q = state.allocate(0)
    state.apply_gate("H", q)  # |+>
    state.apply_channel(q, dephasing(p), rng)
    x_flips += state.measure(q, "X", rng) == 1
print(f"dephasing p={p}: X flip rate {x_flips / shots:.4f}   (theory {p / 2:.4f})")
