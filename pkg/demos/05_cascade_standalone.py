"""Cascade reconciliation outside the simulator: efficiency versus error rate.

The reconciliation core is a generator over parity questions, so it can be
driven synchronously against an in-memory oracle. Leakage is compared with
the Shannon bound n*h(q), the floor for any reconciliation scheme.
"""

import math

from qndk import RandomStream
from qndk.protocols.cascade import reconcile_offline


def binary_entropy(q):
    if q in (0.0, 1.0):
        return 0.0
    return -q * math.log2(q) - (1 - q) * math.log2(1 - q)


n = 10_000
print(f"{'qber':>6} {'healed':>7} {'corrections':>12} {'leaked':>7} {'shannon':>8} {'ratio':>6}")
for qber in (0.01, 0.02, 0.05, 0.08):
    rng = RandomStream(int(qber * 1000))
    sender = [rng.bit() for _ in range(n)]
    receiver = list(sender)
    for i in rng.permutation(n)[: int(qber * n)]:
        receiver[i] ^= 1

    corrected, leaked, corrections = reconcile_offline(receiver, sender, qber, passes=4, seed=1)
    bound = n * binary_entropy(qber)
    print(f"{qber:>6} {str(corrected == sender):>7} {corrections:>12} "
          f"{leaked:>7} {bound:>8.0f} {leaked / bound:>6.2f}")
