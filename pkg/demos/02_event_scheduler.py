"""The deterministic event queue that drives all simulated time."""

from qndk import EventQueue

queue = EventQueue()
log = []

queue.schedule(2.0, lambda msg: log.append((queue.now, msg)), "world")
queue.schedule(1.0, lambda msg: log.append((queue.now, msg)), "hello")

# Ties dispatch in scheduling order, so replays are always identical.
queue.schedule(3.0, lambda msg: log.append((queue.now, msg)), "tie A")
queue.schedule(3.0, lambda msg: log.append((queue.now, msg)), "tie B")


def chain(msg):
    log.append((queue.now, msg))
    queue.schedule(0.25, lambda m: log.append((queue.now, m)), "chained +0.25s")


queue.schedule(4.0, chain, "handler that schedules more work")

dispatched = queue.run_until()
print(f"dispatched {dispatched} events, clock now at t={queue.now}s")
for t, msg in log:
    print(f"  t={t:<5} {msg}")

# Bounded runs stop at the requested time and park the clock there.
queue2 = EventQueue()
queue2.schedule(1.0, lambda _: print("  fires at t=1"), None)
queue2.schedule(5.0, lambda _: print("  fires at t=5"), None)
queue2.run_until(2.0)
print(f"after run_until(2.0): now={queue2.now}, {len(queue2)} event(s) still pending")
queue2.run_until()
print(f"after draining: now={queue2.now}")
