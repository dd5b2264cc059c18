"""Deterministic discrete-event scheduler.

Events fire in nondecreasing simulated time; ties are broken by scheduling
order (FIFO), which is the only reproducible, topology-independent order.
Time is double-precision seconds. There is no real-time pacing: the queue
runs as fast as the host allows.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Any, Callable, Optional

from .errors import EventDispatchError


@dataclass(frozen=True)
class SimEvent:
    fire_time: float
    sequence: int
    target: Callable[[Any], None] = field(compare=False)
    payload: Any = field(compare=False)


class EventQueue:
    """Time-ordered event queue with FIFO tie-breaking and monotone clock."""

    def __init__(self):
        self._heap: list[tuple[float, int, SimEvent]] = []
        self._next_seq = 0
        self._now = 0.0

    @property
    def now(self) -> float:
        return self._now

    @property
    def empty(self) -> bool:
        return not self._heap

    def __len__(self) -> int:
        return len(self._heap)

    def peek_time(self) -> Optional[float]:
        """Fire time of the next pending event, or None."""
        return self._heap[0][0] if self._heap else None

    def schedule(self, delay: float, target: Callable[[Any], None], payload: Any = None) -> int:
        """Enqueue target(payload) to fire at now + delay. Returns the sequence number."""
        if delay < 0:
            raise ValueError(f"cannot schedule in the past (delay={delay})")
        event = SimEvent(self._now + delay, self._next_seq, target, payload)
        self._next_seq += 1
        heapq.heappush(self._heap, (event.fire_time, event.sequence, event))
        return event.sequence

    def step(self) -> bool:
        """Dispatch the single next event. Returns False if the queue is empty."""
        if not self._heap:
            return False
        _, _, event = heapq.heappop(self._heap)
        self._now = event.fire_time
        try:
            event.target(event.payload)
        except Exception as exc:
            raise EventDispatchError(event.sequence, event.fire_time, str(exc)) from exc
        return True

    def run_until(self, t_end: Optional[float] = None) -> int:
        """Dispatch events up to and including t_end (all events when omitted).

        With a bound, the clock advances to t_end afterwards; without one it
        rests at the last dispatched fire time.
        """
        if t_end is not None and t_end < self._now:
            raise ValueError(f"t_end {t_end} is before now {self._now}")
        dispatched = 0
        while self._heap:
            if t_end is not None and self._heap[0][0] > t_end:
                break
            self.step()
            dispatched += 1
        if t_end is not None:
            self._now = max(self._now, t_end)
        return dispatched
