"""
Deterministic priority queue for the simulation loop
"""
import heapq
import logging
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Any, Dict, List, Optional

from core.exceptions import TimeTravelError

logger = logging.getLogger(__name__)


class EventKind(IntEnum):
    """Tie-break rank at equal timestamps (lower first)"""
    CHARGE_TICK = 0
    NODE_READY = 1
    AUTH_WINDOW_START = 2
    CHIP_EDGE = 3
    AUTH_WINDOW_END = 4
    FRAME_TX = 5
    FRAME_RX = 6
    ATTACK_TRIGGER = 7
    REPORT_TICK = 8

    @property
    def label(self) -> str:
        return "".join(part.capitalize() for part in self.name.split("_"))


@dataclass(order=True)
class Event:
    time: float
    kind: EventKind
    subject: str
    seq: int
    payload: Dict[str, Any] = field(default_factory=dict, compare=False)


class EventQueue:
    """
    Min-heap ordered by (time, kind rank, subject id, insertion sequence)

    The insertion sequence only separates events that agree on all three public keys,
    so two runs that schedule the same events pop them in the same order.
    """

    def __init__(self, start_time: float = 0.0):
        self._heap: List[Event] = []
        self._seq = 0
        self.now = start_time
        self.processed: Dict[str, int] = {}

    def __len__(self) -> int:
        return len(self._heap)

    def __bool__(self) -> bool:
        return bool(self._heap)

    def schedule(self, time: float, kind: EventKind, subject: str = "",
                 **payload: Any) -> Event:
        """
        Push an event

        Raises:
            TimeTravelError: time earlier than the current simulation time
        """
        if time < self.now:
            raise TimeTravelError(
                f"{kind.label} for {subject or '-'} at t={time:.9f}s is before now={self.now:.9f}s"
            )
        event = Event(float(time), kind, subject, self._seq, payload)
        self._seq += 1
        heapq.heappush(self._heap, event)
        return event

    def peek(self) -> Optional[Event]:
        return self._heap[0] if self._heap else None

    def advance(self) -> Event:
        """Pop the earliest event and move the clock to it"""
        if not self._heap:
            raise IndexError("advance() on an empty event queue")
        event = heapq.heappop(self._heap)
        self.now = event.time
        self.processed[event.kind.label] = self.processed.get(event.kind.label, 0) + 1
        return event
