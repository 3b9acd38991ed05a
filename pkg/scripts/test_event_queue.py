#!/usr/bin/env python3
"""
Event queue ordering tests
"""
import sys
from pathlib import Path

# Add parent directory to path
sys.path.append(str(Path(__file__).parent.parent))

import numpy as np
import pytest

from core.event_queue import EventKind, EventQueue
from core.exceptions import TimeTravelError
import logging

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)


def test_kind_rank_at_equal_time():
    print("Testing tie-break by kind...")
    queue = EventQueue()
    queue.schedule(1.0, EventKind.REPORT_TICK)
    queue.schedule(1.0, EventKind.FRAME_RX, "n1")
    queue.schedule(1.0, EventKind.CHARGE_TICK)
    queue.schedule(0.5, EventKind.ATTACK_TRIGGER, "a1")
    kinds = [queue.advance().kind for _ in range(4)]
    assert kinds == [EventKind.ATTACK_TRIGGER, EventKind.CHARGE_TICK, EventKind.FRAME_RX, EventKind.REPORT_TICK]
    assert queue.now == 1.0
    print("✓ Lower rank first at equal time")


def test_subject_then_insertion():
    queue = EventQueue()
    queue.schedule(2.0, EventKind.NODE_READY, "node-b", tag=1)
    queue.schedule(2.0, EventKind.NODE_READY, "node-a", tag=2)
    queue.schedule(2.0, EventKind.NODE_READY, "node-a", tag=3)
    tags = [queue.advance().payload["tag"] for _ in range(3)]
    assert tags == [2, 3, 1]
    print("✓ Subject id, then insertion order")


def test_time_travel():
    queue = EventQueue()
    queue.schedule(5.0, EventKind.CHARGE_TICK)
    queue.advance()
    with pytest.raises(TimeTravelError):
        queue.schedule(4.9, EventKind.CHARGE_TICK)
    queue.schedule(5.0, EventKind.REPORT_TICK)
    assert len(queue) == 1
    print("✓ Past events refused")


def test_empty_queue():
    queue = EventQueue()
    assert not queue
    assert queue.peek() is None
    with pytest.raises(IndexError):
        queue.advance()
    print("✓ Empty queue")


def test_processed_counts():
    queue = EventQueue()
    for t in (0.0, 0.1, 0.2):
        queue.schedule(t, EventKind.CHARGE_TICK)
    queue.schedule(0.2, EventKind.CHIP_EDGE, "n1")
    while queue:
        queue.advance()
    assert queue.processed == {"ChargeTick": 3, "ChipEdge": 1}
    assert EventKind.AUTH_WINDOW_START.label == "AuthWindowStart"
    print("✓ Processed counts by label")


def test_ten_thousand_events_sorted():
    print("Testing 10^4 random events against a sorted oracle...")
    rng = np.random.default_rng(2024)
    queue = EventQueue()
    expected = []
    kinds = list(EventKind)
    for seq in range(10_000):
        # coarse times force many exact ties
        t = float(rng.integers(0, 500)) / 10.0
        kind = kinds[int(rng.integers(len(kinds)))]
        subject = f"n{int(rng.integers(0, 5))}"
        queue.schedule(t, kind, subject)
        expected.append((t, int(kind), subject, seq))
    expected.sort()
    popped = []
    while queue:
        e = queue.advance()
        popped.append((e.time, int(e.kind), e.subject, e.seq))
    assert popped == expected
    print("✓ Pop order equals the sorted oracle")


def run_tests():
    """Run all tests"""
    print("Running event queue tests...\n")
    tests = [test_kind_rank_at_equal_time, test_subject_then_insertion, test_time_travel,
             test_empty_queue, test_processed_counts, test_ten_thousand_events_sorted]
    failed = 0
    for test in tests:
        try:
            test()
        except Exception as e:
            print(f"✗ {test.__name__} failed: {e}")
            failed += 1
    if failed:
        print(f"\n✗ {failed} test(s) failed")
        return False
    print("\n✓ All tests passed!")
    return True


if __name__ == "__main__":
    success = run_tests()
    sys.exit(0 if success else 1)
