#!/usr/bin/env python3
"""
Attacker model tests: capture, replay, flooding and replay acceptance estimates
"""
import sys
from pathlib import Path

# Add parent directory to path
sys.path.append(str(Path(__file__).parent.parent))

import numpy as np
import pytest

from core.adversary import (
    Attacker,
    AttackerKind,
    CapturedWaveform,
    capture,
    dos_flood,
    estimate_replay_acceptance,
    replay,
)
from core.auth import Strategy
from core.codec import manchester_encode, modulate
from core.exceptions import AttackError, ChannelSetError
from core.lorawan_abp import AbpSession, build_frame, channel_set
import logging

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

CHANNELS = channel_set()
RNG = np.random.default_rng(0)


def _frame(channel=CHANNELS[0]):
    session = AbpSession(0x26011BDA, bytes(16), bytes(range(16)))
    return build_frame(session, b"reading", channel, CHANNELS)


def test_empty_buffer():
    attacker = Attacker("sdr-1", AttackerKind.SDR_SAME_CHANNEL)
    with pytest.raises(AttackError):
        replay(attacker, 1.0)
    print("✓ Replay without capture raises AttackError")


def test_same_channel_replay():
    print("Testing same-channel replay...")
    attacker = Attacker("sdr-1", AttackerKind.SDR_SAME_CHANNEL)
    frame = _frame(CHANNELS[1])
    capture(attacker, frame, RNG)
    assert attacker.buffer_size == 1
    injection = replay(attacker, 3.0, CHANNELS)
    assert injection.time == 3.0
    assert injection.frame.channel == CHANNELS[1]
    assert injection.frame.provenance == "replay:sdr-1"
    assert injection.frame.to_bytes() == frame.to_bytes()
    print("✓ Bit-exact frame re-emitted on the capture channel")


def test_cross_channel_replay():
    print("Testing cross-channel replay...")
    attacker = Attacker("xcvr-1", AttackerKind.TRANSCEIVER_CROSS_CHANNEL)
    capture(attacker, _frame(CHANNELS[2]), RNG)
    injection = replay(attacker, 1.0, CHANNELS)
    assert injection.frame.channel == CHANNELS[0]
    capture(attacker, _frame(CHANNELS[0]), RNG)
    assert replay(attacker, 2.0, CHANNELS).frame.channel == CHANNELS[1]
    with pytest.raises(ChannelSetError):
        replay(attacker, 3.0, (CHANNELS[0],))
    print("✓ Next channel in the set, wrapping")


def test_listen_channels():
    attacker = Attacker("sdr-2", AttackerKind.SDR_SAME_CHANNEL, listen_channels=(CHANNELS[0],))
    capture(attacker, _frame(CHANNELS[1]), RNG)
    assert attacker.buffer_size == 0
    capture(attacker, _frame(CHANNELS[0]), RNG)
    assert attacker.buffer_size == 1
    print("✓ Narrowband attacker hears only its channels")


def test_waveform_capture():
    print("Testing waveform capture...")
    key = bytes(range(16))
    trace = modulate(manchester_encode(key, 2e-3, 0.5), -12.0, -29.0)
    attacker = Attacker("wave-1", AttackerKind.WAVEFORM_REPLAYER, capture_sigma=0.2, target_node="n1")
    capture(attacker, _frame(), RNG)
    assert attacker.buffer_size == 0
    capture(attacker, CapturedWaveform(868e6, trace, "n2"), np.random.default_rng(0))
    assert attacker.buffer_size == 0
    capture(attacker, CapturedWaveform(868e6, trace, "n1"), np.random.default_rng(0))
    stored = attacker.trace_buffer[-1].trace
    assert not np.array_equal(stored.levels, trace.levels)
    assert np.max(np.abs(stored.levels - trace.levels)) < 2.0
    injection = replay(attacker, 7.0)
    assert injection.frame is None
    assert injection.waveform.trace.start_time == 7.0
    assert injection.waveform.carrier == 868e6
    print("✓ Waveforms recorded with capture noise and re-timed")


def test_capture_noise_follows_seed():
    print("Testing waveform capture noise under a fixed seed...")
    trace = modulate(manchester_encode(bytes(range(16)), 2e-3, 0.5), -12.0, -29.0)
    stored = []
    for seed in (3, 3, 4):
        attacker = Attacker("wave-1", AttackerKind.WAVEFORM_REPLAYER, capture_sigma=0.2)
        capture(attacker, CapturedWaveform(868e6, trace, "n1"), np.random.default_rng(seed))
        stored.append(attacker.trace_buffer[-1].trace.levels)
    assert np.array_equal(stored[0], stored[1])
    assert not np.array_equal(stored[0], stored[2])
    print("✓ Same seed, same captured levels")


def test_dos_flood():
    print("Testing replay flood...")
    attacker = Attacker("flood-1", AttackerKind.DOS_FLOODER)
    capture(attacker, _frame(), RNG)
    injections = dos_flood(attacker, 5.0, 2.0, start=10.0, channel_choice=CHANNELS)
    assert len(injections) == 10
    times = [i.time for i in injections]
    assert times[0] == 10.0
    assert np.allclose(np.diff(times), 0.2)
    assert all(i.frame.provenance == "flood:flood-1" for i in injections)
    with pytest.raises(ValueError):
        dos_flood(attacker, 0.0, 2.0)
    print("✓ rate × duration evenly spaced frames")


def test_replay_acceptance_estimates():
    print("Testing stale waveform replay acceptance...")
    pvk = estimate_replay_acceptance(Strategy.PVK, 500, seed=1)
    hopping = estimate_replay_acceptance(Strategy.HOPPING, 2000, seed=1)
    dual = estimate_replay_acceptance(Strategy.DUAL_KEY, 500, seed=1)
    assert pvk == 1.0
    assert 0.09 <= hopping <= 0.16
    assert dual == 0.0
    assert estimate_replay_acceptance(Strategy.HOPPING, 300, seed=4) == \
        estimate_replay_acceptance(Strategy.HOPPING, 300, seed=4)
    print(f"✓ pvk {pvk:.3f}, hopping {hopping:.3f}, dual_key {dual:.3f}")


def run_tests():
    """Run all tests"""
    print("Running adversary tests...\n")
    tests = [test_empty_buffer, test_same_channel_replay, test_cross_channel_replay, test_listen_channels,
             test_waveform_capture, test_capture_noise_follows_seed, test_dos_flood,
             test_replay_acceptance_estimates]
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
