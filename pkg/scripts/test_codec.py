#!/usr/bin/env python3
"""
Manchester codec and OOK monitor decoding tests
"""
import sys
from pathlib import Path

# Add parent directory to path
sys.path.append(str(Path(__file__).parent.parent))

import numpy as np
import pytest

from core.codec import (
    PowerTrace,
    PrivateKey,
    ber_estimate,
    ber_standard_error,
    bit_errors,
    demodulate,
    manchester_encode,
    modulate,
    theoretical_ber,
)
from core.exceptions import DecodeError
from core.rectifier import GateState
import logging

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

KEY = PrivateKey.from_hex("2b7e151628aed2a6abf7158809cf4f3c")


def test_private_key_length():
    with pytest.raises(ValueError):
        PrivateKey(b"short")
    assert len(KEY) == 16
    print("✓ Private key length enforced")


def test_manchester_layout():
    print("Testing Manchester chip layout...")
    trace = manchester_encode(KEY, 2e-3, start_time=1.5)
    assert len(trace) == 256
    assert trace.chip_duration == pytest.approx(2e-3 / 256)
    assert trace.toggle_frequency == pytest.approx(64e3)
    assert trace.duty == pytest.approx(0.5)
    assert trace.end_time == pytest.approx(1.502)
    # 0x2b = 0010 1011: first bit 0 -> (Low, High)
    assert trace.chip_states()[:4] == [GateState.HARVEST, GateState.BACKSCATTER,
                                      GateState.HARVEST, GateState.BACKSCATTER]
    assert trace.chip_index(1.5) == 0
    assert trace.chip_index(1.4) is None
    assert trace.chip_index(1.503) is None
    print("✓ 256 chips over 2 ms, 1 -> High,Low")


def test_empty_key():
    trace = manchester_encode(b"")
    assert len(trace) == 0
    assert trace.duty == 0.0
    print("✓ Empty key gives an empty trace")


def test_noiseless_decode():
    print("Testing noiseless decode...")
    power = modulate(manchester_encode(KEY), -12.13, -29.07)
    assert demodulate(power) == bytes(KEY)
    assert bit_errors(power, KEY) == (0, 128)
    print("✓ Key recovered exactly")


def test_noisy_decode_large_margin():
    power = modulate(manchester_encode(KEY), -12.13, -29.07, noise_sigma=0.5, rng_seed=42)
    assert demodulate(power) == bytes(KEY)
    print("✓ 16.9 dB margin survives σ = 0.5 dB")


def test_ambiguous_pair():
    print("Testing guard margin...")
    power = modulate(manchester_encode(KEY), -10.0, -10.01)
    with pytest.raises(DecodeError) as info:
        demodulate(power, guard_margin=0.05)
    assert info.value.pair_index == 0
    odd = PowerTrace(1e-6, np.zeros(3))
    with pytest.raises(ValueError):
        demodulate(odd)
    print("✓ Ambiguous pairs raise DecodeError")


def test_modulate_validation():
    trace = manchester_encode(KEY)
    with pytest.raises(ValueError):
        modulate(trace, -20.0, -10.0)
    with pytest.raises(ValueError):
        modulate(trace, -10.0, -20.0, noise_sigma=-1.0)
    print("✓ Modulation inputs checked")


def test_theoretical_ber():
    print("Testing closed-form BER...")
    assert theoretical_ber(0.0, 0.5) == pytest.approx(0.5)
    assert theoretical_ber(1.0, 0.5) == pytest.approx(0.0786, abs=1e-4)
    assert theoretical_ber(1.0, 0.0) == 0.0
    print("✓ Q(ΔP / (σ√2))")


def test_ber_estimate_matches_theory():
    print("Testing Monte Carlo BER...")
    trials = 200_000
    for i, delta_p in enumerate((0.25, 0.5, 0.75, 1.0, 1.5)):
        est = ber_estimate(delta_p, 0.5, trials, seed=7 + i)
        theory = theoretical_ber(delta_p, 0.5)
        assert abs(est - theory) <= 3 * ber_standard_error(theory, trials) + 1e-6
    assert ber_estimate(1.0, 0.5, 10_000, seed=3) == ber_estimate(1.0, 0.5, 10_000, seed=3)
    with pytest.raises(ValueError):
        ber_estimate(1.0, 0.5, 0)
    print("✓ Estimates within three standard errors of theory")


def test_ber_non_increasing_in_delta_p():
    print("Testing BER against the dynamic range...")
    rng = np.random.default_rng(31)
    grid = np.sort(rng.uniform(0.0, 3.0, 12))
    for sigma in (0.3, 0.5, 1.0):
        theory = [theoretical_ber(d, sigma) for d in grid]
        assert all(b <= a for a, b in zip(theory, theory[1:]))
        # a shared seed fixes bits and noise, so the estimate is monotone draw by draw
        estimates = [ber_estimate(d, sigma, 20_000, seed=5) for d in grid]
        assert all(b <= a for a, b in zip(estimates, estimates[1:]))
    print("✓ Theory and estimate never rise with ΔP")


def run_tests():
    """Run all tests"""
    print("Running codec tests...\n")
    tests = [test_private_key_length, test_manchester_layout, test_empty_key, test_noiseless_decode,
             test_noisy_decode_large_margin, test_ambiguous_pair, test_modulate_validation,
             test_theoretical_ber, test_ber_estimate_matches_theory, test_ber_non_increasing_in_delta_p]
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
