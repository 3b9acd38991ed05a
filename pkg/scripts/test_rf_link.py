#!/usr/bin/env python3
"""
Link-budget arithmetic tests
"""
import math
import sys
from pathlib import Path

# Add parent directory to path
sys.path.append(str(Path(__file__).parent.parent))

import numpy as np
import pytest

from core.exceptions import LinkBudgetError
from core.rf_link import (
    ChannelGeometry,
    backscatter_return_power,
    dbm_to_mw,
    dynamic_range_simplified,
    eirp,
    fspl,
    leakage_power,
    link_budget_summary,
    monitor_observed_level,
    mw_to_dbm,
    node_incident_power,
    reflected_power_wired,
)
import logging

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)


def test_wired_budget():
    """Leakage, wired reflection and simplified dynamic range"""
    print("Testing wired link budget...")
    assert leakage_power(-10.0, 20.0) == pytest.approx(-30.0)
    assert reflected_power_wired(-10.0, 0.8, -0.6) == pytest.approx(-12.2)
    summary = link_budget_summary(-10.0, 20.0, 0.8, -0.6)
    assert summary["delta_p_db"] == pytest.approx(17.8)
    assert dynamic_range_simplified(-12.2, -30.0) == pytest.approx(17.8)
    assert "fspl_db" not in summary
    print(f"✓ Wired budget: ΔP = {summary['delta_p_db']:.1f} dB")


def test_invalid_inputs():
    print("Testing invalid link-budget inputs...")
    with pytest.raises(LinkBudgetError):
        leakage_power(10.0, -1.0)
    with pytest.raises(LinkBudgetError):
        reflected_power_wired(10.0, 0.8, 0.5)
    with pytest.raises(LinkBudgetError):
        fspl(868e6, 0.0)
    with pytest.raises(LinkBudgetError):
        ChannelGeometry(-1.0)
    with pytest.raises(LinkBudgetError):
        dbm_to_mw(float("nan"))
    print("✓ Invalid inputs rejected")


def test_unit_conversions():
    print("Testing dBm / mW conversions...")
    assert dbm_to_mw(0.0) == pytest.approx(1.0)
    assert dbm_to_mw(-math.inf) == 0.0
    assert mw_to_dbm(0.0) == -math.inf
    assert mw_to_dbm(dbm_to_mw(-23.4)) == pytest.approx(-23.4)
    print("✓ Conversions consistent")


def test_free_space_terms():
    print("Testing free-space terms...")
    assert fspl(868e6, 1.0) == pytest.approx(31.22, abs=0.01)
    assert fspl(868e6, 1.61) == pytest.approx(35.4, abs=0.05)
    assert leakage_power(15.0, 20.0) == pytest.approx(-5.0)
    # doubling the distance adds 6.02 dB
    assert fspl(868e6, 2.0) - fspl(868e6, 1.0) == pytest.approx(6.0206, abs=1e-3)
    assert eirp(15.0, 9.2) == pytest.approx(24.2)

    geometry = ChannelGeometry(1.61, 9.2, 9.2)
    incident = node_incident_power(15.0, 0.8, geometry, 868e6)
    ret = backscatter_return_power(15.0, 0.8, geometry, 868e6, -0.6)
    # two-way return equals incident + S11 + second pass through the same terms
    assert ret == pytest.approx(2 * incident - 15.0 - 0.6)
    print(f"✓ Incident {incident:.2f} dBm, return {ret:.2f} dBm")


def test_incoherent_sum():
    print("Testing incoherent power sum...")
    assert monitor_observed_level(-30.0, -30.0) == pytest.approx(-30.0 + 10 * math.log10(2))
    assert monitor_observed_level(-30.0, -math.inf) == pytest.approx(-30.0)
    assert monitor_observed_level(-30.0, -30.0, -30.0) == pytest.approx(-30.0 + 10 * math.log10(3))
    print("✓ Incoherent sum")


def test_summary_with_distance():
    print("Testing summary with over-the-air terms...")
    summary = link_budget_summary(15.0, 20.0, 0.8, -0.6, distance=1.61, tx_gain=9.2, node_gain=9.2)
    for key in ("fspl_db", "p_incident_dbm", "p_return_dbm", "p_observed_dbm"):
        assert key in summary
    assert summary["p_observed_dbm"] > summary["p_leak_dbm"]
    assert summary["eirp_dbm"] == pytest.approx(24.2)
    print("✓ Wireless summary complete")


def test_dynamic_range_grows_with_isolation():
    print("Testing ΔP against circulator isolation...")
    rng = np.random.default_rng(61)
    isolations = np.sort(rng.uniform(0.0, 40.0, 50))
    wired = [link_budget_summary(-10.0, float(iso), 0.8, -0.6)["delta_p_db"] for iso in isolations]
    assert all(b > a for a, b in zip(wired, wired[1:]))
    geometry = ChannelGeometry(1.61, 9.2, 9.2)
    high = backscatter_return_power(15.0, 0.8, geometry, 868e6, -0.6)
    low = backscatter_return_power(15.0, 0.8, geometry, 868e6, -25.0)
    wireless = []
    for iso in isolations:
        leak = leakage_power(15.0, float(iso))
        wireless.append(monitor_observed_level(leak, high) - monitor_observed_level(leak, low))
    assert all(b >= a for a, b in zip(wireless, wireless[1:]))
    assert wireless[0] >= 0.0
    print(f"✓ Over the air ΔP rises from {wireless[0]:.3f} to {wireless[-1]:.3f} dB")


def run_tests():
    """Run all tests"""
    print("Running link-budget tests...\n")
    tests = [test_wired_budget, test_invalid_inputs, test_unit_conversions,
             test_free_space_terms, test_incoherent_sum, test_summary_with_distance,
             test_dynamic_range_grows_with_isolation]
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
