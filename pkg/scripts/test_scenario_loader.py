#!/usr/bin/env python3
"""
Scenario parsing and validation tests
"""
import copy
import json
import sys
from pathlib import Path

# Add parent directory to path
sys.path.append(str(Path(__file__).parent.parent))

import pytest

from core.auth import Strategy
from core.exceptions import ScenarioValidationError
from models.scenario import LinkKind
from services.scenario_loader import list_presets, load_scenario, parse_scenario, resolve_scenario_path
import logging

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

BASE = {
    "schema_version": 1,
    "name": "unit",
    "duration_s": 5.0,
    "seed": 3,
    "source": {"power_dbm": 15.0, "link": "wireless"},
    "monitor": {"noise_sigma_db": 0.01},
    "lorawan": {"policy": "permissive"},
    "nodes": [
        {"id": "n1", "device_address": "0x01", "distance_m": 1.0,
         "shared_secret_hex": "000102030405060708090a0b0c0d0e0f"},
    ],
}


def _tree(**changes):
    tree = copy.deepcopy(BASE)
    tree.update(changes)
    return tree


def _errors(tree):
    with pytest.raises(ScenarioValidationError) as info:
        parse_scenario(tree, "unit")
    return info.value.errors


def test_minimal_scenario():
    print("Testing minimal scenario...")
    scenario = parse_scenario(_tree(), "unit")
    node = scenario.node("n1")
    assert node.device_address == 1
    assert node.strategy is Strategy.PVK
    assert node.geometry.distance == 1.0
    assert scenario.source.link is LinkKind.WIRELESS
    assert scenario.monitor.environment_floor_dbm == -40.0
    assert scenario.lorawan.channels_hz == (868.1e6, 868.3e6, 868.5e6)
    for tag in ("rectifier_tables", "environment_floor_dbm", "cycle_profile:n1", "session_keys:n1"):
        assert tag in scenario.synthetic_defaults
    assert scenario.with_seed(9).seed == 9
    print(f"✓ Synthetic defaults flagged: {', '.join(scenario.synthetic_defaults)}")


def test_duplicate_node_id():
    print("Testing duplicate node ids...")
    tree = _tree()
    tree["nodes"].append(dict(tree["nodes"][0], device_address="0x02"))
    errors = _errors(tree)
    assert any("duplicate node id 'n1'" in e for e in errors)
    print("✓ Duplicate id reported")


def test_collects_every_error():
    print("Testing error collection...")
    tree = _tree(schema_version=2, extra=True)
    tree["source"]["circulator_isolation_db"] = -3
    tree["nodes"][0].pop("distance_m")
    tree["nodes"][0]["pmu"] = {"ready_voltage_v": 6.0}
    errors = _errors(tree)
    joined = "\n".join(errors)
    assert "schema_version" in joined
    assert "extra: unknown key" in joined
    assert "source.circulator_isolation_db" in joined
    assert "nodes[n1].distance_m: is required" in joined
    assert "ready_voltage_v" in joined
    assert len(errors) >= 5
    print(f"✓ {len(errors)} errors in one pass")


def test_link_rules():
    tree = _tree(source={"power_dbm": -10.0, "link": "wired"})
    assert any("not allowed on a wired link" in e for e in _errors(tree))
    tree = _tree(source={"link": "wired", "carrier_policy": "hopping"})
    tree["nodes"][0].pop("distance_m")
    assert any("hopping is not available" in e for e in _errors(tree))
    print("✓ Wired/wireless geometry rules")


def test_hopping_requires_policy():
    tree = _tree()
    tree["nodes"][0]["strategy"] = "hopping"
    assert any("carrier_policy = hopping" in e for e in _errors(tree))
    tree["source"]["carrier_policy"] = "hopping"
    assert parse_scenario(tree, "unit").node("n1").strategy is Strategy.HOPPING
    print("✓ Hopping strategy needs a hopping source")


def test_band_checks():
    tree = _tree(lorawan={"channels_hz": [915e6]})
    assert any("outside the 863-870 MHz band" in e for e in _errors(tree))
    tree = _tree(source={"carrier_hz": 900e6})
    tree["source"]["link"] = "wireless"
    assert any("source.carrier_hz" in e for e in _errors(tree))
    print("✓ Frequencies held to the band")


def test_cycle_phases():
    tree = _tree()
    tree["nodes"][0]["cycle"] = {"phases": [{"name": "Init", "duration_s": 0.1, "power_mw": 5.0}]}
    assert any("BackscatterId and LoRaTx" in e for e in _errors(tree))
    tree["nodes"][0]["cycle"] = {"phases": [
        {"name": "BackscatterId", "duration_s": 0.001, "power_mw": 30.0},
        {"name": "LoRaTx", "duration_s": 0.2, "power_mw": 100.0},
    ]}
    assert any("shorter than auth window" in e for e in _errors(tree))
    tree["nodes"][0]["cycle"]["phases"][0]["duration_s"] = 0.002
    scenario = parse_scenario(tree, "unit")
    assert "cycle_profile:n1" not in scenario.synthetic_defaults
    print("✓ Explicit cycles validated")


def test_attacker_rules():
    print("Testing attacker validation...")
    tree = _tree(attackers=[
        {"id": "w", "kind": "waveform_replayer"},
        {"id": "f", "kind": "dos_flooder", "trigger_times_s": [9.0]},
        {"id": "x", "kind": "sdr_same_channel", "target_node": "ghost"},
    ])
    joined = "\n".join(_errors(tree))
    assert "waveform_replayer needs a target node" in joined
    assert "dos_flooder needs a positive flood duration" in joined
    assert "trigger_times_s[0]" in joined
    assert "unknown node 'ghost'" in joined
    tree = _tree(lorawan={"channels_hz": [868.1e6]},
                 attackers=[{"id": "x", "kind": "transceiver_cross_channel"}])
    assert any("at least two channels" in e for e in _errors(tree))
    print("✓ Attacker constraints enforced")


def test_empty_scenario():
    tree = {"schema_version": 1, "name": "empty", "duration_s": 5.0}
    scenario = parse_scenario(tree, "empty")
    assert scenario.nodes == () and scenario.attackers == ()
    print("✓ Scenario without nodes is valid")


def test_files_and_presets(tmp_path):
    print("Testing file loading and presets...")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ScenarioValidationError):
        load_scenario(bad)
    with pytest.raises(FileNotFoundError):
        resolve_scenario_path(tmp_path / "missing_scenario_xyz.json")

    good = tmp_path / "good.json"
    good.write_text(json.dumps(_tree()))
    assert load_scenario(good).name == "unit"

    presets = list_presets()
    names = {p.stem for p in presets}
    assert {"wired_bench", "wireless_single", "wireless_two_node", "replay_abp_permissive",
            "replay_defeated_pvk", "replay_defeated_hopping", "dual_key_demo", "dos_flood"} <= names
    assert "rectifier_default" not in names
    for path in presets:
        load_scenario(path)
    wired = load_scenario("wired_bench")
    assert wired.source.link is LinkKind.WIRED
    assert "rectifier_tables" not in wired.synthetic_defaults
    print(f"✓ {len(presets)} presets validate")


def run_tests():
    """Run all tests"""
    import tempfile

    print("Running scenario loader tests...\n")
    tests = [test_minimal_scenario, test_duplicate_node_id, test_collects_every_error, test_link_rules,
             test_hopping_requires_policy, test_band_checks, test_cycle_phases, test_attacker_rules,
             test_empty_scenario]
    failed = 0
    for test in tests:
        try:
            test()
        except Exception as e:
            print(f"✗ {test.__name__} failed: {e}")
            failed += 1
    try:
        with tempfile.TemporaryDirectory() as tmp:
            test_files_and_presets(Path(tmp))
    except Exception as e:
        print(f"✗ test_files_and_presets failed: {e}")
        failed += 1
    if failed:
        print(f"\n✗ {failed} test(s) failed")
        return False
    print("\n✓ All tests passed!")
    return True


if __name__ == "__main__":
    success = run_tests()
    sys.exit(0 if success else 1)
