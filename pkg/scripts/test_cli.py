#!/usr/bin/env python3
"""
Command line surface tests
"""
import io
import json
import sys
from pathlib import Path

# Add parent directory to path
sys.path.append(str(Path(__file__).parent.parent))

import pandas as pd
import pytest
from click.testing import CliRunner

from main import EXIT_IO, EXIT_OK, EXIT_VALIDATION, main
from services.archive_service import ArchiveService
from utils.database import DatabaseManager
import logging

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

DUPLICATE = {
    "schema_version": 1,
    "name": "dup",
    "duration_s": 2.0,
    "source": {"link": "wired", "power_dbm": -10.0},
    "nodes": [
        {"id": "x", "device_address": "0x01", "shared_secret_hex": "00" * 16},
        {"id": "x", "device_address": "0x02", "shared_secret_hex": "11" * 16},
    ],
}


def _invoke(*args):
    return CliRunner().invoke(main, list(args))


def test_linkbudget_wired():
    print("Testing linkbudget (wired)...")
    result = _invoke("linkbudget", "--p-source", "-10", "--isolation", "20")
    assert result.exit_code == EXIT_OK, result.output
    for value in ("-30.0", "-12.2", "17.8"):
        assert value in result.output
    print("✓ -30.0 / -12.2 / 17.8")


def test_linkbudget_wireless():
    print("Testing linkbudget (over the air)...")
    result = _invoke("linkbudget", "--p-source", "15", "--isolation", "20", "--distance", "1.61",
                     "--tx-gain", "9.2", "--node-gain", "9.2")
    assert result.exit_code == EXIT_OK, result.output
    assert "+24.2" in result.output
    assert "35.4" in result.output
    print("✓ EIRP +24.2 dBm, FSPL 35.4 dB")


def test_linkbudget_rejects_zero_distance():
    result = _invoke("linkbudget", "--p-source", "15", "--isolation", "20", "--distance", "0")
    assert result.exit_code == 2
    print("✓ Zero distance is a usage error")


def test_ber_to_stdout():
    print("Testing ber to stdout...")
    result = _invoke("ber", "--delta-p", "1.0", "--sigma", "0.5", "--trials", "20000", "--seed", "1")
    assert result.exit_code == EXIT_OK, result.output
    lines = result.output.strip().splitlines()
    assert lines[0] == "delta_p,ber,stderr,theory"
    delta_p, ber, stderr, theory = (float(v) for v in lines[1].split(","))
    assert delta_p == 1.0
    assert theory == pytest.approx(0.0786, abs=1e-4)
    assert abs(ber - theory) <= 4 * stderr
    print(f"✓ BER {ber:.4f} vs theory {theory:.4f}")


def test_ber_range_to_file(tmp_path):
    out = tmp_path / "ber.csv"
    result = _invoke("ber", "--delta-p", "0.5:1.5:0.5", "--trials", "1000", "-o", str(out))
    assert result.exit_code == EXIT_OK, result.output
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "delta_p,ber,stderr,theory"
    assert len(lines) == 4
    print("✓ Range expanded to three points")


def test_ber_stdout_matches_file(tmp_path):
    print("Testing ber table on stdout against the file export...")
    args = ("ber", "--delta-p", "0.5:1.5:0.5", "--trials", "2000", "--seed", "4")
    printed = _invoke(*args)
    assert printed.exit_code == EXIT_OK, printed.output
    out = tmp_path / "ber.csv"
    assert _invoke(*args, "-o", str(out)).exit_code == EXIT_OK
    pd.testing.assert_frame_equal(pd.read_csv(io.StringIO(printed.output)), pd.read_csv(out))
    print("✓ Same table either way")


def test_run_is_reproducible(tmp_path):
    print("Testing byte-identical reports...")
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    for path in (first, second):
        result = _invoke("run", "-s", "wired_bench", "--seed", "7", "-o", str(path))
        assert result.exit_code == EXIT_OK, result.output
    assert first.read_bytes() == second.read_bytes()
    report = json.loads(first.read_text())
    assert report["scenario"]["seed"] == 7
    print("✓ Same seed, same bytes")


def test_run_csv(tmp_path):
    out = tmp_path / "tables"
    result = _invoke("run", "-s", "wired_bench", "-f", "csv", "-o", str(out))
    assert result.exit_code == EXIT_OK, result.output
    for name in ("summary.csv", "auth_events.csv", "frames.csv", "injections.csv", "timeline.csv"):
        assert (out / name).exists()
    print("✓ CSV tables written")


def test_run_validation_error(tmp_path):
    print("Testing validation exit code...")
    path = tmp_path / "dup.json"
    path.write_text(json.dumps(DUPLICATE))
    result = _invoke("run", "-s", str(path), "-o", str(tmp_path / "never.json"))
    assert result.exit_code == EXIT_VALIDATION
    assert "duplicate node id 'x'" in result.output
    assert not (tmp_path / "never.json").exists()
    print("✓ Exit 1 with diagnostic")


def test_validate(tmp_path):
    assert _invoke("validate", "wired_bench", "dual_key_demo").exit_code == EXIT_OK
    path = tmp_path / "dup.json"
    path.write_text(json.dumps(DUPLICATE))
    assert _invoke("validate", "wired_bench", str(path)).exit_code == EXIT_VALIDATION
    assert _invoke("validate", str(tmp_path / "missing.json")).exit_code == EXIT_IO
    print("✓ validate exit codes")


def test_sweep_rejects_out_of_band():
    result = _invoke("sweep", "-s", "wireless_single", "--carriers", "900e6")
    assert result.exit_code == EXIT_VALIDATION
    assert "outside the rectifier band" in result.output
    print("✓ Out-of-band carrier refused")


def test_replay_mc_and_presets():
    result = _invoke("replay-mc", "--strategy", "pvk", "--epochs", "50")
    assert result.exit_code == EXIT_OK, result.output
    assert "1.0000" in result.output
    result = _invoke("presets")
    assert result.exit_code == EXIT_OK, result.output
    assert "wired_bench" in result.output
    print("✓ replay-mc and presets")


def test_archive_and_history(tmp_path, monkeypatch):
    print("Testing run archive through the CLI...")
    database = DatabaseManager(f"sqlite:///{tmp_path / 'runs.db'}")
    monkeypatch.setattr("services.archive_service.db_manager", database)
    result = _invoke("history")
    assert result.exit_code == EXIT_OK
    assert "No archived runs" in result.output
    result = _invoke("run", "-s", "wired_bench", "-o", str(tmp_path / "r.json"), "--archive")
    assert result.exit_code == EXIT_OK, result.output
    result = _invoke("history", "--scenario", "wired_bench")
    assert result.exit_code == EXIT_OK
    assert "No archived runs" not in result.output
    runs = ArchiveService(database).list_runs(scenario_name="wired_bench")
    assert len(runs) == 1
    print("✓ Archived run listed")


def run_tests():
    """Run all tests"""
    import tempfile

    print("Running CLI tests...\n")
    tests = [test_linkbudget_wired, test_linkbudget_wireless, test_linkbudget_rejects_zero_distance,
             test_ber_to_stdout, test_sweep_rejects_out_of_band, test_replay_mc_and_presets]
    tmp_tests = [test_ber_range_to_file, test_ber_stdout_matches_file, test_run_is_reproducible, test_run_csv,
                 test_run_validation_error, test_validate]
    failed = 0
    for test in tests:
        try:
            test()
        except Exception as e:
            print(f"✗ {test.__name__} failed: {e}")
            failed += 1
    for test in tmp_tests:
        try:
            with tempfile.TemporaryDirectory() as tmp:
                test(Path(tmp))
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
