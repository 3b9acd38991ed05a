"""
Scenario file loading: parse the JSON tree, validate every constraint and build the
Scenario records
"""
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

from core.adversary import AttackerKind
from core.auth import ISM_BAND_HZ, Strategy, encrypt_block
from core.energy import (
    CyclePhase,
    CycleProfile,
    DEFAULT_CAPACITANCE_F,
    DEFAULT_CYCLE_PERIOD_S,
    Phase,
    PmuSpec,
    StorageState,
    default_cycle_profile,
)
from core.exceptions import ScenarioValidationError
from core.lorawan_abp import GatewayMode, GatewayPolicy, channel_set
from core.rectifier import default_efficiency_curve, default_reflection_profile, load_rectifier_tables
from core.rf_link import ChannelGeometry
from models.scenario import (
    AttackerConfig,
    AuthConfig,
    CarrierPolicy,
    LinkKind,
    LorawanConfig,
    MonitorConfig,
    NodeConfig,
    SCHEMA_VERSION,
    Scenario,
    SourceConfig,
)
from utils.config import config

logger = logging.getLogger(__name__)

_TOP_KEYS = {
    "schema_version", "name", "description", "duration_s", "seed", "charge_tick_s",
    "report_interval_s", "security_layer", "rectifier_tables", "source", "monitor",
    "lorawan", "auth", "nodes", "attackers",
}
_SOURCE_KEYS = {
    "power_dbm", "carrier_hz", "carrier_policy", "hop_band_hz", "hop_channels",
    "antenna_gain_dbi", "forward_loss_db", "circulator_isolation_db", "link",
}
_MONITOR_KEYS = {
    "noise_sigma_db", "environment_floor_dbm", "guard_margin_db", "window_tolerance_s",
    "frequency_tolerance_hz", "correlation_threshold",
}
_LORAWAN_KEYS = {"region", "channels_hz", "airtime_s", "policy", "duplicate_window_s", "payload_crypto"}
_AUTH_KEYS = {"validity_s", "single_use", "window_s"}
_NODE_KEYS = {
    "id", "device_address", "distance_m", "antenna_gain_dbi", "strategy", "shared_secret_hex",
    "network_key_hex", "application_key_hex", "key_rotation", "auth_delay_s", "max_cycles",
    "storage", "pmu", "cycle",
}
_STORAGE_KEYS = {"capacitance_f", "initial_voltage_v", "leakage_uw"}
_PMU_KEYS = {"cold_start_power_uw", "operating_voltage_v", "ready_voltage_v", "rated_voltage_v", "efficiency"}
_CYCLE_KEYS = {"period_s", "phases"}
_PHASE_KEYS = {"name", "duration_s", "power_mw"}
_ATTACKER_KEYS = {
    "id", "kind", "target_node", "listen_channels_hz", "capture_sigma_db", "trigger_times_s",
    "rate_per_s", "flood_duration_s", "replay_offset_s",
}


class _Checker:
    """Collects every violated constraint instead of stopping at the first"""

    def __init__(self):
        self.errors: List[str] = []

    def fail(self, path: str, message: str):
        self.errors.append(f"{path}: {message}")

    def section(self, tree: Any, path: str, allowed: set) -> Dict[str, Any]:
        if tree is None:
            return {}
        if not isinstance(tree, dict):
            self.fail(path, "must be an object")
            return {}
        for key in sorted(set(tree) - allowed):
            self.fail(f"{path}.{key}" if path else key, "unknown key")
        return tree

    def number(self, tree: Dict[str, Any], key: str, path: str, default: Optional[float] = None,
               minimum: Optional[float] = None, maximum: Optional[float] = None,
               strict: bool = False, required: bool = False) -> Optional[float]:
        where = f"{path}.{key}" if path else key
        if key not in tree:
            if required:
                self.fail(where, "is required")
            return default
        value = tree[key]
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            self.fail(where, f"must be a number, got {value!r}")
            return default
        value = float(value)
        if minimum is not None and (value <= minimum if strict else value < minimum):
            self.fail(where, f"must be {'>' if strict else '>='} {minimum}, got {value}")
        if maximum is not None and value > maximum:
            self.fail(where, f"must be <= {maximum}, got {value}")
        return value

    def integer(self, tree: Dict[str, Any], key: str, path: str, default: Optional[int] = None,
                minimum: int = 0, maximum: Optional[int] = None, required: bool = False) -> Optional[int]:
        where = f"{path}.{key}" if path else key
        if key not in tree:
            if required:
                self.fail(where, "is required")
            return default
        value = tree[key]
        if isinstance(value, bool) or not isinstance(value, int):
            self.fail(where, f"must be an integer, got {value!r}")
            return default
        if value < minimum or (maximum is not None and value > maximum):
            self.fail(where, f"out of range [{minimum}, {maximum}]: {value}")
            return default
        return value

    def flag(self, tree: Dict[str, Any], key: str, path: str, default: bool) -> bool:
        if key not in tree:
            return default
        if not isinstance(tree[key], bool):
            self.fail(f"{path}.{key}" if path else key, "must be true or false")
            return default
        return tree[key]

    def choice(self, tree: Dict[str, Any], key: str, path: str, enum_cls, default=None, required=False):
        where = f"{path}.{key}" if path else key
        if key not in tree:
            if required:
                self.fail(where, "is required")
            return default
        try:
            return enum_cls(tree[key])
        except ValueError:
            options = ", ".join(e.value for e in enum_cls)
            self.fail(where, f"must be one of {options}, got {tree[key]!r}")
            return default

    def hex_key(self, tree: Dict[str, Any], key: str, path: str, required: bool = False) -> Optional[bytes]:
        where = f"{path}.{key}"
        if key not in tree:
            if required:
                self.fail(where, "is required")
            return None
        try:
            value = bytes.fromhex(str(tree[key]))
        except ValueError:
            self.fail(where, "is not valid hex")
            return None
        if len(value) != 16:
            self.fail(where, f"must be 16 bytes, got {len(value)}")
            return None
        return value

    def frequencies(self, tree: Dict[str, Any], key: str, path: str) -> Optional[Tuple[float, ...]]:
        if key not in tree:
            return None
        values = tree[key]
        if not isinstance(values, list) or not values:
            self.fail(f"{path}.{key}", "must be a non-empty list of frequencies")
            return None
        out = []
        for i, v in enumerate(values):
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                self.fail(f"{path}.{key}[{i}]", f"must be a number, got {v!r}")
                continue
            if not ISM_BAND_HZ[0] <= v <= ISM_BAND_HZ[1]:
                self.fail(f"{path}.{key}[{i}]", f"{v / 1e6:.3f} MHz outside the 863-870 MHz band")
            out.append(float(v))
        return tuple(out)


def _derived_session_key(secret: bytes, label: int) -> bytes:
    return encrypt_block(secret, bytes([label]) + bytes(15))


def _parse_address(c: _Checker, value: Any, path: str) -> Optional[int]:
    if isinstance(value, str):
        try:
            value = int(value, 16) if value.lower().startswith("0x") else int(value)
        except ValueError:
            c.fail(path, f"is not an integer or hex string: {value!r}")
            return None
    if isinstance(value, bool) or not isinstance(value, int) or not 0 <= value < 2 ** 32:
        c.fail(path, f"must be a 32-bit device address, got {value!r}")
        return None
    return value


def _parse_cycle(c: _Checker, tree: Any, path: str) -> Tuple[Optional[CycleProfile], bool]:
    section = c.section(tree, path, _CYCLE_KEYS)
    if "phases" not in section:
        period = c.number(section, "period_s", path, DEFAULT_CYCLE_PERIOD_S, minimum=0, strict=True)
        try:
            return default_cycle_profile(period), True
        except ValueError as e:
            c.fail(path, str(e))
            return None, True

    phases = []
    if not isinstance(section["phases"], list) or not section["phases"]:
        c.fail(f"{path}.phases", "must be a non-empty list")
        return None, False
    for i, raw in enumerate(section["phases"]):
        where = f"{path}.phases[{i}]"
        ph = c.section(raw, where, _PHASE_KEYS)
        name = c.choice(ph, "name", where, CyclePhase, required=True)
        duration = c.number(ph, "duration_s", where, minimum=0, required=True)
        power = c.number(ph, "power_mw", where, minimum=0, required=True)
        if name is not None and duration is not None and power is not None:
            phases.append(Phase(name, duration, power))
    if "period_s" in section:
        c.fail(f"{path}.period_s", "cannot be combined with explicit phases")
    names = [p.name for p in phases]
    if CyclePhase.BACKSCATTER_ID not in names or CyclePhase.LORA_TX not in names:
        c.fail(f"{path}.phases", "must contain BackscatterId and LoRaTx phases")
    try:
        return CycleProfile(tuple(phases)), False
    except ValueError as e:
        c.fail(f"{path}.phases", str(e))
        return None, False


def _parse_node(c: _Checker, raw: Any, index: int, source: SourceConfig, window_s: float,
                tables, synthetic: List[str]) -> Optional[NodeConfig]:
    path = f"nodes[{index}]"
    tree = c.section(raw, path, _NODE_KEYS)
    if not tree:
        if raw == {}:
            c.fail(path, "is empty")
        return None
    node_id = tree.get("id")
    if not isinstance(node_id, str) or not node_id:
        c.fail(f"{path}.id", "must be a non-empty string")
        node_id = None
    else:
        path = f"nodes[{node_id}]"

    address = _parse_address(c, tree.get("device_address"), f"{path}.device_address") \
        if "device_address" in tree else None
    if "device_address" not in tree:
        c.fail(f"{path}.device_address", "is required")
    strategy = c.choice(tree, "strategy", path, Strategy, default=Strategy.PVK)
    secret = c.hex_key(tree, "shared_secret_hex", path, required=True)
    nwk = c.hex_key(tree, "network_key_hex", path)
    app = c.hex_key(tree, "application_key_hex", path)
    if secret is not None and (nwk is None or app is None) and node_id:
        synthetic.append(f"session_keys:{node_id}")
    key_rotation = c.flag(tree, "key_rotation", path, False)
    auth_delay = c.number(tree, "auth_delay_s", path, 0.0, minimum=0)
    max_cycles = c.integer(tree, "max_cycles", path, None, minimum=1)

    if strategy is Strategy.HOPPING and source.carrier_policy is not CarrierPolicy.HOPPING:
        c.fail(f"{path}.strategy", "hopping requires source.carrier_policy = hopping")
    if strategy is Strategy.DUAL_KEY and window_s <= 0:
        c.fail(f"{path}.strategy", "dual_key needs a positive auth window")

    geometry = None
    gain = c.number(tree, "antenna_gain_dbi", path, 0.0)
    if source.link is LinkKind.WIRELESS:
        distance = c.number(tree, "distance_m", path, minimum=0, strict=True, required=True)
        if distance is not None and distance > 0:
            geometry = ChannelGeometry(distance, source.antenna_gain_dbi, gain)
    elif "distance_m" in tree:
        c.fail(f"{path}.distance_m", "not allowed on a wired link")

    st = c.section(tree.get("storage"), f"{path}.storage", _STORAGE_KEYS)
    pm = c.section(tree.get("pmu"), f"{path}.pmu", _PMU_KEYS)
    capacitance = c.number(st, "capacitance_f", f"{path}.storage", DEFAULT_CAPACITANCE_F, minimum=0, strict=True)
    voltage = c.number(st, "initial_voltage_v", f"{path}.storage", 0.0, minimum=0)
    leakage = c.number(st, "leakage_uw", f"{path}.storage", 0.0, minimum=0)
    pmu_defaults = PmuSpec()
    cold = c.number(pm, "cold_start_power_uw", f"{path}.pmu", pmu_defaults.cold_start_power, minimum=0, strict=True)
    operating = c.number(pm, "operating_voltage_v", f"{path}.pmu", pmu_defaults.operating_voltage, minimum=0)
    ready = c.number(pm, "ready_voltage_v", f"{path}.pmu", pmu_defaults.ready_voltage, minimum=0, strict=True)
    rated = c.number(pm, "rated_voltage_v", f"{path}.pmu", pmu_defaults.rated_voltage, minimum=0, strict=True)
    pmu_eff = c.number(pm, "efficiency", f"{path}.pmu", pmu_defaults.efficiency, minimum=0, maximum=1, strict=True)
    if None not in (ready, rated) and ready > rated:
        c.fail(f"{path}.pmu.ready_voltage_v", f"{ready} V exceeds rated maximum {rated} V")
    if None not in (voltage, rated) and voltage > rated:
        c.fail(f"{path}.storage.initial_voltage_v", f"{voltage} V exceeds rated maximum {rated} V")
    if None not in (operating, ready) and operating > ready:
        c.fail(f"{path}.pmu.operating_voltage_v", "must not exceed ready_voltage_v")

    cycle, cycle_synthetic = _parse_cycle(c, tree.get("cycle"), f"{path}.cycle")
    if cycle_synthetic and node_id:
        synthetic.append(f"cycle_profile:{node_id}")
    if cycle is not None and cycle.has_phase(CyclePhase.BACKSCATTER_ID):
        bid = cycle.phase(CyclePhase.BACKSCATTER_ID).duration
        if bid + 1e-12 < window_s:
            c.fail(f"{path}.cycle", f"BackscatterId phase ({bid} s) shorter than auth window ({window_s} s)")

    if c.errors or node_id is None or address is None or secret is None or cycle is None:
        return None
    profile, curve = tables
    try:
        storage = StorageState(capacitance, voltage, leakage)
        pmu = PmuSpec(cold, operating, ready, rated, pmu_eff)
    except ValueError as e:
        c.fail(path, str(e))
        return None
    return NodeConfig(
        node_id=node_id,
        device_address=address,
        strategy=strategy,
        shared_secret=secret,
        network_key=nwk or _derived_session_key(secret, 0x01),
        application_key=app or _derived_session_key(secret, 0x02),
        reflection=profile,
        efficiency=curve,
        storage=storage,
        pmu=pmu,
        cycle=cycle,
        geometry=geometry,
        key_rotation=key_rotation,
        auth_delay_s=auth_delay,
        max_cycles=max_cycles,
    )


def _parse_attacker(c: _Checker, raw: Any, index: int, duration: float,
                    node_ids: List[str]) -> Optional[AttackerConfig]:
    path = f"attackers[{index}]"
    tree = c.section(raw, path, _ATTACKER_KEYS)
    attacker_id = tree.get("id")
    if not isinstance(attacker_id, str) or not attacker_id:
        c.fail(f"{path}.id", "must be a non-empty string")
        attacker_id = None
    else:
        path = f"attackers[{attacker_id}]"
    kind = c.choice(tree, "kind", path, AttackerKind, required=True)
    target = tree.get("target_node")
    if target is not None and target not in node_ids:
        c.fail(f"{path}.target_node", f"unknown node {target!r}")
    listen = c.frequencies(tree, "listen_channels_hz", path)
    capture_sigma = c.number(tree, "capture_sigma_db", path, 0.5, minimum=0)
    offset = c.number(tree, "replay_offset_s", path, 0.0, minimum=0)
    rate = c.number(tree, "rate_per_s", path, 1.0, minimum=0, strict=True)
    flood = c.number(tree, "flood_duration_s", path, 0.0, minimum=0)

    triggers = tree.get("trigger_times_s", [])
    times: List[float] = []
    if not isinstance(triggers, list):
        c.fail(f"{path}.trigger_times_s", "must be a list")
    else:
        for i, t in enumerate(triggers):
            if isinstance(t, bool) or not isinstance(t, (int, float)) or not 0 <= t <= duration:
                c.fail(f"{path}.trigger_times_s[{i}]", f"must lie in [0, {duration}] s, got {t!r}")
            else:
                times.append(float(t))
    if kind is AttackerKind.DOS_FLOODER and flood is not None and flood <= 0:
        c.fail(f"{path}.flood_duration_s", "dos_flooder needs a positive flood duration")
    if kind is AttackerKind.WAVEFORM_REPLAYER and target is None:
        c.fail(f"{path}.target_node", "waveform_replayer needs a target node")

    if attacker_id is None or kind is None:
        return None
    return AttackerConfig(
        attacker_id=attacker_id,
        kind=kind,
        target_node=target,
        listen_channels_hz=listen,
        capture_sigma_db=capture_sigma if capture_sigma is not None else 0.5,
        trigger_times_s=tuple(sorted(times)),
        rate_per_s=rate if rate is not None else 1.0,
        flood_duration_s=flood or 0.0,
        replay_offset_s=offset or 0.0,
    )


def parse_scenario(tree: Any, source_name: str = "scenario",
                   base_dir: Optional[Path] = None) -> Scenario:
    """
    Validate a scenario tree and build the Scenario

    Args:
        tree: decoded JSON document
        source_name: label used in diagnostics
        base_dir: directory for relative ``rectifier_tables`` paths

    Raises:
        ScenarioValidationError: listing every violated constraint
    """
    c = _Checker()
    top = c.section(tree, "", _TOP_KEYS)
    if not top and not isinstance(tree, dict):
        raise ScenarioValidationError(c.errors, source_name)
    synthetic: List[str] = []

    version = top.get("schema_version")
    if version != SCHEMA_VERSION:
        c.fail("schema_version", f"must be {SCHEMA_VERSION}, got {version!r}")
    name = top.get("name", source_name)
    if not isinstance(name, str) or not name:
        c.fail("name", "must be a non-empty string")
        name = source_name
    duration = c.number(top, "duration_s", "", minimum=0, strict=True, required=True) or 0.0
    seed = c.integer(top, "seed", "", 0, minimum=0, maximum=2 ** 64 - 1)
    charge_tick = c.number(top, "charge_tick_s", "", 0.1, minimum=0, strict=True)
    report_interval = c.number(top, "report_interval_s", "", 1.0, minimum=0, strict=True)
    security = c.flag(top, "security_layer", "", False)

    # source
    s = c.section(top.get("source"), "source", _SOURCE_KEYS)
    link = c.choice(s, "link", "source", LinkKind, LinkKind.WIRELESS)
    policy = c.choice(s, "carrier_policy", "source", CarrierPolicy, CarrierPolicy.FIXED)
    carrier = c.number(s, "carrier_hz", "source", 868e6, minimum=ISM_BAND_HZ[0], maximum=ISM_BAND_HZ[1])
    band = s.get("hop_band_hz", list(ISM_BAND_HZ))
    if not (isinstance(band, list) and len(band) == 2 and all(isinstance(b, (int, float)) for b in band)
            and ISM_BAND_HZ[0] <= band[0] < band[1] <= ISM_BAND_HZ[1]):
        c.fail("source.hop_band_hz", "must be [low, high] inside 863-870 MHz")
        band = list(ISM_BAND_HZ)
    isolation = c.number(s, "circulator_isolation_db", "source", 20.0, minimum=0)
    source = SourceConfig(
        power_dbm=c.number(s, "power_dbm", "source", 15.0, minimum=-60, maximum=36),
        carrier_hz=carrier,
        carrier_policy=policy,
        hop_band_hz=(float(band[0]), float(band[1])),
        hop_channels=c.integer(s, "hop_channels", "source", 8, minimum=1) or 8,
        antenna_gain_dbi=c.number(s, "antenna_gain_dbi", "source", 0.0),
        forward_loss_db=c.number(s, "forward_loss_db", "source", 0.8, minimum=0),
        circulator_isolation_db=isolation if isolation is not None else 20.0,
        link=link,
    )
    if link is LinkKind.WIRED and policy is CarrierPolicy.HOPPING:
        c.fail("source.carrier_policy", "hopping is not available on the wired bench")

    # monitor
    m = c.section(top.get("monitor"), "monitor", _MONITOR_KEYS)
    floor_default = None if link is LinkKind.WIRED else -40.0
    if "environment_floor_dbm" in m and m["environment_floor_dbm"] is None:
        floor = None
    else:
        floor = c.number(m, "environment_floor_dbm", "monitor", floor_default)
        if "environment_floor_dbm" not in m and floor is not None:
            synthetic.append("environment_floor_dbm")
    monitor = MonitorConfig(
        noise_sigma_db=c.number(m, "noise_sigma_db", "monitor", 0.0, minimum=0),
        environment_floor_dbm=floor,
        guard_margin_db=c.number(m, "guard_margin_db", "monitor", 0.05, minimum=0),
        window_tolerance_s=c.number(m, "window_tolerance_s", "monitor", 1e-3, minimum=0),
        frequency_tolerance_hz=c.number(m, "frequency_tolerance_hz", "monitor", 1e3, minimum=0),
        correlation_threshold=c.number(m, "correlation_threshold", "monitor", 0.9, minimum=-1, maximum=1),
    )

    # lorawan
    lw = c.section(top.get("lorawan"), "lorawan", _LORAWAN_KEYS)
    channels = c.frequencies(lw, "channels_hz", "lorawan")
    try:
        channels = channel_set(lw.get("region", "EU868"), channels)
    except ValueError as e:
        c.fail("lorawan.region", str(e))
        channels = ()
    lorawan = LorawanConfig(
        channels_hz=channels,
        airtime_s=c.number(lw, "airtime_s", "lorawan", 0.0566, minimum=0, strict=True),
        policy=GatewayPolicy(
            mode=c.choice(lw, "policy", "lorawan", GatewayMode, GatewayMode.PERMISSIVE),
            duplicate_window=c.number(lw, "duplicate_window_s", "lorawan", 3600.0, minimum=0),
            payload_crypto=c.flag(lw, "payload_crypto", "lorawan", False),
        ),
    )

    # auth
    a = c.section(top.get("auth"), "auth", _AUTH_KEYS)
    auth = AuthConfig(
        validity_s=c.number(a, "validity_s", "auth", None, minimum=0, strict=True),
        single_use=c.flag(a, "single_use", "auth", True),
        window_s=c.number(a, "window_s", "auth", 2e-3, minimum=0, strict=True),
    )

    # rectifier tables shared by every node
    tables = (default_reflection_profile(), default_efficiency_curve())
    if "rectifier_tables" in top:
        table_path = Path(str(top["rectifier_tables"]))
        if not table_path.is_absolute() and base_dir is not None:
            table_path = base_dir / table_path
        try:
            tables = load_rectifier_tables(table_path)
        except (OSError, ValueError, KeyError) as e:
            c.fail("rectifier_tables", f"cannot load {table_path}: {e}")
    else:
        synthetic.append("rectifier_tables")
    refl_band = tables[0].band
    if carrier is not None and not refl_band[0] <= carrier <= refl_band[1]:
        c.fail("source.carrier_hz", f"{carrier / 1e6:.3f} MHz outside the rectifier table band")

    # nodes
    raw_nodes = top.get("nodes", [])
    nodes: List[NodeConfig] = []
    if not isinstance(raw_nodes, list):
        c.fail("nodes", "must be a list")
        raw_nodes = []
    seen_ids, seen_addrs = set(), set()
    for i, raw in enumerate(raw_nodes):
        if isinstance(raw, dict):
            nid = raw.get("id")
            if isinstance(nid, str):
                if nid in seen_ids:
                    c.fail("nodes", f"duplicate node id {nid!r}")
                seen_ids.add(nid)
            addr = raw.get("device_address")
            if addr is not None and str(addr).lower() in seen_addrs:
                c.fail("nodes", f"duplicate device_address {addr!r}")
            seen_addrs.add(str(addr).lower())
        node = _parse_node(c, raw, i, source, auth.window_s or 2e-3, tables, synthetic)
        if node is not None:
            nodes.append(node)

    # attackers
    raw_attackers = top.get("attackers", [])
    attackers: List[AttackerConfig] = []
    if not isinstance(raw_attackers, list):
        c.fail("attackers", "must be a list")
        raw_attackers = []
    attacker_ids = set()
    for i, raw in enumerate(raw_attackers):
        att = _parse_attacker(c, raw, i, duration, sorted(seen_ids))
        if att is None:
            continue
        if att.attacker_id in attacker_ids:
            c.fail("attackers", f"duplicate attacker id {att.attacker_id!r}")
        attacker_ids.add(att.attacker_id)
        attackers.append(att)
    if any(a.kind is AttackerKind.TRANSCEIVER_CROSS_CHANNEL for a in attackers) and len(lorawan.channels_hz) < 2:
        c.fail("lorawan.channels_hz", "cross-channel replay needs at least two channels")

    if c.errors:
        logger.warning(f"✗ {source_name}: {len(c.errors)} validation error(s)")
        raise ScenarioValidationError(c.errors, source_name)

    scenario = Scenario(
        name=name,
        duration_s=duration,
        seed=seed,
        source=source,
        monitor=monitor,
        lorawan=lorawan,
        auth=auth,
        nodes=tuple(nodes),
        attackers=tuple(attackers),
        security_layer=security,
        charge_tick_s=charge_tick,
        report_interval_s=report_interval,
        schema_version=version,
        synthetic_defaults=tuple(sorted(set(synthetic))),
    )
    logger.info(f"✓ Scenario {name!r} validated ({len(nodes)} node(s), {len(attackers)} attacker(s))")
    return scenario


def resolve_scenario_path(name_or_path: Union[str, Path]) -> Path:
    """A file path as given, or the name of a shipped preset"""
    path = Path(name_or_path)
    if path.exists():
        return path
    preset = config.get_presets_dir() / f"{path.stem if path.suffix == '.json' else name_or_path}.json"
    if preset.exists():
        return preset
    raise FileNotFoundError(f"no scenario file or preset named {name_or_path!r}")


def load_scenario(name_or_path: Union[str, Path]) -> Scenario:
    """
    Read, parse and validate a scenario file or preset

    Raises:
        FileNotFoundError / OSError: unreadable file
        ScenarioValidationError: malformed JSON or violated constraints
    """
    path = resolve_scenario_path(name_or_path)
    text = path.read_text(encoding="utf-8")
    try:
        tree = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioValidationError([f"invalid JSON at line {e.lineno}: {e.msg}"], path.name)
    return parse_scenario(tree, path.stem, path.parent)


def list_presets() -> List[Path]:
    presets_dir = config.get_presets_dir()
    if not presets_dir.exists():
        return []
    return sorted(p for p in presets_dir.glob("*.json") if p.stem != "rectifier_default")
