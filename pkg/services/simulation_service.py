"""
Discrete-event simulation of one SWIPT deployment: harvesting, cold start, backscatter
identification at the P-wave monitor, the uplink security gate, the LoRaWAN gateway and
the attackers interleaved with them
"""
import asyncio
import logging
import struct
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from core.adversary import (
    Attacker,
    AttackerKind,
    CapturedWaveform,
    Injection,
    capture,
    dos_flood,
    replay,
)
from core.auth import (
    AuthEvent,
    AuthLedger,
    AuthResult,
    AuthVerdict,
    PublicKeyFingerprint,
    Strategy,
    derive_pvk,
    dual_key_expected_trace,
    hop_grid,
    hop_next,
    random_envelope,
    verify_dual_key,
    verify_hopping,
    verify_pvk,
)
from core.codec import ChipTrace, PowerTrace, PrivateKey, bit_errors, manchester_encode
from core.energy import (
    CyclePhase,
    StorageState,
    backscatter_share,
    charge,
    cold_start_ready,
    cycle_energy,
    discharge,
)
from core.event_queue import Event, EventKind, EventQueue
from core.exceptions import AttackError, InsufficientEnergyError
from core.lorawan_abp import (
    AbpFrame,
    AbpSession,
    GatewayHistory,
    build_frame,
    gateway_validate,
)
from core.rectifier import GateState, harvest_interruption_factor, harvested_dc_power, reflection_coefficient
from core.rf_link import (
    backscatter_return_power,
    dbm_to_mw,
    leakage_power,
    mw_to_dbm,
    node_incident_power,
    reflected_power_wired,
    wired_incident_power,
)
from models.report import Report
from models.scenario import CarrierPolicy, LinkKind, NodeConfig, Scenario
from utils.config import config

logger = logging.getLogger(__name__)

_STREAMS = ("monitor", "carrier", "channel", "capture")


@dataclass
class WindowRecord:
    """One backscatter identification window as seen by the monitor"""
    window_id: int
    node_id: str
    carrier: float
    start: float
    end: float
    chips: ChipTrace  # effective reflection state per chip
    event: AuthEvent
    levels: np.ndarray
    source: str = "node"
    collided: bool = False

    def overlaps(self, other: "WindowRecord") -> bool:
        return self.start < other.end and other.start < self.end


def detect_collision(active_windows: Iterable[WindowRecord]) -> Dict[int, bool]:
    """
    Mark every window that overlaps another one on the same carrier

    Returns:
        window_id -> True when the window collided
    """
    windows = list(active_windows)
    verdicts = {w.window_id: False for w in windows}
    for i, a in enumerate(windows):
        for b in windows[i + 1:]:
            if abs(a.carrier - b.carrier) < 1.0 and a.overlaps(b):
                verdicts[a.window_id] = True
                verdicts[b.window_id] = True
    return verdicts


@dataclass
class NodeRuntime:
    config: NodeConfig
    session: AbpSession
    storage: StorageState
    cold_started: bool = False
    busy: bool = False
    cycles: int = 0
    key_counter: int = 0
    time_to_ready: Optional[float] = None
    cycle_start: float = 0.0
    gate_seconds: float = 0.0
    harvested_j: float = 0.0
    consumed_j: float = 0.0
    brownouts: int = 0
    frames_sent: int = 0
    frames_accepted: int = 0
    auth_attempts: int = 0
    auth_verdicts: Dict[str, int] = field(default_factory=dict)
    window: Optional[WindowRecord] = None

    @property
    def node_id(self) -> str:
        return self.config.node_id

    def current_key(self) -> PrivateKey:
        return derive_pvk(self.config.shared_secret, self.config.device_address, self.key_counter)


class SimulationEngine:
    """Single-threaded event loop over one Scenario"""

    def __init__(self, scenario: Scenario):
        self.scenario = scenario
        self.queue = EventQueue()
        seeds = np.random.SeedSequence(scenario.seed).spawn(len(_STREAMS))
        self.rng = {name: np.random.default_rng(s) for name, s in zip(_STREAMS, seeds)}

        self.nodes: Dict[str, NodeRuntime] = {}
        for n in scenario.nodes:
            session = AbpSession(n.device_address, n.network_key, n.application_key)
            self.nodes[n.node_id] = NodeRuntime(n, session, n.storage)
        self.by_address = {n.device_address: n.node_id for n in scenario.nodes}
        self.sessions = {rt.config.device_address: rt.session for rt in self.nodes.values()}

        self.attackers: Dict[str, Attacker] = {}
        for a in scenario.attackers:
            self.attackers[a.attacker_id] = Attacker(
                attacker_id=a.attacker_id,
                kind=a.kind,
                listen_channels=a.listen_channels_hz,
                capture_sigma=a.capture_sigma_db,
                trigger_times=a.trigger_times_s,
                target_node=a.target_node,
                replay_offset=a.replay_offset_s,
            )
        self.attacker_stats = {a: {"kind": att.kind.value, "captures": 0, "injections": 0, "verdicts": {}}
                               for a, att in self.attackers.items()}

        self.ledger = AuthLedger(single_use=scenario.auth.single_use)
        self.history = GatewayHistory()
        self.grid = hop_grid(scenario.source.hop_band_hz,
                             (scenario.source.hop_band_hz[1] - scenario.source.hop_band_hz[0])
                             / scenario.source.hop_channels)
        self.windows: List[WindowRecord] = []
        self._window_seq = 0
        self._return_cache: Dict[Tuple[str, float, GateState], float] = {}

        self.auth_events: List[dict] = []
        self.frames: List[dict] = []
        self.injections: List[dict] = []
        self.timeline: List[dict] = []
        self.collisions = 0

    # ------------------------------------------------------------------ physics

    def _incident_power(self, node: NodeConfig, carrier: float) -> float:
        src = self.scenario.source
        if src.link is LinkKind.WIRED:
            return wired_incident_power(src.power_dbm, src.forward_loss_db)
        return node_incident_power(src.power_dbm, src.forward_loss_db, node.geometry, carrier)

    def _return_power(self, node: NodeConfig, carrier: float, gate: GateState) -> float:
        key = (node.node_id, carrier, gate)
        if key not in self._return_cache:
            src = self.scenario.source
            p_in = self._incident_power(node, carrier)
            s11 = reflection_coefficient(node.reflection, gate, carrier, p_in)
            if src.link is LinkKind.WIRED:
                level = reflected_power_wired(src.power_dbm, src.forward_loss_db, s11)
            else:
                level = backscatter_return_power(src.power_dbm, src.forward_loss_db, node.geometry, carrier, s11)
            self._return_cache[key] = level
        return self._return_cache[key]

    def _background_mw(self) -> float:
        src = self.scenario.source
        floor = self.scenario.monitor.environment_floor_dbm
        total = dbm_to_mw(leakage_power(src.power_dbm, src.circulator_isolation_db))
        if floor is not None:
            total += dbm_to_mw(floor)
        return total

    def expected_levels(self, node_id: str, carrier: float) -> Tuple[float, float]:
        """Noise-free monitor (high, low) levels with only this node modulating"""
        base = self._background_mw()
        others = sum(dbm_to_mw(self._return_power(rt.config, carrier, GateState.HARVEST))
                     for nid, rt in self.nodes.items() if nid != node_id)
        node = self.nodes[node_id].config
        high = base + others + dbm_to_mw(self._return_power(node, carrier, GateState.BACKSCATTER))
        low = base + others + dbm_to_mw(self._return_power(node, carrier, GateState.HARVEST))
        return mw_to_dbm(high), mw_to_dbm(low)

    def _monitor_sample(self, carrier: float, t: float) -> float:
        total = self._background_mw()
        for rt in self.nodes.values():
            gate = GateState.HARVEST
            w = rt.window
            if w is not None and abs(w.carrier - carrier) < 1.0:
                idx = w.chips.chip_index(t)
                if idx is not None and w.chips.chips[idx]:
                    gate = GateState.BACKSCATTER
            total += dbm_to_mw(self._return_power(rt.config, carrier, gate))
        level = mw_to_dbm(total)
        sigma = self.scenario.monitor.noise_sigma_db
        if sigma > 0:
            level += float(self.rng["monitor"].normal(0.0, sigma))
        return level

    # ------------------------------------------------------------------ energy

    def _spend(self, rt: NodeRuntime, phase: CyclePhase) -> bool:
        if not rt.config.cycle.has_phase(phase):
            return True
        joules = rt.config.cycle.phase(phase).energy
        try:
            rt.storage = discharge(rt.storage, joules)
        except InsufficientEnergyError as e:
            rt.brownouts += 1
            rt.busy = False
            logger.warning(f"{rt.node_id}: brown-out in {phase.value} at t={self.queue.now:.3f}s ({e})")
            return False
        rt.consumed_j += joules
        return True

    def _phase_duration(self, rt: NodeRuntime, phase: CyclePhase) -> float:
        cycle = rt.config.cycle
        return cycle.phase(phase).duration if cycle.has_phase(phase) else 0.0

    # ------------------------------------------------------------------ handlers

    def _on_charge_tick(self, event: Event):
        dt = self.scenario.charge_tick_s
        carrier = self.scenario.source.carrier_hz
        now = event.time
        for rt in self.nodes.values():
            cfg = rt.config
            dc = harvested_dc_power(cfg.efficiency, carrier, self._incident_power(cfg, carrier)) * cfg.pmu.efficiency
            if not rt.cold_started:
                if not cold_start_ready(dc, cfg.pmu):
                    rt.gate_seconds = 0.0
                    continue
                rt.cold_started = True
                logger.info(f"{rt.node_id}: PMU cold start at t={now:.3f}s ({dc:.1f} µW)")
            duty = min(rt.gate_seconds / dt, 1.0)
            rt.gate_seconds = 0.0
            effective = dc * harvest_interruption_factor(duty)
            before = rt.storage.energy
            rt.storage = charge(rt.storage, effective, dt)
            if rt.storage.voltage > cfg.pmu.rated_voltage:
                rt.storage = StorageState(rt.storage.capacitance, cfg.pmu.rated_voltage, rt.storage.leakage_uw)
            rt.harvested_j += max(rt.storage.energy - before, 0.0)
            if not rt.busy and rt.storage.voltage >= cfg.pmu.ready_voltage:
                self._schedule_ready(rt, now)
        if now + dt <= self.scenario.duration_s:
            self.queue.schedule(now + dt, EventKind.CHARGE_TICK)

    def _schedule_ready(self, rt: NodeRuntime, now: float):
        if rt.config.max_cycles is not None and rt.cycles >= rt.config.max_cycles:
            return
        rt.busy = True
        self.queue.schedule(now, EventKind.NODE_READY, rt.node_id)

    def _on_node_ready(self, event: Event):
        rt = self.nodes[event.subject]
        now = event.time
        if event.payload.get("cycle_end"):
            self._spend(rt, CyclePhase.SLEEP)
            rt.busy = False
            if rt.config.key_rotation:
                rt.key_counter += 1
            if rt.cold_started and rt.storage.voltage >= rt.config.pmu.ready_voltage:
                self._schedule_ready(rt, now)
            return

        if rt.time_to_ready is None:
            rt.time_to_ready = now
            logger.info(f"✓ {rt.node_id} ready at t={now:.3f}s ({rt.storage.voltage:.3f} V)")
        if not (self._spend(rt, CyclePhase.INIT) and self._spend(rt, CyclePhase.SENSE)):
            return
        rt.cycles += 1
        rt.cycle_start = now
        delay = (self._phase_duration(rt, CyclePhase.INIT) + self._phase_duration(rt, CyclePhase.SENSE)
                 + rt.config.auth_delay_s)
        self.queue.schedule(now + delay, EventKind.AUTH_WINDOW_START, rt.node_id)

    def _fingerprint(self, strategy: Strategy) -> PublicKeyFingerprint:
        src = self.scenario.source
        if strategy is Strategy.HOPPING or src.carrier_policy is CarrierPolicy.HOPPING:
            carrier = hop_next(self.rng["carrier"], self.grid)
        else:
            carrier = src.carrier_hz
        if strategy is Strategy.DUAL_KEY:
            return PublicKeyFingerprint(carrier, random_envelope(self.rng["carrier"]))
        return PublicKeyFingerprint(carrier)

    def _on_auth_window_start(self, event: Event):
        rt = self.nodes[event.subject]
        now = event.time
        if not self._spend(rt, CyclePhase.BACKSCATTER_ID):
            return
        window = self.scenario.auth.window_s
        key = rt.current_key()
        fingerprint = self._fingerprint(rt.config.strategy)
        auth_event = AuthEvent(rt.node_id, rt.config.strategy, key, fingerprint, now, window)

        node_chips = manchester_encode(key, window, now)
        chips = node_chips.chips
        if fingerprint.envelope_pattern is not None:
            envelope = np.repeat(fingerprint.envelope_pattern, len(node_chips) // fingerprint.envelope_pattern.size)
            chips = chips & envelope
        effective = ChipTrace(node_chips.chip_duration, chips, now)

        record = WindowRecord(self._window_seq, rt.node_id, fingerprint.carrier, now, now + window,
                              effective, auth_event, np.full(len(effective), np.nan))
        self._window_seq += 1
        rt.window = record
        self.windows.append(record)
        rt.auth_attempts += 1

        for i in range(len(effective)):
            self.queue.schedule(now + (i + 0.5) * effective.chip_duration, EventKind.CHIP_EDGE,
                                rt.node_id, window_id=record.window_id, index=i)
        self.queue.schedule(now + window, EventKind.AUTH_WINDOW_END, rt.node_id, window_id=record.window_id)
        logger.debug(f"{rt.node_id}: identification window on {fingerprint.carrier / 1e6:.4f} MHz at t={now:.6f}s")

    def _on_chip_edge(self, event: Event):
        rt = self.nodes[event.subject]
        w = rt.window
        if w is None or w.window_id != event.payload["window_id"]:
            return
        w.levels[event.payload["index"]] = self._monitor_sample(w.carrier, event.time)

    def _verify(self, w: WindowRecord, observed: PowerTrace, expected: AuthEvent) -> AuthResult:
        mon = self.scenario.monitor
        if expected.strategy is Strategy.HOPPING:
            return verify_hopping(w.carrier, observed, expected, mon.frequency_tolerance_hz,
                                  mon.window_tolerance_s, mon.guard_margin_db)
        if expected.strategy is Strategy.DUAL_KEY:
            high, low = self.expected_levels(expected.node_id, expected.fingerprint.carrier)
            template = dual_key_expected_trace(expected.fingerprint, expected.expected_key,
                                               expected.window_duration, high, low, expected.window_start)
            if abs(w.carrier - expected.fingerprint.carrier) > mon.frequency_tolerance_hz:
                return AuthResult(AuthVerdict.FREQUENCY_MISMATCH, 0.0, "response on another carrier")
            return verify_dual_key(observed, template, mon.correlation_threshold,
                                   expected.window_start, mon.window_tolerance_s)
        if abs(w.carrier - expected.fingerprint.carrier) > mon.frequency_tolerance_hz:
            return AuthResult(AuthVerdict.FREQUENCY_MISMATCH, 0.0, "response on another carrier")
        return verify_pvk(observed, expected.expected_key, expected.window_start,
                          mon.window_tolerance_s, mon.guard_margin_db)

    def _validity(self, rt: NodeRuntime) -> float:
        return self.scenario.auth.validity_s or rt.config.cycle.period

    def _record_auth(self, rt: NodeRuntime, w: WindowRecord, result: AuthResult, now: float,
                     dynamic_range: Optional[float], errors: Optional[Tuple[int, int]]):
        from_node = w.source == "node"
        # a rejected replay must not revoke the node's own identification
        if from_node or result.accepted:
            self.ledger.record(rt.node_id, result, now, self._validity(rt))
        if from_node:
            rt.auth_verdicts[result.verdict.value] = rt.auth_verdicts.get(result.verdict.value, 0) + 1
        self.auth_events.append({
            "time_s": w.start,
            "node": rt.node_id,
            "source": w.source,
            "strategy": w.event.strategy.value,
            "carrier_hz": w.carrier,
            "verdict": result.verdict.value,
            "score": result.correlation_score,
            "dynamic_range_db": dynamic_range,
            "bit_errors": errors[0] if errors else None,
            "bits": errors[1] if errors else None,
            "detail": result.detail,
        })

    def _on_auth_window_end(self, event: Event):
        rt = self.nodes[event.subject]
        now = event.time
        w = rt.window
        if w is None or w.window_id != event.payload["window_id"]:
            return

        recent = [v for v in self.windows if v.end > w.start - 1e-12]
        verdicts = detect_collision(recent)
        for v in recent:
            if verdicts[v.window_id] and not v.collided:
                v.collided = True
                self.collisions += 1
        self.windows = [v for v in self.windows if v.end >= now - self.scenario.auth.window_s]

        observed = PowerTrace(w.chips.chip_duration, w.levels, self.scenario.monitor.noise_sigma_db, w.start)
        chips = w.chips.chips.astype(bool)
        dynamic_range = None
        if chips.any() and (~chips).any():
            dynamic_range = float(observed.levels[chips].mean() - observed.levels[~chips].mean())

        errors = None
        if w.collided:
            result = AuthResult(AuthVerdict.COLLISION_DETECTED, 0.0, "overlapping window on the same carrier")
        else:
            result = self._verify(w, observed, w.event)
            if w.event.strategy is not Strategy.DUAL_KEY:
                errors = bit_errors(observed, w.event.expected_key)
        self._record_auth(rt, w, result, now, dynamic_range, errors)
        rt.gate_seconds += float(chips.sum()) * w.chips.chip_duration
        rt.window = None

        for att in self.attackers.values():
            if att.kind.stores_waveforms:
                before = att.buffer_size
                capture(att, CapturedWaveform(w.carrier, observed, rt.node_id), self.rng["capture"])
                if att.buffer_size > before:
                    self.attacker_stats[att.attacker_id]["captures"] += 1

        tx_at = max(now, rt.cycle_start + self._phase_duration(rt, CyclePhase.INIT)
                    + self._phase_duration(rt, CyclePhase.SENSE) + rt.config.auth_delay_s
                    + self._phase_duration(rt, CyclePhase.BACKSCATTER_ID))
        self.queue.schedule(tx_at, EventKind.FRAME_TX, rt.node_id)
        log = logger.info if result.accepted else logger.warning
        log(f"{'✓' if result.accepted else '✗'} {rt.node_id} identification at t={w.start:.6f}s: "
            f"{result.verdict.value}")

    def _payload(self, rt: NodeRuntime) -> bytes:
        millivolts = min(int(round(rt.storage.voltage * 1000)), 0xFFFF)
        return struct.pack(">cHH", b"T", rt.cycles % 0x10000, millivolts)

    def _on_frame_tx(self, event: Event):
        rt = self.nodes[event.subject]
        now = event.time
        if not self._spend(rt, CyclePhase.LORA_TX):
            return
        channels = self.scenario.lorawan.channels_hz
        channel = channels[int(self.rng["channel"].integers(len(channels)))]
        frame = build_frame(rt.session, self._payload(rt), channel, channels)
        rt.frames_sent += 1
        for att in self.attackers.values():
            if not att.kind.stores_waveforms:
                before = att.buffer_size
                capture(att, frame, self.rng["capture"])
                if att.buffer_size > before:
                    self.attacker_stats[att.attacker_id]["captures"] += 1
        self.queue.schedule(now + self.scenario.lorawan.airtime_s, EventKind.FRAME_RX,
                            rt.node_id, frame=frame, tx_time=now)

        cycle_end = rt.cycle_start + rt.config.cycle.period + rt.config.auth_delay_s
        self.queue.schedule(max(cycle_end, now), EventKind.NODE_READY, rt.node_id, cycle_end=True)

    def _on_frame_rx(self, event: Event):
        frame: AbpFrame = event.payload["frame"]
        now = event.time
        lw = self.scenario.lorawan
        row = {
            "rx_time_s": now,
            "tx_time_s": event.payload["tx_time"],
            "device_address": f"0x{frame.device_address:08X}",
            "fcnt": frame.frame_counter,
            "channel_hz": frame.channel,
            "provenance": frame.provenance,
            "gate": "disabled",
            "verdict": None,
        }
        if all(abs(frame.channel - ch) >= 1.0 for ch in lw.channels_hz):
            row["verdict"] = "NotHeard"
        else:
            allowed = True
            if self.scenario.security_layer:
                node_id = self.by_address.get(frame.device_address)
                allowed = node_id is not None and self.ledger.gate(node_id, now)
                row["gate"] = "passed" if allowed else "blocked"
            if allowed:
                verdict = gateway_validate(frame, self.sessions, lw.policy, self.history, now, lw.airtime_s)
                row["verdict"] = verdict.value
                if frame.provenance == "node" and verdict.accepted:
                    self.nodes[self.by_address[frame.device_address]].frames_accepted += 1
            else:
                self.history.airtime += lw.airtime_s
                row["verdict"] = "Blocked"
        self.frames.append(row)
        injection_row = event.payload.get("injection_row")
        if injection_row is not None:
            injection_row["verdict"] = row["verdict"]
            stats = self.attacker_stats[injection_row["attacker"]]["verdicts"]
            stats[row["verdict"]] = stats.get(row["verdict"], 0) + 1

    def _schedule_injection(self, att: Attacker, injection: Injection):
        row = {
            "time_s": injection.time,
            "attacker": att.attacker_id,
            "kind": att.kind.value,
            "target": att.target_node,
            "fcnt": injection.frame.frame_counter if injection.frame else None,
            "channel_hz": injection.frame.channel if injection.frame else injection.waveform.carrier,
            "verdict": None,
        }
        self.injections.append(row)
        self.attacker_stats[att.attacker_id]["injections"] += 1
        if injection.frame is not None:
            self.queue.schedule(injection.time + self.scenario.lorawan.airtime_s, EventKind.FRAME_RX,
                                att.attacker_id, frame=injection.frame, tx_time=injection.time,
                                injection_row=row)
        return row

    def _on_attack_trigger(self, event: Event):
        att = self.attackers[event.subject]
        now = event.time
        cfg = next(a for a in self.scenario.attackers if a.attacker_id == att.attacker_id)
        channels = self.scenario.lorawan.channels_hz
        try:
            if att.kind is AttackerKind.DOS_FLOODER:
                for injection in dos_flood(att, cfg.rate_per_s, cfg.flood_duration_s, now, channels):
                    self._schedule_injection(att, injection)
                return
            injection = replay(att, now, channels)
        except AttackError as e:
            logger.warning(f"✗ {att.attacker_id} at t={now:.3f}s: {e}")
            self.injections.append({"time_s": now, "attacker": att.attacker_id, "kind": att.kind.value,
                                    "target": att.target_node, "fcnt": None, "channel_hz": None,
                                    "verdict": "NoCapture"})
            stats = self.attacker_stats[att.attacker_id]["verdicts"]
            stats["NoCapture"] = stats.get("NoCapture", 0) + 1
            return

        row = self._schedule_injection(att, injection)
        if injection.waveform is not None:
            result = self._verify_waveform_replay(att, injection, now)
            row["verdict"] = result.verdict.value
            stats = self.attacker_stats[att.attacker_id]["verdicts"]
            stats[result.verdict.value] = stats.get(result.verdict.value, 0) + 1

    def _verify_waveform_replay(self, att: Attacker, injection: Injection, now: float) -> AuthResult:
        """The monitor challenges the impersonated node afresh and checks the replayed waveform"""
        rt = self.nodes[att.target_node]
        window = self.scenario.auth.window_s
        expected = AuthEvent(rt.node_id, rt.config.strategy, rt.current_key(),
                             self._fingerprint(rt.config.strategy), now, window)
        stored = injection.waveform.trace
        sigma = self.scenario.monitor.noise_sigma_db
        levels = stored.levels
        if sigma > 0:
            levels = levels + self.rng["monitor"].normal(0.0, sigma, levels.size)
        observed = PowerTrace(stored.chip_duration, levels, sigma, stored.start_time)
        record = WindowRecord(-1, rt.node_id, injection.waveform.carrier, now, now + window,
                              manchester_encode(expected.expected_key, window, now), expected,
                              observed.levels, source=f"replay:{att.attacker_id}")
        result = self._verify(record, observed, expected)
        self._record_auth(rt, record, result, now, None, None)
        log = logger.warning if result.accepted else logger.info
        log(f"{att.attacker_id}: waveform replay as {rt.node_id} -> {result.verdict.value}")
        return result

    def _on_report_tick(self, event: Event):
        for rt in self.nodes.values():
            self.timeline.append({
                "time_s": event.time,
                "node": rt.node_id,
                "voltage_v": rt.storage.voltage,
                "energy_j": rt.storage.energy,
                "cold_started": rt.cold_started,
                "busy": rt.busy,
            })
        nxt = event.time + self.scenario.report_interval_s
        if nxt <= self.scenario.duration_s:
            self.queue.schedule(nxt, EventKind.REPORT_TICK)

    # ------------------------------------------------------------------ loop

    def _seed_events(self):
        self.queue.schedule(0.0, EventKind.REPORT_TICK)
        if self.nodes:
            self.queue.schedule(0.0, EventKind.CHARGE_TICK)
        for att in self.attackers.values():
            for t in att.trigger_times:
                self.queue.schedule(t, EventKind.ATTACK_TRIGGER, att.attacker_id)

    def run(self) -> Report:
        handlers = {
            EventKind.CHARGE_TICK: self._on_charge_tick,
            EventKind.NODE_READY: self._on_node_ready,
            EventKind.AUTH_WINDOW_START: self._on_auth_window_start,
            EventKind.CHIP_EDGE: self._on_chip_edge,
            EventKind.AUTH_WINDOW_END: self._on_auth_window_end,
            EventKind.FRAME_TX: self._on_frame_tx,
            EventKind.FRAME_RX: self._on_frame_rx,
            EventKind.ATTACK_TRIGGER: self._on_attack_trigger,
            EventKind.REPORT_TICK: self._on_report_tick,
        }
        self._seed_events()
        duration = self.scenario.duration_s
        while self.queue and self.queue.peek().time <= duration:
            event = self.queue.advance()
            handlers[event.kind](event)
        return self._build_report()

    def _build_report(self) -> Report:
        s = self.scenario
        own = [e for e in self.auth_events if e["source"] == "node"]
        replays = [e for e in self.auth_events if e["source"] != "node"]
        decoded = [e for e in self.auth_events if e["bits"]]
        total_bits = sum(e["bits"] for e in decoded)
        total_errors = sum(e["bit_errors"] for e in decoded)
        ranges = [e["dynamic_range_db"] for e in self.auth_events if e["dynamic_range_db"] is not None]

        nodes = {}
        for rt in self.nodes.values():
            ledger = cycle_energy(rt.config.cycle)
            nodes[rt.node_id] = {
                "device_address": f"0x{rt.config.device_address:08X}",
                "strategy": rt.config.strategy.value,
                "time_to_ready_s": rt.time_to_ready,
                "cycles": rt.cycles,
                "auth_attempts": rt.auth_attempts,
                "auth_verdicts": dict(sorted(rt.auth_verdicts.items())),
                "frames_sent": rt.frames_sent,
                "frames_accepted": rt.frames_accepted,
                "energy": {
                    "cycle_ledger_j": ledger,
                    "backscatter_share": backscatter_share(rt.config.cycle),
                    "harvested_j": rt.harvested_j,
                    "consumed_j": rt.consumed_j,
                    "final_voltage_v": rt.storage.voltage,
                    "brownouts": rt.brownouts,
                },
            }

        attackers = {}
        for aid, stats in self.attacker_stats.items():
            entry = dict(stats)
            entry["verdicts"] = dict(sorted(stats["verdicts"].items()))
            entry["accepted"] = sum(v for k, v in stats["verdicts"].items() if k in ("Accepted", "AcceptedDuplicate"))
            attackers[aid] = entry

        report = Report(
            scenario={
                "name": s.name,
                "seed": s.seed,
                "schema_version": s.schema_version,
                "duration_s": s.duration_s,
                "security_layer": s.security_layer,
                "link": s.source.link.value,
                "carrier_hz": s.source.carrier_hz,
                "carrier_policy": s.source.carrier_policy.value,
            },
            summary={
                "auth_windows": len(own),
                "auth_accepted": sum(1 for e in own if e["verdict"] == AuthVerdict.ACCEPTED.value),
                "replay_attempts": len(replays),
                "replay_accepted": sum(1 for e in replays if e["verdict"] == AuthVerdict.ACCEPTED.value),
                "collisions": self.collisions,
                "mean_dynamic_range_db": float(np.mean(ranges)) if ranges else None,
                "min_dynamic_range_db": float(np.min(ranges)) if ranges else None,
                "ber": total_errors / total_bits if total_bits else None,
                "bit_errors": total_errors,
                "bits": total_bits,
                "frames_received": len(self.frames),
                "adversarial_accepted": sum(1 for f in self.frames if f["provenance"] != "node"
                                            and f["verdict"] in ("Accepted", "AcceptedDuplicate")),
            },
            nodes=nodes,
            attackers=attackers,
            gateway={
                "policy": s.lorawan.policy.mode.value,
                "payload_crypto": s.lorawan.policy.payload_crypto,
                "duplicate_window_s": s.lorawan.policy.duplicate_window,
                "channels_hz": list(s.lorawan.channels_hz),
                "verdicts": dict(sorted(self.history.verdicts.items())),
                "airtime_s": self.history.airtime,
                "occupancy": self.history.airtime / s.duration_s if s.duration_s else 0.0,
            },
            auth_events=self.auth_events,
            frames=self.frames,
            injections=self.injections,
            timeline=self.timeline,
            events_processed=dict(sorted(self.queue.processed.items())),
            synthetic_defaults=list(s.synthetic_defaults),
        )
        logger.info(f"Run {s.name!r} finished: {report.summary['auth_accepted']}/{report.summary['auth_windows']} "
                    f"identifications accepted, {len(self.frames)} frame(s) at the gateway")
        return report


def run(scenario: Scenario) -> Report:
    """Execute one scenario to completion"""
    return SimulationEngine(scenario).run()


def _sweep_point(scenario: Scenario, carrier_hz: float, seed: int) -> dict:
    report = run(scenario.with_carrier(carrier_hz).with_seed(seed))
    return {
        "carrier_hz": carrier_hz,
        "seed": seed,
        "auth_windows": report.summary["auth_windows"],
        "auth_accepted": report.summary["auth_accepted"],
        "mean_dynamic_range_db": report.summary["mean_dynamic_range_db"],
        "ber": report.summary["ber"],
    }


async def _sweep_async(scenario: Scenario, carriers: Sequence[float], workers: int) -> List[dict]:
    semaphore = asyncio.Semaphore(workers)
    loop = asyncio.get_running_loop()
    with ProcessPoolExecutor(max_workers=workers) as pool:
        async def one(index: int, carrier: float) -> dict:
            async with semaphore:
                return await loop.run_in_executor(pool, _sweep_point, scenario, carrier, scenario.seed + index)
        return list(await asyncio.gather(*(one(i, f) for i, f in enumerate(carriers))))


def sweep(scenario: Scenario, carriers: Sequence[float], workers: Optional[int] = None) -> List[dict]:
    """
    Run one scenario across carriers in parallel worker processes

    Each carrier gets seed = scenario.seed + its index, so rows do not depend on the
    worker count or completion order.
    """
    if not carriers:
        return []
    workers = workers or config.SWEEP_WORKERS
    if workers <= 1:
        return [_sweep_point(scenario, f, scenario.seed + i) for i, f in enumerate(carriers)]
    rows = asyncio.run(_sweep_async(scenario, carriers, workers))
    logger.info(f"✓ Sweep over {len(carriers)} carrier(s) finished")
    return rows
