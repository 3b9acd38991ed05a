"""
Attacker models: passive capture, same/cross-channel frame replay, PvK waveform replay
and replay flooding
"""
import enum
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from core.auth import (
    DEFAULT_CORRELATION_THRESHOLD,
    AuthEvent,
    AuthVerdict,
    PublicKeyFingerprint,
    Strategy,
    dual_key_expected_trace,
    hop_grid,
    hop_next,
    random_envelope,
    verify_dual_key,
    verify_hopping,
    verify_pvk,
)
from core.codec import DEFAULT_WINDOW_S, PowerTrace, PrivateKey, manchester_encode, modulate
from core.exceptions import AttackError, ChannelSetError
from core.lorawan_abp import AbpFrame

logger = logging.getLogger(__name__)


class AttackerKind(enum.Enum):
    SDR_SAME_CHANNEL = "sdr_same_channel"
    TRANSCEIVER_CROSS_CHANNEL = "transceiver_cross_channel"
    WAVEFORM_REPLAYER = "waveform_replayer"
    DOS_FLOODER = "dos_flooder"

    @property
    def stores_waveforms(self) -> bool:
        return self is AttackerKind.WAVEFORM_REPLAYER


@dataclass(frozen=True, eq=False)
class CapturedWaveform:
    """Backscattered identification waveform as heard on a carrier"""
    carrier: float
    trace: PowerTrace
    node_id: str = ""


@dataclass(frozen=True, eq=False)
class Injection:
    """One adversarial transmission"""
    time: float
    attacker_id: str
    frame: Optional[AbpFrame] = None
    waveform: Optional[CapturedWaveform] = None


Observable = Union[AbpFrame, CapturedWaveform]


@dataclass(eq=False)
class Attacker:
    attacker_id: str
    kind: AttackerKind
    listen_channels: Optional[Tuple[float, ...]] = None  # None = wideband
    capture_sigma: float = 0.5
    trigger_times: Tuple[float, ...] = ()
    target_node: Optional[str] = None
    replay_offset: float = 0.0
    frame_buffer: List[AbpFrame] = field(default_factory=list)
    trace_buffer: List[CapturedWaveform] = field(default_factory=list)

    @property
    def buffer_size(self) -> int:
        return len(self.trace_buffer) if self.kind.stores_waveforms else len(self.frame_buffer)

    def listening_on(self, frequency: float) -> bool:
        if self.listen_channels is None:
            return True
        return any(abs(frequency - ch) < 1.0 for ch in self.listen_channels)


def capture(attacker: Attacker, observable: Observable, rng: np.random.Generator) -> Attacker:
    """
    Record an observable heard on a monitored frequency

    Frames are captured bit-exactly; waveforms are re-recorded with the attacker's
    own analog noise.
    """
    if isinstance(observable, AbpFrame):
        if attacker.kind.stores_waveforms or not attacker.listening_on(observable.channel):
            return attacker
        attacker.frame_buffer.append(observable)
        logger.debug(f"{attacker.attacker_id} captured fcnt {observable.frame_counter} "
                     f"on {observable.channel / 1e6:.1f} MHz")
        return attacker

    if not attacker.kind.stores_waveforms or not attacker.listening_on(observable.carrier):
        return attacker
    if attacker.target_node and observable.node_id and observable.node_id != attacker.target_node:
        return attacker
    levels = observable.trace.levels
    if attacker.capture_sigma > 0:
        levels = levels + rng.normal(0.0, attacker.capture_sigma, levels.size)
    stored = PowerTrace(observable.trace.chip_duration, levels,
                        float(np.hypot(observable.trace.noise_sigma, attacker.capture_sigma)),
                        observable.trace.start_time)
    attacker.trace_buffer.append(CapturedWaveform(observable.carrier, stored, observable.node_id))
    logger.debug(f"{attacker.attacker_id} captured waveform on {observable.carrier / 1e6:.4f} MHz")
    return attacker


def _other_channel(capture_channel: float, channels: Sequence[float]) -> float:
    ordered = list(channels)
    others = [ch for ch in ordered if abs(ch - capture_channel) >= 1.0]
    if not others:
        raise ChannelSetError("cross-channel replay needs at least two channels in the set")
    # next member after the capture channel, wrapping
    later = [ch for ch in others if ch > capture_channel]
    return later[0] if later else others[0]


def replay(attacker: Attacker, at_time: float, channel_choice: Sequence[float] = ()) -> Injection:
    """
    Re-emit the most recent capture

    Raises:
        AttackError: nothing captured yet
    """
    if attacker.buffer_size == 0:
        raise AttackError(f"{attacker.attacker_id}: capture buffer is empty")

    if attacker.kind.stores_waveforms:
        stored = attacker.trace_buffer[-1]
        retimed = CapturedWaveform(stored.carrier, stored.trace.retimed(at_time + attacker.replay_offset),
                                   stored.node_id)
        return Injection(at_time, attacker.attacker_id, waveform=retimed)

    frame = attacker.frame_buffer[-1]
    if attacker.kind is AttackerKind.TRANSCEIVER_CROSS_CHANNEL:
        channel = _other_channel(frame.channel, channel_choice)
    else:
        channel = frame.channel
    return Injection(at_time, attacker.attacker_id,
                     frame=frame.retagged(f"replay:{attacker.attacker_id}", channel))


def dos_flood(attacker: Attacker, rate: float, duration: float, start: float = 0.0,
              channel_choice: Sequence[float] = ()) -> List[Injection]:
    """rate·duration replays of the latest captured frame, evenly spaced"""
    if rate <= 0:
        raise ValueError(f"flood rate must be > 0 frames/s, got {rate}")
    count = int(round(rate * duration))
    if count <= 0:
        return []
    injections = []
    for i in range(count):
        injection = replay(attacker, start + i / rate, channel_choice)
        injections.append(Injection(injection.time, attacker.attacker_id,
                                    frame=injection.frame.retagged(f"flood:{attacker.attacker_id}")))
    logger.info(f"{attacker.attacker_id}: scheduled {count} flood frames over {duration:.1f}s")
    return injections


def estimate_replay_acceptance(strategy: Strategy, epochs: int, seed: int,
                               hop_channels: int = 8,
                               high_level: float = -12.13, low_level: float = -29.07,
                               monitor_sigma: float = 0.0, capture_sigma: float = 0.1,
                               threshold: float = DEFAULT_CORRELATION_THRESHOLD,
                               window: float = DEFAULT_WINDOW_S) -> float:
    """
    Monte Carlo acceptance rate of a stale waveform replayer

    Each epoch the attacker replays the waveform recorded in the previous epoch,
    re-timed into the current window at the carrier it was recorded on.
    """
    if epochs <= 0:
        raise ValueError("epochs must be > 0")
    rng = np.random.default_rng(seed)
    key = PrivateKey(rng.integers(0, 256, 16, dtype=np.uint8).tobytes())
    band = (863e6, 870e6)
    grid = hop_grid(band, (band[1] - band[0]) / hop_channels)
    fixed_carrier = 868e6

    def epoch_fingerprint() -> PublicKeyFingerprint:
        if strategy is Strategy.HOPPING:
            return PublicKeyFingerprint(hop_next(rng, grid))
        if strategy is Strategy.DUAL_KEY:
            return PublicKeyFingerprint(fixed_carrier, random_envelope(rng))
        return PublicKeyFingerprint(fixed_carrier)

    def legit_trace(fp: PublicKeyFingerprint, start: float) -> PowerTrace:
        if strategy is Strategy.DUAL_KEY:
            template = dual_key_expected_trace(fp, key, window, high_level, low_level, start)
            noise = rng.normal(0.0, monitor_sigma, len(template)) if monitor_sigma > 0 else 0.0
            return PowerTrace(template.chip_duration, template.levels + noise, monitor_sigma, start)
        return modulate(manchester_encode(key, window, start), high_level, low_level, monitor_sigma, rng)

    previous = epoch_fingerprint()
    recorded = legit_trace(previous, 0.0)
    recorded = PowerTrace(recorded.chip_duration,
                          recorded.levels + rng.normal(0.0, capture_sigma, len(recorded)),
                          capture_sigma, 0.0)
    accepted = 0
    for epoch in range(1, epochs + 1):
        start = float(epoch)
        fp = epoch_fingerprint()
        event = AuthEvent("victim", strategy, key, fp, start, window)
        replayed = recorded.retimed(start)
        if strategy is Strategy.HOPPING:
            result = verify_hopping(previous.carrier, replayed, event)
        elif strategy is Strategy.DUAL_KEY:
            template = dual_key_expected_trace(fp, key, window, high_level, low_level, start)
            result = verify_dual_key(replayed, template, threshold)
        else:
            result = verify_pvk(replayed, key, start)
        if result.verdict is AuthVerdict.ACCEPTED:
            accepted += 1
        # the attacker keeps listening and records this epoch's legitimate response
        recorded = legit_trace(fp, start)
        recorded = PowerTrace(recorded.chip_duration,
                              recorded.levels + rng.normal(0.0, capture_sigma, len(recorded)),
                              capture_sigma, start)
        previous = fp
    rate = accepted / epochs
    logger.info(f"Replay acceptance for {strategy.value}: {rate:.4f} over {epochs} epochs")
    return rate
