"""
Authentication strategies over the backscattered P-wave: static private key,
public-key frequency hopping and dual-key encoding, plus the uplink gate
"""
import enum
import logging
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from Crypto.Cipher import AES

from core.codec import (
    DEFAULT_GUARD_MARGIN_DB,
    DEFAULT_WINDOW_S,
    ChipTrace,
    PowerTrace,
    PrivateKey,
    demodulate,
    key_bits,
    manchester_encode,
)
from core.exceptions import BandViolationError, DecodeError
from core.rf_link import Frequency, dbm_to_mw

logger = logging.getLogger(__name__)

ISM_BAND_HZ = (863e6, 870e6)
DEFAULT_HOP_SPACING_HZ = 875e3
DEFAULT_WINDOW_TOLERANCE_S = 1e-3
DEFAULT_FREQUENCY_TOLERANCE_HZ = 1e3
DEFAULT_CORRELATION_THRESHOLD = 0.9
PUBLIC_KEY_BITS = 128


class Strategy(enum.Enum):
    PVK = "pvk"
    HOPPING = "hopping"
    DUAL_KEY = "dual_key"


class AuthVerdict(enum.Enum):
    ACCEPTED = "Accepted"
    KEY_MISMATCH = "KeyMismatch"
    FREQUENCY_MISMATCH = "FrequencyMismatch"
    TIMING_VIOLATION = "TimingViolation"
    COLLISION_DETECTED = "CollisionDetected"
    DECODE_FAILURE = "DecodeFailure"


@dataclass(frozen=True, eq=False)
class PublicKeyFingerprint:
    """Physical-layer public key carried by the P-wave"""
    carrier: Frequency
    envelope_pattern: Optional[np.ndarray] = field(default=None, repr=False)
    psd_label: str = "cw"

    def __post_init__(self):
        if not ISM_BAND_HZ[0] <= self.carrier <= ISM_BAND_HZ[1]:
            raise BandViolationError(self.carrier, ISM_BAND_HZ)
        if self.envelope_pattern is not None:
            pattern = np.asarray(self.envelope_pattern, dtype=np.uint8)
            pattern.setflags(write=False)
            object.__setattr__(self, "envelope_pattern", pattern)


@dataclass(frozen=True)
class AuthEvent:
    node_id: str
    strategy: Strategy
    expected_key: PrivateKey
    fingerprint: PublicKeyFingerprint
    window_start: float
    window_duration: float = DEFAULT_WINDOW_S

    @property
    def window_end(self) -> float:
        return self.window_start + self.window_duration


@dataclass(frozen=True)
class AuthResult:
    verdict: AuthVerdict
    correlation_score: float = 0.0
    detail: str = ""

    @property
    def accepted(self) -> bool:
        return self.verdict is AuthVerdict.ACCEPTED


def encrypt_block(secret: bytes, block: bytes) -> bytes:
    """One AES-128 block encryption"""
    if len(secret) != 16 or len(block) != 16:
        raise ValueError("AES-128 needs a 16-byte key and a 16-byte block")
    return AES.new(bytes(secret), AES.MODE_ECB).encrypt(bytes(block))


def derive_pvk(shared_secret: bytes, node_id: int, counter: int) -> PrivateKey:
    """PvK = AES-128(shared_secret, node_id ∥ counter ∥ 0^8), both fields big-endian u32"""
    if not 0 <= counter < 2 ** 32:
        raise ValueError(f"counter must be a 32-bit value, got {counter}")
    if not 0 <= node_id < 2 ** 32:
        raise ValueError(f"node id must be a 32-bit value, got {node_id}")
    message = node_id.to_bytes(4, "big") + counter.to_bytes(4, "big") + bytes(8)
    return PrivateKey(encrypt_block(shared_secret, message))


def hop_grid(band: Tuple[float, float] = ISM_BAND_HZ,
             spacing: float = DEFAULT_HOP_SPACING_HZ) -> Tuple[float, ...]:
    """Channel centres of a uniform grid across the band"""
    width = band[1] - band[0]
    count = int(round(width / spacing))
    if count < 1 or abs(count * spacing - width) > 1e-6 * width:
        raise ValueError(f"spacing {spacing} Hz does not divide the {width} Hz band")
    return tuple(band[0] + (i + 0.5) * spacing for i in range(count))


def hop_next(rng: np.random.Generator, grid: Sequence[float]) -> Frequency:
    """Uniform draw among the grid channels"""
    if not grid:
        raise ValueError("hop grid is empty")
    return float(grid[int(rng.integers(len(grid)))])


def random_envelope(rng: np.random.Generator, bits: int = PUBLIC_KEY_BITS) -> np.ndarray:
    return rng.integers(0, 2, bits, dtype=np.uint8)


def _timing_ok(observed: PowerTrace, window_start: float, tolerance: float) -> bool:
    return abs(observed.start_time - window_start) <= tolerance


def verify_pvk(observed: PowerTrace, expected: PrivateKey, window_start: float,
               tolerance: float = DEFAULT_WINDOW_TOLERANCE_S,
               guard_margin: float = DEFAULT_GUARD_MARGIN_DB) -> AuthResult:
    """
    Verify a static private-key backscatter response

    Args:
        observed: monitor trace of the identification window
        expected: key the node should hold
        window_start: when the monitor opened the window
        tolerance: accepted start-time offset (s)
        guard_margin: decoder guard (dB)
    """
    if not _timing_ok(observed, window_start, tolerance):
        offset = observed.start_time - window_start
        return AuthResult(AuthVerdict.TIMING_VIOLATION, 0.0, f"start offset {offset * 1e3:.3f} ms")
    try:
        decoded = demodulate(observed, guard_margin)
    except DecodeError as e:
        return AuthResult(AuthVerdict.DECODE_FAILURE, 0.0, str(e))
    except ValueError as e:
        return AuthResult(AuthVerdict.DECODE_FAILURE, 0.0, str(e))

    truth = key_bits(expected)
    got = key_bits(decoded)
    n = min(truth.size, got.size)
    matches = int(np.count_nonzero(truth[:n] == got[:n]))
    score = matches / truth.size if truth.size else 0.0
    if decoded == bytes(expected):
        return AuthResult(AuthVerdict.ACCEPTED, 1.0)
    return AuthResult(AuthVerdict.KEY_MISMATCH, score, f"{truth.size - matches} bit(s) differ")


def verify_hopping(observed_carrier: Frequency, observed: PowerTrace, expected: AuthEvent,
                   frequency_tolerance: float = DEFAULT_FREQUENCY_TOLERANCE_HZ,
                   tolerance: float = DEFAULT_WINDOW_TOLERANCE_S,
                   guard_margin: float = DEFAULT_GUARD_MARGIN_DB) -> AuthResult:
    offset = observed_carrier - expected.fingerprint.carrier
    if abs(offset) > frequency_tolerance:
        return AuthResult(AuthVerdict.FREQUENCY_MISMATCH, 0.0, f"carrier offset {offset / 1e3:.1f} kHz")
    return verify_pvk(observed, expected.expected_key, expected.window_start, tolerance, guard_margin)


def _resample(pattern: np.ndarray, length: int) -> np.ndarray:
    if pattern.size == length:
        return pattern
    if pattern.size == 0 or length % pattern.size:
        raise ValueError(f"incompatible chip grids: {pattern.size} envelope chips vs {length} node chips")
    return np.repeat(pattern, length // pattern.size)


def dual_key_expected_trace(pk: PublicKeyFingerprint, pvk: bytes, window: float,
                            high_level: float, low_level: float,
                            start_time: float = 0.0) -> PowerTrace:
    """
    Template of the monitor trace for a dual-key event

    The node can only re-radiate what arrives, so the reflected component is the
    chip-wise product of the P-wave envelope and the node's reflection pattern; the
    low level (leakage floor) is always present.
    """
    if pk.envelope_pattern is None:
        raise ValueError("public key has no envelope pattern")
    node = manchester_encode(pvk, window, start_time) if not isinstance(pvk, ChipTrace) else pvk
    envelope = _resample(pk.envelope_pattern, len(node))
    floor_mw = dbm_to_mw(low_level)
    swing_mw = dbm_to_mw(high_level) - floor_mw
    linear = floor_mw + swing_mw * (envelope.astype(float) * node.chips.astype(float))
    with np.errstate(divide="ignore"):
        levels = 10.0 * np.log10(linear)
    return PowerTrace(node.chip_duration, levels, 0.0, node.start_time)


def correlation_score(observed: PowerTrace, template: PowerTrace) -> float:
    """Normalized correlation of the mean-removed dB sequences"""
    if len(observed) != len(template):
        raise ValueError(f"trace lengths differ: {len(observed)} vs {len(template)}")
    t = template.levels - template.levels.mean()
    o = observed.levels - observed.levels.mean()
    t_norm = np.sqrt(np.dot(t, t))
    o_norm = np.sqrt(np.dot(o, o))
    if t_norm == 0:
        raise DecodeError(0, 0.0)
    if o_norm == 0:
        return 0.0
    return float(np.dot(o, t) / (o_norm * t_norm))


def verify_dual_key(observed: PowerTrace, template: PowerTrace,
                    threshold: float = DEFAULT_CORRELATION_THRESHOLD,
                    window_start: Optional[float] = None,
                    tolerance: float = DEFAULT_WINDOW_TOLERANCE_S) -> AuthResult:
    if window_start is not None and not _timing_ok(observed, window_start, tolerance):
        return AuthResult(AuthVerdict.TIMING_VIOLATION, 0.0, "response outside window")
    try:
        score = correlation_score(observed, template)
    except DecodeError:
        return AuthResult(AuthVerdict.DECODE_FAILURE, 0.0, "zero-variance template")
    verdict = AuthVerdict.ACCEPTED if score >= threshold else AuthVerdict.KEY_MISMATCH
    return AuthResult(verdict, score)


@dataclass
class LedgerEntry:
    result: AuthResult
    expires_at: float
    consumed: bool = False


class AuthLedger:
    """auth_state: latest AuthResult per node with its expiry"""

    def __init__(self, single_use: bool = True):
        self.single_use = single_use
        self.entries: Dict[str, LedgerEntry] = {}

    def record(self, node_id: str, result: AuthResult, now: float, validity: float):
        self.entries[node_id] = LedgerEntry(result, now + validity)
        logger.debug(f"Auth ledger: {node_id} -> {result.verdict.value} until t={now + validity:.3f}s")

    def gate(self, node_id: str, now: float) -> bool:
        allowed = gate_uplink(self.entries, node_id, now)
        if allowed and self.single_use:
            self.entries[node_id].consumed = True
        return allowed


def gate_uplink(auth_state: Dict[str, LedgerEntry], frame_source: str, now: float) -> bool:
    """Accept iff the source's latest result is Accepted, unexpired and unconsumed"""
    entry = auth_state.get(frame_source)
    if entry is None:
        return False
    return entry.result.accepted and now <= entry.expires_at and not entry.consumed
