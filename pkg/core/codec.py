"""
Manchester encoding of the private key onto the rectifier gate, OOK power-domain
modulation and chip-synchronous threshold demodulation at the P-wave monitor
"""
import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple, Union

import numpy as np
from scipy.special import erfc

from core.exceptions import DecodeError
from core.rectifier import GateState

logger = logging.getLogger(__name__)

KEY_LENGTH_BYTES = 16
DEFAULT_WINDOW_S = 2e-3
DEFAULT_GUARD_MARGIN_DB = 0.05
MAX_VALIDATED_TOGGLE_HZ = 100e3

Seed = Union[int, np.random.Generator, None]


class PrivateKey(bytes):
    """16-byte private key (PvK)"""

    def __new__(cls, value: bytes):
        value = bytes(value)
        if len(value) != KEY_LENGTH_BYTES:
            raise ValueError(f"private key must be {KEY_LENGTH_BYTES} bytes, got {len(value)}")
        return super().__new__(cls, value)

    @classmethod
    def from_hex(cls, text: str) -> "PrivateKey":
        return cls(bytes.fromhex(text))


@dataclass(frozen=True, eq=False)
class ChipTrace:
    """Gate drive: 1 = Backscatter (High), 0 = Harvest (Low)"""
    chip_duration: float
    chips: np.ndarray = field(repr=False)
    start_time: float = 0.0

    def __post_init__(self):
        chips = np.asarray(self.chips, dtype=np.uint8)
        chips.setflags(write=False)
        object.__setattr__(self, "chips", chips)

    def __len__(self) -> int:
        return int(self.chips.size)

    @property
    def duration(self) -> float:
        return self.chip_duration * len(self)

    @property
    def end_time(self) -> float:
        return self.start_time + self.duration

    @property
    def duty(self) -> float:
        return float(self.chips.mean()) if len(self) else 0.0

    @property
    def toggle_frequency(self) -> float:
        return 1.0 / (2.0 * self.chip_duration)

    def chip_states(self) -> List[GateState]:
        return [GateState.BACKSCATTER if c else GateState.HARVEST for c in self.chips]

    def chip_index(self, t: float) -> Optional[int]:
        """Chip active at time t, or None outside the trace"""
        if t < self.start_time:
            return None
        idx = int(math.floor((t - self.start_time) / self.chip_duration + 1e-9))
        return idx if idx < len(self) else None

    def retimed(self, start_time: float) -> "ChipTrace":
        return ChipTrace(self.chip_duration, self.chips, start_time)


@dataclass(frozen=True, eq=False)
class PowerTrace:
    """Observed monitor level per chip (dBm)"""
    chip_duration: float
    levels: np.ndarray = field(repr=False)
    noise_sigma: float = 0.0
    start_time: float = 0.0

    def __post_init__(self):
        levels = np.asarray(self.levels, dtype=float)
        levels.setflags(write=False)
        object.__setattr__(self, "levels", levels)

    def __len__(self) -> int:
        return int(self.levels.size)

    def times(self) -> np.ndarray:
        return self.start_time + np.arange(len(self)) * self.chip_duration

    def retimed(self, start_time: float) -> "PowerTrace":
        return PowerTrace(self.chip_duration, self.levels, self.noise_sigma, start_time)


def _rng(seed: Seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def key_bits(key: bytes) -> np.ndarray:
    return np.unpackbits(np.frombuffer(bytes(key), dtype=np.uint8))


def manchester_chips(bits: np.ndarray) -> np.ndarray:
    """IEEE 802.3 convention: 1 → (High, Low), 0 → (Low, High)"""
    bits = np.asarray(bits, dtype=np.uint8)
    chips = np.empty(bits.size * 2, dtype=np.uint8)
    chips[0::2] = bits
    chips[1::2] = 1 - bits
    return chips


def manchester_encode(key: bytes, window: float = DEFAULT_WINDOW_S, start_time: float = 0.0) -> ChipTrace:
    """
    Encode a key as gate chips spread over the identification window

    Args:
        key: key octets (16 bytes for a PvK; shorter toy keys are accepted)
        window: identification window length in seconds
        start_time: window start

    Returns:
        ChipTrace with 2 chips per bit
    """
    if window <= 0:
        raise ValueError(f"window must be > 0 s, got {window}")
    bits = key_bits(key)
    if bits.size == 0:
        return ChipTrace(window, np.zeros(0, dtype=np.uint8), start_time)
    chips = manchester_chips(bits)
    trace = ChipTrace(window / chips.size, chips, start_time)
    if trace.toggle_frequency > MAX_VALIDATED_TOGGLE_HZ:
        logger.warning(
            f"Toggle frequency {trace.toggle_frequency / 1e3:.1f} kHz exceeds the "
            f"{MAX_VALIDATED_TOGGLE_HZ / 1e3:.0f} kHz validated ceiling"
        )
    return trace


def modulate(trace: ChipTrace, high_level: float, low_level: float,
             noise_sigma: float = 0.0, rng_seed: Seed = None) -> PowerTrace:
    """OOK in the power domain with additive Gaussian noise in dB"""
    if not high_level > low_level:
        raise ValueError(f"high level {high_level} dBm must exceed low level {low_level} dBm")
    if noise_sigma < 0:
        raise ValueError("noise sigma must be >= 0 dB")
    levels = np.where(trace.chips == 1, high_level, low_level).astype(float)
    if noise_sigma > 0:
        levels = levels + _rng(rng_seed).normal(0.0, noise_sigma, levels.size)
    return PowerTrace(trace.chip_duration, levels, noise_sigma, trace.start_time)


def pair_differences(power: PowerTrace) -> np.ndarray:
    if len(power) % 2:
        raise ValueError(f"Manchester trace needs an even chip count, got {len(power)}")
    return power.levels[0::2] - power.levels[1::2]


def demodulate(power: PowerTrace, guard_margin: float = DEFAULT_GUARD_MARGIN_DB) -> bytes:
    """
    Decode a chip-synchronous power trace back to key octets

    Raises:
        DecodeError: first pair whose two chips differ by less than guard_margin
    """
    diffs = pair_differences(power)
    ambiguous = np.flatnonzero(np.abs(diffs) < guard_margin)
    if ambiguous.size:
        idx = int(ambiguous[0])
        raise DecodeError(idx, float(diffs[idx]))
    bits = (diffs > 0).astype(np.uint8)
    return np.packbits(bits).tobytes()


def bit_errors(power: PowerTrace, key: bytes) -> Tuple[int, int]:
    """Hard pair decisions against the true key: (errors, bits)"""
    decided = (pair_differences(power) > 0).astype(np.uint8)
    truth = key_bits(key)
    n = min(decided.size, truth.size)
    return int(np.count_nonzero(decided[:n] != truth[:n])), int(n)


def q_function(x: float) -> float:
    return float(0.5 * erfc(x / math.sqrt(2.0)))


def theoretical_ber(delta_p: float, sigma: float) -> float:
    """Pair-difference error rate Q(ΔP / (σ√2))"""
    if sigma <= 0:
        return 0.0 if delta_p > 0 else 0.5
    return q_function(delta_p / (sigma * math.sqrt(2.0)))


def ber_estimate(delta_p: float, sigma: float, trials: int, seed: Seed = None,
                 chunk_bits: int = 1 << 18) -> float:
    """
    Monte Carlo bit-error fraction over random keys

    Args:
        delta_p: high/low separation in dB
        sigma: per-chip noise in dB
        trials: number of bits simulated, drawn independently in chunks of chunk_bits
        seed: generator seed

    Returns:
        Fraction of wrongly decided bits
    """
    if trials <= 0:
        raise ValueError("trials must be > 0")
    rng = _rng(seed)
    errors = 0
    remaining = int(trials)
    while remaining > 0:
        n = min(remaining, chunk_bits)
        bits = rng.integers(0, 2, n, dtype=np.uint8)
        chips = manchester_chips(bits)
        levels = np.where(chips == 1, delta_p, 0.0)
        if sigma > 0:
            levels = levels + rng.normal(0.0, sigma, levels.size)
        decided = (levels[0::2] - levels[1::2]) > 0
        errors += int(np.count_nonzero(decided != bits.astype(bool)))
        remaining -= n
    return errors / trials


def ber_standard_error(ber: float, trials: int) -> float:
    return math.sqrt(max(ber * (1.0 - ber), 0.0) / trials)
