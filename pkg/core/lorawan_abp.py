"""
Minimal LoRaWAN ABP data plane: frame build, channel set and gateway validation policies
"""
import enum
import logging
import struct
from dataclasses import dataclass, field, replace
from typing import Dict, Iterable, Optional, Sequence, Tuple

from Crypto.Cipher import AES
from Crypto.Hash import CMAC

from core.exceptions import ChannelSetError

logger = logging.getLogger(__name__)

MHDR_UNCONFIRMED_DATA_UP = 0x40
HEADER_FORMAT = ">BIHB"  # MHDR, DevAddr, FCnt, FPort
HEADER_SIZE = struct.calcsize(HEADER_FORMAT)
MIC_SIZE = 4
COUNTER_MODULUS = 1 << 16
DEFAULT_AIRTIME_S = 0.0566
DEFAULT_DUPLICATE_WINDOW_S = 3600.0

REGIONAL_CHANNELS_HZ = {
    "EU868": (868.1e6, 868.3e6, 868.5e6),
}


class GatewayMode(enum.Enum):
    PERMISSIVE = "permissive"
    STRICT_COUNTER = "strict_counter"


class GatewayVerdict(enum.Enum):
    ACCEPTED = "Accepted"
    ACCEPTED_DUPLICATE = "AcceptedDuplicate"
    REJECTED_COUNTER = "RejectedCounter"
    REJECTED_INTEGRITY = "RejectedIntegrity"

    @property
    def accepted(self) -> bool:
        return self in (GatewayVerdict.ACCEPTED, GatewayVerdict.ACCEPTED_DUPLICATE)


@dataclass
class AbpSession:
    """ABP session: static keys, no join procedure"""
    device_address: int
    network_key: bytes
    application_key: bytes
    uplink_counter: int = 0

    def __post_init__(self):
        if not 0 <= self.device_address < 2 ** 32:
            raise ValueError(f"device address must be 32-bit, got {self.device_address}")
        for name in ("network_key", "application_key"):
            if len(getattr(self, name)) != 16:
                raise ValueError(f"{name} must be 16 bytes")
        if not 0 <= self.uplink_counter < 2 ** 32:
            raise ValueError("uplink counter must be 32-bit")


@dataclass(frozen=True)
class AbpFrame:
    """Uplink frame. channel and provenance are radio/simulation metadata, not frame bytes."""
    device_address: int
    frame_counter: int
    port: int
    ciphertext: bytes
    integrity_tag: bytes
    channel: float
    provenance: str = field(default="node", compare=False)

    @property
    def header(self) -> bytes:
        return struct.pack(HEADER_FORMAT, MHDR_UNCONFIRMED_DATA_UP,
                           self.device_address, self.frame_counter, self.port)

    def to_bytes(self) -> bytes:
        return self.header + self.ciphertext + self.integrity_tag

    @property
    def identity(self) -> Tuple[int, int, bytes]:
        return (self.device_address, self.frame_counter, self.integrity_tag)

    def retagged(self, provenance: str, channel: Optional[float] = None) -> "AbpFrame":
        return replace(self, provenance=provenance,
                       channel=self.channel if channel is None else channel)


def frame_to_bytes(frame: AbpFrame) -> bytes:
    return frame.to_bytes()


def frame_from_bytes(data: bytes, channel: float, provenance: str = "node") -> AbpFrame:
    if len(data) < HEADER_SIZE + MIC_SIZE:
        raise ValueError(f"frame too short: {len(data)} bytes")
    mhdr, dev_addr, fcnt, port = struct.unpack(HEADER_FORMAT, data[:HEADER_SIZE])
    if mhdr != MHDR_UNCONFIRMED_DATA_UP:
        raise ValueError(f"unsupported MHDR 0x{mhdr:02x}")
    return AbpFrame(dev_addr, fcnt, port, data[HEADER_SIZE:-MIC_SIZE], data[-MIC_SIZE:],
                    channel, provenance)


def channel_set(region_default: str = "EU868",
                override: Optional[Sequence[float]] = None) -> Tuple[float, ...]:
    if override:
        return tuple(float(f) for f in override)
    try:
        return REGIONAL_CHANNELS_HZ[region_default]
    except KeyError:
        raise ChannelSetError(f"no default channel set for region {region_default!r}")


def _keystream(application_key: bytes, device_address: int, frame_counter: int, length: int) -> bytes:
    cipher = AES.new(application_key, AES.MODE_ECB)
    stream = bytearray()
    block_index = 1
    while len(stream) < length:
        block = (bytes([0x01, 0, 0, 0, 0, 0x00])
                 + device_address.to_bytes(4, "big")
                 + frame_counter.to_bytes(4, "big")
                 + bytes([0x00, block_index & 0xFF]))
        stream.extend(cipher.encrypt(block))
        block_index += 1
    return bytes(stream[:length])


def _xor(data: bytes, stream: bytes) -> bytes:
    return bytes(a ^ b for a, b in zip(data, stream))


def compute_tag(network_key: bytes, header: bytes, ciphertext: bytes) -> bytes:
    cmac = CMAC.new(network_key, ciphermod=AES)
    cmac.update(header + ciphertext)
    return cmac.digest()[:MIC_SIZE]


def build_frame(session: AbpSession, payload: bytes, channel: float,
                channels: Iterable[float] = REGIONAL_CHANNELS_HZ["EU868"]) -> AbpFrame:
    """
    Build and encrypt the next uplink; the session counter advances afterwards

    Raises:
        ChannelSetError: channel not a member of the configured set
    """
    if channel not in tuple(channels):
        raise ChannelSetError(f"{channel / 1e6:.3f} MHz is not in the configured channel set")
    fcnt = session.uplink_counter % COUNTER_MODULUS
    ciphertext = _xor(payload, _keystream(session.application_key, session.device_address,
                                           fcnt, len(payload)))
    header = struct.pack(HEADER_FORMAT, MHDR_UNCONFIRMED_DATA_UP, session.device_address, fcnt, 1)
    tag = compute_tag(session.network_key, header, ciphertext)
    session.uplink_counter = (session.uplink_counter + 1) % (2 ** 32)
    return AbpFrame(session.device_address, fcnt, 1, ciphertext, tag, channel)


def decrypt_payload(frame: AbpFrame, session: AbpSession) -> bytes:
    return _xor(frame.ciphertext, _keystream(session.application_key, frame.device_address,
                                             frame.frame_counter, len(frame.ciphertext)))


def integrity_ok(frame: AbpFrame, session: AbpSession) -> bool:
    return compute_tag(session.network_key, frame.header, frame.ciphertext) == frame.integrity_tag


@dataclass(frozen=True)
class GatewayPolicy:
    mode: GatewayMode = GatewayMode.PERMISSIVE
    duplicate_window: float = DEFAULT_DUPLICATE_WINDOW_S
    payload_crypto: bool = False


@dataclass
class GatewayHistory:
    """Network-server state: counters, seen frames and accounting"""
    last_counter: Dict[int, int] = field(default_factory=dict)
    seen: Dict[Tuple[int, int, bytes], float] = field(default_factory=dict)
    verdicts: Dict[str, int] = field(default_factory=dict)
    airtime: float = 0.0

    def count(self, verdict: GatewayVerdict):
        self.verdicts[verdict.value] = self.verdicts.get(verdict.value, 0) + 1

    def reset_counter(self, device_address: int):
        self.last_counter.pop(device_address, None)


def gateway_validate(frame: AbpFrame, known_sessions: Dict[int, AbpSession], policy: GatewayPolicy,
                     history: GatewayHistory, now: float = 0.0,
                     airtime: float = DEFAULT_AIRTIME_S) -> GatewayVerdict:
    """
    Network-server acceptance of one received uplink

    Integrity is checked first. Permissive accepts every integrity-valid frame and
    flags repeats seen within duplicate_window; StrictCounter rejects any counter not
    above the last accepted one (a wrapped 16-bit counter stays rejected until reset).
    """
    history.airtime += airtime
    session = known_sessions.get(frame.device_address)
    if session is None or not integrity_ok(frame, session):
        verdict = GatewayVerdict.REJECTED_INTEGRITY
    elif policy.mode is GatewayMode.STRICT_COUNTER:
        last = history.last_counter.get(frame.device_address)
        if last is not None and frame.frame_counter <= last:
            verdict = GatewayVerdict.REJECTED_COUNTER
        else:
            verdict = GatewayVerdict.ACCEPTED
    else:
        first_seen = history.seen.get(frame.identity)
        if first_seen is not None and now - first_seen <= policy.duplicate_window:
            verdict = GatewayVerdict.ACCEPTED_DUPLICATE
        else:
            verdict = GatewayVerdict.ACCEPTED

    if verdict is GatewayVerdict.ACCEPTED:
        history.last_counter[frame.device_address] = frame.frame_counter
        history.seen[frame.identity] = now
    history.count(verdict)
    logger.debug(
        f"Gateway {policy.mode.value}: dev 0x{frame.device_address:08x} fcnt {frame.frame_counter} "
        f"({frame.provenance}) -> {verdict.value}"
    )
    return verdict
