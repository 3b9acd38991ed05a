"""
Scenario domain records: one deployment of a communicating node, battery-free nodes,
a LoRaWAN gateway and attackers
"""
import enum
from dataclasses import dataclass, field, replace
from typing import List, Optional, Tuple

from core.adversary import AttackerKind
from core.auth import DEFAULT_CORRELATION_THRESHOLD, DEFAULT_FREQUENCY_TOLERANCE_HZ, \
    DEFAULT_WINDOW_TOLERANCE_S, ISM_BAND_HZ, Strategy
from core.codec import DEFAULT_GUARD_MARGIN_DB, DEFAULT_WINDOW_S
from core.energy import CycleProfile, PmuSpec, StorageState
from core.lorawan_abp import DEFAULT_AIRTIME_S, GatewayPolicy
from core.rectifier import EfficiencyCurve, ReflectionProfile
from core.rf_link import DEFAULT_CARRIER_HZ, DEFAULT_FORWARD_LOSS_DB, DEFAULT_ISOLATION_DB, \
    ChannelGeometry

SCHEMA_VERSION = 1
DEFAULT_CHARGE_TICK_S = 0.1
DEFAULT_REPORT_INTERVAL_S = 1.0
DEFAULT_ENVIRONMENT_FLOOR_DBM = -40.0


class CarrierPolicy(enum.Enum):
    FIXED = "fixed"
    HOPPING = "hopping"


class LinkKind(enum.Enum):
    WIRED = "wired"
    WIRELESS = "wireless"


@dataclass(frozen=True)
class SourceConfig:
    """RF source and circulator at the communicating node"""
    power_dbm: float = 15.0
    carrier_hz: float = DEFAULT_CARRIER_HZ
    carrier_policy: CarrierPolicy = CarrierPolicy.FIXED
    hop_band_hz: Tuple[float, float] = ISM_BAND_HZ
    hop_channels: int = 8
    antenna_gain_dbi: float = 0.0
    forward_loss_db: float = DEFAULT_FORWARD_LOSS_DB
    circulator_isolation_db: float = DEFAULT_ISOLATION_DB
    link: LinkKind = LinkKind.WIRELESS


@dataclass(frozen=True)
class MonitorConfig:
    noise_sigma_db: float = 0.0
    environment_floor_dbm: Optional[float] = DEFAULT_ENVIRONMENT_FLOOR_DBM  # None = no term
    guard_margin_db: float = DEFAULT_GUARD_MARGIN_DB
    window_tolerance_s: float = DEFAULT_WINDOW_TOLERANCE_S
    frequency_tolerance_hz: float = DEFAULT_FREQUENCY_TOLERANCE_HZ
    correlation_threshold: float = DEFAULT_CORRELATION_THRESHOLD


@dataclass(frozen=True)
class LorawanConfig:
    channels_hz: Tuple[float, ...]
    airtime_s: float = DEFAULT_AIRTIME_S
    policy: GatewayPolicy = field(default_factory=GatewayPolicy)


@dataclass(frozen=True)
class AuthConfig:
    validity_s: Optional[float] = None  # None = node cycle period
    single_use: bool = True
    window_s: float = DEFAULT_WINDOW_S


@dataclass(frozen=True)
class NodeConfig:
    node_id: str
    device_address: int
    strategy: Strategy
    shared_secret: bytes
    network_key: bytes
    application_key: bytes
    reflection: ReflectionProfile
    efficiency: EfficiencyCurve
    storage: StorageState
    pmu: PmuSpec
    cycle: CycleProfile
    geometry: Optional[ChannelGeometry] = None  # None on the wired bench
    key_rotation: bool = False
    auth_delay_s: float = 0.0
    max_cycles: Optional[int] = None


@dataclass(frozen=True)
class AttackerConfig:
    attacker_id: str
    kind: AttackerKind
    target_node: Optional[str] = None
    listen_channels_hz: Optional[Tuple[float, ...]] = None
    capture_sigma_db: float = 0.5
    trigger_times_s: Tuple[float, ...] = ()
    rate_per_s: float = 1.0
    flood_duration_s: float = 0.0
    replay_offset_s: float = 0.0


@dataclass(frozen=True)
class Scenario:
    name: str
    duration_s: float
    seed: int
    source: SourceConfig
    monitor: MonitorConfig
    lorawan: LorawanConfig
    auth: AuthConfig = field(default_factory=AuthConfig)
    nodes: Tuple[NodeConfig, ...] = ()
    attackers: Tuple[AttackerConfig, ...] = ()
    security_layer: bool = False
    charge_tick_s: float = DEFAULT_CHARGE_TICK_S
    report_interval_s: float = DEFAULT_REPORT_INTERVAL_S
    schema_version: int = SCHEMA_VERSION
    synthetic_defaults: Tuple[str, ...] = ()

    def node(self, node_id: str) -> NodeConfig:
        for n in self.nodes:
            if n.node_id == node_id:
                return n
        raise KeyError(node_id)

    def with_seed(self, seed: int) -> "Scenario":
        return replace(self, seed=seed)

    def with_carrier(self, carrier_hz: float) -> "Scenario":
        return replace(self, source=replace(self.source, carrier_hz=carrier_hz))

    def node_ids(self) -> List[str]:
        return [n.node_id for n in self.nodes]
