"""
Super-capacitor / PMU charging model and the node operation-cycle energy ledger
"""
import enum
import math
import logging
from dataclasses import dataclass, field, replace
from typing import Dict, List, Tuple

from core.exceptions import InsufficientEnergyError, UnreachableTargetError

logger = logging.getLogger(__name__)

DEFAULT_CAPACITANCE_F = 0.01
DEFAULT_COLD_START_POWER_UW = 15.0
DEFAULT_READY_VOLTAGE_V = 3.3
DEFAULT_OPERATING_VOLTAGE_V = 1.8
DEFAULT_RATED_VOLTAGE_V = 5.5
DEFAULT_CYCLE_PERIOD_S = 10.0
BACKSCATTER_ID_DURATION_S = 2e-3


class CyclePhase(enum.Enum):
    INIT = "Init"
    SENSE = "Sense"
    BACKSCATTER_ID = "BackscatterId"
    LORA_TX = "LoRaTx"
    SLEEP = "Sleep"


@dataclass(frozen=True)
class StorageState:
    """Super-capacitor state; energy is always derived from C and V"""
    capacitance: float
    voltage: float = 0.0
    leakage_uw: float = 0.0

    def __post_init__(self):
        if self.capacitance <= 0:
            raise ValueError(f"capacitance must be > 0 F, got {self.capacitance}")
        if self.voltage < 0:
            raise ValueError(f"voltage must be >= 0 V, got {self.voltage}")
        if self.leakage_uw < 0:
            raise ValueError(f"leakage must be >= 0 µW, got {self.leakage_uw}")

    @property
    def energy(self) -> float:
        return 0.5 * self.capacitance * self.voltage ** 2

    def with_energy(self, joules: float) -> "StorageState":
        joules = max(joules, 0.0)
        return replace(self, voltage=math.sqrt(2.0 * joules / self.capacitance))


@dataclass(frozen=True)
class PmuSpec:
    cold_start_power: float = DEFAULT_COLD_START_POWER_UW  # µW
    operating_voltage: float = DEFAULT_OPERATING_VOLTAGE_V
    ready_voltage: float = DEFAULT_READY_VOLTAGE_V
    rated_voltage: float = DEFAULT_RATED_VOLTAGE_V
    efficiency: float = 1.0

    def __post_init__(self):
        if self.cold_start_power <= 0:
            raise ValueError("cold_start_power must be > 0 µW")
        if self.ready_voltage > self.rated_voltage:
            raise ValueError(
                f"ready_voltage {self.ready_voltage} V exceeds rated maximum {self.rated_voltage} V"
            )
        if not 0 < self.efficiency <= 1:
            raise ValueError("PMU efficiency must lie in (0, 1]")


@dataclass(frozen=True)
class Phase:
    name: CyclePhase
    duration: float  # s
    power_draw: float  # mW

    @property
    def energy(self) -> float:
        return self.duration * self.power_draw * 1e-3


@dataclass(frozen=True)
class CycleProfile:
    phases: Tuple[Phase, ...]
    synthetic: bool = False

    def __post_init__(self):
        if not self.phases:
            raise ValueError("cycle profile needs at least one phase")
        for phase in self.phases:
            if phase.power_draw < 0:
                raise ValueError(f"{phase.name.value}: power draw must be >= 0 mW")
            if phase.name is CyclePhase.SLEEP:
                if phase.duration < 0:
                    raise ValueError("Sleep duration must be >= 0 s")
            elif phase.duration <= 0:
                raise ValueError(f"{phase.name.value}: duration must be > 0 s")

    @property
    def period(self) -> float:
        return sum(p.duration for p in self.phases)

    def phase(self, name: CyclePhase) -> Phase:
        for p in self.phases:
            if p.name is name:
                return p
        raise KeyError(name.value)

    def has_phase(self, name: CyclePhase) -> bool:
        return any(p.name is name for p in self.phases)


def default_cycle_profile(period: float = DEFAULT_CYCLE_PERIOD_S) -> CycleProfile:
    """Implementer-set class values; flagged synthetic in reports"""
    active = [
        Phase(CyclePhase.INIT, 0.5, 16.5),
        Phase(CyclePhase.SENSE, 0.1, 6.6),
        Phase(CyclePhase.BACKSCATTER_ID, BACKSCATTER_ID_DURATION_S, 33.0),
        Phase(CyclePhase.LORA_TX, 0.2, 132.0),
    ]
    busy = sum(p.duration for p in active)
    sleep = max(period - busy, 0.0)
    return CycleProfile(tuple(active + [Phase(CyclePhase.SLEEP, sleep, 0.01)]), synthetic=True)


def charge(storage: StorageState, dc_power: float, dt: float) -> StorageState:
    """
    Integrate harvested DC power into the capacitor

    Args:
        storage: current state
        dc_power: harvested power in µW
        dt: elapsed time in s

    Returns:
        New StorageState (voltage recomputed from energy)
    """
    if dt < 0:
        raise ValueError(f"dt must be >= 0 s, got {dt}")
    if dc_power < 0:
        raise ValueError(f"dc_power must be >= 0 µW, got {dc_power}")
    if dt == 0:
        return storage
    net = (dc_power - storage.leakage_uw) * dt * 1e-6
    if net == 0:
        return storage
    return storage.with_energy(storage.energy + net)


def discharge(storage: StorageState, joules: float) -> StorageState:
    if joules < 0:
        raise ValueError("discharge energy must be >= 0 J")
    if joules > storage.energy + 1e-15:
        raise InsufficientEnergyError(
            f"requested {joules:.6g} J with only {storage.energy:.6g} J stored"
        )
    return storage.with_energy(storage.energy - joules)


def cold_start_ready(dc_power: float, pmu: PmuSpec) -> bool:
    return dc_power >= pmu.cold_start_power


def cycle_energy(profile: CycleProfile) -> Dict[str, float]:
    """Per-phase energy in joules keyed by phase name, plus ``total``"""
    ledger: Dict[str, float] = {}
    for phase in profile.phases:
        ledger[phase.name.value] = ledger.get(phase.name.value, 0.0) + phase.energy
    ledger["total"] = sum(p.energy for p in profile.phases)
    return ledger


def time_to_ready(storage: StorageState, dc_power: float, target_voltage: float) -> float:
    """Seconds until the capacitor reaches target_voltage at constant net power"""
    target_energy = 0.5 * storage.capacitance * target_voltage ** 2
    if target_energy <= storage.energy:
        return 0.0
    net_uw = dc_power - storage.leakage_uw
    if net_uw <= 0:
        raise UnreachableTargetError(
            f"net charging power {net_uw:.3f} µW cannot reach {target_voltage} V"
        )
    return (target_energy - storage.energy) / (net_uw * 1e-6)


def backscatter_share(profile: CycleProfile) -> float:
    ledger = cycle_energy(profile)
    if ledger["total"] == 0:
        return 0.0
    return ledger.get(CyclePhase.BACKSCATTER_ID.value, 0.0) / ledger["total"]


def phase_names(profile: CycleProfile) -> List[str]:
    return [p.name.value for p in profile.phases]
