"""
Link-budget arithmetic for the P-wave, its circulator leakage and the backscattered return
"""
import math
import logging
from dataclasses import dataclass
from typing import Dict, Optional

from core.exceptions import LinkBudgetError

logger = logging.getLogger(__name__)

# Units are carried in names: PowerLevel in dBm, Gain in dB/dBi, Frequency in Hz
PowerLevel = float
Gain = float
Frequency = float

SPEED_OF_LIGHT = 299_792_458.0  # m/s
DEFAULT_CARRIER_HZ = 868e6
DEFAULT_FORWARD_LOSS_DB = 0.8
DEFAULT_ISOLATION_DB = 20.0


@dataclass(frozen=True)
class ChannelGeometry:
    """Monostatic CN-to-node geometry.

    tx_antenna_gain is the Communicating Node antenna (shared by source and monitor
    through the circulator), rx_antenna_gain is the sensing node antenna.
    """
    distance: float
    tx_antenna_gain: Gain = 0.0
    rx_antenna_gain: Gain = 0.0

    def __post_init__(self):
        if not math.isfinite(self.distance) or self.distance <= 0:
            raise LinkBudgetError(f"distance must be > 0 m, got {self.distance}")


def _check_finite(name: str, value: float):
    if math.isnan(value):
        raise LinkBudgetError(f"{name} is NaN")


def dbm_to_mw(p: PowerLevel) -> float:
    """dBm to linear milliwatts; −∞ dBm maps to 0 mW"""
    _check_finite("power", p)
    if p == -math.inf:
        return 0.0
    return 10.0 ** (p / 10.0)


def mw_to_dbm(mw: float) -> PowerLevel:
    """Linear milliwatts to dBm; 0 mW maps to −∞ dBm"""
    if mw < 0 or math.isnan(mw):
        raise LinkBudgetError(f"power must be >= 0 mW, got {mw}")
    if mw == 0:
        return -math.inf
    return 10.0 * math.log10(mw)


def wavelength(freq: Frequency) -> float:
    if not freq > 0:
        raise LinkBudgetError(f"frequency must be > 0 Hz, got {freq}")
    return SPEED_OF_LIGHT / freq


def leakage_power(p_source: PowerLevel, isolation: Gain) -> PowerLevel:
    """Circulator leakage seen by the P-wave monitor"""
    if isolation < 0:
        raise LinkBudgetError(f"isolation must be >= 0 dB, got {isolation}")
    return p_source - isolation


def reflected_power_wired(p_source: PowerLevel, forward_loss: Gain, s11: Gain) -> PowerLevel:
    """Power reflected by the rectifier and returned over the wired bench.

    Args:
        p_source: RF source power (dBm)
        forward_loss: one-way circulator + cable insertion loss (dB, positive)
        s11: reflection coefficient magnitude (dB, <= 0)
    """
    if forward_loss < 0:
        raise LinkBudgetError(f"forward loss must be >= 0 dB, got {forward_loss}")
    if s11 > 0:
        raise LinkBudgetError(f"S11 must be <= 0 dB, got {s11}")
    return p_source - 2 * forward_loss + s11


def dynamic_range_simplified(p_refl: PowerLevel, p_leak: PowerLevel) -> float:
    return p_refl - p_leak


def fspl(freq: Frequency, distance: float) -> float:
    """Free-space path loss in dB"""
    if not distance > 0:
        raise LinkBudgetError(f"distance must be > 0 m, got {distance}")
    return 20.0 * math.log10(4.0 * math.pi * distance / wavelength(freq))


def eirp(p_tx: PowerLevel, antenna_gain: Gain) -> PowerLevel:
    return p_tx + antenna_gain


def wired_incident_power(p_source: PowerLevel, forward_loss: Gain) -> PowerLevel:
    """Power arriving at the rectifier input on the wired bench"""
    return p_source - forward_loss


def node_incident_power(p_source: PowerLevel, forward_loss: Gain,
                        geometry: ChannelGeometry, freq: Frequency) -> PowerLevel:
    """Power arriving at the node's rectifier over the air (harvesting input)"""
    return (p_source - forward_loss + geometry.tx_antenna_gain
            - fspl(freq, geometry.distance) + geometry.rx_antenna_gain)


def backscatter_return_power(p_source: PowerLevel, forward_loss: Gain, geometry: ChannelGeometry,
                             freq: Frequency, node_s11: Gain) -> PowerLevel:
    """Two-way over-the-air return at the monitor input.

    The same forward loss is applied on the monitor side of the circulator.
    """
    if not isinstance(geometry, ChannelGeometry):
        raise LinkBudgetError("geometry must be a ChannelGeometry")
    path = fspl(freq, geometry.distance)
    g_cn = geometry.tx_antenna_gain
    g_node = geometry.rx_antenna_gain
    return (p_source - forward_loss + g_cn - path + g_node
            + node_s11
            + g_node - path + g_cn - forward_loss)


def monitor_observed_level(p_leak: PowerLevel, p_return: PowerLevel,
                           *extra: PowerLevel) -> PowerLevel:
    """Incoherent power sum at the monitor; extra terms (e.g. environment floor) are summed too"""
    total = dbm_to_mw(p_leak) + dbm_to_mw(p_return) + sum(dbm_to_mw(p) for p in extra)
    return mw_to_dbm(total)


def link_budget_summary(p_source: PowerLevel, isolation: Gain, forward_loss: Gain, s11: Gain,
                        distance: Optional[float] = None, freq: Frequency = DEFAULT_CARRIER_HZ,
                        tx_gain: Gain = 0.0, node_gain: Gain = 0.0) -> Dict[str, float]:
    """All headline quantities for one parameter set (CLI `linkbudget`)"""
    p_leak = leakage_power(p_source, isolation)
    p_refl = reflected_power_wired(p_source, forward_loss, s11)
    summary = {
        "p_leak_dbm": p_leak,
        "p_refl_dbm": p_refl,
        "delta_p_db": dynamic_range_simplified(p_refl, p_leak),
        "eirp_dbm": eirp(p_source, tx_gain),
    }
    if distance is not None:
        geometry = ChannelGeometry(distance, tx_gain, node_gain)
        summary["fspl_db"] = fspl(freq, distance)
        summary["p_incident_dbm"] = node_incident_power(p_source, forward_loss, geometry, freq)
        summary["p_return_dbm"] = backscatter_return_power(p_source, forward_loss, geometry, freq, s11)
        summary["p_observed_dbm"] = monitor_observed_level(p_leak, summary["p_return_dbm"])
    logger.debug(f"Link budget summary: {summary}")
    return summary
