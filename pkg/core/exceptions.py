"""
Exception hierarchy for the backscatter security simulator
"""
from typing import List


class SwiptSecurityError(Exception):
    """Base class for every error raised by this package"""


class LinkBudgetError(SwiptSecurityError, ValueError):
    """Invalid link-budget input (negative isolation, non-positive distance...)"""


class BandViolationError(SwiptSecurityError, ValueError):
    """Frequency outside a tabulated or regulatory band"""

    def __init__(self, frequency_hz: float, band: tuple):
        self.frequency_hz = frequency_hz
        self.band = band
        super().__init__(
            f"{frequency_hz / 1e6:.4f} MHz outside band "
            f"[{band[0] / 1e6:.4f}, {band[1] / 1e6:.4f}] MHz"
        )


class DecodeError(SwiptSecurityError):
    """Manchester pair too close to call"""

    def __init__(self, pair_index: int, difference_db: float = 0.0):
        self.pair_index = pair_index
        self.difference_db = difference_db
        super().__init__(f"ambiguous Manchester pair {pair_index} (|Δ| = {abs(difference_db):.4f} dB)")


class UnreachableTargetError(SwiptSecurityError):
    """Storage cannot reach the requested voltage with the given net power"""


class InsufficientEnergyError(SwiptSecurityError):
    """Discharge request larger than the stored energy"""


class ChannelSetError(SwiptSecurityError, ValueError):
    """Frame built or replayed on a channel outside the configured set"""


class AttackError(SwiptSecurityError):
    """Attacker cannot perform the requested action (e.g. empty capture buffer)"""


class TimeTravelError(SwiptSecurityError, ValueError):
    """Event scheduled before the current simulation time"""


class ScenarioValidationError(SwiptSecurityError):
    """Scenario file failed validation; carries every violated constraint"""

    def __init__(self, errors: List[str], source: str = "scenario"):
        self.errors = list(errors)
        self.source = source
        summary = "; ".join(self.errors) if self.errors else "unknown error"
        super().__init__(f"{source}: {summary}")
