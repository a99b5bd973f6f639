"""Utilities and social welfare at maximal proper clearing payments."""
from __future__ import annotations

import logging
import threading
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Dict, Optional, Tuple

from clearing.cds import cds_clear
from clearing.result import ClearingResult
from network.errors import NonConvergentProfile
from network.model import FinancialNetwork
from network.money import ZERO
from network.strategy import StrategyProfile

log = logging.getLogger(__name__)


class UtilityMode(str, Enum):
    TOTAL_ASSETS = "assets"
    EQUITY = "equity"


def utilities_of(result: ClearingResult, mode: UtilityMode) -> Tuple[Fraction, ...]:
    if UtilityMode(mode) is UtilityMode.EQUITY:
        return result.equities()
    return result.total_assets()


@dataclass(frozen=True)
class Outcome:
    profile: StrategyProfile
    result: ClearingResult
    utilities: Optional[Tuple[Fraction, ...]]

    @property
    def converged(self) -> bool:
        return self.utilities is not None

    @property
    def welfare(self) -> Optional[Fraction]:
        return None if self.utilities is None else sum(self.utilities, ZERO)


class ProfileEvaluator:
    """Clears profiles on one network and remembers the outcomes."""

    def __init__(self, net: FinancialNetwork, mode: UtilityMode, max_rounds: Optional[int] = None):
        self.net = net
        self.mode = UtilityMode(mode)
        self.max_rounds = max_rounds
        self._cache: Dict[StrategyProfile, Outcome] = {}
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self._cache)

    def outcome(self, profile: StrategyProfile) -> Outcome:
        hit = self._cache.get(profile)
        if hit is not None:
            return hit
        result = cds_clear(self.net, profile, max_rounds=self.max_rounds, strict=False)
        utilities = utilities_of(result, self.mode) if result.converged else None
        out = Outcome(profile, result, utilities)
        with self._lock:
            self._cache[profile] = out
        return out

    def utilities(self, profile: StrategyProfile, firm: Optional[str] = None) -> Tuple[Fraction, ...]:
        """Utility vector of a converged profile; NonConvergentProfile otherwise."""
        out = self.outcome(profile)
        if not out.converged:
            raise NonConvergentProfile(
                f"No clearing payments found for profile {profile.notation()}",
                profile=profile,
                firm=firm,
                result=out.result,
            )
        return out.utilities


def utility(
    net: FinancialNetwork,
    profile: StrategyProfile,
    firm: str,
    mode: UtilityMode = UtilityMode.TOTAL_ASSETS,
    max_rounds: Optional[int] = None,
) -> Fraction:
    values = ProfileEvaluator(net, mode, max_rounds).utilities(profile)
    return values[net.index(firm)]


def social_welfare(
    net: FinancialNetwork,
    profile: StrategyProfile,
    mode: UtilityMode = UtilityMode.TOTAL_ASSETS,
    max_rounds: Optional[int] = None,
) -> Fraction:
    return sum(ProfileEvaluator(net, mode, max_rounds).utilities(profile), ZERO)
