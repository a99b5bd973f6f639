"""Clearing with credit default swaps.

CDS liabilities depend on recovery rates, which depend on payments. The
outer loop re-solves from all-ones recovery until the recovery vector
repeats exactly, or gives up after a round cap: a joint fixed point need
not exist.
"""
from __future__ import annotations

import logging
from typing import Optional

from clearing.result import ClearingResult, Direction
from clearing.solver import clear_with_liabilities
from config.settings import load_settings
from network.errors import ConfigError, NonConvergent
from network.model import FinancialNetwork, all_ones, resolve_liabilities
from network.strategy import StrategyProfile, proportional_profile

log = logging.getLogger(__name__)

# rounds between "still running" warnings
PROGRESS_EVERY = 1000


def _largest_denominator(recovery) -> int:
    return max((r.denominator for r in recovery), default=1)


def cds_clear(
    net: FinancialNetwork,
    profile: StrategyProfile,
    max_rounds: Optional[int] = None,
    strict: bool = True,
) -> ClearingResult:
    """Maximal proper clearing payments with CDS liabilities resolved.

    With ``strict`` unset a nonconvergent run returns its last iterate with
    ``converged=False`` instead of raising.
    """
    cap = max_rounds if max_rounds is not None else load_settings().cds_max_rounds
    if cap < 1:
        raise ConfigError(f"CDS round cap must be positive, got {cap}")
    recovery = all_ones(net)
    result: Optional[ClearingResult] = None
    for k in range(1, cap + 1):
        result = clear_with_liabilities(net, profile, resolve_liabilities(net, recovery), Direction.MAXIMAL)
        if not net.has_cds or result.recovery == recovery:
            if net.has_cds:
                log.debug("cds loop converged after %d round(s)", k)
            return result.with_flags(cds_rounds=k)
        recovery = result.recovery
        if k % PROGRESS_EVERY == 0 and k < cap:
            log.warning(
                "cds loop still running after %d of %d rounds (%s); recovery denominators reach %d digits",
                k, cap, profile.notation(), len(str(_largest_denominator(recovery))),
            )

    result = result.with_flags(converged=False, cds_rounds=cap)
    log.warning("cds loop did not converge within %d rounds (%s)", cap, profile.notation())
    if strict:
        raise NonConvergent(f"Recovery rates did not settle within {cap} rounds", result=result)
    return result


def proportional_clear(net: FinancialNetwork, max_rounds: Optional[int] = None, strict: bool = True) -> ClearingResult:
    """Clearing when every firm pays all creditors pro rata."""
    return cds_clear(net, proportional_profile(net), max_rounds=max_rounds, strict=strict)
