"""Equity does not depend on which clearing payments are realized."""
from __future__ import annotations

import logging

from clearing.result import Direction
from clearing.solver import mcp_clear
from network.errors import PreconditionDefaultCosts
from network.model import FinancialNetwork
from network.strategy import StrategyProfile

log = logging.getLogger(__name__)


def equity_invariance_check(net: FinancialNetwork, profile: StrategyProfile) -> bool:
    """Compare per-firm equity at the maximal and the minimal clearing payments.

    Only meaningful without default costs (alpha = beta = 1).
    """
    if net.has_default_costs:
        raise PreconditionDefaultCosts(
            f"Equity invariance needs alpha = beta = 1 (got alpha={net.alpha}, beta={net.beta})"
        )
    high = mcp_clear(net, profile, Direction.MAXIMAL).equities()
    low = mcp_clear(net, profile, Direction.MINIMAL).equities()
    for fid, a, b in zip(net.ids, high, low):
        if a != b:
            log.warning("equity of %s differs: %s at maximal, %s at minimal payments", fid, a, b)
            return False
    return True
