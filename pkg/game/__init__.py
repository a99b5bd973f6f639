"""Payment game: utilities, equilibria, efficiency ratios."""
from game.analysis import UNBOUNDED, GameReport, ProfileRow, analyze, efficiency_ratio
from game.bounds import (
    acyclic_proportional_bound,
    equity_balance,
    equity_welfare_identity,
    family_ratios,
    is_acyclic,
)
from game.equilibrium import Deviation, Notion, StabilityCheck, coalition_stable, is_nash
from game.invariance import equity_invariance_check
from game.utility import ProfileEvaluator, UtilityMode, social_welfare, utility
from network.strategy import proportional_profile

__all__ = [
    "Deviation",
    "GameReport",
    "Notion",
    "ProfileEvaluator",
    "ProfileRow",
    "StabilityCheck",
    "UNBOUNDED",
    "UtilityMode",
    "acyclic_proportional_bound",
    "analyze",
    "coalition_stable",
    "efficiency_ratio",
    "equity_balance",
    "equity_invariance_check",
    "equity_welfare_identity",
    "family_ratios",
    "is_acyclic",
    "is_nash",
    "proportional_profile",
    "social_welfare",
    "utility",
]
