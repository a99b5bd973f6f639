"""Financial network model: money, firms, contracts, strategies."""
from network.errors import (
    CapExceeded,
    FennecError,
    InputError,
    NonConvergent,
    NonConvergentProfile,
)
from network.model import (
    Cds,
    Debt,
    FinancialNetwork,
    Firm,
    LiabilityMatrix,
    firm_key,
    resolve_liabilities,
    validate_network,
)
from network.money import format_money, parse_money
from network.strategy import (
    PROPORTIONAL,
    Strategy,
    StrategyProfile,
    StrategyRestriction,
    count_profiles,
    enumerate_strategies,
    ordered_bell,
    parse_profile,
    parse_strategy,
    players,
    proportional_profile,
    strategy_spaces,
)
from network.transform import NegativeAssetTransform, lift_profile, transform_negative_assets

__all__ = [
    "CapExceeded",
    "Cds",
    "Debt",
    "FennecError",
    "FinancialNetwork",
    "Firm",
    "InputError",
    "LiabilityMatrix",
    "NegativeAssetTransform",
    "NonConvergent",
    "NonConvergentProfile",
    "PROPORTIONAL",
    "Strategy",
    "StrategyProfile",
    "StrategyRestriction",
    "count_profiles",
    "enumerate_strategies",
    "firm_key",
    "format_money",
    "lift_profile",
    "ordered_bell",
    "parse_money",
    "parse_profile",
    "parse_strategy",
    "players",
    "proportional_profile",
    "resolve_liabilities",
    "strategy_spaces",
    "transform_negative_assets",
    "validate_network",
]
