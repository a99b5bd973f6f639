"""Negative external assets as debt to an auxiliary sink.

Each firm with e_i < 0 gets e'_i = 0 and a debt of |e_i| to a new firm t
that has no creditors and no assets. Such a firm must keep t alone in its
topmost class, so paying t first plays the role of covering the deficit.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

from network.errors import InvalidStrategy
from network.model import Debt, FinancialNetwork, Firm, validate_network
from network.money import ZERO
from network.strategy import Strategy, StrategyProfile, StrategyRestriction, creditor_sets

log = logging.getLogger(__name__)

SINK_ID = "t"


@dataclass(frozen=True)
class NegativeAssetTransform:
    network: FinancialNetwork
    restriction: StrategyRestriction
    sink: str


def _sink_id(net: FinancialNetwork) -> str:
    taken = set(net.ids)
    if SINK_ID not in taken:
        return SINK_ID
    n = 1
    while f"{SINK_ID}_{n}" in taken:
        n += 1
    return f"{SINK_ID}_{n}"


def transform_negative_assets(net: FinancialNetwork) -> NegativeAssetTransform:
    sink = _sink_id(net)
    firms = [Firm(f.id, max(f.external, ZERO)) for f in net.firms] + [Firm(sink, ZERO)]
    debts = list(net.debts) + [Debt(f.id, sink, -f.external) for f in net.firms if f.external < 0]
    out = validate_network(FinancialNetwork(tuple(firms), tuple(debts), net.cds, net.alpha, net.beta))
    restriction = StrategyRestriction({f.id: sink for f in net.firms if f.external < 0})
    log.info("negative-asset transform: %d firm(s) now owe %s", len(restriction.top), sink)
    return NegativeAssetTransform(out, restriction, sink)


def lift_profile(profile: StrategyProfile, transform: NegativeAssetTransform) -> StrategyProfile:
    """Map a profile of the original network onto the transformed one.

    Restricted firms get the sink prepended as their own top class.
    """
    sets = creditor_sets(transform.network)
    lifted = []
    for fid, creditors in sets.items():
        if fid == transform.sink:
            lifted.append((fid, Strategy(())))
            continue
        original = profile.get(fid)
        if original is None:
            raise InvalidStrategy(f"Profile has no strategy for firm {fid}")
        top = transform.restriction.top_for(fid)
        classes = original.classes if top is None else ((top,),) + original.classes
        lifted.append((fid, Strategy(classes)))
    return StrategyProfile(tuple(lifted))
