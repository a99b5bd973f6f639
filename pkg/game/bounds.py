"""Welfare identities, the acyclic proportional bound and family ratio sweeps."""
from __future__ import annotations

import logging
from fractions import Fraction
from typing import Any, Iterable, List, Mapping, Optional, Tuple

import networkx as nx

from clearing.cds import proportional_clear
from clearing.result import ClearingResult
from config.settings import Settings
from game.analysis import Ratio, analyze, efficiency_ratio
from game.utility import UtilityMode, utilities_of
from network.errors import CdsNotSupported, InputError, PreconditionDefaultCosts
from network.model import FinancialNetwork
from network.money import ZERO, parse_money

log = logging.getLogger(__name__)


def debt_graph(net: FinancialNetwork) -> nx.DiGraph:
    graph = nx.DiGraph()
    graph.add_nodes_from(net.ids)
    graph.add_edges_from((d.debtor, d.creditor) for d in net.debts)
    graph.add_edges_from((c.debtor, c.creditor) for c in net.cds)
    return graph


def is_acyclic(net: FinancialNetwork) -> bool:
    return nx.is_directed_acyclic_graph(debt_graph(net))


def equity_welfare_identity(result: ClearingResult) -> Fraction:
    """sum e_i - (1 - alpha) * sum over defaulting i of e_i.

    Equals the equity welfare when beta = 1 and externals are non-negative.
    """
    net = result.network
    lost = sum((f.external for f in net.firms if f.id in result.defaults), ZERO)
    return sum(net.externals, ZERO) - (1 - net.alpha) * lost


def equity_balance(result: ClearingResult) -> Fraction:
    """sum of equities minus sum of externals; zero without default costs."""
    return sum(result.equities(), ZERO) - sum(result.network.externals, ZERO)


def acyclic_proportional_bound(net: FinancialNetwork, settings: Optional[Settings] = None) -> Tuple[Ratio, Fraction]:
    """(OPT / SW of proportional payments, n / 2) under total assets."""
    if net.has_default_costs:
        raise PreconditionDefaultCosts("The acyclic bound assumes alpha = beta = 1")
    if net.has_cds:
        raise CdsNotSupported("The acyclic bound covers debt-only networks")
    if net.has_negative_externals:
        raise InputError("The acyclic bound assumes non-negative external assets")
    if not is_acyclic(net):
        raise InputError("Network has a debt cycle")
    welfare = sum(proportional_clear(net).total_assets(), ZERO)
    report = analyze(net, UtilityMode.TOTAL_ASSETS, settings=settings)
    ratio: Ratio = report.opt / welfare if welfare > 0 else Fraction(1)
    return ratio, Fraction(net.n, 2)


def family_ratios(
    name: str,
    values: Iterable[Any],
    param: str = "M",
    ratio: str = "poa",
    mode: UtilityMode = UtilityMode.TOTAL_ASSETS,
    params: Optional[Mapping[str, Any]] = None,
    settings: Optional[Settings] = None,
) -> List[Tuple[Fraction, Optional[Ratio]]]:
    """Measured ratio of a parameterized fixture at each parameter value.

    ``ratio`` is "poa", "pos", or "proportional" for OPT over the welfare of
    pro-rata payments.
    """
    from fixtures.registry import make_fixture

    if ratio not in ("poa", "pos", "proportional"):
        raise InputError(f"ratio must be poa, pos or proportional, got {ratio!r}")
    out = []
    for value in values:
        fixture = make_fixture(name, {**(params or {}), param: value})
        report = analyze(fixture.network, mode, settings=settings)
        if ratio == "proportional":
            rounds = settings.cds_max_rounds if settings else None
            pro_rata = sum(utilities_of(proportional_clear(fixture.network, max_rounds=rounds), mode), ZERO)
            measured = efficiency_ratio(report.opt, pro_rata)
        else:
            measured = report.poa if ratio == "poa" else report.pos
        log.info("%s at %s=%s: %s=%s", fixture.name, param, value, ratio, measured)
        out.append((parse_money(value), measured))
    return out
