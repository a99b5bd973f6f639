"""Independent check of a clearing result.

Everything here is recomputed from the network, the profile and the payment
matrix alone; nothing is shared with the solver beyond the data types.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional

import networkx as nx

from clearing.result import ClearingResult, PaymentMatrix
from network.model import FinancialNetwork, resolve_liabilities
from network.money import ONE, ZERO, format_money
from network.strategy import StrategyProfile


@dataclass(frozen=True)
class Violation:
    check: str
    firm: str
    residual: Fraction
    creditor: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        out = {"check": self.check, "firm": self.firm, "residual": format_money(self.residual)}
        if self.creditor is not None:
            out["creditor"] = self.creditor
        return out

    def __str__(self) -> str:
        edge = f"{self.firm}->{self.creditor}" if self.creditor else self.firm
        return f"{self.check} {edge}: residual {format_money(self.residual)}"


@dataclass
class VerificationReport:
    violations: List[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def by_check(self, check: str) -> List[Violation]:
        return [v for v in self.violations if v.check == check]

    def to_dict(self) -> Dict[str, Any]:
        return {"ok": self.ok, "violations": [v.to_dict() for v in self.violations]}


def _expected_row(total: Fraction, classes, owed: Dict[str, Fraction]) -> Dict[str, Fraction]:
    out: Dict[str, Fraction] = {}
    left = total
    for cls in classes:
        need = sum((owed.get(c, ZERO) for c in cls), ZERO)
        if left >= need:
            for c in cls:
                out[c] = owed.get(c, ZERO)
            left -= need
        else:
            for c in cls:
                out[c] = left * owed.get(c, ZERO) / need if need > 0 else ZERO
            left = ZERO
    return out


def verify_clearing(
    net: FinancialNetwork,
    profile: StrategyProfile,
    result: ClearingResult,
    payments: Optional[PaymentMatrix] = None,
) -> VerificationReport:
    """List every violated clearing condition with its exact residual.

    ``payments`` overrides the result's matrix, for checking hand-entered
    or perturbed matrices.
    """
    p = (payments or result.payments).p
    ids = net.ids
    n = net.n
    report = VerificationReport()
    liabilities = resolve_liabilities(net, result.recovery)
    l = liabilities.l
    totals = [sum(l[i], ZERO) for i in range(n)]
    inflow = [sum((p[j, i] for j in range(n)), ZERO) for i in range(n)]
    outflow = [sum(p[i], ZERO) for i in range(n)]

    for i, fid in enumerate(ids):
        assets = net.firms[i].external + inflow[i]
        if assets >= totals[i]:
            expected = totals[i]
        else:
            expected = min(totals[i], max(ZERO, net.alpha * net.firms[i].external + net.beta * inflow[i]))
        if outflow[i] != expected:
            report.violations.append(Violation("clearing", fid, outflow[i] - expected))

        owed = {ids[j]: l[i, j] for j in range(n)}
        split = _expected_row(outflow[i], profile[fid].classes, owed)
        for j, cid in enumerate(ids):
            want = split.get(cid, ZERO)
            if p[i, j] != want:
                report.violations.append(Violation("split", fid, p[i, j] - want, cid))
            if p[i, j] < 0:
                report.violations.append(Violation("bounds", fid, p[i, j], cid))
            elif p[i, j] > l[i, j]:
                report.violations.append(Violation("bounds", fid, p[i, j] - l[i, j], cid))

        in_default = assets < totals[i]
        if in_default != (fid in result.defaults):
            report.violations.append(Violation("defaults", fid, assets - totals[i]))
        expected_r = outflow[i] / totals[i] if in_default and totals[i] > 0 else ONE
        if result.recovery[i] != expected_r:
            report.violations.append(Violation("recovery", fid, result.recovery[i] - expected_r))

    if result.proper:
        graph = nx.DiGraph()
        graph.add_nodes_from(range(n))
        graph.add_edges_from((i, j) for i in range(n) for j in range(n) if p[i, j] > 0)
        seeds = [i for i in range(n) if net.firms[i].external > 0]
        reached = set(seeds)
        for s in seeds:
            reached |= nx.descendants(graph, s)
        for i in range(n):
            if i not in reached and outflow[i] > 0:
                report.violations.append(Violation("proper", ids[i], outflow[i]))
    return report
