"""Financial network data model.

A network is a set of firms with external assets (possibly negative), plain
debt contracts, credit default swaps and a pair of default-cost fractions
(alpha on external assets, beta on incoming payments). All values are
immutable once built; ``validate_network`` is the only constructor that
checks invariants.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Mapping, Sequence, Tuple

import numpy as np

from network.errors import (
    CdsDegenerateReference,
    DefaultCostOutOfRange,
    DuplicateFirmId,
    InputError,
    NegativeLiability,
    RecoveryOutOfRange,
    SelfLoopDebt,
    UnknownFirmId,
)
from network.money import ONE, ZERO, format_money, parse_money

_DIGITS = re.compile(r"(\d+)")


def firm_key(firm_id: str) -> Tuple[Any, ...]:
    """Natural sort key so that v2 sorts before v10."""
    parts = _DIGITS.split(firm_id)
    return tuple((0, int(p)) if p.isdigit() else (1, p) for p in parts if p != "")


@dataclass(frozen=True)
class Firm:
    id: str
    external: Fraction = ZERO


@dataclass(frozen=True)
class Debt:
    debtor: str
    creditor: str
    amount: Fraction


@dataclass(frozen=True)
class Cds:
    debtor: str
    creditor: str
    reference: str
    notional: Fraction


@dataclass(frozen=True)
class FinancialNetwork:
    firms: Tuple[Firm, ...]
    debts: Tuple[Debt, ...] = ()
    cds: Tuple[Cds, ...] = ()
    alpha: Fraction = ONE
    beta: Fraction = ONE
    _index: Dict[str, int] = field(default_factory=dict, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "_index", {f.id: i for i, f in enumerate(self.firms)})

    # ─── Lookup ───

    @property
    def n(self) -> int:
        return len(self.firms)

    @property
    def ids(self) -> Tuple[str, ...]:
        return tuple(f.id for f in self.firms)

    @property
    def externals(self) -> Tuple[Fraction, ...]:
        return tuple(f.external for f in self.firms)

    @property
    def has_cds(self) -> bool:
        return bool(self.cds)

    @property
    def has_default_costs(self) -> bool:
        return self.alpha != ONE or self.beta != ONE

    @property
    def has_negative_externals(self) -> bool:
        return any(f.external < 0 for f in self.firms)

    def index(self, firm_id: str) -> int:
        try:
            return self._index[firm_id]
        except KeyError:
            raise UnknownFirmId(f"Unknown firm id: {firm_id}") from None

    def external(self, firm_id: str) -> Fraction:
        return self.firms[self.index(firm_id)].external

    def potential_creditors(self, firm_id: str) -> Tuple[str, ...]:
        """Creditors by debt > 0 or by any CDS, whatever the recovery rates."""
        out = {d.creditor for d in self.debts if d.debtor == firm_id and d.amount > 0}
        out.update(c.creditor for c in self.cds if c.debtor == firm_id)
        return tuple(sorted(out, key=firm_key))

    def base_liabilities(self) -> np.ndarray:
        l0 = np.full((self.n, self.n), ZERO, dtype=object)
        for d in self.debts:
            l0[self.index(d.debtor), self.index(d.creditor)] += d.amount
        return l0

    # ─── Serialization ───

    def to_dict(self) -> Dict[str, Any]:
        return {
            "firms": [{"id": f.id, "external": format_money(f.external)} for f in self.firms],
            "debts": [{"from": d.debtor, "to": d.creditor, "amount": format_money(d.amount)} for d in self.debts],
            "cds": [
                {"from": c.debtor, "to": c.creditor, "reference": c.reference, "notional": format_money(c.notional)}
                for c in self.cds
            ],
            "default_costs": {"alpha": format_money(self.alpha), "beta": format_money(self.beta)},
        }

    def scaled(self, factor: Fraction) -> "FinancialNetwork":
        """Multiply every external asset and contract amount by ``factor`` > 0."""
        factor = parse_money(factor)
        if factor <= 0:
            raise InputError(f"Scale factor must be positive, got {format_money(factor)}")
        return FinancialNetwork(
            tuple(Firm(f.id, f.external * factor) for f in self.firms),
            tuple(Debt(d.debtor, d.creditor, d.amount * factor) for d in self.debts),
            tuple(Cds(c.debtor, c.creditor, c.reference, c.notional * factor) for c in self.cds),
            self.alpha,
            self.beta,
        )


@dataclass(frozen=True)
class LiabilityMatrix:
    """Resolved liabilities l_ij for one recovery vector, with row totals L_i."""

    l: np.ndarray
    totals: np.ndarray

    @property
    def n(self) -> int:
        return self.l.shape[0]


# ─── Validation ───


def _require_firm(index: Mapping[str, int], firm_id: Any, role: str) -> str:
    if not isinstance(firm_id, str) or firm_id not in index:
        raise UnknownFirmId(f"Unknown firm id in {role}: {firm_id!r}")
    return firm_id


def _unit_interval(value: Any, name: str) -> Fraction:
    v = parse_money(value)
    if v < 0 or v > 1:
        raise DefaultCostOutOfRange(f"{name} must lie in [0, 1], got {format_money(v)}")
    return v


def _raw_from_network(net: FinancialNetwork) -> Dict[str, Any]:
    return {
        "firms": [{"id": f.id, "external": f.external} for f in net.firms],
        "debts": [{"from": d.debtor, "to": d.creditor, "amount": d.amount} for d in net.debts],
        "cds": [{"from": c.debtor, "to": c.creditor, "reference": c.reference, "notional": c.notional} for c in net.cds],
        "default_costs": {"alpha": net.alpha, "beta": net.beta},
    }


def validate_network(raw: Any) -> FinancialNetwork:
    """Build a FinancialNetwork from the JSON-shaped description (or re-check one).

    Duplicate debt edges and duplicate CDS triples are merged by summation;
    zero-amount contracts are dropped.
    """
    if isinstance(raw, FinancialNetwork):
        raw = _raw_from_network(raw)
    if not isinstance(raw, Mapping):
        raise InputError("Network description must be a JSON object")

    firms: List[Firm] = []
    index: Dict[str, int] = {}
    for entry in raw.get("firms", []):
        if not isinstance(entry, Mapping) or not isinstance(entry.get("id"), str) or not entry["id"]:
            raise InputError(f"Malformed firm entry: {entry!r}")
        fid = entry["id"]
        if fid in index:
            raise DuplicateFirmId(f"Duplicate firm id: {fid}")
        index[fid] = len(firms)
        firms.append(Firm(fid, parse_money(entry.get("external", 0))))

    debt_totals: Dict[Tuple[str, str], Fraction] = {}
    for entry in raw.get("debts", []) or []:
        debtor = _require_firm(index, entry.get("from"), "debt")
        creditor = _require_firm(index, entry.get("to"), "debt")
        amount = parse_money(entry.get("amount", 0))
        if amount < 0:
            raise NegativeLiability(f"Negative debt {debtor}->{creditor}: {format_money(amount)}")
        if debtor == creditor:
            raise SelfLoopDebt(f"Firm {debtor} cannot owe itself")
        key = (debtor, creditor)
        debt_totals[key] = debt_totals.get(key, ZERO) + amount

    cds_totals: Dict[Tuple[str, str, str], Fraction] = {}
    for entry in raw.get("cds", []) or []:
        debtor = _require_firm(index, entry.get("from"), "cds")
        creditor = _require_firm(index, entry.get("to"), "cds")
        reference = _require_firm(index, entry.get("reference"), "cds")
        notional = parse_money(entry.get("notional", 0))
        if notional < 0:
            raise NegativeLiability(f"Negative CDS notional {debtor}->{creditor}: {format_money(notional)}")
        if debtor == creditor:
            raise SelfLoopDebt(f"Firm {debtor} cannot hold a CDS against itself")
        if reference in (debtor, creditor):
            raise CdsDegenerateReference(f"CDS {debtor}->{creditor} references one of its own parties ({reference})")
        key = (debtor, creditor, reference)
        cds_totals[key] = cds_totals.get(key, ZERO) + notional

    costs = raw.get("default_costs") or {}
    alpha = _unit_interval(costs.get("alpha", 1), "alpha")
    beta = _unit_interval(costs.get("beta", 1), "beta")

    def order(ids: Sequence[str]) -> Tuple[int, ...]:
        return tuple(index[i] for i in ids)

    debts = tuple(
        Debt(d, c, amt) for (d, c), amt in sorted(debt_totals.items(), key=lambda kv: order(kv[0])) if amt > 0
    )
    cds = tuple(
        Cds(d, c, r, amt) for (d, c, r), amt in sorted(cds_totals.items(), key=lambda kv: order(kv[0])) if amt > 0
    )
    return FinancialNetwork(tuple(firms), debts, cds, alpha, beta)


# ─── Liabilities ───


def all_ones(net: FinancialNetwork) -> Tuple[Fraction, ...]:
    return tuple(ONE for _ in range(net.n))


def resolve_liabilities(net: FinancialNetwork, recovery: Iterable[Any] | None = None) -> LiabilityMatrix:
    """l_ij = l0_ij + sum_k (1 - r_k) * l^k_ij, and L_i = sum_j l_ij."""
    r = [parse_money(v) for v in (recovery if recovery is not None else all_ones(net))]
    if len(r) != net.n:
        raise RecoveryOutOfRange(f"Recovery vector has {len(r)} entries for {net.n} firms")
    for fid, v in zip(net.ids, r):
        if v < 0 or v > 1:
            raise RecoveryOutOfRange(f"Recovery of {fid} must lie in [0, 1], got {format_money(v)}")
    l = net.base_liabilities()
    for c in net.cds:
        k = net.index(c.reference)
        l[net.index(c.debtor), net.index(c.creditor)] += (ONE - r[k]) * c.notional
    totals = np.array([sum(l[i], ZERO) for i in range(net.n)], dtype=object)
    l.setflags(write=False)
    totals.setflags(write=False)
    return LiabilityMatrix(l, totals)
