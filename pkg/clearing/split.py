"""Priority-proportional split of one firm's outgoing payment.

Class m receives nothing until classes 1..m-1 are paid in full; the first
class that cannot be paid in full shares the residual in proportion to
liabilities.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from network.errors import InvalidAmount, InvalidStrategy
from network.money import ZERO, parse_money
from network.strategy import Strategy


@dataclass(frozen=True)
class Tier:
    """One priority class resolved against a liability row."""

    members: Tuple[int, ...]
    owed: Tuple[Fraction, ...]
    total: Fraction
    start: Fraction

    @property
    def end(self) -> Fraction:
        return self.start + self.total


def build_tiers(strategy: Strategy, index: Mapping[str, int], row: Sequence[Fraction]) -> Tuple[Tier, ...]:
    tiers = []
    start = ZERO
    for cls in strategy.classes:
        members = tuple(index[c] for c in cls)
        owed = tuple(row[j] for j in members)
        total = sum(owed, ZERO)
        tiers.append(Tier(members, owed, total, start))
        start += total
    covered = {j for t in tiers for j in t.members}
    missing = [j for j, amount in enumerate(row) if amount > 0 and j not in covered]
    if missing:
        raise InvalidStrategy(f"Strategy {strategy.notation()} leaves creditors with positive liability unranked")
    return tuple(tiers)


def split_row(x: Fraction, tiers: Sequence[Tier], n: int) -> List[Fraction]:
    out = [ZERO] * n
    remaining = x
    for tier in tiers:
        if remaining <= 0:
            break
        if tier.total == 0:
            continue
        if remaining >= tier.total:
            for j, owed in zip(tier.members, tier.owed):
                out[j] = owed
            remaining -= tier.total
        else:
            for j, owed in zip(tier.members, tier.owed):
                out[j] = remaining * owed / tier.total
            remaining = ZERO
    return out


def frontier_down(x: Fraction, tiers: Sequence[Tier]) -> Optional[int]:
    """Class m with start < x <= end; the first paying class when x == 0."""
    first = None
    for m, tier in enumerate(tiers):
        if tier.total == 0:
            continue
        if first is None:
            first = m
        if tier.start < x <= tier.end:
            return m
    return first


def frontier_up(x: Fraction, tiers: Sequence[Tier]) -> Optional[int]:
    """Class m with start <= x < end; the last paying class when x is the full total."""
    last = None
    for m, tier in enumerate(tiers):
        if tier.total == 0:
            continue
        last = m
        if tier.start <= x < tier.end:
            return m
    return last


def affine_split(tiers: Sequence[Tier], frontier: Optional[int]) -> Dict[int, Tuple[Fraction, Fraction]]:
    """creditor -> (constant, slope) of the split while ``frontier`` is the paying class."""
    out: Dict[int, Tuple[Fraction, Fraction]] = {}
    if frontier is None:
        return out
    for m, tier in enumerate(tiers):
        if m < frontier:
            for j, owed in zip(tier.members, tier.owed):
                out[j] = (owed, ZERO)
        elif m == frontier:
            for j, owed in zip(tier.members, tier.owed):
                slope = owed / tier.total
                out[j] = (-slope * tier.start, slope)
        else:
            break
    return out


LiabilityRow = Union[Mapping[str, Fraction], Sequence[Fraction]]


def pp_split(p_total, strategy: Strategy, liability_row: LiabilityRow):
    """Split ``p_total`` over the creditors of ``strategy``.

    ``liability_row`` is either a mapping creditor -> amount or a sequence
    aligned with ``strategy.creditors``; the result has the same shape.
    Any excess over the row total is ignored.
    """
    total = parse_money(p_total)
    if total < 0:
        raise InvalidAmount(f"Payment total must be non-negative, got {total}")
    creditors = strategy.creditors
    if isinstance(liability_row, Mapping):
        row = [parse_money(liability_row.get(c, 0)) for c in creditors]
    else:
        row = [parse_money(v) for v in liability_row]
        if len(row) != len(creditors):
            raise InvalidStrategy(f"Liability row has {len(row)} entries for {len(creditors)} creditors")
    index = {c: k for k, c in enumerate(creditors)}
    out = split_row(total, build_tiers(strategy, index, row), len(creditors))
    if isinstance(liability_row, Mapping):
        return dict(zip(creditors, out))
    return tuple(out)
