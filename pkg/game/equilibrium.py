"""Nash, strong and super-strong stability of a single profile.

Deviations are scanned in canonical order (firms by id, strategies in
canonical order) and the first improving one is returned as the witness.
"""
from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

from config.settings import Settings, load_settings
from game.utility import ProfileEvaluator, UtilityMode
from network.errors import EnumerationCapExceeded, InputError
from network.model import FinancialNetwork
from network.money import format_money
from network.strategy import (
    NO_RESTRICTION,
    Strategy,
    StrategyProfile,
    StrategyRestriction,
    strategy_spaces,
)

log = logging.getLogger(__name__)


class Notion(str, Enum):
    STRONG = "strong"
    SUPER_STRONG = "super-strong"

    @classmethod
    def parse(cls, value: Any) -> "Notion":
        if isinstance(value, cls):
            return value
        text = str(value).strip().lower().replace("_", "-")
        try:
            return cls(text)
        except ValueError:
            raise InputError(f"Unknown stability notion: {value!r} (use strong or super-strong)") from None


@dataclass(frozen=True)
class Deviation:
    coalition: Tuple[str, ...]
    changes: Tuple[Tuple[str, Strategy], ...]
    before: Tuple[Fraction, ...]
    after: Tuple[Fraction, ...]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "coalition": list(self.coalition),
            "strategies": {f: s.to_json() for f, s in self.changes},
            "before": [format_money(v) for v in self.before],
            "after": [format_money(v) for v in self.after],
        }

    def __str__(self) -> str:
        moves = ", ".join(f"{f}->{s.notation()}" for f, s in self.changes)
        return f"{{{','.join(self.coalition)}}}: {moves}"


@dataclass(frozen=True)
class StabilityCheck:
    stable: bool
    witness: Optional[Deviation] = None
    skipped: Tuple[StrategyProfile, ...] = field(default_factory=tuple)

    def __bool__(self) -> bool:
        return self.stable


def _evaluator(net, mode, evaluator, settings) -> ProfileEvaluator:
    if evaluator is not None:
        return evaluator
    return ProfileEvaluator(net, mode, settings.cds_max_rounds)


def is_nash(
    net: FinancialNetwork,
    profile: StrategyProfile,
    mode: UtilityMode = UtilityMode.TOTAL_ASSETS,
    *,
    evaluator: Optional[ProfileEvaluator] = None,
    settings: Optional[Settings] = None,
    restriction: StrategyRestriction = NO_RESTRICTION,
    skip_nonconvergent: bool = False,
    spaces: Optional[Mapping[str, Sequence[Strategy]]] = None,
) -> StabilityCheck:
    """No firm gains strictly by switching its own strategy.

    Deviations without clearing payments raise NonConvergentProfile unless
    ``skip_nonconvergent`` is set, in which case they are ignored.
    """
    settings = settings or load_settings()
    ev = _evaluator(net, mode, evaluator, settings)
    spaces = spaces or strategy_spaces(net, settings.max_strategies, restriction)
    base = ev.utilities(profile)
    skipped = []
    for firm, space in spaces.items():
        if len(space) < 2:
            continue
        i = net.index(firm)
        current = profile[firm]
        for alt in space:
            if alt == current:
                continue
            deviated = profile.replace(firm, alt)
            out = ev.outcome(deviated)
            if not out.converged:
                if skip_nonconvergent:
                    skipped.append(deviated)
                    continue
                ev.utilities(deviated, firm=firm)
            if out.utilities[i] > base[i]:
                witness = Deviation((firm,), ((firm, alt),), (base[i],), (out.utilities[i],))
                return StabilityCheck(False, witness, tuple(skipped))
    return StabilityCheck(True, None, tuple(skipped))


def _improves(before: Sequence[Fraction], after: Sequence[Fraction], notion: Notion) -> bool:
    if notion is Notion.STRONG:
        return all(a > b for a, b in zip(after, before))
    return all(a >= b for a, b in zip(after, before)) and any(a > b for a, b in zip(after, before))


def coalition_stable(
    net: FinancialNetwork,
    profile: StrategyProfile,
    mode: UtilityMode = UtilityMode.TOTAL_ASSETS,
    notion: Notion = Notion.STRONG,
    max_coalition: Optional[int] = None,
    *,
    evaluator: Optional[ProfileEvaluator] = None,
    settings: Optional[Settings] = None,
    restriction: StrategyRestriction = NO_RESTRICTION,
    skip_nonconvergent: bool = False,
    spaces: Optional[Mapping[str, Sequence[Strategy]]] = None,
) -> StabilityCheck:
    """No coalition of at most ``max_coalition`` firms has a joint deviation
    that makes every member strictly better (strong) or makes one member
    strictly better and none worse (super-strong).

    Coalitions are drawn from the firms with a choice of strategy; a firm
    with a single strategy cannot take part in a deviation.
    """
    notion = Notion.parse(notion)
    settings = settings or load_settings()
    ev = _evaluator(net, mode, evaluator, settings)
    spaces = spaces or strategy_spaces(net, settings.max_strategies, restriction)
    movers_all = [f for f in net.ids if len(spaces[f]) > 1]
    if max_coalition is not None and max_coalition < 1:
        raise InputError(f"Coalition size cap must be positive, got {max_coalition}")
    size_cap = len(movers_all) if max_coalition is None else min(max_coalition, len(movers_all))
    base = ev.utilities(profile)
    skipped: List[StrategyProfile] = []

    for size in range(1, size_cap + 1):
        for coalition in itertools.combinations(movers_all, size):
            movers = list(coalition)
            joint = math.prod(len(spaces[f]) for f in movers)
            if joint > settings.max_profiles:
                raise EnumerationCapExceeded(
                    f"Coalition {{{','.join(coalition)}}} has {joint} joint deviations, above the cap of "
                    f"{settings.max_profiles}"
                )
            members = [net.index(f) for f in coalition]
            before = tuple(base[i] for i in members)
            current = tuple(profile[f] for f in movers)
            for combo in itertools.product(*(spaces[f] for f in movers)):
                if combo == current:
                    continue
                deviated = profile.replace_many(dict(zip(movers, combo)))
                out = ev.outcome(deviated)
                if not out.converged:
                    if skip_nonconvergent:
                        skipped.append(deviated)
                        continue
                    ev.utilities(deviated)
                after = tuple(out.utilities[i] for i in members)
                if _improves(before, after, notion):
                    changes = tuple((f, s) for f, s in zip(movers, combo) if s != profile[f])
                    witness = Deviation(coalition, changes, before, after)
                    log.debug("%s deviation for %s: %s", notion.value, profile.notation(), witness)
                    return StabilityCheck(False, witness, tuple(skipped))
    return StabilityCheck(True, None, tuple(skipped))
