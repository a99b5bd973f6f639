"""Priority-proportional strategies.

A strategy is an ordered partition of a firm's creditors into priority
classes: class 1 is paid in full before class 2 receives anything, and
within a class payments are proportional to liabilities. A profile assigns
one strategy to every firm.

Textual notation is ``(v2|v3)`` for "v2 ahead of v3" and ``(v2,v3)`` for a
single class; the JSON form is nested arrays in priority order.
"""
from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

from network.errors import InvalidStrategy, StrategySpaceTooLarge, UnknownFirmId
from network.model import FinancialNetwork, firm_key

log = logging.getLogger(__name__)

PROPORTIONAL = "proportional"


@lru_cache(maxsize=None)
def ordered_bell(k: int) -> int:
    """Number of ordered set partitions of k items: a(k) = sum C(k,j) a(k-j)."""
    if k < 0:
        raise ValueError(f"k must be non-negative, got {k}")
    if k == 0:
        return 1
    return sum(math.comb(k, j) * ordered_bell(k - j) for j in range(1, k + 1))


def _sorted_ids(ids) -> Tuple[str, ...]:
    return tuple(sorted(ids, key=firm_key))


@dataclass(frozen=True)
class Strategy:
    classes: Tuple[Tuple[str, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "classes", tuple(_sorted_ids(c) for c in self.classes))

    @classmethod
    def proportional(cls, creditors: Sequence[str]) -> "Strategy":
        return cls((tuple(creditors),) if creditors else ())

    @property
    def creditors(self) -> Tuple[str, ...]:
        return _sorted_ids(c for cls in self.classes for c in cls)

    def class_index(self, creditor: str) -> int:
        for m, cls in enumerate(self.classes):
            if creditor in cls:
                return m
        raise UnknownFirmId(f"{creditor} is not a creditor under {self.notation()}")

    def sort_key(self) -> Tuple[Any, ...]:
        return tuple(tuple(firm_key(c) for c in cls) for cls in self.classes)

    def __lt__(self, other: "Strategy") -> bool:
        return self.sort_key() < other.sort_key()

    def notation(self) -> str:
        return "(" + "|".join(",".join(cls) for cls in self.classes) + ")"

    def to_json(self) -> List[List[str]]:
        return [list(cls) for cls in self.classes]

    def __str__(self) -> str:
        return self.notation()


def parse_strategy(value: Any, creditors: Sequence[str]) -> Strategy:
    """Read a strategy from notation text, nested arrays or "proportional"."""
    creditors = _sorted_ids(creditors)
    if isinstance(value, Strategy):
        classes = value.classes
    elif isinstance(value, str):
        text = value.strip()
        if text == PROPORTIONAL:
            return Strategy.proportional(creditors)
        if not (text.startswith("(") and text.endswith(")")):
            raise InvalidStrategy(f"Cannot read strategy {value!r}")
        body = text[1:-1].strip()
        classes = tuple(
            tuple(part.strip() for part in chunk.split(",") if part.strip()) for chunk in body.split("|")
        ) if body else ()
    elif isinstance(value, (list, tuple)):
        if not all(isinstance(cls, (list, tuple)) and all(isinstance(c, str) for c in cls) for cls in value):
            raise InvalidStrategy(f"Strategy must be a list of lists of firm ids, got {value!r}")
        classes = tuple(tuple(cls) for cls in value)
    else:
        raise InvalidStrategy(f"Cannot read strategy {value!r}")

    if any(len(cls) == 0 for cls in classes):
        raise InvalidStrategy(f"Empty priority class in {value!r}")
    flat = [c for cls in classes for c in cls]
    if len(flat) != len(set(flat)):
        raise InvalidStrategy(f"Creditor listed twice in {value!r}")
    if set(flat) != set(creditors):
        raise InvalidStrategy(
            f"Strategy {value!r} must cover exactly the creditors {', '.join(creditors) or '(none)'}"
        )
    return Strategy(classes)


@dataclass(frozen=True)
class StrategyRestriction:
    """Pins a sole topmost creditor for some firms."""

    top: Mapping[str, str] = field(default_factory=dict)

    def top_for(self, firm: str) -> Optional[str]:
        return self.top.get(firm)

    def allows(self, firm: str, strategy: Strategy) -> bool:
        t = self.top.get(firm)
        if t is None:
            return True
        return bool(strategy.classes) and strategy.classes[0] == (t,)


NO_RESTRICTION = StrategyRestriction()


def _ordered_partitions(items: Tuple[str, ...]) -> Iterator[Tuple[Tuple[str, ...], ...]]:
    if not items:
        yield ()
        return
    for size in range(1, len(items) + 1):
        for first in itertools.combinations(items, size):
            rest = tuple(i for i in items if i not in first)
            for tail in _ordered_partitions(rest):
                yield (first,) + tail


def count_strategies(creditors: Sequence[str], top: Optional[str] = None) -> int:
    k = len(set(creditors))
    if top is not None:
        return ordered_bell(k - 1)
    return ordered_bell(k)


def enumerate_strategies(
    creditors: Sequence[str],
    cap: int = 1_000_000,
    top: Optional[str] = None,
) -> List[Strategy]:
    """Every ordered partition of ``creditors`` in canonical order.

    With ``top`` set, only strategies whose first class is exactly {top}.
    """
    items = _sorted_ids(set(creditors))
    if top is not None and top not in items:
        raise InvalidStrategy(f"Restricted top creditor {top} is not among {', '.join(items)}")
    count = count_strategies(items, top)
    if count > cap:
        raise StrategySpaceTooLarge(f"{len(items)} creditors give {count} strategies, above the cap of {cap}")
    if top is None:
        out = [Strategy(p) for p in _ordered_partitions(items)]
    else:
        rest = tuple(i for i in items if i != top)
        out = [Strategy(((top,),) + p) for p in _ordered_partitions(rest)]
    out.sort(key=Strategy.sort_key)
    return out


# ─── Profiles ───


@dataclass(frozen=True)
class StrategyProfile:
    strategies: Tuple[Tuple[str, Strategy], ...]

    def __post_init__(self):
        object.__setattr__(self, "strategies", tuple(sorted(self.strategies, key=lambda kv: firm_key(kv[0]))))

    def __getitem__(self, firm: str) -> Strategy:
        for fid, s in self.strategies:
            if fid == firm:
                return s
        raise UnknownFirmId(f"No strategy for firm {firm}")

    def get(self, firm: str) -> Optional[Strategy]:
        for fid, s in self.strategies:
            if fid == firm:
                return s
        return None

    def replace(self, firm: str, strategy: Strategy) -> "StrategyProfile":
        return self.replace_many({firm: strategy})

    def replace_many(self, changes: Mapping[str, Strategy]) -> "StrategyProfile":
        merged = dict(self.strategies)
        merged.update(changes)
        return StrategyProfile(tuple(merged.items()))

    def sort_key(self) -> Tuple[Any, ...]:
        return tuple((firm_key(f), s.sort_key()) for f, s in self.strategies)

    def to_dict(self, only_choices: bool = True) -> Dict[str, List[List[str]]]:
        """Nested-array form; by default only firms with more than one creditor."""
        return {f: s.to_json() for f, s in self.strategies if not only_choices or len(s.creditors) > 1}

    def notation(self) -> str:
        parts = [f"{f}:{s.notation()}" for f, s in self.strategies if len(s.creditors) > 1]
        return " ".join(parts) if parts else "(trivial)"

    def __str__(self) -> str:
        return self.notation()


def creditor_sets(net: FinancialNetwork) -> Dict[str, Tuple[str, ...]]:
    return {fid: net.potential_creditors(fid) for fid in net.ids}


def players(net: FinancialNetwork) -> Tuple[str, ...]:
    """Firms with a real choice: two or more potential creditors."""
    return tuple(fid for fid, cs in creditor_sets(net).items() if len(cs) > 1)


def _default_strategy(creditors: Sequence[str], restriction: StrategyRestriction, firm: str) -> Strategy:
    top = restriction.top_for(firm)
    if top is None or len(creditors) <= 1:
        return Strategy.proportional(creditors)
    rest = tuple(c for c in creditors if c != top)
    return Strategy(((top,), rest) if rest else ((top,),))


def proportional_profile(net: FinancialNetwork, restriction: StrategyRestriction = NO_RESTRICTION) -> StrategyProfile:
    """All-single-class profile (the pinned top class kept where restricted)."""
    return StrategyProfile(
        tuple((fid, _default_strategy(cs, restriction, fid)) for fid, cs in creditor_sets(net).items())
    )


def parse_profile(
    net: FinancialNetwork,
    raw: Any,
    restriction: StrategyRestriction = NO_RESTRICTION,
) -> StrategyProfile:
    """Read a profile from ``"proportional"`` or a mapping firm -> strategy.

    Every firm with two or more creditors must be listed; the others may be
    given and are checked, otherwise they get their trivial strategy.
    """
    if isinstance(raw, StrategyProfile):
        raw = {f: s for f, s in raw.strategies}
    if isinstance(raw, str) and raw.strip() == PROPORTIONAL:
        return proportional_profile(net, restriction)
    if not isinstance(raw, Mapping):
        raise InvalidStrategy('Profile must be "proportional" or an object mapping firm ids to strategies')
    sets = creditor_sets(net)
    for fid in raw:
        if fid not in sets:
            raise UnknownFirmId(f"Unknown firm id in profile: {fid}")
    chosen: List[Tuple[str, Strategy]] = []
    for fid, cs in sets.items():
        if fid in raw:
            s = parse_strategy(raw[fid], cs)
        elif len(cs) > 1:
            raise InvalidStrategy(f"Profile has no strategy for firm {fid} (creditors {', '.join(cs)})")
        else:
            s = Strategy.proportional(cs)
        if not restriction.allows(fid, s):
            raise InvalidStrategy(f"Strategy {s.notation()} of {fid} must put {restriction.top_for(fid)} alone on top")
        chosen.append((fid, s))
    return StrategyProfile(tuple(chosen))


def strategy_spaces(
    net: FinancialNetwork,
    cap: int = 1_000_000,
    restriction: StrategyRestriction = NO_RESTRICTION,
) -> Dict[str, List[Strategy]]:
    """Per-firm strategy lists, in firm order."""
    spaces = {}
    for fid, cs in creditor_sets(net).items():
        top = restriction.top_for(fid)
        if len(cs) <= 1 or (top is not None and len(cs) <= 2):
            spaces[fid] = [_default_strategy(cs, restriction, fid)]
        else:
            spaces[fid] = enumerate_strategies(cs, cap=cap, top=top)
    log.debug("strategy spaces: %s", {f: len(s) for f, s in spaces.items()})
    return spaces


def count_profiles(spaces: Mapping[str, Sequence[Strategy]]) -> int:
    return math.prod(len(s) for s in spaces.values())
