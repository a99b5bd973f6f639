from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, Mapping, Optional, Tuple

from clearing.result import Direction
from game.utility import UtilityMode
from network.errors import ParamOutOfRange
from network.model import FinancialNetwork
from network.money import format_money, parse_money
from network.strategy import NO_RESTRICTION, StrategyRestriction


class Check(str, Enum):
    PAYMENTS = "payments"
    RAW_PAYMENTS = "raw-payments"
    DEFAULTS = "defaults"
    RECOVERY = "recovery"
    UTILITIES = "utilities"
    WELFARE = "welfare"
    NASH = "nash"
    COALITION = "coalition"
    EQUILIBRIA = "equilibria"
    OPT = "opt"
    POA = "poa"
    POS = "pos"
    SAME_PAYMENTS = "same-payments"
    LIFTED = "lifted"
    EQUITY_INVARIANCE = "equity-invariance"


@dataclass(frozen=True)
class ParamSpec:
    """Range of one fixture parameter; bounds are inclusive unless marked open."""

    name: str
    default: Fraction
    low: Optional[Fraction] = None
    high: Optional[Fraction] = None
    low_open: bool = False
    high_open: bool = False
    integer: bool = False
    choices: Tuple[Fraction, ...] = ()

    def describe(self) -> str:
        if self.choices:
            return f"{self.name} in {{{', '.join(format_money(c) for c in self.choices)}}}"
        left = "(" if self.low_open else "["
        right = ")" if self.high_open else "]"
        low = format_money(self.low) if self.low is not None else "-inf"
        high = format_money(self.high) if self.high is not None else "inf"
        kind = "integer " if self.integer else ""
        return f"{kind}{self.name} in {left}{low}, {high}{right}"

    def check(self, value: Any) -> Fraction:
        value = parse_money(value)
        ok = True
        if self.choices:
            ok = value in self.choices
        if self.integer and value.denominator != 1:
            ok = False
        if self.low is not None:
            ok = ok and (value > self.low if self.low_open else value >= self.low)
        if self.high is not None:
            ok = ok and (value < self.high if self.high_open else value <= self.high)
        if not ok:
            raise ParamOutOfRange(f"{self.name}={format_money(value)} is out of range; need {self.describe()}")
        return value


def _jsonable(value: Any) -> Any:
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, (Fraction, int)):
        return format_money(Fraction(value))
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, Mapping):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        items = sorted(value) if isinstance(value, (set, frozenset)) else value
        return [_jsonable(v) for v in items]
    return value


@dataclass(frozen=True)
class Expectation:
    """One documented outcome of a fixture.

    ``profile`` is a raw profile (``"proportional"`` or firm -> strategy
    text); ``expected`` holds exact rationals. Payment matrices are given as
    debtor -> {creditor: amount} with every unlisted entry zero.
    """

    check: Check
    expected: Any
    profile: Any = None
    mode: UtilityMode = UtilityMode.TOTAL_ASSETS
    direction: Direction = Direction.MAXIMAL
    firms: Tuple[str, ...] = ()
    options: Mapping[str, Any] = field(default_factory=dict)
    note: str = ""

    def label(self) -> str:
        parts = [self.check.value]
        if self.profile is not None:
            parts.append(self.profile if isinstance(self.profile, str) else
                         " ".join(f"{k}:{v}" for k, v in self.profile.items()))
        if self.check not in (Check.PAYMENTS, Check.RAW_PAYMENTS, Check.DEFAULTS, Check.RECOVERY,
                              Check.LIFTED, Check.EQUITY_INVARIANCE):
            parts.append(self.mode.value)
        if self.direction is Direction.MINIMAL:
            parts.append("minimal")
        return " ".join(parts)

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {
            "check": self.check.value,
            "expected": _jsonable(self.expected),
            "utility": self.mode.value,
            "direction": self.direction.value,
        }
        if self.profile is not None:
            out["profile"] = self.profile
        if self.firms:
            out["firms"] = list(self.firms)
        if self.options:
            out["options"] = _jsonable(self.options)
        if self.note:
            out["note"] = self.note
        return out


@dataclass(frozen=True)
class Fixture:
    name: str
    params: Dict[str, Fraction]
    network: FinancialNetwork
    expectations: Tuple[Expectation, ...]
    description: str = ""
    restriction: StrategyRestriction = NO_RESTRICTION

    def expectations_dict(self) -> Dict[str, Any]:
        return {
            "fixture": self.name,
            "description": self.description,
            "params": {k: format_money(v) for k, v in self.params.items()},
            "expectations": [e.to_dict() for e in self.expectations],
        }
