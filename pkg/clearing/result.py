"""Payment matrices and clearing results."""
from __future__ import annotations

import io
from dataclasses import dataclass, replace
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, FrozenSet, Iterable, List, Optional, Tuple

import numpy as np
import pandas as pd

from network.model import FinancialNetwork, LiabilityMatrix
from network.money import ZERO, format_money
from network.strategy import StrategyProfile


class Direction(str, Enum):
    MAXIMAL = "maximal"
    MINIMAL = "minimal"


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=object, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class PaymentMatrix:
    ids: Tuple[str, ...]
    p: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "p", _frozen(self.p))

    @classmethod
    def zeros(cls, ids: Iterable[str]) -> "PaymentMatrix":
        ids = tuple(ids)
        return cls(ids, np.full((len(ids), len(ids)), ZERO, dtype=object))

    @classmethod
    def from_rows(cls, ids: Iterable[str], rows: Iterable[Iterable[Fraction]]) -> "PaymentMatrix":
        ids = tuple(ids)
        return cls(ids, np.array([[Fraction(v) for v in row] for row in rows], dtype=object).reshape(len(ids), len(ids)))

    @property
    def n(self) -> int:
        return len(self.ids)

    @property
    def totals(self) -> Tuple[Fraction, ...]:
        return tuple(sum(self.p[i], ZERO) for i in range(self.n))

    @property
    def inflows(self) -> Tuple[Fraction, ...]:
        return tuple(sum(self.p[:, j], ZERO) for j in range(self.n))

    def get(self, debtor: str, creditor: str) -> Fraction:
        return self.p[self.ids.index(debtor), self.ids.index(creditor)]

    def row(self, firm: str) -> Tuple[Fraction, ...]:
        return tuple(self.p[self.ids.index(firm)])

    def with_rows_zeroed(self, rows: Iterable[int]) -> "PaymentMatrix":
        p = np.array(self.p, dtype=object, copy=True)
        for i in rows:
            p[i, :] = ZERO
        return PaymentMatrix(self.ids, p)

    def to_lists(self) -> List[List[str]]:
        return [[format_money(v) for v in row] for row in self.p]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.to_lists(), index=list(self.ids), columns=list(self.ids))

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, PaymentMatrix):
            return NotImplemented
        return self.ids == other.ids and all(a == b for a, b in zip(self.p.flat, other.p.flat))

    __hash__ = None


@dataclass(frozen=True, eq=False)
class ClearingResult:
    network: FinancialNetwork
    profile: StrategyProfile
    liabilities: LiabilityMatrix
    payments: PaymentMatrix
    defaults: FrozenSet[str]
    recovery: Tuple[Fraction, ...]
    proper: bool
    converged: bool = True
    rounds: int = 1
    direction: Direction = Direction.MAXIMAL
    raw_payments: Optional[PaymentMatrix] = None
    cds_rounds: int = 1

    @property
    def ids(self) -> Tuple[str, ...]:
        return self.network.ids

    @property
    def totals(self) -> Tuple[Fraction, ...]:
        return tuple(self.liabilities.totals)

    def default_ids(self) -> List[str]:
        return [fid for fid in self.ids if fid in self.defaults]

    def total_assets(self) -> Tuple[Fraction, ...]:
        return tuple(e + a for e, a in zip(self.network.externals, self.payments.inflows))

    def equities(self) -> Tuple[Fraction, ...]:
        return tuple(max(ZERO, a - l) for a, l in zip(self.total_assets(), self.totals))

    def with_flags(self, **changes) -> "ClearingResult":
        return replace(self, **changes)

    def to_dict(self) -> Dict[str, Any]:
        assets = self.total_assets()
        equity = self.equities()
        return {
            "firms": list(self.ids),
            "payments": self.payments.to_lists(),
            "outgoing": [format_money(v) for v in self.payments.totals],
            "liabilities": [format_money(v) for v in self.totals],
            "defaults": self.default_ids(),
            "recovery": [format_money(v) for v in self.recovery],
            "total_assets": [format_money(v) for v in assets],
            "equity": [format_money(v) for v in equity],
            "social_welfare": {
                "assets": format_money(sum(assets, ZERO)),
                "equity": format_money(sum(equity, ZERO)),
            },
            "direction": self.direction.value,
            "proper": self.proper,
            "converged": self.converged,
            "rounds": self.rounds,
            "cds_rounds": self.cds_rounds,
            "profile": self.profile.to_dict(),
        }

    def to_csv(self) -> str:
        """Payment matrix as CSV: one row per debtor, one column per creditor."""
        buf = io.StringIO()
        frame = self.payments.to_frame()
        frame.index.name = "debtor"
        frame.to_csv(buf)
        return buf.getvalue()

    def to_table(self) -> str:
        frame = pd.DataFrame(
            {
                "assets": [format_money(v) for v in self.total_assets()],
                "liability": [format_money(v) for v in self.totals],
                "pays": [format_money(v) for v in self.payments.totals],
                "equity": [format_money(v) for v in self.equities()],
                "default": ["yes" if fid in self.defaults else "" for fid in self.ids],
            },
            index=list(self.ids),
        )
        return self.payments.to_frame().to_string() + "\n\n" + frame.to_string()
