"""Exhaustive analysis of the payment game on one network.

Every profile in the Cartesian product of the firms' strategy spaces is
cleared once; equilibrium checks then read the cached outcomes.
"""
from __future__ import annotations

import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple, Union

import pandas as pd

from config.settings import Settings, load_settings
from game.equilibrium import Deviation, Notion, coalition_stable, is_nash
from game.utility import ProfileEvaluator, UtilityMode
from network.errors import EnumerationCapExceeded, InputError
from network.model import FinancialNetwork
from network.money import ONE, format_money
from network.strategy import (
    NO_RESTRICTION,
    StrategyProfile,
    StrategyRestriction,
    count_profiles,
    strategy_spaces,
)

log = logging.getLogger(__name__)

UNBOUNDED = "unbounded"

Ratio = Union[Fraction, str]


def efficiency_ratio(opt: Fraction, welfare: Fraction) -> Ratio:
    """OPT / SW, with "unbounded" when SW is not positive but OPT exceeds it."""
    if welfare > 0:
        return opt / welfare
    if opt == welfare:
        return ONE
    return UNBOUNDED


def format_ratio(value: Optional[Ratio]) -> Optional[str]:
    if value is None or isinstance(value, str):
        return value
    return format_money(value)


@dataclass(frozen=True)
class ProfileRow:
    profile: StrategyProfile
    utilities: Tuple[Fraction, ...]
    welfare: Fraction
    nash: bool
    witness: Optional[Deviation] = None
    coalition: Optional[bool] = None
    coalition_witness: Optional[Deviation] = None


@dataclass
class GameReport:
    mode: UtilityMode
    firms: Tuple[str, ...]
    players: Tuple[str, ...]
    rows: List[ProfileRow]
    opt: Optional[Fraction]
    opt_profile: Optional[StrategyProfile]
    poa: Optional[Ratio]
    pos: Optional[Ratio]
    nonconvergent: List[StrategyProfile] = field(default_factory=list)
    check: Optional[Notion] = None
    coalition_max: Optional[int] = None
    coalition_poa: Optional[Ratio] = None
    coalition_pos: Optional[Ratio] = None

    @property
    def profiles_examined(self) -> int:
        return len(self.rows) + len(self.nonconvergent)

    @property
    def equilibria(self) -> List[StrategyProfile]:
        return [r.profile for r in self.rows if r.nash]

    @property
    def coalition_equilibria(self) -> List[StrategyProfile]:
        return [r.profile for r in self.rows if r.coalition]

    @property
    def has_equilibrium(self) -> bool:
        return any(r.nash for r in self.rows)

    def row(self, profile: StrategyProfile) -> ProfileRow:
        for r in self.rows:
            if r.profile == profile:
                return r
        raise KeyError(profile.notation())

    def welfare(self, profile: StrategyProfile) -> Fraction:
        return self.row(profile).welfare

    def summary(self) -> List[str]:
        lines = [f"profiles examined: {self.profiles_examined}"]
        if self.nonconvergent:
            lines.append(f"nonconvergent profiles excluded: {len(self.nonconvergent)}")
        if self.opt is not None:
            lines.append(f"OPT = {format_money(self.opt)} at {self.opt_profile.notation()}")
        if self.has_equilibrium:
            lines.append(f"equilibria: {len(self.equilibria)}")
            lines.append(f"PoA = {format_ratio(self.poa)}")
            lines.append(f"PoS = {format_ratio(self.pos)}")
        else:
            lines.append("no pure Nash equilibrium")
        if self.check is not None:
            found = self.coalition_equilibria
            lines.append(f"{self.check.value} equilibria (coalitions <= {self.coalition_max}): {len(found)}")
            if found:
                lines.append(f"{self.check.value} PoA = {format_ratio(self.coalition_poa)}")
                lines.append(f"{self.check.value} PoS = {format_ratio(self.coalition_pos)}")
        return lines

    def to_dict(self) -> Dict[str, Any]:
        def row_dict(r: ProfileRow) -> Dict[str, Any]:
            out: Dict[str, Any] = {
                "profile": r.profile.to_dict(),
                "notation": r.profile.notation(),
                "utilities": [format_money(v) for v in r.utilities],
                "social_welfare": format_money(r.welfare),
                "nash": r.nash,
            }
            if r.witness is not None:
                out["witness"] = r.witness.to_dict()
            if r.coalition is not None:
                out[self.check.value] = r.coalition
                if r.coalition_witness is not None:
                    out[f"{self.check.value}_witness"] = r.coalition_witness.to_dict()
            return out

        report: Dict[str, Any] = {
            "utility": self.mode.value,
            "firms": list(self.firms),
            "players": list(self.players),
            "profiles_examined": self.profiles_examined,
            "profiles": [row_dict(r) for r in self.rows],
            "equilibria": [p.to_dict() for p in self.equilibria],
            "has_equilibrium": self.has_equilibrium,
            "opt": format_money(self.opt) if self.opt is not None else None,
            "opt_profile": self.opt_profile.to_dict() if self.opt_profile is not None else None,
            "poa": format_ratio(self.poa),
            "pos": format_ratio(self.pos),
            "nonconvergent": [p.to_dict() for p in self.nonconvergent],
        }
        if self.check is not None:
            report["check"] = {
                "notion": self.check.value,
                "coalition_max": self.coalition_max,
                "equilibria": [p.to_dict() for p in self.coalition_equilibria],
                "poa": format_ratio(self.coalition_poa),
                "pos": format_ratio(self.coalition_pos),
            }
        return report

    def to_frame(self) -> pd.DataFrame:
        records = []
        for r in self.rows:
            rec: Dict[str, Any] = {"profile": r.profile.notation()}
            for fid, v in zip(self.firms, r.utilities):
                rec[fid] = format_money(v)
            rec["SW"] = format_money(r.welfare)
            rec["nash"] = "yes" if r.nash else ""
            if self.check is not None:
                rec[self.check.value] = "yes" if r.coalition else ""
            records.append(rec)
        return pd.DataFrame.from_records(records)

    def to_table(self) -> str:
        frame = self.to_frame()
        body = frame.to_string(index=False) if not frame.empty else "(no convergent profiles)"
        return body + "\n\n" + "\n".join(self.summary())


def _ratios(opt: Optional[Fraction], welfares: List[Fraction]) -> Tuple[Optional[Ratio], Optional[Ratio]]:
    if opt is None or not welfares:
        return None, None
    return efficiency_ratio(opt, min(welfares)), efficiency_ratio(opt, max(welfares))


def analyze(
    net: FinancialNetwork,
    mode: UtilityMode = UtilityMode.TOTAL_ASSETS,
    *,
    check: Optional[Union[Notion, str]] = None,
    coalition_max: Optional[int] = None,
    jobs: Optional[int] = None,
    settings: Optional[Settings] = None,
    restriction: StrategyRestriction = NO_RESTRICTION,
) -> GameReport:
    settings = settings or load_settings()
    mode = UtilityMode(mode)
    notion = Notion.parse(check) if check is not None else None
    if coalition_max is not None and coalition_max < 1:
        raise InputError(f"--coalition-max must be positive, got {coalition_max}")
    jobs = jobs or settings.jobs

    spaces = strategy_spaces(net, settings.max_strategies, restriction)
    total = count_profiles(spaces)
    if total > settings.max_profiles:
        raise EnumerationCapExceeded(f"{total} strategy profiles, above the cap of {settings.max_profiles}")
    players = tuple(f for f, s in spaces.items() if len(s) > 1)
    log.info("analyzing %d profile(s) over %d player(s) (%s utility)", total, len(players), mode.value)

    ids = tuple(spaces)
    profiles = [StrategyProfile(tuple(zip(ids, combo))) for combo in itertools.product(*spaces.values())]
    evaluator = ProfileEvaluator(net, mode, settings.cds_max_rounds)
    if jobs > 1 and len(profiles) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(evaluator.outcome, profiles))
    else:
        outcomes = [evaluator.outcome(p) for p in profiles]

    nonconvergent = [o.profile for o in outcomes if not o.converged]
    for p in nonconvergent:
        log.warning("excluding profile without clearing payments: %s", p.notation())

    rows: List[ProfileRow] = []
    for out in outcomes:
        if not out.converged:
            continue
        nash = is_nash(net, out.profile, mode, evaluator=evaluator, settings=settings,
                       skip_nonconvergent=True, spaces=spaces)
        coalition = coalition_witness = None
        if notion is not None:
            if nash:
                stable = coalition_stable(net, out.profile, mode, notion, coalition_max, evaluator=evaluator,
                                          settings=settings, skip_nonconvergent=True, spaces=spaces)
                coalition, coalition_witness = stable.stable, stable.witness
            else:
                coalition, coalition_witness = False, nash.witness
        rows.append(ProfileRow(out.profile, out.utilities, out.welfare, nash.stable, nash.witness,
                               coalition, coalition_witness))

    opt = opt_profile = None
    if rows:
        best = max(rows, key=lambda r: r.welfare)
        opt, opt_profile = best.welfare, best.profile
    poa, pos = _ratios(opt, [r.welfare for r in rows if r.nash])
    coalition_poa, coalition_pos = _ratios(opt, [r.welfare for r in rows if r.coalition])

    report = GameReport(
        mode=mode,
        firms=net.ids,
        players=players,
        rows=rows,
        opt=opt,
        opt_profile=opt_profile,
        poa=poa,
        pos=pos,
        nonconvergent=nonconvergent,
        check=notion,
        coalition_max=(min(coalition_max, len(players)) if coalition_max else len(players)) if notion else None,
        coalition_poa=coalition_poa,
        coalition_pos=coalition_pos,
    )
    if report.has_equilibrium:
        log.info("%d equilibrium profile(s); PoA=%s PoS=%s", len(report.equilibria),
                 format_ratio(poa), format_ratio(pos))
    else:
        log.warning("no pure Nash equilibrium among %d profile(s)", len(rows))
    return report
