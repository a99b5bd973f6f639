"""Run the solver and the game layer against a fixture's documented outcomes."""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Optional, Tuple

import pandas as pd

from clearing.cds import cds_clear
from clearing.result import ClearingResult, Direction, PaymentMatrix
from clearing.solver import clear_with_liabilities
from clearing.verify import verify_clearing
from config.settings import Settings, load_settings
from fixtures.base import Expectation, Fixture
from game.analysis import GameReport, Ratio, analyze, format_ratio
from game.equilibrium import Notion, coalition_stable, is_nash
from game.invariance import equity_invariance_check
from game.utility import UtilityMode, utilities_of
from network.errors import FennecError
from network.model import resolve_liabilities
from network.money import ZERO, format_money, parse_money
from network.strategy import StrategyProfile, parse_profile, parse_strategy, strategy_spaces
from network.transform import lift_profile, transform_negative_assets

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ExpectationResult:
    expectation: Expectation
    passed: bool
    detail: str = ""

    def to_dict(self) -> Dict[str, Any]:
        out = {"check": self.expectation.label(), "passed": self.passed}
        if self.detail:
            out["detail"] = self.detail
        return out


@dataclass
class FixtureReport:
    fixture: Fixture
    results: List[ExpectationResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def failures(self) -> List[ExpectationResult]:
        return [r for r in self.results if not r.passed]

    def summary(self) -> str:
        ok = sum(r.passed for r in self.results)
        return f"{self.fixture.name}: {ok}/{len(self.results)} expectations pass"

    def to_dict(self) -> Dict[str, Any]:
        return {
            "fixture": self.fixture.name,
            "params": {k: format_money(v) for k, v in self.fixture.params.items()},
            "passed": self.passed,
            "results": [r.to_dict() for r in self.results],
        }

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame.from_records(
            [{"check": r.expectation.label(), "result": "pass" if r.passed else "FAIL", "detail": r.detail}
             for r in self.results]
        )

    def to_table(self) -> str:
        return self.to_frame().to_string(index=False) + "\n\n" + self.summary()


def _nonzero(matrix: PaymentMatrix) -> Dict[str, Dict[str, str]]:
    out: Dict[str, Dict[str, str]] = {}
    for d in matrix.ids:
        for c in matrix.ids:
            v = matrix.get(d, c)
            if v != 0:
                out.setdefault(d, {})[c] = format_money(v)
    return out


def expected_matrix(ids: Tuple[str, ...], expected: Mapping[str, Mapping[str, Any]]) -> PaymentMatrix:
    """Dense matrix from the debtor -> {creditor: amount} form of an expectation."""
    return PaymentMatrix.from_rows(ids, [[parse_money(expected.get(d, {}).get(c, ZERO)) for c in ids] for d in ids])


def _matches(matrix: PaymentMatrix, expected: Mapping[str, Mapping[str, Any]]) -> bool:
    for d in matrix.ids:
        row = expected.get(d, {})
        for c in matrix.ids:
            if matrix.get(d, c) != parse_money(row.get(c, ZERO)):
                return False
    return True


def _same_ratio(actual: Optional[Ratio], expected: Any) -> bool:
    if actual is None:
        return False
    if isinstance(expected, str) or isinstance(actual, str):
        return actual == expected
    return actual == parse_money(expected)


class _Verifier:
    def __init__(self, fixture: Fixture, settings: Settings):
        self.fixture = fixture
        self.net = fixture.network
        self.settings = settings
        self._reports: Dict[Tuple[UtilityMode, Optional[Notion]], GameReport] = {}

    def profile(self, raw: Any) -> StrategyProfile:
        return parse_profile(self.net, raw, self.fixture.restriction)

    def clear(self, raw: Any, direction: Direction) -> ClearingResult:
        profile = self.profile(raw)
        if direction is Direction.MAXIMAL:
            return cds_clear(self.net, profile, max_rounds=self.settings.cds_max_rounds)
        return clear_with_liabilities(self.net, profile, resolve_liabilities(self.net), direction)

    def report(self, mode: UtilityMode, notion: Optional[Notion] = None) -> GameReport:
        key = (mode, notion)
        if key not in self._reports:
            self._reports[key] = analyze(self.net, mode, check=notion, settings=self.settings,
                                         restriction=self.fixture.restriction)
        return self._reports[key]

    def run(self, exp: Expectation) -> Tuple[bool, str]:
        handler = getattr(self, f"_check_{exp.check.name.lower()}")
        return handler(exp)

    # ─── Clearing ───

    def _check_payments(self, exp: Expectation) -> Tuple[bool, str]:
        result = self.clear(exp.profile, exp.direction)
        if not _matches(result.payments, exp.expected):
            return False, f"got {_nonzero(result.payments)}"
        matrix = expected_matrix(self.net.ids, exp.expected)
        check = verify_clearing(self.net, self.profile(exp.profile), result, matrix)
        if not check.ok:
            return False, "violates " + ", ".join(str(v) for v in check.violations)
        return True, f"got {_nonzero(result.payments)}"

    def _check_raw_payments(self, exp: Expectation) -> Tuple[bool, str]:
        result = self.clear(exp.profile, Direction.MAXIMAL)
        return _matches(result.raw_payments, exp.expected), f"got {_nonzero(result.raw_payments)}"

    def _check_defaults(self, exp: Expectation) -> Tuple[bool, str]:
        got = self.clear(exp.profile, exp.direction).default_ids()
        return sorted(got) == sorted(exp.expected), f"got {got}"

    def _check_recovery(self, exp: Expectation) -> Tuple[bool, str]:
        result = self.clear(exp.profile, exp.direction)
        got = {f: result.recovery[self.net.index(f)] for f in exp.expected}
        ok = all(got[f] == parse_money(v) for f, v in exp.expected.items())
        return ok, f"got {{{', '.join(f'{f}: {format_money(v)}' for f, v in got.items())}}}"

    def _check_utilities(self, exp: Expectation) -> Tuple[bool, str]:
        values = utilities_of(self.clear(exp.profile, exp.direction), exp.mode)
        got = [values[self.net.index(f)] for f in exp.firms]
        ok = got == [parse_money(v) for v in exp.expected]
        return ok, f"got ({', '.join(format_money(v) for v in got)})"

    def _check_welfare(self, exp: Expectation) -> Tuple[bool, str]:
        got = sum(utilities_of(self.clear(exp.profile, exp.direction), exp.mode), ZERO)
        return got == parse_money(exp.expected), f"got {format_money(got)}"

    def _check_same_payments(self, exp: Expectation) -> Tuple[bool, str]:
        spaces = strategy_spaces(self.net, self.settings.max_strategies, self.fixture.restriction)
        ids = tuple(spaces)
        matrices = [
            cds_clear(self.net, StrategyProfile(tuple(zip(ids, combo))),
                      max_rounds=self.settings.cds_max_rounds).payments
            for combo in itertools.product(*spaces.values())
        ]
        same = all(m == matrices[0] for m in matrices[1:])
        return same == bool(exp.expected), f"{len(matrices)} profile(s), identical: {same}"

    def _check_lifted(self, exp: Expectation) -> Tuple[bool, str]:
        profile = self.profile(exp.profile)
        transform = transform_negative_assets(self.net)
        lifted = cds_clear(transform.network, lift_profile(profile, transform),
                           max_rounds=self.settings.cds_max_rounds).payments
        direct = cds_clear(self.net, profile, max_rounds=self.settings.cds_max_rounds).payments
        agree = all(direct.get(d, c) == lifted.get(d, c) for d in self.net.ids for c in self.net.ids)
        return agree == bool(exp.expected), f"payments agree: {agree}"

    def _check_equity_invariance(self, exp: Expectation) -> Tuple[bool, str]:
        got = equity_invariance_check(self.net, self.profile(exp.profile))
        return got == bool(exp.expected), f"got {got}"

    # ─── Game ───

    def _check_nash(self, exp: Expectation) -> Tuple[bool, str]:
        check = is_nash(self.net, self.profile(exp.profile), exp.mode, settings=self.settings,
                        restriction=self.fixture.restriction)
        detail = f"witness {check.witness}" if check.witness else "stable"
        ok = check.stable == bool(exp.expected)
        firm = exp.options.get("firm")
        if ok and firm is not None and check.witness is not None:
            want = parse_strategy(exp.options["strategy"], self.net.potential_creditors(firm))
            ok = check.witness.changes == ((firm, want),)
        return ok, detail

    def _check_coalition(self, exp: Expectation) -> Tuple[bool, str]:
        notion = Notion.parse(exp.options.get("notion", Notion.STRONG))
        check = coalition_stable(self.net, self.profile(exp.profile), exp.mode, notion,
                                 exp.options.get("max_coalition"), settings=self.settings,
                                 restriction=self.fixture.restriction)
        detail = f"witness {check.witness}" if check.witness else "stable"
        ok = check.stable == bool(exp.expected)
        coalition = exp.options.get("coalition")
        if ok and coalition is not None and check.witness is not None:
            ok = list(check.witness.coalition) == list(coalition)
        return ok, detail

    def _check_equilibria(self, exp: Expectation) -> Tuple[bool, str]:
        got = sorted(p.notation() for p in self.report(exp.mode).equilibria)
        want = sorted(self.profile(p).notation() for p in exp.expected)
        return got == want, f"got [{'; '.join(got)}]"

    def _check_opt(self, exp: Expectation) -> Tuple[bool, str]:
        got = self.report(exp.mode).opt
        return got == parse_money(exp.expected), f"got {format_ratio(got)}"

    def _ratio(self, exp: Expectation, attr: str) -> Tuple[bool, str]:
        notion = exp.options.get("notion")
        if notion is None:
            got = getattr(self.report(exp.mode), attr)
        else:
            got = getattr(self.report(exp.mode, Notion.parse(notion)), f"coalition_{attr}")
        return _same_ratio(got, exp.expected), f"got {format_ratio(got)}"

    def _check_poa(self, exp: Expectation) -> Tuple[bool, str]:
        return self._ratio(exp, "poa")

    def _check_pos(self, exp: Expectation) -> Tuple[bool, str]:
        return self._ratio(exp, "pos")


def verify_fixture(fixture: Fixture, settings: Optional[Settings] = None) -> FixtureReport:
    """Check every expectation; solver errors count as failures, not crashes."""
    verifier = _Verifier(fixture, settings or load_settings())
    report = FixtureReport(fixture)
    for exp in fixture.expectations:
        try:
            passed, detail = verifier.run(exp)
        except FennecError as exc:
            passed, detail = False, f"{type(exc).__name__}: {exc}"
        if not passed:
            log.warning("%s: %s failed (%s)", fixture.name, exp.label(), detail)
        report.results.append(ExpectationResult(exp, passed, "" if passed else detail))
    log.info(report.summary())
    return report
