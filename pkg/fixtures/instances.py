"""Builders for the reference networks.

Each builder takes its parameters as exact rationals and returns the
network together with the outcomes documented for it. Payment maps list
debtor -> {creditor: amount}; every entry not listed is zero.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Any, Dict, Iterable, List, Mapping, Sequence, Tuple

from clearing.result import Direction
from fixtures.base import Check, Expectation, Fixture
from game.analysis import UNBOUNDED
from game.utility import UtilityMode
from network.errors import ParamOutOfRange
from network.model import FinancialNetwork, validate_network
from network.money import ONE, ZERO, format_money

ASSETS = UtilityMode.TOTAL_ASSETS
EQUITY = UtilityMode.EQUITY

Payments = Dict[str, Dict[str, Fraction]]


def _network(
    externals: Mapping[str, Any],
    debts: Iterable[Tuple[str, str, Any]],
    cds: Iterable[Tuple[str, str, str, Any]] = (),
    alpha: Any = ONE,
    beta: Any = ONE,
) -> FinancialNetwork:
    return validate_network({
        "firms": [{"id": fid, "external": e} for fid, e in externals.items()],
        "debts": [{"from": d, "to": c, "amount": a} for d, c, a in debts],
        "cds": [{"from": d, "to": c, "reference": r, "notional": a} for d, c, r, a in cds],
        "default_costs": {"alpha": alpha, "beta": beta},
    })


def _ids(n: int) -> List[str]:
    return [f"v{i}" for i in range(1, n + 1)]


def _paid(profile: Any, expected: Payments, note: str = "", **kw) -> Expectation:
    return Expectation(Check.PAYMENTS, expected, profile=profile, note=note, **kw)


def _welfare(profile: Any, expected: Fraction, mode: UtilityMode = ASSETS, **kw) -> Expectation:
    return Expectation(Check.WELFARE, expected, profile=profile, mode=mode, **kw)


def _equilibria(profiles: Sequence[Any], mode: UtilityMode = ASSETS, note: str = "") -> Expectation:
    return Expectation(Check.EQUILIBRIA, list(profiles), mode=mode, note=note)


# ─── Debt and CDS example ───


def five_firm_cds() -> Fixture:
    net = _network(
        {"v1": 1, "v2": 0, "v3": 0, "v4": 1, "v5": 0},
        [("v1", "v2", 2), ("v1", "v3", 1), ("v2", "v1", 1), ("v3", "v5", 1)],
        cds=[("v4", "v5", "v3", 1)],
    )
    first = {"v1": "(v2|v3)"}
    second = {"v1": "(v3|v2)"}
    pooled = {"v1": "(v2,v3)"}
    expectations = (
        _paid(first, {"v1": {"v2": 2}, "v2": {"v1": 1}, "v4": {"v5": 1}},
              "v3 receives nothing, so the CDS pays its full notional"),
        Expectation(Check.DEFAULTS, ["v1", "v3"], profile=first),
        Expectation(Check.UTILITIES, [2], profile=first, firms=("v1",)),
        _welfare(first, Fraction(6)),
        _paid(pooled, {"v1": {"v2": Fraction(4, 3), "v3": Fraction(2, 3)}, "v2": {"v1": 1},
                       "v3": {"v5": Fraction(2, 3)}, "v4": {"v5": Fraction(1, 3)}}),
        Expectation(Check.RECOVERY, {"v3": Fraction(2, 3)}, profile=pooled),
        _welfare(pooled, Fraction(6)),
        _paid(second, {"v1": {"v2": 1, "v3": 1}, "v2": {"v1": 1}, "v3": {"v5": 1}},
              "at the maximal payments v2 repays v1, so v1 has 2 to pay out"),
        _welfare(second, Fraction(6)),
        _paid(second, {"v1": {"v3": 1}, "v3": {"v5": 1}}, direction=Direction.MINIMAL,
              note="least payments with the CDS untriggered: v2 pays nothing back"),
        _welfare(second, Fraction(4), direction=Direction.MINIMAL),
        _equilibria([first, pooled, second], note="v1 has total assets 2 under each strategy"),
    )
    return Fixture("five-firm-cds", {}, net, expectations,
                   "Five firms, four debts and one CDS referencing v3.")


# ─── Game without pure equilibria ───

_NO_NASH_S1 = ("(v6|v7)", "(v6,v7)", "(v7|v6)")
_NO_NASH_S2 = ("(v1|v4)", "(v1,v4)", "(v4|v1)")
_NO_NASH_S3 = ("(v1|v5)", "(v1,v5)", "(v5|v1)")


def _no_nash_table(eps: Fraction) -> List[List[List[Tuple[Fraction, ...]]]]:
    """Utilities (v1, v2, v3) indexed by [s1][s2][s3]."""
    one = ONE - eps
    two = 2 - eps
    h = Fraction(9, 2)
    top = [
        [(Fraction(9), h, h), ((h - eps) / one, h, Fraction(7, 2) / one), (h, h, Fraction(7, 2))],
        [((2 + 3 * eps) / one, 5 / one, Fraction(2)), (6 * eps / one, (3 + 3 * eps) / one, Fraction(3)),
         (3 * eps / one, 3 / one, Fraction(3))],
        [(Fraction(2), Fraction(5), Fraction(2)), (3 * eps, 3 + 3 * eps, Fraction(3)),
         (ZERO, Fraction(3), Fraction(3))],
    ]
    pooled = [
        [(Fraction(9), h, h), ((4 + 6 * eps) / one, (4 + eps) / one, 5 / one),
         (Fraction(4), Fraction(4), Fraction(5))],
        [((4 + 6 * eps) / one, 5 / one, (4 + eps) / one), (6 * eps / one, 3 / one, 3 / one),
         (6 * eps / two, 6 / two, 6 / two)],
        [(Fraction(4), Fraction(5), Fraction(4)), (6 * eps / two, 6 / two, 6 / two),
         (ZERO, Fraction(3), Fraction(3))],
    ]
    # v7 first mirrors v6 first with v2/v3, v4/v5 and v6/v7 swapped.
    mirrored = [[(top[j][i][0], top[j][i][2], top[j][i][1]) for j in range(3)] for i in range(3)]
    return [top, pooled, mirrored]


def no_nash(M: Fraction) -> Fixture:
    net = _network(
        {"v1": 0, "v2": 2, "v3": 2, "v4": 0, "v5": 0, "v6": 0, "v7": 0},
        [
            ("v1", "v6", 4), ("v1", "v7", 4),
            ("v2", "v1", 6), ("v2", "v4", M),
            ("v3", "v1", 6), ("v3", "v5", M),
            ("v4", "v2", 1), ("v5", "v3", 1),
            ("v6", "v2", Fraction(5, 2)), ("v7", "v3", Fraction(5, 2)),
        ],
    )
    eps = Fraction(6) / (M + 6)
    table = _no_nash_table(eps)
    cells = []
    for a, s1 in enumerate(_NO_NASH_S1):
        for b, s2 in enumerate(_NO_NASH_S2):
            for c, s3 in enumerate(_NO_NASH_S3):
                cells.append(Expectation(Check.UTILITIES, list(table[a][b][c]),
                                         profile={"v1": s1, "v2": s2, "v3": s3}, firms=("v1", "v2", "v3")))
    cells.append(_equilibria([], note="every profile has a strictly improving unilateral deviation"))
    return Fixture("no-nash", {"M": M}, net, tuple(cells),
                   f"Three players, 27 profiles, no pure Nash equilibrium (eps = 6/(M+6) = {format_money(eps)}).")


# ─── Proportional payments ───


def proportional_loss(M: Fraction) -> Fixture:
    net = _network({"v1": 1, "v2": 0, "v3": 0}, [("v1", "v2", M), ("v1", "v3", 2 * M), ("v2", "v1", M)])
    first = {"v1": "(v2|v3)"}
    expectations = (
        _paid("proportional", {"v1": {"v2": Fraction(1, 2), "v3": ONE}, "v2": {"v1": Fraction(1, 2)}}),
        _welfare("proportional", Fraction(3)),
        _welfare(first, 2 * M + 2),
        _welfare({"v1": "(v3|v2)"}, Fraction(2)),
        Expectation(Check.NASH, False, profile="proportional", options={"firm": "v1", "strategy": "(v2|v3)"}),
        _equilibria([first]),
        Expectation(Check.OPT, 2 * M + 2),
    )
    return Fixture("proportional-loss", {"M": M}, net, expectations,
                   "Pro-rata payments lose almost all of the welfare reachable by prioritizing v2.")


def proportional_path(n: Fraction, M: Fraction) -> Fixture:
    size = int(n)
    ids = _ids(size)
    debts = [("v1", "v2", M), ("v1", "v3", 1)] + [(ids[i - 1], ids[i], 1) for i in range(3, size)]
    net = _network({fid: (1 if fid == "v1" else 0) for fid in ids}, debts)
    share = ONE / (M + 1)
    pro_rata: Payments = {"v1": {"v2": M * share, "v3": share}}
    for i in range(3, size):
        pro_rata[ids[i - 1]] = {ids[i]: share}
    expectations = (
        _paid("proportional", pro_rata),
        _welfare("proportional", 2 + (n - 3) / (M + 1)),
        _welfare({"v1": "(v3|v2)"}, n - 1, note="the unit paid to v3 travels the whole path"),
        _welfare({"v1": "(v2|v3)"}, Fraction(2)),
        Expectation(Check.OPT, n - 1),
    )
    return Fixture("proportional-path", {"n": n, "M": M}, net, expectations,
                   "Acyclic network close to the worst case for pro-rata payments.")


# ─── Default costs and stability ───


def _circle(M: Fraction, a: str = "v3", b: str = "v4") -> List[Tuple[str, str, Fraction]]:
    return [(a, b, M), (b, a, M)]


def stability_beta(beta: Fraction, M: Fraction) -> Fixture:
    net = _network(
        {"v1": 0, "v2": 0, "v3": 0, "v4": 0, "v5": 1},
        [("v1", "v2", 2 * beta), ("v1", "v3", M), ("v2", "v1", beta), ("v5", "v1", 1)] + _circle(M),
        alpha=beta, beta=beta,
    )
    first = {"v1": "(v2|v3)"}
    second = {"v1": "(v3|v2)"}
    back = 2 * beta ** 3 / (M + 2 * beta - 2 * beta ** 3)
    equilibrium = 2 + beta ** 2 + 2 * beta
    best = 2 * M + 2 + beta + (1 + beta) * back
    expectations = (
        _paid(first, {"v1": {"v2": beta ** 2 + beta}, "v2": {"v1": beta}, "v5": {"v1": ONE}}),
        _welfare(first, equilibrium),
        _paid(second, {"v1": {"v3": beta}, "v3": {"v4": M}, "v4": {"v3": M}, "v5": {"v1": ONE}}),
        _welfare(second, 2 * M + 2 + beta),
        Expectation(Check.UTILITIES, [1 + beta], profile=first, firms=("v1",)),
        Expectation(Check.UTILITIES, [ONE], profile=second, firms=("v1",)),
        Expectation(Check.UTILITIES, [1 + back], profile="proportional", firms=("v1",)),
        _welfare("proportional", best, note="pro-rata keeps the v3-v4 cycle and a small repayment from v2"),
        _equilibria([first]),
        Expectation(Check.OPT, best),
        Expectation(Check.POS, best / equilibrium),
    )
    return Fixture("stability-beta", {"beta": beta, "M": M}, net, expectations,
                   "With beta < 1 the unique equilibrium starves the v3-v4 cycle.")


def stability_alpha(alpha: Fraction, M: Fraction) -> Fixture:
    net = _network(
        {"v1": 1, "v2": 0, "v3": 0, "v4": 0},
        [("v1", "v2", 2 * alpha), ("v1", "v3", 1), ("v2", "v1", alpha)] + _circle(M),
        alpha=alpha, beta=0,
    )
    first = {"v1": "(v2|v3)"}
    second = {"v1": "(v3|v2)"}
    best = 2 * M + 1 + alpha
    expectations = (
        _paid(first, {"v1": {"v2": alpha}, "v2": {"v1": alpha}}),
        _welfare(first, 1 + 2 * alpha),
        _paid(second, {"v1": {"v3": alpha}, "v3": {"v4": M}, "v4": {"v3": M}}),
        _welfare(second, best),
        _welfare("proportional", best),
        Expectation(Check.UTILITIES, [1 + alpha], profile=first, firms=("v1",)),
        _equilibria([first]),
        Expectation(Check.OPT, best),
        Expectation(Check.POS, best / (1 + 2 * alpha)),
    )
    return Fixture("stability-alpha", {"alpha": alpha, "M": M}, net, expectations,
                   "With beta = 0 and alpha > 0 the unique equilibrium starves the v3-v4 cycle.")


def zero_costs(M: Fraction) -> Fixture:
    net = _network(
        {"v1": 1, "v2": 0, "v3": 0, "v4": 0},
        [("v1", "v2", 1), ("v1", "v3", 1), ("v2", "v1", Fraction(1, 2))] + _circle(M),
        alpha=0, beta=0,
    )
    profiles = [{"v1": s} for s in ("(v2|v3)", "(v2,v3)", "(v3|v2)")]
    expectations = (
        Expectation(Check.SAME_PAYMENTS, True, note="a defaulting firm pays nothing"),
        *(_paid(p, {}) for p in profiles),
        *(_welfare(p, ONE) for p in profiles),
        _equilibria(profiles),
        Expectation(Check.POS, ONE),
        Expectation(Check.POA, ONE),
    )
    return Fixture("zero-costs", {"M": M}, net, expectations,
                   "Full default costs: every profile clears to the same payments.")


def stability_negative(M: Fraction) -> Fixture:
    net = _network(
        {"v1": 3, "v2": -2, "v3": -2, "v4": 0},
        [("v1", "v2", 3), ("v1", "v3", 3), ("v2", "v1", 1)] + _circle(M),
    )
    first = {"v1": "(v2|v3)"}
    second = {"v1": "(v3|v2)"}
    expectations = (
        _paid(first, {"v1": {"v2": 3, "v3": 1}, "v2": {"v1": 1}}),
        _welfare(first, Fraction(4)),
        _paid(second, {"v1": {"v3": 3}, "v3": {"v4": M}, "v4": {"v3": M}}),
        _welfare(second, 2 * M + 2),
        _welfare("proportional", Fraction(2)),
        _equilibria([first], note="v2's deficit absorbs up to 2 before it can repay v1"),
        Expectation(Check.OPT, 2 * M + 2),
        Expectation(Check.POS, (M + 1) / 2),
    )
    return Fixture("stability-negative", {"M": M}, net, expectations,
                   "Negative external assets without default costs.")


def anarchy_assets(M: Fraction) -> Fixture:
    net = _network({"v1": 1, "v2": 0, "v3": 0, "v4": 0}, [("v1", "v2", 1), ("v1", "v3", 1)] + _circle(M))
    first = {"v1": "(v2|v3)"}
    second = {"v1": "(v3|v2)"}
    expectations = (
        _paid(first, {"v1": {"v2": 1}}),
        _welfare(first, Fraction(2)),
        _paid(second, {"v1": {"v3": 1}, "v3": {"v4": M}, "v4": {"v3": M}}),
        _welfare(second, 2 * M + 2),
        _equilibria([first, {"v1": "(v2,v3)"}, second], note="v1 has total assets 1 whatever it does"),
        Expectation(Check.OPT, 2 * M + 2),
        Expectation(Check.POA, M + 1),
        Expectation(Check.POS, ONE),
    )
    return Fixture("anarchy-assets", {"M": M}, net, expectations,
                   "Total-assets utilities; the worst equilibrium loses the v3-v4 cycle.")


# ─── Equity utilities ───


def equity_beta(beta: Fraction) -> Fixture:
    """Zero-welfare equilibrium under equity utilities for 0 < beta < 1.

    Under (v4|v3) a smaller fixed point exists (v2->v4 = (1+beta)/(beta*k),
    v3->v2 = beta*(1+beta)/k, v4->v3 = (1+beta)/k with k = beta^2+beta+1)
    in which v3 defaults too. Maximal clearing lets v3
    break even: v2 receives 1/beta^2, pays beta of it (1/beta) to v4, v4
    passes 1 on to v3 and v3 repays v2 in full. Equity welfare is 0 in both.
    """
    inv = 1 / beta
    net = _network(
        {"v1": inv ** 2 - 1, "v2": 0, "v3": 0, "v4": 0},
        [("v1", "v2", inv ** 2 - 1), ("v2", "v3", inv), ("v2", "v4", inv ** 2), ("v3", "v2", 1),
         ("v4", "v3", inv ** 2)],
        alpha=beta, beta=beta,
    )
    worst = {"v2": "(v4|v3)"}
    best = {"v2": "(v3|v4)"}
    expectations = (
        _paid(worst, {"v1": {"v2": inv ** 2 - 1}, "v2": {"v4": inv}, "v3": {"v2": ONE}, "v4": {"v3": ONE}},
              "v3 ends with exactly what it owes"),
        Expectation(Check.DEFAULTS, ["v2", "v4"], profile=worst),
        _welfare(worst, ZERO, EQUITY, note="v2 and v4 default, v3 breaks even"),
        _paid(best, {"v1": {"v2": inv ** 2 - 1}, "v2": {"v3": inv}, "v3": {"v2": ONE}}),
        _welfare(best, inv - 1, EQUITY),
        _equilibria([best, {"v2": "(v3,v4)"}, worst], EQUITY, note="v2 defaults under every strategy"),
        Expectation(Check.POA, UNBOUNDED, mode=EQUITY),
    )
    return Fixture("equity-beta", {"beta": beta}, net, expectations,
                   "Equity utilities with 0 < beta < 1: some equilibrium has zero welfare.")


def equity_alpha(alpha: Fraction, beta: Fraction, M: Fraction) -> Fixture:
    if alpha == beta:
        raise ParamOutOfRange(f"alpha and beta must differ, both are {format_money(alpha)}")
    net = _network(
        {"v1": 1, "v2": 1, "v3": M, "v4": 0, "v5": 0, "v6": 0},
        [("v1", "v2", 2), ("v2", "v3", 2), ("v2", "v6", 2), ("v3", "v4", M + 2 * alpha),
         ("v4", "v5", M + 2 * alpha)],
        alpha=alpha, beta=beta,
    )
    to_v3 = {"v2": "(v3|v6)"}
    to_v6 = {"v2": "(v6|v3)"}
    profiles = [to_v3, {"v2": "(v3,v6)"}, to_v6]
    if beta == 1:
        chain = M + 2 * alpha
        expectations = (
            _paid(to_v3, {"v1": {"v2": alpha}, "v2": {"v3": 2 * alpha}, "v3": {"v4": chain}, "v4": {"v5": chain}}),
            _welfare(to_v3, chain, EQUITY),
            _paid(to_v6, {"v1": {"v2": alpha}, "v2": {"v6": 2 * alpha}, "v3": {"v4": alpha * M},
                          "v4": {"v5": alpha * M}}),
            _welfare(to_v6, alpha * M + 2 * alpha, EQUITY),
            _equilibria(profiles, EQUITY),
            Expectation(Check.OPT, chain, mode=EQUITY),
            Expectation(Check.POA, chain / (alpha * M + 2 * alpha), mode=EQUITY,
                        note="tends to 1/alpha as M grows"),
        )
    else:
        expectations = (
            _paid(to_v6, {"v1": {"v2": alpha}, "v2": {"v6": alpha}, "v3": {"v4": alpha * M}}),
            _welfare(to_v6, alpha, EQUITY),
            _paid(to_v3, {"v1": {"v2": alpha}, "v2": {"v3": alpha}, "v3": {"v4": alpha * M}}),
            _welfare(to_v3, ZERO, EQUITY),
            _equilibria(profiles, EQUITY),
            Expectation(Check.POA, UNBOUNDED, mode=EQUITY),
        )
    return Fixture("equity-alpha", {"alpha": alpha, "beta": beta, "M": M}, net, expectations,
                   "Equity utilities with beta in {0, 1} and alpha != beta.")


def negative_transform() -> Fixture:
    net = _network(
        {"v1": 2, "v2": -1, "v3": -2},
        [("v1", "v2", 2), ("v1", "v3", 1), ("v2", "v3", 1), ("v3", "v1", 1)],
    )
    profiles = [{"v1": "(v2|v3)"}, {"v1": "(v3|v2)"}, "proportional"]
    expectations = (
        _paid(profiles[0], {"v1": {"v2": 2}, "v2": {"v3": 1}}),
        _paid(profiles[1], {"v1": {"v2": 1, "v3": 1}}),
        _paid(profiles[2], {"v1": {"v2": Fraction(4, 3), "v3": Fraction(2, 3)}, "v2": {"v3": Fraction(1, 3)}}),
        *(Expectation(Check.LIFTED, True, profile=p,
                      note="paying the sink first reproduces the payments between original firms")
          for p in profiles),
    )
    return Fixture("negative-transform", {}, net, expectations,
                   "Negative external assets rewritten as debt to an auxiliary sink.")


def equity_negative() -> Fixture:
    net = _network({"v1": 1, "v2": -1, "v3": 0}, [("v1", "v2", 1), ("v1", "v3", 1)])
    first = {"v1": "(v2|v3)"}
    second = {"v1": "(v3|v2)"}
    expectations = (
        _paid(first, {"v1": {"v2": 1}}),
        _welfare(first, ZERO, EQUITY, note="the payment only covers v2's deficit"),
        _paid(second, {"v1": {"v3": 1}}),
        _welfare(second, ONE, EQUITY),
        _equilibria([first, {"v1": "(v2,v3)"}, second], EQUITY),
        Expectation(Check.OPT, ONE, mode=EQUITY),
        Expectation(Check.POA, UNBOUNDED, mode=EQUITY),
    )
    return Fixture("equity-negative", {}, net, expectations,
                   "Equity utilities with a negative external asset.")


def super_strong(eps: Fraction) -> Fixture:
    net = _network(
        {"v1": 1, "v2": 1, "v3": -1, "v4": -1},
        [("v1", "v2", 1), ("v1", "v3", 2), ("v2", "v1", 1 - eps), ("v2", "v4", 1)],
    )
    mutual = {"v1": "(v2|v3)", "v2": "(v1|v4)"}
    apart = {"v1": "(v3|v2)", "v2": "(v1|v4)"}
    expectations = (
        _paid(mutual, {"v1": {"v2": 1, "v3": 1 - eps}, "v2": {"v1": 1 - eps, "v4": 1}}),
        _welfare(mutual, eps, EQUITY),
        _paid(apart, {"v1": {"v3": 2 - eps}, "v2": {"v1": 1 - eps, "v4": eps}}),
        _welfare(apart, 1 - eps, EQUITY),
        Expectation(Check.NASH, True, profile=apart, mode=EQUITY),
        Expectation(Check.COALITION, False, profile=apart, mode=EQUITY,
                    options={"notion": "super-strong", "coalition": ["v1", "v2"]},
                    note="v2 gains eps and v1 stays at zero"),
        Expectation(Check.COALITION, True, profile=mutual, mode=EQUITY, options={"notion": "super-strong"}),
        Expectation(Check.OPT, 1 - eps, mode=EQUITY),
        Expectation(Check.POS, ONE, mode=EQUITY),
        Expectation(Check.POS, (1 - eps) / eps, mode=EQUITY, options={"notion": "super-strong"}),
    )
    return Fixture("super-strong", {"eps": eps}, net, expectations,
                   "Negative external assets; super-strong equilibria only reach welfare eps.")


# ─── Non-unique clearing ───


def ambiguous_cycle(ell: Fraction) -> Fixture:
    net = _network(
        {"A": 0, "B": 0, "C": 0, "D": 0},
        [("A", "B", ell), ("A", "C", ell), ("B", "A", ell), ("B", "D", ell)],
    )
    looped = {"A": "(B|C)", "B": "(A|D)"}
    expectations = (
        Expectation(Check.RAW_PAYMENTS, {"A": {"B": ell}, "B": {"A": ell}}, profile=looped,
                    note="any amount up to ell circulating between A and B clears"),
        _paid(looped, {}, "no firm has external assets, so nothing is proper"),
        _paid(looped, {}, direction=Direction.MINIMAL),
        _paid("proportional", {}),
        Expectation(Check.EQUITY_INVARIANCE, True, profile=looped),
    )
    return Fixture("ambiguous-cycle", {"ell": ell}, net, expectations,
                   "A payment cycle with infinitely many clearing solutions.")
