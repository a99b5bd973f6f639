from __future__ import annotations

from fractions import Fraction

import pytest

from clearing.cds import cds_clear
from config.settings import Settings
from fixtures.registry import make_fixture
from game.analysis import UNBOUNDED, analyze, efficiency_ratio, format_ratio
from game.bounds import (
    acyclic_proportional_bound,
    equity_balance,
    equity_welfare_identity,
    family_ratios,
    is_acyclic,
)
from game.equilibrium import Notion, coalition_stable, is_nash
from game.invariance import equity_invariance_check
from game.utility import ProfileEvaluator, UtilityMode, social_welfare, utility
from network.errors import (
    EnumerationCapExceeded,
    InputError,
    NonConvergentProfile,
    PreconditionDefaultCosts,
)
from network.model import validate_network
from network.strategy import parse_profile, parse_strategy

F = Fraction
ASSETS = UtilityMode.TOTAL_ASSETS
EQUITY = UtilityMode.EQUITY


def fixture_net(name, **params):
    return make_fixture(name, params).network


def spiral_net():
    # only (v2|v3) lets the recovery of v2 settle
    return validate_network({
        "firms": [{"id": "v1", "external": 1}, {"id": "v2", "external": 0},
                  {"id": "v3", "external": 0}, {"id": "v4", "external": 0}],
        "debts": [{"from": "v1", "to": "v2", "amount": 1}, {"from": "v2", "to": "v4", "amount": 2}],
        "cds": [{"from": "v1", "to": "v3", "reference": "v2", "notional": 1}],
    })


def test_utility_and_social_welfare():
    net = fixture_net("proportional-loss", M=10)
    profile = parse_profile(net, {"v1": "(v2|v3)"})
    assert utility(net, profile, "v1") == 11
    assert social_welfare(net, profile) == 22
    assert social_welfare(net, profile, EQUITY) == 1


def test_proportional_profile_is_not_nash():
    net = fixture_net("proportional-loss", M=10)
    check = is_nash(net, parse_profile(net, "proportional"))
    assert not check
    assert check.witness.coalition == ("v1",)
    assert check.witness.changes == (("v1", parse_strategy("(v2|v3)", ("v2", "v3"))),)
    assert check.witness.before == (F(3, 2),)
    assert check.witness.after == (11,)
    assert "v1->(v2|v3)" in str(check.witness)


def test_analyze_proportional_loss():
    net = fixture_net("proportional-loss", M=10)
    report = analyze(net)
    assert report.players == ("v1",)
    assert report.profiles_examined == 3
    assert [p.notation() for p in report.equilibria] == ["v1:(v2|v3)"]
    assert report.opt == 22
    assert report.poa == 1 and report.pos == 1
    out = report.to_dict()
    assert out["opt"] == "22"
    assert out["has_equilibrium"] is True
    assert len(report.to_frame()) == 3
    assert "PoA = 1" in report.to_table()


def test_parallel_analysis_matches_serial():
    net = fixture_net("five-firm-cds")
    serial = analyze(net, jobs=1)
    threaded = analyze(net, jobs=3)
    assert [r.welfare for r in serial.rows] == [r.welfare for r in threaded.rows]
    assert serial.equilibria == threaded.equilibria


def test_anarchy_ratio():
    report = analyze(fixture_net("anarchy-assets", M=10))
    assert len(report.equilibria) == 3
    assert report.poa == 11
    assert report.pos == 1
    assert [r for _, r in family_ratios("anarchy-assets", [1, 10, 100])] == [2, 11, 101]


@pytest.mark.parametrize(
    "name, ratio",
    [
        ("anarchy-assets", "poa"),
        ("stability-beta", "pos"),
        ("stability-alpha", "pos"),
        ("stability-negative", "pos"),
        ("proportional-loss", "proportional"),
    ],
)
def test_unbounded_families_grow_past_half_of_m(name, ratio):
    ratios = family_ratios(name, [10, 100, 1000], ratio=ratio)
    measured = [r for _, r in ratios]
    assert all(isinstance(r, Fraction) for r in measured)
    assert measured[0] < measured[1] < measured[2]
    assert all(r > m / 2 for m, r in ratios)


def test_proportional_ratio_of_pro_rata_loss():
    ratios = family_ratios("proportional-loss", [10], ratio="proportional")
    assert ratios == [(10, F(22, 3))]


def test_family_ratios_rejects_unknown_ratio():
    with pytest.raises(InputError):
        family_ratios("anarchy-assets", [1], ratio="opt")


def test_equity_utilities_make_every_profile_stable():
    net = fixture_net("anarchy-assets", M=10)
    report = analyze(net, EQUITY)
    assert len(report.equilibria) == report.profiles_examined == 3
    assert report.poa == 1
    for row in report.rows:
        assert equity_invariance_check(net, row.profile)


def test_welfare_identities():
    net = fixture_net("anarchy-assets", M=10)
    result = cds_clear(net, parse_profile(net, {"v1": "(v3|v2)"}))
    assert equity_welfare_identity(result) == sum(result.equities()) == 1
    assert equity_balance(result) == 0


def test_efficiency_ratio_edges():
    assert efficiency_ratio(F(6), F(3)) == 2
    assert efficiency_ratio(F(0), F(0)) == 1
    assert efficiency_ratio(F(5), F(0)) == UNBOUNDED
    assert format_ratio(F(2, 4)) == "1/2"
    assert format_ratio(None) is None


def test_acyclic_proportional_bound():
    net = fixture_net("proportional-path", n=10, M=100)
    assert is_acyclic(net)
    ratio, bound = acyclic_proportional_bound(net)
    assert ratio == F(909, 209)
    assert bound == 5
    assert ratio <= bound


def test_acyclic_bound_preconditions():
    with pytest.raises(InputError):
        acyclic_proportional_bound(fixture_net("proportional-loss"))
    with pytest.raises(PreconditionDefaultCosts):
        acyclic_proportional_bound(fixture_net("stability-alpha"))


def test_equity_invariance_needs_zero_default_costs():
    net = fixture_net("stability-beta")
    with pytest.raises(PreconditionDefaultCosts):
        equity_invariance_check(net, parse_profile(net, "proportional"))


def test_super_strong_deviation_witness():
    net = fixture_net("super-strong", eps="1/10")
    apart = parse_profile(net, {"v1": "(v3|v2)", "v2": "(v1|v4)"})
    assert is_nash(net, apart, EQUITY)
    check = coalition_stable(net, apart, EQUITY, Notion.SUPER_STRONG)
    assert not check.stable
    assert check.witness.coalition == ("v1", "v2")
    assert check.witness.before[0] == check.witness.after[0] == 0
    assert check.witness.after[1] > check.witness.before[1]
    assert coalition_stable(net, apart, EQUITY, Notion.SUPER_STRONG, max_coalition=1).stable


def test_super_strong_analysis():
    net = fixture_net("super-strong", eps="1/10")
    report = analyze(net, EQUITY, check="super-strong")
    assert report.coalition_max == 2
    assert report.coalition_equilibria
    assert all(p["v1"].notation() == "(v2|v3)" for p in report.coalition_equilibria)
    assert report.coalition_pos == 9
    assert report.to_dict()["check"]["notion"] == "super-strong"


def test_coalition_size_must_be_positive():
    net = fixture_net("super-strong")
    profile = parse_profile(net, {"v1": "(v2|v3)", "v2": "(v1|v4)"})
    with pytest.raises(InputError):
        coalition_stable(net, profile, EQUITY, max_coalition=0)


def test_notion_parse():
    assert Notion.parse("super_strong") is Notion.SUPER_STRONG
    assert Notion.parse(" Strong ") is Notion.STRONG
    with pytest.raises(InputError):
        Notion.parse("weak")


def test_profile_cap():
    net = fixture_net("no-nash")
    with pytest.raises(EnumerationCapExceeded):
        analyze(net, settings=Settings(max_profiles=26))


def test_nonconvergent_profiles_are_excluded():
    net = spiral_net()
    settings = Settings(cds_max_rounds=20)
    report = analyze(net, settings=settings)
    assert report.profiles_examined == 3
    assert len(report.nonconvergent) == 2
    assert [p.notation() for p in report.equilibria] == ["v1:(v2|v3)"]
    assert "nonconvergent profiles excluded: 2" in report.summary()


def test_nonconvergent_profile_utility_raises():
    net = spiral_net()
    evaluator = ProfileEvaluator(net, ASSETS, max_rounds=20)
    profile = parse_profile(net, "proportional")
    assert not evaluator.outcome(profile).converged
    with pytest.raises(NonConvergentProfile) as info:
        evaluator.utilities(profile, firm="v1")
    assert info.value.firm == "v1"
    assert len(evaluator) == 1
