from __future__ import annotations

from fractions import Fraction

import pytest

from clearing.cds import cds_clear
from clearing.result import Direction
from clearing.solver import clear_with_liabilities
from clearing.verify import verify_clearing
from fixtures.base import Check, Expectation, Fixture, ParamSpec
from fixtures.registry import ALIASES, FIXTURES, list_fixtures, make_fixture, resolve_name
from fixtures.verify import expected_matrix, verify_fixture
from network.errors import ParamOutOfRange, UnknownFixture
from network.model import resolve_liabilities
from network.strategy import parse_profile

F = Fraction


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_fixture_outcomes_hold_at_defaults(name):
    report = verify_fixture(make_fixture(name))
    assert report.passed, [(r.expectation.label(), r.detail) for r in report.failures]


@pytest.mark.parametrize(
    "name, params",
    [
        ("stability-beta", {"beta": "1/3"}),
        ("stability-alpha", {"alpha": 1, "M": 10}),
        ("equity-alpha", {"alpha": "1/4", "beta": 0}),
        ("equity-beta", {"beta": "2/3"}),
        ("proportional-path", {"n": 6, "M": 5}),
        ("super-strong", {"eps": "1/4"}),
        ("ambiguous-cycle", {"ell": "5/2"}),
    ],
)
def test_fixture_outcomes_hold_across_parameters(name, params):
    report = verify_fixture(make_fixture(name, params))
    assert report.passed, [(r.expectation.label(), r.detail) for r in report.failures]


def test_aliases_resolve():
    assert resolve_name("example1") == "five-firm-cds"
    assert resolve_name(" thm9-poa ") == "anarchy-assets"
    assert all(target in FIXTURES for target in ALIASES.values())
    with pytest.raises(UnknownFixture):
        resolve_name("no-such-network")


def test_parameter_names_and_ranges():
    fixture = make_fixture("thm17-superstrong", {"ε": "1/5"})
    assert fixture.params == {"eps": F(1, 5)}
    assert make_fixture("anarchy-assets", {"m": 7}).params["M"] == 7
    with pytest.raises(ParamOutOfRange):
        make_fixture("stability-beta", {"beta": 1})
    with pytest.raises(ParamOutOfRange):
        make_fixture("proportional-path", {"n": "9/2"})
    with pytest.raises(ParamOutOfRange):
        make_fixture("five-firm-cds", {"M": 3})
    with pytest.raises(ParamOutOfRange):
        make_fixture("equity-alpha", {"alpha": 1, "beta": 1})
    with pytest.raises(ParamOutOfRange):
        make_fixture("equity-alpha", {"beta": "1/2"})


def test_param_spec_describe():
    assert ParamSpec("beta", F(1, 2), low=F(0), high=F(1), low_open=True, high_open=True).describe() == \
        "beta in (0, 1)"
    assert ParamSpec("n", F(10), low=F(4), integer=True).describe() == "integer n in [4, inf]"
    assert ParamSpec("beta", F(1), choices=(F(0), F(1))).describe() == "beta in {0, 1}"


def test_list_fixtures():
    rows = {row["name"]: row for row in list_fixtures()}
    assert set(rows) == set(FIXTURES)
    assert "example1" in rows["five-firm-cds"]["aliases"]
    assert rows["stability-beta"]["defaults"] == {"beta": "1/2", "M": "100"}


def test_expectations_serialize():
    fixture = make_fixture("proportional-loss", {"M": 10})
    out = fixture.expectations_dict()
    assert out["fixture"] == "proportional-loss"
    checks = [e["check"] for e in out["expectations"]]
    assert "payments" in checks and "equilibria" in checks


def test_wrong_expectation_is_reported():
    base = make_fixture("anarchy-assets", {"M": 10})
    wrong = Fixture("anarchy-wrong", base.params, base.network, (
        Expectation(Check.WELFARE, F(3), profile={"v1": "(v2|v3)"}),
        Expectation(Check.OPT, F(22)),
    ))
    report = verify_fixture(wrong)
    assert not report.passed
    assert len(report.failures) == 1
    assert report.failures[0].detail == "got 2"
    assert report.summary() == "anarchy-wrong: 1/2 expectations pass"
    assert report.to_dict()["results"][0]["passed"] is False
    assert "FAIL" in report.to_table()


def test_solver_errors_become_failures():
    base = make_fixture("anarchy-assets", {"M": 10})
    broken = Fixture("anarchy-broken", base.params, base.network, (
        Expectation(Check.WELFARE, F(2), profile={"v1": "(v2|v9)"}),
    ))
    report = verify_fixture(broken)
    assert not report.passed
    assert report.failures[0].detail.startswith("InvalidStrategy")


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_documented_payments_satisfy_clearing_conditions(name):
    fixture = make_fixture(name)
    net = fixture.network
    for exp in fixture.expectations:
        if exp.check is not Check.PAYMENTS:
            continue
        profile = parse_profile(net, exp.profile, fixture.restriction)
        if exp.direction is Direction.MAXIMAL:
            result = cds_clear(net, profile)
        else:
            result = clear_with_liabilities(net, profile, resolve_liabilities(net), exp.direction)
        report = verify_clearing(net, profile, result, expected_matrix(net.ids, exp.expected))
        assert report.ok, (exp.label(), [str(v) for v in report.violations])


@pytest.mark.parametrize("beta", ["1/2", "2/3", "1/5"])
def test_equity_beta_worst_profile_clears_maximally(beta):
    net = make_fixture("equity-beta", {"beta": beta}).network
    b = F(beta)
    result = cds_clear(net, parse_profile(net, {"v2": "(v4|v3)"}))
    assert result.payments.get("v1", "v2") == 1 / b ** 2 - 1
    assert result.payments.get("v2", "v4") == 1 / b
    assert result.payments.get("v4", "v3") == 1
    assert result.payments.get("v3", "v2") == 1
    assert sorted(result.default_ids()) == ["v2", "v4"]
    assert sum(result.equities()) == 0
