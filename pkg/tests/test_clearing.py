from __future__ import annotations

from fractions import Fraction

import pytest

from clearing.cds import cds_clear, proportional_clear
from clearing.proper import proper_filter, reached_firms
from clearing.result import Direction, PaymentMatrix
from clearing.solver import clear_with_liabilities, inner_fixed_point, mcp_clear
from clearing.split import pp_split
from clearing.verify import verify_clearing
from network.errors import CdsNotSupported, ConfigError, InvalidAmount, NonConvergent
from network.model import resolve_liabilities, validate_network
from network.strategy import parse_profile, parse_strategy, proportional_profile

F = Fraction


def build(externals, debts, cds=(), alpha=1, beta=1):
    return validate_network({
        "firms": [{"id": k, "external": v} for k, v in externals.items()],
        "debts": [{"from": d, "to": c, "amount": a} for d, c, a in debts],
        "cds": [{"from": d, "to": c, "reference": r, "notional": a} for d, c, r, a in cds],
        "default_costs": {"alpha": alpha, "beta": beta},
    })


def priority_loop():
    """v1 owes v2 and v3; v2 can only repay v1 out of what v1 sends it."""
    net = build(
        {"v1": 1, "v2": 0, "v3": 0, "v4": 0},
        [("v1", "v2", 2), ("v1", "v3", 1), ("v2", "v1", 1), ("v3", "v4", 1)],
    )
    return net, parse_profile(net, {"v1": "(v3|v2)"})


def pays(result, debtor, creditor):
    return result.payments.get(debtor, creditor)


# ─── Split ───


def test_pp_split_fills_classes_in_order():
    strategy = parse_strategy("(v2|v3,v4)", ("v2", "v3", "v4"))
    got = pp_split(3, strategy, {"v2": 2, "v3": 2, "v4": 6})
    assert got == {"v2": 2, "v3": F(1, 4), "v4": F(3, 4)}


def test_pp_split_sequence_row_and_excess():
    strategy = parse_strategy("(v3|v2)", ("v2", "v3"))
    assert pp_split(1, strategy, [5, 2]) == (0, 1)
    assert pp_split("9/2", strategy, [5, 2]) == (F(5, 2), 2)
    assert pp_split(100, strategy, [5, 2]) == (5, 2)
    assert pp_split(0, strategy, [5, 2]) == (0, 0)


def test_pp_split_proportional_class():
    strategy = parse_strategy("(v2,v3)", ("v2", "v3"))
    assert pp_split(1, strategy, {"v2": 1, "v3": 3}) == {"v2": F(1, 4), "v3": F(3, 4)}


def test_pp_split_rejects_negative_total():
    with pytest.raises(InvalidAmount):
        pp_split(-1, parse_strategy("(v2)", ("v2",)), {"v2": 1})


# ─── Solver ───


def test_maximal_payments_on_priority_loop():
    net, profile = priority_loop()
    result = mcp_clear(net, profile)
    assert pays(result, "v1", "v3") == 1
    assert pays(result, "v1", "v2") == 1
    assert pays(result, "v2", "v1") == 1
    assert pays(result, "v3", "v4") == 1
    assert result.default_ids() == ["v1"]
    assert result.recovery[net.index("v1")] == F(2, 3)
    assert result.total_assets() == (2, 1, 1, 1)
    assert result.proper and result.converged
    assert verify_clearing(net, profile, result).ok


def test_minimal_payments_on_priority_loop():
    net, profile = priority_loop()
    result = mcp_clear(net, profile, Direction.MINIMAL)
    assert pays(result, "v1", "v3") == 1
    assert pays(result, "v1", "v2") == 0
    assert pays(result, "v2", "v1") == 0
    assert result.default_ids() == ["v1", "v2"]
    assert result.recovery[net.index("v2")] == 0
    assert sum(result.total_assets()) == 3
    assert result.raw_payments is None
    assert verify_clearing(net, profile, result).ok


def test_maximal_dominates_minimal_entrywise():
    net, profile = priority_loop()
    high = mcp_clear(net, profile, Direction.MAXIMAL).payments.p
    low = mcp_clear(net, profile, Direction.MINIMAL).payments.p
    assert all(a >= b for a, b in zip(high.flat, low.flat))


def test_unfed_circulation_is_filtered():
    net = build({"a": 0, "b": 0}, [("a", "b", 1), ("b", "a", 1)])
    result = mcp_clear(net, proportional_profile(net))
    assert result.raw_payments.get("a", "b") == 1
    assert result.payments.get("a", "b") == 0
    assert result.default_ids() == ["a", "b"]
    assert result.recovery == (0, 0)
    assert verify_clearing(net, result.profile, result).ok


def test_proper_filter_keeps_reached_flow_and_is_idempotent():
    net = build({"a": 1, "b": 0, "c": 0, "d": 0}, [("a", "b", 1), ("c", "d", 1), ("d", "c", 1)])
    raw = PaymentMatrix.from_rows(net.ids, [[0, 1, 0, 0], [0, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])
    assert reached_firms(raw, net) == {0, 1}
    once = proper_filter(raw, net)
    assert once.get("a", "b") == 1
    assert once.get("c", "d") == 0 and once.get("d", "c") == 0
    assert proper_filter(once, net) == once


def test_default_costs_shrink_payments():
    net = build({"v1": 2, "v2": 0, "v3": 0}, [("v1", "v2", 4), ("v2", "v3", 2)], alpha="1/2", beta="1/2")
    result = mcp_clear(net, proportional_profile(net))
    assert pays(result, "v1", "v2") == 1
    assert pays(result, "v2", "v3") == F(1, 2)
    assert result.default_ids() == ["v1", "v2"]
    assert result.recovery[:2] == (F(1, 4), F(1, 4))
    assert verify_clearing(net, result.profile, result).ok


def test_negative_external_assets_are_covered_first():
    net = build({"v1": 3, "v2": -1, "v3": 0}, [("v1", "v2", 2), ("v2", "v3", 2)])
    result = mcp_clear(net, proportional_profile(net))
    assert pays(result, "v2", "v3") == 1
    assert result.default_ids() == ["v2"]


def test_inner_fixed_point_below_start():
    net, profile = priority_loop()
    x = inner_fixed_point(net, resolve_liabilities(net), profile, ["v1"], [3, 1, 1, 0])
    assert x == (2, 1, 1, 0)


def test_mcp_clear_rejects_cds():
    net = build({"a": 1, "b": 0, "c": 0}, [("a", "b", 1)], cds=[("c", "a", "b", 1)])
    with pytest.raises(CdsNotSupported):
        mcp_clear(net, proportional_profile(net))


def test_result_serialization():
    net, profile = priority_loop()
    result = mcp_clear(net, profile)
    out = result.to_dict()
    assert out["defaults"] == ["v1"]
    assert out["social_welfare"] == {"assets": "5", "equity": "1"}
    assert out["profile"] == {"v1": [["v3"], ["v2"]]}
    assert result.to_csv().splitlines()[0] == "debtor,v1,v2,v3,v4"
    assert "default" in result.to_table()


# ─── CDS ───


def test_cds_triggered_by_partial_recovery():
    net = build(
        {"v1": 1, "v2": 0, "v3": 0, "v4": 1, "v5": 0},
        [("v1", "v2", 2), ("v1", "v3", 1), ("v2", "v1", 1), ("v3", "v5", 1)],
        cds=[("v4", "v5", "v3", 1)],
    )
    profile = parse_profile(net, {"v1": "(v2,v3)"})
    result = cds_clear(net, profile)
    assert pays(result, "v1", "v3") == F(2, 3)
    assert pays(result, "v4", "v5") == F(1, 3)
    assert result.recovery[net.index("v3")] == F(2, 3)
    assert result.cds_rounds > 1
    assert verify_clearing(net, profile, result).ok

    first = cds_clear(net, parse_profile(net, {"v1": "(v2|v3)"}))
    assert pays(first, "v4", "v5") == 1
    assert first.default_ids() == ["v1", "v3"]


def recovery_spiral():
    # the recovery of v2 approaches 1 - sqrt(2)/2 but never repeats exactly
    return build({"v1": 1, "v2": 0, "v3": 0, "v4": 0}, [("v1", "v2", 1), ("v2", "v4", 2)],
                 cds=[("v1", "v3", "v2", 1)])


def test_cds_loop_gives_up_after_round_cap():
    net = recovery_spiral()
    with pytest.raises(NonConvergent) as info:
        proportional_clear(net, max_rounds=5)
    assert info.value.result is not None
    last = proportional_clear(net, max_rounds=5, strict=False)
    assert not last.converged
    assert last.cds_rounds == 5


def test_cds_loop_warns_while_still_running(monkeypatch, caplog):
    from clearing import cds as cds_module

    monkeypatch.setattr(cds_module, "PROGRESS_EVERY", 3)
    with caplog.at_level("WARNING", logger="clearing.cds"):
        last = proportional_clear(recovery_spiral(), max_rounds=7, strict=False)
    assert not last.converged
    progress = [r.getMessage() for r in caplog.records if "still running" in r.getMessage()]
    assert len(progress) == 2
    assert progress[0].startswith("cds loop still running after 3 of 7 rounds")
    assert any("did not converge within 7 rounds" in r.getMessage() for r in caplog.records)


def test_cds_round_cap_must_be_positive():
    with pytest.raises(ConfigError):
        proportional_clear(recovery_spiral(), max_rounds=0)


def test_recovery_spiral_first_rounds():
    net = recovery_spiral()
    profile = proportional_profile(net)
    one = clear_with_liabilities(net, profile, resolve_liabilities(net), Direction.MAXIMAL)
    assert one.recovery[net.index("v2")] == F(1, 2)
    two = clear_with_liabilities(net, profile, resolve_liabilities(net, one.recovery), Direction.MAXIMAL)
    assert pays(two, "v1", "v2") == F(2, 3)
    assert two.recovery[net.index("v2")] == F(1, 3)


def test_verify_reports_perturbed_payments():
    net, profile = priority_loop()
    result = mcp_clear(net, profile)
    rows = [list(row) for row in result.payments.p]
    rows[net.index("v2")][net.index("v1")] = F(1, 2)
    report = verify_clearing(net, profile, result, PaymentMatrix.from_rows(net.ids, rows))
    assert not report.ok
    assert any(v.firm == "v2" for v in report.by_check("clearing"))
    assert report.to_dict()["ok"] is False
