from __future__ import annotations

import json

import pytest

from clearing.cds import cds_clear
from fennec_cli import EXIT_CAP, EXIT_INPUT, EXIT_NONCONVERGENT, EXIT_OK, EXIT_VERIFY_FAILED, dump, main
from fixtures.registry import make_fixture
from game.analysis import analyze
from network.model import validate_network
from network.strategy import parse_profile


@pytest.fixture
def anarchy_file(tmp_path):
    path = tmp_path / "anarchy.network.json"
    path.write_text(json.dumps(make_fixture("anarchy-assets", {"M": 10}).network.to_dict()))
    return path


def test_clear_json(anarchy_file, tmp_path, capsys):
    profile = tmp_path / "profile.json"
    profile.write_text(json.dumps({"v1": "(v3|v2)"}))
    code = main(["clear", "--network", str(anarchy_file), "--profile", str(profile), "--verify"])
    assert code == EXIT_OK
    out = json.loads(capsys.readouterr().out)
    assert out["social_welfare"]["assets"] == "22"
    assert out["verification"]["ok"] is True
    assert out["direction"] == "maximal"


def test_clear_minimal_csv(anarchy_file, capsys):
    code = main(["clear", "--network", str(anarchy_file), "--direction", "minimal", "--output", "csv"])
    assert code == EXIT_OK
    assert capsys.readouterr().out.startswith("debtor,v1,v2,v3,v4")


def test_analyze_table(anarchy_file, capsys):
    assert main(["analyze", "--network", str(anarchy_file)]) == EXIT_OK
    out = capsys.readouterr().out
    assert "PoA = 11" in out
    assert "OPT = 22" in out


def test_analyze_super_strong_json(tmp_path, capsys):
    path = tmp_path / "ss.json"
    path.write_text(json.dumps(make_fixture("super-strong").network.to_dict()))
    code = main(["analyze", "--network", str(path), "--utility", "equity", "--check", "super-strong",
                 "--output", "json"])
    assert code == EXIT_OK
    out = json.loads(capsys.readouterr().out)
    assert out["check"]["pos"] == "9"


def test_analyze_transform_negative(tmp_path, capsys):
    path = tmp_path / "neg.json"
    path.write_text(json.dumps(make_fixture("negative-transform").network.to_dict()))
    code = main(["analyze", "--network", str(path), "--transform-negative", "--output", "json"])
    assert code == EXIT_OK
    out = json.loads(capsys.readouterr().out)
    assert "t" in out["firms"]
    assert all(p["v2"][0] == ["t"] for p in (row["profile"] for row in out["profiles"]))


def test_missing_network_is_input_error(tmp_path, capsys):
    code = main(["clear", "--network", str(tmp_path / "absent.json")])
    assert code == EXIT_INPUT
    assert capsys.readouterr().err.startswith("error: network file not found")


def test_bad_json_is_input_error(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    assert main(["analyze", "--network", str(path)]) == EXIT_INPUT


def test_invalid_network_is_input_error(tmp_path, capsys):
    path = tmp_path / "loop.json"
    path.write_text(json.dumps({"firms": [{"id": "a", "external": 1}],
                                "debts": [{"from": "a", "to": "a", "amount": 1}]}))
    assert main(["clear", "--network", str(path)]) == EXIT_INPUT
    assert "cannot owe itself" in capsys.readouterr().err


def test_profile_cap_exit_code(tmp_path, capsys):
    path = tmp_path / "no-nash.json"
    path.write_text(json.dumps(make_fixture("no-nash").network.to_dict()))
    assert main(["analyze", "--network", str(path), "--max-profiles", "5"]) == EXIT_CAP


def test_nonconvergent_exit_code(tmp_path, capsys):
    path = tmp_path / "spiral.json"
    path.write_text(json.dumps({
        "firms": [{"id": "v1", "external": 1}, {"id": "v2", "external": 0},
                  {"id": "v3", "external": 0}, {"id": "v4", "external": 0}],
        "debts": [{"from": "v1", "to": "v2", "amount": 1}, {"from": "v2", "to": "v4", "amount": 2}],
        "cds": [{"from": "v1", "to": "v3", "reference": "v2", "notional": 1}],
    }))
    assert main(["clear", "--network", str(path), "--cds-rounds", "10"]) == EXIT_NONCONVERGENT
    assert "did not settle" in capsys.readouterr().err


def test_fixture_list(capsys):
    assert main(["fixture", "list", "--output", "json"]) == EXIT_OK
    names = [row["name"] for row in json.loads(capsys.readouterr().out)]
    assert "five-firm-cds" in names and "super-strong" in names


def test_fixture_emit(tmp_path, capsys):
    code = main(["fixture", "emit", "--name", "thm9-poa", "--param", "M=10", "--out-dir", str(tmp_path)])
    assert code == EXIT_OK
    paths = capsys.readouterr().out.split()
    assert paths == [str(tmp_path / "anarchy-assets.network.json"),
                     str(tmp_path / "anarchy-assets.expectations.json")]
    network = json.loads((tmp_path / "anarchy-assets.network.json").read_text())
    assert {"from": "v3", "to": "v4", "amount": "10"} in network["debts"]


def test_fixture_verify(capsys):
    assert main(["fixture", "verify", "--name", "anarchy-assets", "--param", "M=10"]) == EXIT_OK
    assert "expectations pass" in capsys.readouterr().out


def test_fixture_verify_failure_exit_code(monkeypatch, capsys):
    from fixtures import verify as verify_module

    monkeypatch.setattr(verify_module._Verifier, "_check_opt", lambda self, exp: (False, "forced"))
    code = main(["fixture", "verify", "--name", "anarchy-assets", "--output", "json"])
    assert code == EXIT_VERIFY_FAILED
    assert json.loads(capsys.readouterr().out)["passed"] is False


def test_fixture_bad_param(capsys):
    assert main(["fixture", "verify", "--name", "stability-beta", "--param", "beta=2"]) == EXIT_INPUT
    assert main(["fixture", "emit", "--name", "anarchy-assets", "--param", "M"]) == EXIT_INPUT
    assert main(["fixture", "verify", "--name", "nope"]) == EXIT_INPUT


def test_emitted_fixture_reproduces_clear_and_analyze(tmp_path, capsys):
    first, second = tmp_path / "a", tmp_path / "b"
    for out_dir in (first, second):
        assert main(["fixture", "emit", "--name", "five-firm-cds", "--out-dir", str(out_dir)]) == EXIT_OK
    capsys.readouterr()
    emitted = first / "five-firm-cds.network.json"
    assert emitted.read_bytes() == (second / "five-firm-cds.network.json").read_bytes()

    net = make_fixture("five-firm-cds").network
    assert validate_network(json.loads(emitted.read_text())).to_dict() == net.to_dict()

    profile = tmp_path / "profile.json"
    profile.write_text(json.dumps({"v1": "(v2,v3)"}))
    assert main(["clear", "--network", str(emitted), "--profile", str(profile)]) == EXIT_OK
    cleared = cds_clear(net, parse_profile(net, {"v1": "(v2,v3)"}))
    assert capsys.readouterr().out == dump(cleared.to_dict()) + "\n"

    assert main(["analyze", "--network", str(emitted), "--output", "json"]) == EXIT_OK
    assert capsys.readouterr().out == dump(analyze(net).to_dict()) + "\n"
