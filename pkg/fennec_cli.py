#!/usr/bin/env python3
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path
from typing import Any, Dict, List, Optional

from clearing.cds import cds_clear
from clearing.result import Direction
from clearing.solver import mcp_clear
from clearing.verify import verify_clearing
from config.settings import Settings, load_settings
from fixtures.registry import list_fixtures, make_fixture
from fixtures.verify import verify_fixture
from game.analysis import analyze
from game.utility import UtilityMode
from network.errors import CapExceeded, InputError, NonConvergent
from network.model import FinancialNetwork, validate_network
from network.strategy import NO_RESTRICTION, PROPORTIONAL, parse_profile
from network.transform import transform_negative_assets

log = logging.getLogger("fennec")

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NONCONVERGENT = 2
EXIT_CAP = 3
EXIT_VERIFY_FAILED = 4

OUTPUTS = ("json", "csv", "table")


def positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def read_json(path: str, what: str) -> Any:
    p = Path(path)
    if not p.is_file():
        raise InputError(f"{what} file not found: {path}")
    try:
        return json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InputError(f"{what} file {path} is not valid JSON: {exc}") from None


def load_network(path: str) -> FinancialNetwork:
    return validate_network(read_json(path, "network"))


def load_profile_arg(value: str) -> Any:
    if value.strip() == PROPORTIONAL:
        return PROPORTIONAL
    return read_json(value, "profile")


def parse_params(items: Optional[List[str]]) -> Dict[str, str]:
    params: Dict[str, str] = {}
    for item in items or []:
        key, sep, value = item.partition("=")
        if not sep or not key.strip() or not value.strip():
            raise InputError(f"--param expects key=value, got {item!r}")
        params[key.strip()] = value.strip()
    return params


def run_settings(args: argparse.Namespace) -> Settings:
    settings = load_settings()
    changes = {}
    if getattr(args, "max_profiles", None):
        changes["max_profiles"] = args.max_profiles
    if getattr(args, "cds_rounds", None):
        changes["cds_max_rounds"] = args.cds_rounds
    if getattr(args, "jobs", None):
        changes["jobs"] = args.jobs
    return replace(settings, **changes)


def emit(text: str):
    sys.stdout.write(text if text.endswith("\n") else text + "\n")


def dump(obj: Any) -> str:
    return json.dumps(obj, indent=2)


# ─── Commands ───


def cmd_clear(args: argparse.Namespace) -> int:
    settings = run_settings(args)
    net = load_network(args.network)
    profile = parse_profile(net, load_profile_arg(args.profile))
    direction = Direction(args.direction)
    if direction is Direction.MINIMAL:
        result = mcp_clear(net, profile, direction)
    else:
        result = cds_clear(net, profile, max_rounds=settings.cds_max_rounds)
    if args.verify:
        report = verify_clearing(net, profile, result)
        if not report.ok:
            for v in report.violations:
                log.warning("verification: %s", v)
    if args.output == "json":
        out = result.to_dict()
        if args.verify:
            out["verification"] = report.to_dict()
        emit(dump(out))
    elif args.output == "csv":
        emit(result.to_csv())
    else:
        emit(result.to_table())
    return EXIT_OK


def cmd_analyze(args: argparse.Namespace) -> int:
    settings = run_settings(args)
    net = load_network(args.network)
    restriction = NO_RESTRICTION
    if args.transform_negative:
        transform = transform_negative_assets(net)
        net, restriction = transform.network, transform.restriction
    report = analyze(
        net,
        UtilityMode(args.utility),
        check=args.check,
        coalition_max=args.coalition_max,
        jobs=settings.jobs,
        settings=settings,
        restriction=restriction,
    )
    if args.output == "json":
        emit(dump(report.to_dict()))
    elif args.output == "csv":
        emit(report.to_frame().to_csv(index=False))
    else:
        emit(report.to_table())
    return EXIT_OK


def cmd_fixture(args: argparse.Namespace) -> int:
    if args.fixture_cmd == "list":
        rows = list_fixtures()
        if args.output == "json":
            emit(dump(rows))
        else:
            for row in rows:
                aliases = f" (alias: {', '.join(row['aliases'])})" if row["aliases"] else ""
                params = "; ".join(row["params"]) or "no parameters"
                emit(f"{row['name']}{aliases}: {params}")
        return EXIT_OK

    fixture = make_fixture(args.name, parse_params(args.param))
    if args.fixture_cmd == "emit":
        out_dir = Path(args.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        net_path = out_dir / f"{fixture.name}.network.json"
        exp_path = out_dir / f"{fixture.name}.expectations.json"
        net_path.write_text(dump(fixture.network.to_dict()) + "\n", encoding="utf-8")
        exp_path.write_text(dump(fixture.expectations_dict()) + "\n", encoding="utf-8")
        emit(str(net_path))
        emit(str(exp_path))
        return EXIT_OK

    report = verify_fixture(fixture, run_settings(args))
    if args.output == "json":
        emit(dump(report.to_dict()))
    elif args.output == "csv":
        emit(report.to_frame().to_csv(index=False))
    else:
        emit(report.to_table())
    return EXIT_OK if report.passed else EXIT_VERIFY_FAILED


# ─── Parser ───


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fennec",
        description="Clearing payments and payment games on financial networks",
    )
    parser.add_argument("-v", "--verbose", action="count", default=0, help="more logging (repeatable)")
    sub = parser.add_subparsers(dest="cmd", required=True)

    pclear = sub.add_parser("clear", help="clearing payments for one strategy profile")
    pclear.add_argument("--network", required=True)
    pclear.add_argument("--profile", default=PROPORTIONAL, help='profile JSON file or "proportional"')
    pclear.add_argument("--direction", choices=[d.value for d in Direction], default=Direction.MAXIMAL.value)
    pclear.add_argument("--output", choices=OUTPUTS, default="json")
    pclear.add_argument("--cds-rounds", type=positive_int, default=None)
    pclear.add_argument("--verify", action="store_true", help="re-check the clearing conditions")

    pan = sub.add_parser("analyze", help="enumerate every profile and report equilibria")
    pan.add_argument("--network", required=True)
    pan.add_argument("--utility", choices=[m.value for m in UtilityMode], default=UtilityMode.TOTAL_ASSETS.value)
    pan.add_argument("--check", choices=["strong", "super-strong"], default=None)
    pan.add_argument("--coalition-max", type=positive_int, default=None)
    pan.add_argument("--jobs", type=positive_int, default=None)
    pan.add_argument("--max-profiles", type=positive_int, default=None)
    pan.add_argument("--cds-rounds", type=positive_int, default=None)
    pan.add_argument("--transform-negative", action="store_true",
                     help="move negative external assets into debt to a sink paid first")
    pan.add_argument("--output", choices=OUTPUTS, default="table")

    pfix = sub.add_parser("fixture", help="reference networks")
    fsub = pfix.add_subparsers(dest="fixture_cmd", required=True)
    plist = fsub.add_parser("list")
    plist.add_argument("--output", choices=("json", "table"), default="table")
    for name in ("emit", "verify"):
        p = fsub.add_parser(name)
        p.add_argument("--name", required=True)
        p.add_argument("--param", action="append", metavar="KEY=VALUE")
        if name == "emit":
            p.add_argument("--out-dir", default=".")
        else:
            p.add_argument("--output", choices=OUTPUTS, default="table")
            p.add_argument("--max-profiles", type=positive_int, default=None)
            p.add_argument("--cds-rounds", type=positive_int, default=None)
    return parser


def setup_logging(verbose: int):
    level = logging.WARNING
    try:
        level = getattr(logging, load_settings().log_level, logging.WARNING)
    except InputError:
        pass
    if verbose == 1:
        level = min(level, logging.INFO)
    elif verbose > 1:
        level = logging.DEBUG
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(args.verbose)
    handlers = {"clear": cmd_clear, "analyze": cmd_analyze, "fixture": cmd_fixture}
    try:
        return handlers[args.cmd](args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NonConvergent as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENT
    except CapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP


if __name__ == "__main__":
    sys.exit(main())
