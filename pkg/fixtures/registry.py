from __future__ import annotations

import logging
from fractions import Fraction
from importlib import import_module
from typing import Any, Dict, List, Mapping, Optional, Tuple

from fixtures.base import Fixture, ParamSpec
from network.errors import ParamOutOfRange, UnknownFixture

log = logging.getLogger(__name__)

_F = Fraction


def _m(default: int = 100, low: int = 10) -> ParamSpec:
    return ParamSpec("M", _F(default), low=_F(low))


# name -> (builder in fixtures.instances, parameter ranges)
FIXTURES: Dict[str, Tuple[str, Tuple[ParamSpec, ...]]] = {
    "five-firm-cds": ("five_firm_cds", ()),
    "no-nash": ("no_nash", (_m(600, 100),)),
    "proportional-loss": ("proportional_loss", (_m(100, 1),)),
    "proportional-path": ("proportional_path", (ParamSpec("n", _F(10), low=_F(4), integer=True), _m(100, 1))),
    "zero-costs": ("zero_costs", (_m(100, 1),)),
    "stability-beta": ("stability_beta", (ParamSpec("beta", _F(1, 2), low=_F(0), high=_F(1), low_open=True,
                                                    high_open=True), _m())),
    "stability-alpha": ("stability_alpha", (ParamSpec("alpha", _F(1, 2), low=_F(0), high=_F(1), low_open=True),
                                            _m(100, 1))),
    "stability-negative": ("stability_negative", (_m(100, 1),)),
    "anarchy-assets": ("anarchy_assets", (_m(100, 1),)),
    "equity-beta": ("equity_beta", (ParamSpec("beta", _F(1, 2), low=_F(0), high=_F(1), low_open=True,
                                              high_open=True),)),
    "equity-alpha": ("equity_alpha", (ParamSpec("alpha", _F(1, 2), low=_F(0), high=_F(1), low_open=True),
                                      ParamSpec("beta", _F(1), choices=(_F(0), _F(1))), _m(100, 1))),
    "negative-transform": ("negative_transform", ()),
    "equity-negative": ("equity_negative", ()),
    "super-strong": ("super_strong", (ParamSpec("eps", _F(1, 10), low=_F(0), high=_F(1, 2), low_open=True,
                                                high_open=True),)),
    "ambiguous-cycle": ("ambiguous_cycle", (ParamSpec("ell", _F(1), low=_F(0), low_open=True),)),
}

ALIASES: Dict[str, str] = {
    "example1": "five-firm-cds",
    "thm4-no-ne": "no-nash",
    "thm5-prop": "proportional-loss",
    "thm5-path": "proportional-path",
    "thm6-zero-costs": "zero-costs",
    "thm7-beta": "stability-beta",
    "thm7-alpha": "stability-alpha",
    "thm8-negative": "stability-negative",
    "thm9-poa": "anarchy-assets",
    "thm10-beta": "equity-beta",
    "thm10-alpha-or-beta1": "equity-alpha",
    "thm13-transform": "negative-transform",
    "thm16-negative": "equity-negative",
    "thm17-superstrong": "super-strong",
    "footnote-cycle": "ambiguous-cycle",
}

_PARAM_NAMES = {"m": "M", "ε": "eps", "epsilon": "eps", "β": "beta", "α": "alpha", "ℓ": "ell", "l": "ell"}


def resolve_name(name: str) -> str:
    key = name.strip()
    key = ALIASES.get(key, key)
    if key not in FIXTURES:
        raise UnknownFixture(f"Unknown fixture: {name}")
    return key


def _canonical_param(name: str, specs: Tuple[ParamSpec, ...]) -> str:
    known = {s.name for s in specs}
    if name in known:
        return name
    alt = _PARAM_NAMES.get(name, _PARAM_NAMES.get(name.lower(), name))
    return alt if alt in known else name


def make_fixture(name: str, params: Optional[Mapping[str, Any]] = None) -> Fixture:
    key = resolve_name(name)
    builder_name, specs = FIXTURES[key]
    given = {_canonical_param(k, specs): v for k, v in (params or {}).items()}
    known = {s.name for s in specs}
    unknown = sorted(set(given) - known)
    if unknown:
        expected = ", ".join(sorted(known)) or "none"
        raise ParamOutOfRange(f"Fixture {key} has no parameter {', '.join(unknown)} (parameters: {expected})")
    values = {s.name: s.check(given.get(s.name, s.default)) for s in specs}
    builder = getattr(import_module("fixtures.instances"), builder_name)
    fixture = builder(**values)
    log.debug("built fixture %s with %s", key, {k: str(v) for k, v in values.items()})
    return fixture


def list_fixtures() -> List[Dict[str, Any]]:
    reverse: Dict[str, List[str]] = {}
    for alias, target in ALIASES.items():
        reverse.setdefault(target, []).append(alias)
    return [
        {
            "name": name,
            "aliases": reverse.get(name, []),
            "params": [s.describe() for s in specs],
            "defaults": {s.name: str(s.default) for s in specs},
        }
        for name, (_, specs) in FIXTURES.items()
    ]
