"""Reference networks with their documented clearing and game outcomes."""

from fixtures.base import Check, Expectation, Fixture, ParamSpec
from fixtures.registry import ALIASES, FIXTURES, list_fixtures, make_fixture, resolve_name
from fixtures.verify import ExpectationResult, FixtureReport, verify_fixture

__all__ = [
    "ALIASES",
    "Check",
    "Expectation",
    "ExpectationResult",
    "FIXTURES",
    "Fixture",
    "FixtureReport",
    "ParamSpec",
    "list_fixtures",
    "make_fixture",
    "resolve_name",
    "verify_fixture",
]
