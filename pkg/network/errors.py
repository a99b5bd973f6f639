"""Error hierarchy shared by every fennec package.

The CLI maps the three branches to exit codes: InputError -> 1,
NonConvergent -> 2, CapExceeded -> 3.
"""
from __future__ import annotations

from typing import Any, Optional


class FennecError(Exception):
    """Base class for all fennec errors."""


# ─── Input errors ───


class InputError(FennecError, ValueError):
    pass


class InvalidAmount(InputError):
    pass


class DuplicateFirmId(InputError):
    pass


class UnknownFirmId(InputError):
    pass


class NegativeLiability(InputError):
    pass


class DefaultCostOutOfRange(InputError):
    pass


class SelfLoopDebt(InputError):
    pass


class CdsDegenerateReference(InputError):
    pass


class RecoveryOutOfRange(InputError):
    pass


class InvalidStrategy(InputError):
    pass


class UnknownFixture(InputError):
    pass


class ParamOutOfRange(InputError):
    pass


class ConfigError(InputError):
    pass


class PreconditionDefaultCosts(InputError):
    pass


class CdsNotSupported(InputError):
    pass


# ─── Convergence ───


class NonConvergent(FennecError, RuntimeError):
    def __init__(self, message: str, result: Any = None):
        super().__init__(message)
        self.result = result


class NonConvergentProfile(NonConvergent):
    def __init__(self, message: str, profile: Any = None, firm: Optional[str] = None, result: Any = None):
        super().__init__(message, result=result)
        self.profile = profile
        self.firm = firm


# ─── Caps ───


class CapExceeded(FennecError, RuntimeError):
    pass


class StrategySpaceTooLarge(CapExceeded):
    pass


class EnumerationCapExceeded(CapExceeded):
    pass


class NonFiniteRegime(FennecError, RuntimeError):
    """The regime solver visited more regimes than the frontier bound allows."""
