"""Exact monetary amounts.

Every amount is a ``fractions.Fraction``. Input accepts decimal text ("1.5"),
rational text ("2/3"), ints and Fractions; output is always "p/q" in lowest
terms, or "n" for integers.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Union

from network.errors import InvalidAmount

Money = Fraction
AmountLike = Union[str, int, Fraction]

ZERO = Fraction(0)
ONE = Fraction(1)


def parse_money(value: AmountLike) -> Fraction:
    if isinstance(value, bool):
        raise InvalidAmount(f"Not an amount: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        # JSON numbers: go through the shortest repr so 0.1 stays 1/10
        return parse_money(repr(value))
    if isinstance(value, str):
        text = value.strip()
        if not text:
            raise InvalidAmount("Empty amount")
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError):
            raise InvalidAmount(f"Not an amount: {value!r}") from None
    raise InvalidAmount(f"Not an amount: {value!r}")


def format_money(value: Fraction) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"
