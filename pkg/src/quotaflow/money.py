"""Exact fixed-point money and quantity arithmetic.

Money is held in integer piasters (hundredths of a pound); quantities in
integer millis (thousandths of a unit, e.g. grams for kilogram items).
Products of quantity and unit price round half-up to the piaster at the
line level, which keeps every total a deterministic integer.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import total_ordering

_MONEY_RE = re.compile(r"^(-?)(\d+)(?:\.(\d{1,2}))?$")
_QTY_RE = re.compile(r"^(\d+)(?:\.(\d{1,3}))?$")


def _round_half_up(numerator: int, denominator: int) -> int:
    # Half rounds toward +infinity; floor division keeps this exact for
    # negative numerators as well (-0.5 -> 0).
    return (numerator + denominator // 2) // denominator


@total_ordering
@dataclass(frozen=True)
class Money:
    """An exact amount in minor currency units (piasters)."""

    piasters: int

    @classmethod
    def zero(cls) -> "Money":
        return cls(0)

    @classmethod
    def parse(cls, text: str) -> "Money":
        m = _MONEY_RE.match(text.strip())
        if not m:
            raise ValueError(f"malformed money amount: {text!r}")
        sign, units, cents = m.groups()
        value = int(units) * 100 + int((cents or "").ljust(2, "0") or 0)
        return cls(-value if sign else value)

    def render(self) -> str:
        sign = "-" if self.piasters < 0 else ""
        mag = abs(self.piasters)
        return f"{sign}{mag // 100}.{mag % 100:02d}"

    def __add__(self, other: "Money") -> "Money":
        return Money(self.piasters + other.piasters)

    def __sub__(self, other: "Money") -> "Money":
        return Money(self.piasters - other.piasters)

    def __neg__(self) -> "Money":
        return Money(-self.piasters)

    def __lt__(self, other: "Money") -> bool:
        return self.piasters < other.piasters

    def __str__(self) -> str:
        return self.render()


@total_ordering
@dataclass(frozen=True)
class Quantity:
    """A non-negative amount with three fractional digits (millis)."""

    millis: int

    def __post_init__(self) -> None:
        if self.millis < 0:
            raise ValueError("quantity cannot be negative")

    @classmethod
    def zero(cls) -> "Quantity":
        return cls(0)

    @classmethod
    def parse(cls, text: str) -> "Quantity":
        m = _QTY_RE.match(text.strip())
        if not m:
            raise ValueError(f"malformed quantity: {text!r}")
        units, frac = m.groups()
        return cls(int(units) * 1000 + int((frac or "").ljust(3, "0") or 0))

    def render(self) -> str:
        return f"{self.millis // 1000}.{self.millis % 1000:03d}"

    def scale(self, factor: int) -> "Quantity":
        return Quantity(self.millis * factor)

    def times(self, unit_price: Money) -> Money:
        """Line value of this quantity at a per-unit price, rounded half-up."""
        return Money(_round_half_up(self.millis * unit_price.piasters, 1000))

    def __add__(self, other: "Quantity") -> "Quantity":
        return Quantity(self.millis + other.millis)

    def __sub__(self, other: "Quantity") -> "Quantity":
        return Quantity(self.millis - other.millis)

    def __lt__(self, other: "Quantity") -> bool:
        return self.millis < other.millis

    def __str__(self) -> str:
        return self.render()
