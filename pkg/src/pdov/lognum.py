"""Nonnegative reals represented by their natural logarithm.

All series work in this package happens on quantities like
(x^k / k!) * a_k with x in the hundreds, which overflow doubles long
before the quantities of interest (ratios, normalized sums) do.  LogNum
keeps everything in log scale; -inf encodes an exact zero.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = ["LogNum"]


class LogNum:
    __slots__ = ("log",)

    def __init__(self, log: float):
        self.log = float(log)

    @classmethod
    def from_value(cls, value: float) -> "LogNum":
        if value < 0:
            raise ValueError("LogNum represents nonnegative values only")
        if value == 0:
            return cls(-math.inf)
        return cls(math.log(value))

    @classmethod
    def zero(cls) -> "LogNum":
        return cls(-math.inf)

    @classmethod
    def one(cls) -> "LogNum":
        return cls(0.0)

    @property
    def value(self) -> float:
        return math.exp(self.log)

    def is_zero(self) -> bool:
        return self.log == -math.inf

    def __float__(self) -> float:
        return self.value

    def __mul__(self, other: "LogNum") -> "LogNum":
        return LogNum(self.log + other.log)

    def __truediv__(self, other: "LogNum") -> "LogNum":
        if other.is_zero():
            raise ZeroDivisionError("division by LogNum zero")
        if self.is_zero():
            return LogNum.zero()
        return LogNum(self.log - other.log)

    def __add__(self, other: "LogNum") -> "LogNum":
        return LogNum(np.logaddexp(self.log, other.log))

    def __pow__(self, exponent: float) -> "LogNum":
        if self.is_zero():
            if exponent <= 0:
                raise ValueError("0 to a nonpositive power")
            return LogNum.zero()
        return LogNum(self.log * exponent)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, LogNum) and self.log == other.log

    def __lt__(self, other: "LogNum") -> bool:
        return self.log < other.log

    def __le__(self, other: "LogNum") -> bool:
        return self.log <= other.log

    def __hash__(self) -> int:
        return hash(self.log)

    def __repr__(self) -> str:
        return f"LogNum(log={self.log!r})"
