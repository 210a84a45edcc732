"""Log-space arithmetic for nonnegative reals that overflow floats.

A value is stored as its natural logarithm together with an explicit zero
flag, so that quantities like k^(k-2) or p^C(K,2) can be multiplied,
divided and summed without ever materialising them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable


def log_sum_exp(values: Iterable[float]) -> float:
    """Stable log(sum(exp(v))) with max extraction; -inf for an empty sum."""
    vs = [v for v in values if v != -math.inf]
    if not vs:
        return -math.inf
    m = max(vs)
    if m == math.inf:
        return math.inf
    return m + math.log(sum(math.exp(v - m) for v in vs))


@dataclass(frozen=True)
class LogReal:
    """A nonnegative real number represented by its natural log."""

    log: float = 0.0
    zero: bool = False

    # -- constructors ------------------------------------------------------

    @staticmethod
    def from_float(x: float) -> "LogReal":
        if x < 0:
            raise ValueError(f"LogReal represents nonnegative reals, got {x}")
        if x == 0:
            return LogReal.ZERO
        return LogReal(math.log(x))

    @staticmethod
    def from_log(log_value: float) -> "LogReal":
        return LogReal(float(log_value))

    @staticmethod
    def from_int(n: int) -> "LogReal":
        # math.log accepts arbitrary-precision ints, unlike float(n)
        if n < 0:
            raise ValueError("negative integer")
        if n == 0:
            return LogReal.ZERO
        return LogReal(math.log(n))

    # -- conversions -------------------------------------------------------

    def to_float(self) -> float:
        if self.zero:
            return 0.0
        return math.exp(self.log)

    # -- arithmetic --------------------------------------------------------

    def __mul__(self, other: "LogReal") -> "LogReal":
        if self.zero or other.zero:
            return LogReal.ZERO
        return LogReal(self.log + other.log)

    def __truediv__(self, other: "LogReal") -> "LogReal":
        if other.zero:
            raise ZeroDivisionError("LogReal division by zero")
        if self.zero:
            return LogReal.ZERO
        return LogReal(self.log - other.log)

    def __pow__(self, exponent: float) -> "LogReal":
        if self.zero:
            if exponent == 0:
                return LogReal(0.0)
            if exponent < 0:
                raise ZeroDivisionError("0 to a negative power")
            return LogReal.ZERO
        return LogReal(self.log * exponent)

    def __add__(self, other: "LogReal") -> "LogReal":
        if self.zero:
            return other
        if other.zero:
            return self
        return LogReal(log_sum_exp((self.log, other.log)))

    @staticmethod
    def sum(values: Iterable["LogReal"]) -> "LogReal":
        logs = [v.log for v in values if not v.zero]
        if not logs:
            return LogReal.ZERO
        return LogReal(log_sum_exp(logs))

    # -- comparisons -------------------------------------------------------

    def _key(self) -> float:
        return -math.inf if self.zero else self.log

    def __lt__(self, other: "LogReal") -> bool:
        return self._key() < other._key()

    def __le__(self, other: "LogReal") -> bool:
        return self._key() <= other._key()

    def __gt__(self, other: "LogReal") -> bool:
        return self._key() > other._key()

    def __ge__(self, other: "LogReal") -> bool:
        return self._key() >= other._key()


LogReal.ZERO = LogReal(-math.inf, True)  # type: ignore[attr-defined]
LogReal.ONE = LogReal(0.0)  # type: ignore[attr-defined]
