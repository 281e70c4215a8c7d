"""Software floating point with configurable width.

Values live in a finite set determined by (exponent_bits, mantissa_bits):
signed zero, subnormals, and normals, mirroring the IEEE layout but with
no infinities: overflow saturates to the largest finite magnitude. Every
primitive operation computes the exact result (or a double-precision
intermediate for exp/sqrt) and rounds once, to nearest, ties to even.

Values are represented as Python floats, which is exact for any format
that embeds in binary64 (exponent_bits <= 11, mantissa_bits <= 52).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

_HALF = Fraction(1, 2)

# smallest magnitude that rounds past the largest finite binary32 value
_OVERFLOW_32 = float(Fraction(2) ** 128 * (1 - Fraction(2) ** -25))


def _round_half_even(q: Fraction) -> int:
    n = q.numerator // q.denominator
    rem = q - n
    if rem > _HALF:
        return n + 1
    if rem < _HALF:
        return n
    return n if n % 2 == 0 else n + 1


@dataclass(frozen=True)
class FpFormat:
    exponent_bits: int = 8
    mantissa_bits: int = 23

    def __post_init__(self):
        if not 2 <= self.exponent_bits <= 11:
            raise ValueError("exponent_bits must be in [2, 11]")
        if not 1 <= self.mantissa_bits <= 52:
            raise ValueError("mantissa_bits must be in [1, 52]")

    @property
    def bias(self) -> int:
        return (1 << (self.exponent_bits - 1)) - 1

    @property
    def emax(self) -> int:
        return self.bias

    @property
    def emin(self) -> int:
        return 1 - self.bias

    @property
    def max_finite(self) -> float:
        m = self.mantissa_bits
        return float((2 ** (m + 1) - 1) * Fraction(2) ** (self.emax - m))

    @property
    def is_binary32(self) -> bool:
        return self.exponent_bits == 8 and self.mantissa_bits == 23

    def _round32(self, r: float) -> float:
        """Fast path for binary32: one cast rounds a binary64 value.

        Exact for single results of +, -, *, /, sqrt on binary32 operands
        because binary64 carries more than double their precision, so the
        intermediate is either exact or rounds identically.
        """
        if not -_OVERFLOW_32 < r < _OVERFLOW_32:
            return math.copysign(self.max_finite, r)
        return float(np.float32(r))

    def round(self, x) -> float:
        """Nearest representable value, ties to even, saturating overflow."""
        if self.is_binary32 and isinstance(x, float):
            if math.isnan(x):
                raise ValueError("nan is not representable")
            return self._round32(x)
        if isinstance(x, float):
            if math.isinf(x):
                return math.copysign(self.max_finite, x)
            if math.isnan(x):
                raise ValueError("nan is not representable")
            fr = Fraction(x)
        else:
            fr = Fraction(x)
        if fr == 0:
            return math.copysign(0.0, x) if isinstance(x, float) else 0.0
        sign = -1.0 if fr < 0 else 1.0
        a = -fr if fr < 0 else fr
        e = a.numerator.bit_length() - a.denominator.bit_length()
        if Fraction(2) ** e > a:
            e -= 1
        e_eff = max(e, self.emin)
        m = self.mantissa_bits
        quantum = Fraction(2) ** (e_eff - m)
        n = _round_half_even(a / quantum)
        if n >= (1 << (m + 1)):
            e_eff += 1
            n = 1 << m
        if e_eff > self.emax:
            return sign * self.max_finite
        if n == 0:
            return math.copysign(0.0, sign)
        return sign * float(Fraction(n) * Fraction(2) ** (e_eff - m))

    def add(self, a: float, b: float) -> float:
        if self.is_binary32:
            return self._round32(a + b)
        return self.round(Fraction(a) + Fraction(b))

    def sub(self, a: float, b: float) -> float:
        if self.is_binary32:
            return self._round32(a - b)
        return self.round(Fraction(a) - Fraction(b))

    def mul(self, a: float, b: float) -> float:
        if self.is_binary32:
            return self._round32(a * b)
        return self.round(Fraction(a) * Fraction(b))

    def div(self, a: float, b: float) -> float:
        if b == 0:
            raise ZeroDivisionError("division by zero in fixed precision")
        if self.is_binary32:
            return self._round32(a / b)
        return self.round(Fraction(a) / Fraction(b))

    def exp(self, x: float) -> float:
        # double-precision intermediate, one rounding into the format
        try:
            v = math.exp(x)
        except OverflowError:
            return self.max_finite
        return self.round(v)

    def sqrt(self, x: float) -> float:
        return self.round(math.sqrt(x))

    def sum(self, values) -> float:
        """Left-to-right accumulation, rounding after each addition."""
        acc = 0.0
        for v in values:
            acc = self.add(acc, v)
        return acc

    def ulp_at_one(self) -> float:
        return float(Fraction(2) ** (-self.mantissa_bits))


BINARY32 = FpFormat(8, 23)


def fp_round(x, fp: FpFormat = BINARY32) -> float:
    return fp.round(x)
