"""Exact reference arithmetic for validating the fused pipeline.

Everything here works on exact dyadic rationals ``mantissa * 2**exponent``
held in unbounded ints, accumulated by left-shifting every operand up to
the smallest scale in sight.  That is the structural opposite of the
fused datapath, which right-shifts down to the largest exponent, so the
two agreeing is meaningful evidence rather than the same code twice.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import NamedTuple, Sequence

from . import formats
from .formats import FpFormat, FpClass, SubnormalPolicy
from .rounding import RoundingMode


class ExactSum(NamedTuple):
    """A dyadic rational: ``mantissa * 2**exponent``, exactly."""

    mantissa: int
    exponent: int

    @classmethod
    def from_float(cls, x: float) -> "ExactSum":
        if not math.isfinite(x):
            raise ValueError("only finite floats have an exact dyadic value")
        if x == 0.0:
            return cls(0, 0)
        num, den = x.as_integer_ratio()
        return cls(num, -(den.bit_length() - 1))

    def normalized(self) -> "ExactSum":
        """Canonical form: odd mantissa, or (0, 0) for zero."""
        m, e = self
        if m == 0:
            return ExactSum(0, 0)
        low = (m & -m).bit_length() - 1
        return ExactSum(m >> low, e + low)

    def as_fraction(self) -> Fraction:
        return Fraction(self.mantissa) * Fraction(2) ** self.exponent


def exact_sum(words: Sequence[int], fmt: FpFormat) -> ExactSum:
    """Exact sum of finite floating-point words, no rounding anywhere."""
    parts = []
    for w in words:
        d = formats.decode(w, fmt)
        if not d.is_finite:
            raise ValueError(
                f"exact sums are defined for finite words only, got {d.fp_class.value}")
        if d.significand == 0:
            continue
        scale = d.biased_exp - fmt.bias - fmt.man_bits
        parts.append((-d.significand if d.sign else d.significand, scale))
    if not parts:
        return ExactSum(0, 0)
    min_scale = min(scale for _, scale in parts)
    total = sum(sig << (scale - min_scale) for sig, scale in parts)
    return ExactSum(total, min_scale)


def round_exact(x: ExactSum, fmt: FpFormat, mode: RoundingMode = RoundingMode.NEAREST_EVEN) -> int:
    """Round an exact dyadic value to the nearest word of ``fmt``.

    Exact zero returns +0; nonzero values that round to zero keep their
    sign.  Overflow follows the format's overflow convention.  This is
    deliberately written quotient-and-remainder style rather than the
    datapath's guard-bit style.
    """
    m0, e0 = x
    if m0 == 0:
        return 0
    negative = m0 < 0
    mag = -m0 if negative else m0
    man = fmt.man_bits

    exp_true = e0 + mag.bit_length() - 1
    target_lsb = max(exp_true - man, fmt.min_exp - man)
    shift = target_lsb - e0
    if shift <= 0:
        q = mag << -shift
    else:
        q = mag >> shift
        if mode is RoundingMode.NEAREST_EVEN:
            rem = mag & ((1 << shift) - 1)
            half = 1 << (shift - 1)
            if rem > half or (rem == half and q & 1):
                q += 1
                if q == (1 << (man + 1)):
                    q >>= 1
                    target_lsb += 1

    sign_bit = 1 << (fmt.width - 1) if negative else 0
    if q < (1 << man):
        if q == 0 or fmt.subnormals is SubnormalPolicy.FLUSH_TO_ZERO:
            return sign_bit
        return sign_bit | q
    e_field = target_lsb + man + fmt.bias
    fraction = q - (1 << man)
    if (e_field, fraction) > (fmt.max_finite_exp_field, fmt.max_finite_fraction):
        return fmt.overflow_word(negative)
    return sign_bit | (e_field << man) | fraction


def round_fraction(
    value: Fraction, fmt: FpFormat, mode: RoundingMode = RoundingMode.NEAREST_EVEN
) -> int:
    """Round an arbitrary exact rational to the nearest word of ``fmt``.

    Unlike ``round_exact`` this accepts non-dyadic values (1/3, 0.1 as a
    Fraction, ...), dividing out the denominator with exact integer
    arithmetic so ties are decided exactly.
    """
    if value == 0:
        return 0
    p, q = value.numerator, value.denominator
    negative = p < 0
    if negative:
        p = -p
    man = fmt.man_bits
    # floor(log2(p/q)): the bit-length gap is off by at most one
    exp_true = p.bit_length() - q.bit_length()
    at_least = p >= (q << exp_true) if exp_true >= 0 else (p << -exp_true) >= q
    if not at_least:
        exp_true -= 1
    target_lsb = max(exp_true - man, fmt.min_exp - man)
    num = p << max(0, -target_lsb)
    den = q << max(0, target_lsb)
    kept, rem = divmod(num, den)
    if mode is RoundingMode.NEAREST_EVEN:
        twice = 2 * rem
        if twice > den or (twice == den and kept & 1):
            kept += 1
            if kept == (1 << (man + 1)):
                kept >>= 1
                target_lsb += 1

    sign_bit = 1 << (fmt.width - 1) if negative else 0
    if kept < (1 << man):
        if kept == 0 or fmt.subnormals is SubnormalPolicy.FLUSH_TO_ZERO:
            return sign_bit
        return sign_bit | kept
    e_field = target_lsb + man + fmt.bias
    fraction = kept - (1 << man)
    if (e_field, fraction) > (fmt.max_finite_exp_field, fmt.max_finite_fraction):
        return fmt.overflow_word(negative)
    return sign_bit | (e_field << man) | fraction


def _rank(word: int, fmt: FpFormat) -> int:
    """Signed position of a finite word on the format's value ladder.

    Magnitude bits order finite words monotonically by value, with both
    zeros sharing rank 0, so the rank difference counts representable
    steps between two words.
    """
    d = formats.decode(word, fmt)
    if not d.is_finite:
        raise ValueError(f"ulp distance is defined for finite words, got {d.fp_class.value}")
    magnitude = word & ((1 << (fmt.width - 1)) - 1)
    return -magnitude if word >> (fmt.width - 1) else magnitude


def ulp_distance(a: int, b: int, fmt: FpFormat) -> int:
    """How many representable values apart two finite words are."""
    return abs(_rank(a, fmt) - _rank(b, fmt))
