"""Terminal normalization and rounding of a fused partial sum.

The whole point of a fused multi-term adder is that rounding happens
once, after every operand has been accumulated at full alignment.  This
module turns a finished ``PartialSum`` back into a floating-point word
of the requested output format, and wires the complete words-in,
word-out pipeline together.
"""

from __future__ import annotations

from enum import Enum
from typing import Optional, Sequence

from . import formats
from .core import PartialSum, to_term
from .fixedpoint import AccumulatorSpec
from .formats import FpFormat, SpecialResult, SubnormalPolicy
from .tree import TreeConfig, eval_tree


class RoundingMode(Enum):
    NEAREST_EVEN = "rne"
    TOWARD_ZERO = "rtz"


def normalize_round(
    p: PartialSum,
    out_fmt: FpFormat,
    mode: RoundingMode = RoundingMode.NEAREST_EVEN,
    *,
    spec: AccumulatorSpec,
) -> int:
    """Round an accumulated partial sum to a word of ``out_fmt``.

    The accumulator's LSB carries the true weight
    ``2**(p.max_exp - spec.bias - spec.man_bits - spec.guard_bits)``;
    everything below that weight is summarized by the sticky flag and
    only ever matters as the round/sticky input of the final rounding.
    An exact zero returns +0.  Magnitudes beyond the format's largest
    finite value follow the format's overflow convention.
    """
    value, lost_below = p.acc
    if value == 0:
        return 0
    negative = value < 0
    mag = -value if negative else value

    acc_lsb_exp = p.max_exp - spec.bias - spec.man_bits - spec.guard_bits
    exp_true = acc_lsb_exp + mag.bit_length() - 1
    m = out_fmt.man_bits
    # LSB weight of the rounded result: the natural normalized position,
    # floored at the fixed scale of the subnormal range
    target_lsb = max(exp_true - m, out_fmt.min_exp - m)

    drop = target_lsb - acc_lsb_exp
    if drop <= 0:
        kept = mag << -drop
        round_bit = 0
        rest = lost_below
    else:
        kept = mag >> drop
        round_bit = (mag >> (drop - 1)) & 1
        rest = lost_below or (mag & ((1 << (drop - 1)) - 1)) != 0

    if mode is RoundingMode.NEAREST_EVEN and round_bit and (rest or kept & 1):
        kept += 1
        if kept == (1 << (m + 1)):
            kept >>= 1
            target_lsb += 1

    sign_bit = 1 << (out_fmt.width - 1) if negative else 0
    if kept < (1 << m):
        # zero or subnormal region; a subnormal word is its bare fraction
        if kept == 0:
            return sign_bit
        if out_fmt.subnormals is SubnormalPolicy.FLUSH_TO_ZERO:
            return sign_bit
        return sign_bit | kept
    e_field = target_lsb + m + out_fmt.bias
    fraction = kept - (1 << m)
    if (e_field, fraction) > (out_fmt.max_finite_exp_field, out_fmt.max_finite_fraction):
        return out_fmt.overflow_word(negative)
    return sign_bit | (e_field << m) | fraction


def special_word(result: SpecialResult, out_fmt: FpFormat) -> int:
    """Map a short-circuited special result onto the output format."""
    if result is SpecialResult.NAN:
        if not out_fmt.has_nan():
            raise ValueError("NaN result cannot be represented in a finite-only format")
        return out_fmt.nan_word()
    negative = result is SpecialResult.NEG_INF
    if out_fmt.specials is formats.SpecialsPolicy.IEEE_LIKE and out_fmt.has_inf:
        return out_fmt.inf_word(negative)
    # no infinity encoding: fall back to the overflow convention
    return out_fmt.overflow_word(negative)


def fused_sum(
    words: Sequence[int],
    fmt: FpFormat,
    config: TreeConfig,
    spec: AccumulatorSpec,
    mode: RoundingMode = RoundingMode.NEAREST_EVEN,
    out_fmt: Optional[FpFormat] = None,
) -> int:
    """Sum floating-point words through a reduction tree, rounding once.

    Decodes the operands, short-circuits on special values, reduces the
    finite terms through ``config``, and rounds the single surviving
    partial sum into ``out_fmt`` (the input format by default).
    """
    if out_fmt is None:
        out_fmt = fmt
    if len(words) != config.n_terms:
        raise ValueError(
            f"config {config.name} expects {config.n_terms} words, got {len(words)}"
        )
    if config.n_terms > spec.n_terms:
        raise ValueError("accumulator lacks carry headroom for this many terms")
    decoded = [formats.decode(w, fmt) for w in words]
    special = formats.resolve_specials(decoded)
    if special is not None:
        return special_word(special, out_fmt)
    terms = [to_term(d, spec) for d in decoded]
    return normalize_round(eval_tree(terms, config, spec), out_fmt, mode, spec=spec)
