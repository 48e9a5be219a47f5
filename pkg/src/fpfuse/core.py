"""Align-and-add partial sums for multi-term floating-point addition.

A ``PartialSum`` is the running state of a fused sum: the largest
biased exponent seen so far, and a shared fixed-point accumulator whose
LSB sits ``man_bits + guard_bits`` places below the weight of that
exponent's implicit bit.  Two partial sums combine by shifting both
accumulators right to the larger exponent and adding.  With a lossless
accumulator the combine step is associative and commutative, which is
what lets the sequential recurrence, the serial loop, and any reduction
tree agree bit for bit.
"""

from __future__ import annotations

from typing import NamedTuple, Sequence

from .fixedpoint import AccumulatorSpec, FixedVal, add, asr, in_range
from .formats import DecodedFp

__all__ = [
    "PartialSum",
    "to_term",
    "op_combine",
    "op_combine_radix",
    "serial_baseline",
    "online_sequential",
]


class PartialSum(NamedTuple):
    """Maximum biased exponent plus the aligned accumulator."""

    max_exp: int
    acc: FixedVal

    @property
    def is_identity(self) -> bool:
        return self.max_exp == 0 and self.acc.value == 0


IDENTITY = PartialSum(0, FixedVal(0))


def to_term(operand: DecodedFp, spec: AccumulatorSpec) -> PartialSum:
    """Lift one finite operand into a single-term partial sum.

    The significand lands in the accumulator shifted up by the guard
    width, signed per the operand.  Zeros become the identity element
    so they never drag the maximum exponent around.
    """
    if not operand.is_finite:
        raise ValueError(f"cannot accumulate a {operand.fp_class.value} operand")
    if operand.significand == 0:
        return IDENTITY
    magnitude = operand.significand << spec.guard_bits
    return PartialSum(
        operand.biased_exp,
        FixedVal(-magnitude if operand.sign else magnitude),
    )


def op_combine(a: PartialSum, b: PartialSum, spec: AccumulatorSpec) -> PartialSum:
    """Merge two partial sums at the larger of their exponents."""
    m = a.max_exp if a.max_exp >= b.max_exp else b.max_exp
    return PartialSum(
        m,
        add(asr(a.acc, m - a.max_exp, spec), asr(b.acc, m - b.max_exp, spec), spec),
    )


def op_combine_radix(
    terms: Sequence[PartialSum], spec: AccumulatorSpec
) -> PartialSum:
    """Merge k >= 2 partial sums in one node: one max, k shifts, one add."""
    if len(terms) < 2:
        raise ValueError("a combine node needs at least two inputs")
    m = max(t.max_exp for t in terms)
    total = 0
    sticky = False
    for t in terms:
        shifted = asr(t.acc, m - t.max_exp, spec)
        total += shifted.value
        sticky = sticky or shifted.sticky
    assert in_range(total, spec), "accumulator overflow"
    return PartialSum(m, FixedVal(total, sticky))


def serial_baseline(
    terms: Sequence[PartialSum], spec: AccumulatorSpec
) -> PartialSum:
    """Reference two-pass sum: find the global max exponent, then align
    every term to it and accumulate in input order."""
    if not terms:
        raise ValueError("cannot sum an empty term list")
    m = 0
    for t in terms:
        if t.max_exp > m:
            m = t.max_exp
    acc = FixedVal(0)
    for t in terms:
        acc = add(acc, asr(t.acc, m - t.max_exp, spec), spec)
    return PartialSum(m, acc)


def online_sequential(
    terms: Sequence[PartialSum], spec: AccumulatorSpec
) -> PartialSum:
    """Single-pass sum that tracks the running maximum exponent.

    Each step shifts the accumulator down by how much the maximum grew
    and the incoming term by its distance to the new maximum.  This is
    a left fold of ``op_combine`` from the identity element.
    """
    if not terms:
        raise ValueError("cannot sum an empty term list")
    state = IDENTITY
    for t in terms:
        state = op_combine(state, t, spec)
    return state
