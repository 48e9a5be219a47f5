"""Two's-complement fixed-point accumulator arithmetic.

Accumulator values are plain Python ints interpreted as signed
fixed-point numbers of a fixed bit width, paired with an optional
sticky flag that remembers whether any nonzero bit was ever shifted
out.  Python ints give arithmetic right shift with sign extension for
free, including the clamp-to-sign behaviour for shift distances at or
beyond the register width.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple, Optional


class LossPolicy(Enum):
    """What happens to bits that fall off the low end of a right shift."""

    TRUNCATE = "truncate"  # dropped bits vanish (floor semantics)
    STICKY = "sticky"      # dropped bits OR into a sticky flag
    LOSSLESS = "lossless"  # enough guard bits that nothing may drop


@dataclass(frozen=True)
class AccumulatorSpec:
    """Width recipe for the shared accumulator of an n-term sum.

    The signed width is ``1 + ceil(log2 n) + 1 + man_bits + guard_bits``:
    a sign bit, carry headroom for n addends, the significand's integer
    bit, its fraction bits, and ``guard_bits`` extra fraction bits that
    catch right-shifted-out precision.

    ``bias`` records the exponent bias of the operand format so that
    a biased maximum exponent carried next to the accumulator can be
    mapped back to a true scale when the result is rounded.
    """

    n_terms: int
    man_bits: int
    guard_bits: int = 0
    loss_policy: LossPolicy = LossPolicy.TRUNCATE
    bias: int = 0

    def __post_init__(self) -> None:
        if self.n_terms < 1:
            raise ValueError("n_terms must be positive")
        if self.man_bits < 1:
            raise ValueError("man_bits must be positive")
        if self.guard_bits < 0:
            raise ValueError("guard_bits must be non-negative")

    @classmethod
    def for_format(
        cls,
        fmt,
        n_terms: int,
        loss_policy: LossPolicy = LossPolicy.TRUNCATE,
        guard_bits: int = 0,
    ) -> "AccumulatorSpec":
        """Size an accumulator for ``n_terms`` operands of format ``fmt``.

        Under ``LOSSLESS`` the guard region is forced to the full
        exponent range ``2**exp_bits - 1``, which is the largest
        alignment shift any operand can see; no smaller guard can
        promise that every dropped bit is zero.
        """
        if loss_policy is LossPolicy.LOSSLESS:
            guard_bits = (1 << fmt.exp_bits) - 1
        return cls(n_terms, fmt.man_bits, guard_bits, loss_policy, fmt.bias)

    @property
    def headroom_bits(self) -> int:
        """Carry bits needed so n same-sign maximal addends cannot wrap."""
        return (self.n_terms - 1).bit_length()

    @property
    def width(self) -> int:
        return 1 + self.headroom_bits + 1 + self.man_bits + self.guard_bits

    @property
    def min_value(self) -> int:
        return -(1 << (self.width - 1))

    @property
    def max_value(self) -> int:
        return (1 << (self.width - 1)) - 1


class FixedVal(NamedTuple):
    """A signed accumulator value plus its sticky history."""

    value: int
    sticky: bool = False


def asr(x: FixedVal, distance: int, spec: AccumulatorSpec) -> FixedVal:
    """Arithmetic right shift under the spec's loss policy.

    Shifting by the register width or more leaves only sign bits, which
    Python's ``>>`` on a negative int models exactly.  A negative
    distance is a caller bug, not a data condition.
    """
    assert distance >= 0, "alignment distances are never negative"
    if distance == 0:
        return x
    value, sticky = x
    policy = spec.loss_policy
    if policy is not LossPolicy.TRUNCATE:
        dropped = value & ((1 << distance) - 1)
        if policy is LossPolicy.STICKY:
            sticky = sticky or dropped != 0
        else:
            assert dropped == 0, "lossless accumulator dropped nonzero bits"
    return FixedVal(value >> distance, sticky)


def add(a: FixedVal, b: FixedVal, spec: AccumulatorSpec) -> FixedVal:
    """Sum two accumulator values; the result must fit the signed width."""
    total = a.value + b.value
    assert spec.min_value <= total <= spec.max_value, "accumulator overflow"
    return FixedVal(total, a.sticky or b.sticky)


def in_range(value: int, spec: AccumulatorSpec) -> bool:
    return spec.min_value <= value <= spec.max_value
