"""Parameterized binary floating-point formats.

An ``FpFormat`` describes a sign/exponent/mantissa bit layout together with
the conventions for special values and subnormals.  Words are plain Python
ints holding the raw bit pattern.  Decoding splits a word into sign,
biased exponent and full significand (implicit bit made explicit);
encoding packs a decoded record back into a word.

Builtin formats cover the usual suspects: fp32, bf16, and the 8-bit
e4m3 / e5m2 / e6m1 family.  e4m3 follows the finite-heavy convention:
no infinities, and the only NaN is the all-ones pattern.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import NamedTuple, Optional, Sequence


class SpecialsPolicy(Enum):
    """How the top of the exponent range is interpreted."""

    IEEE_LIKE = "ieee"      # reserved encodings for Inf/NaN
    FINITE_ONLY = "finite"  # every bit pattern is a finite number


class SubnormalPolicy(Enum):
    SUPPORTED = "subnormal"
    FLUSH_TO_ZERO = "ftz"


class FpClass(Enum):
    ZERO = "zero"
    SUBNORMAL = "subnormal"
    NORMAL = "normal"
    INF = "inf"
    NAN = "nan"


_FINITE_CLASSES = frozenset((FpClass.ZERO, FpClass.SUBNORMAL, FpClass.NORMAL))


@dataclass(frozen=True)
class FpFormat:
    """Bit layout and value conventions for one floating-point format.

    ``bias`` defaults to the balanced choice ``2**(exp_bits-1) - 1``.

    ``has_inf`` is only consulted under ``IEEE_LIKE``.  When True the
    all-ones exponent encodes Inf (zero fraction) and NaN (nonzero
    fraction) as usual.  When False the format follows the e4m3
    convention: there are no infinities, the single pattern with
    all-ones exponent *and* all-ones fraction is NaN, and every other
    all-ones-exponent word is an ordinary normal number.
    """

    exp_bits: int
    man_bits: int
    bias: Optional[int] = None
    specials: SpecialsPolicy = SpecialsPolicy.IEEE_LIKE
    subnormals: SubnormalPolicy = SubnormalPolicy.SUPPORTED
    has_inf: bool = True

    def __post_init__(self) -> None:
        if self.bias is None:
            object.__setattr__(self, "bias", (1 << (self.exp_bits - 1)) - 1)
        if self.exp_bits < 2:
            raise ValueError("exp_bits must be at least 2")
        if self.man_bits < 1:
            raise ValueError("man_bits must be at least 1")
        if self.width > 64:
            raise ValueError("total width above 64 bits is not supported")
        if not 0 <= self.bias < (1 << self.exp_bits):
            raise ValueError("bias out of range for exponent width")

    # ── derived layout constants ────────────────────────────────────────

    @property
    def width(self) -> int:
        return 1 + self.exp_bits + self.man_bits

    @property
    def exp_field_max(self) -> int:
        """Largest raw value the exponent field can hold."""
        return (1 << self.exp_bits) - 1

    @property
    def min_exp(self) -> int:
        """Unbiased exponent of normal numbers with biased exponent 1."""
        return 1 - self.bias

    @property
    def max_finite_exp_field(self) -> int:
        """Largest biased exponent that can belong to a finite number."""
        if self.specials is SpecialsPolicy.IEEE_LIKE and self.has_inf:
            return self.exp_field_max - 1
        return self.exp_field_max

    @property
    def max_finite_fraction(self) -> int:
        """Fraction field of the largest-magnitude finite number."""
        if self.specials is SpecialsPolicy.IEEE_LIKE and not self.has_inf:
            # all-ones exponent with all-ones fraction is reserved for NaN
            return (1 << self.man_bits) - 2
        return (1 << self.man_bits) - 1

    # ── special-value bit patterns ──────────────────────────────────────

    def zero_word(self, negative: bool = False) -> int:
        return (1 << (self.width - 1)) if negative else 0

    def inf_word(self, negative: bool = False) -> int:
        if self.specials is not SpecialsPolicy.IEEE_LIKE or not self.has_inf:
            raise ValueError("format has no infinity encoding")
        word = self.exp_field_max << self.man_bits
        return word | (1 << (self.width - 1)) if negative else word

    def nan_word(self) -> int:
        """The canonical quiet NaN pattern (sign 0)."""
        if self.specials is not SpecialsPolicy.IEEE_LIKE:
            raise ValueError("format has no NaN encoding")
        if self.has_inf:
            # max exponent, fraction MSB set
            return (self.exp_field_max << self.man_bits) | (1 << (self.man_bits - 1))
        return (1 << (self.width - 1)) - 1  # all ones below the sign bit

    def max_finite_word(self, negative: bool = False) -> int:
        word = (self.max_finite_exp_field << self.man_bits) | self.max_finite_fraction
        return word | (1 << (self.width - 1)) if negative else word

    def overflow_word(self, negative: bool = False) -> int:
        """Result pattern for a magnitude too large to represent.

        IEEE-like formats with infinities saturate to a signed Inf;
        the no-Inf convention maps overflow to the NaN pattern with the
        result's sign bit, keeping word order aligned with value order;
        finite-only formats clamp to the signed largest finite value.
        """
        if self.specials is SpecialsPolicy.IEEE_LIKE:
            if self.has_inf:
                return self.inf_word(negative)
            word = self.nan_word()
            return word | (1 << (self.width - 1)) if negative else word
        return self.max_finite_word(negative)

    def has_nan(self) -> bool:
        return self.specials is SpecialsPolicy.IEEE_LIKE


class DecodedFp(NamedTuple):
    """One unpacked floating-point operand.

    ``significand`` carries the full fixed-point mantissa: for normal
    numbers the implicit leading one is already ORed in, so the value of
    a finite operand is::

        (-1)**sign * significand * 2**(biased_exp_eff - bias - man_bits)

    where ``biased_exp_eff`` is ``biased_exp`` except that subnormals
    (stored exponent 0) use exponent 1 with no implicit bit.  To keep a
    single value formula, ``decode`` reports subnormals with
    ``biased_exp == 1`` and the leading significand bit clear.
    """

    sign: int            # 0 positive, 1 negative
    biased_exp: int
    significand: int
    fp_class: FpClass

    @property
    def is_finite(self) -> bool:
        return self.fp_class in _FINITE_CLASSES


def decode(word: int, fmt: FpFormat) -> DecodedFp:
    """Split a raw word into sign / exponent / significand and classify it."""
    if not 0 <= word < (1 << fmt.width):
        raise ValueError(f"word 0x{word:X} does not fit in {fmt.width} bits")
    man_bits = fmt.man_bits
    sign = word >> (fmt.width - 1)
    exp_field = (word >> man_bits) & fmt.exp_field_max
    fraction = word & ((1 << man_bits) - 1)

    if fmt.specials is SpecialsPolicy.IEEE_LIKE and exp_field == fmt.exp_field_max:
        if fmt.has_inf:
            if fraction == 0:
                return DecodedFp(sign, exp_field, 0, FpClass.INF)
            return DecodedFp(sign, exp_field, fraction, FpClass.NAN)
        if fraction == (1 << man_bits) - 1:
            return DecodedFp(sign, exp_field, fraction, FpClass.NAN)
        # remaining all-ones-exponent patterns are plain normals

    if exp_field == 0:
        if fraction == 0:
            return DecodedFp(sign, 0, 0, FpClass.ZERO)
        if fmt.subnormals is SubnormalPolicy.FLUSH_TO_ZERO:
            return DecodedFp(sign, 0, 0, FpClass.ZERO)
        # subnormals share the scale of the lowest normal binade
        return DecodedFp(sign, 1, fraction, FpClass.SUBNORMAL)
    return DecodedFp(sign, exp_field, fraction | (1 << man_bits), FpClass.NORMAL)


def encode(value: DecodedFp, fmt: FpFormat) -> int:
    """Pack a decoded record back into a raw word.

    NaNs collapse to the canonical quiet pattern.  Finite inputs must
    already be normalized to the shape ``decode`` produces.
    """
    sign_bit = (value.sign & 1) << (fmt.width - 1)
    man_bits = fmt.man_bits
    if value.fp_class is FpClass.NAN:
        return fmt.nan_word()
    if value.fp_class is FpClass.INF:
        return fmt.inf_word(bool(value.sign))
    if value.fp_class is FpClass.ZERO:
        return sign_bit
    if value.fp_class is FpClass.SUBNORMAL:
        if value.biased_exp != 1 or not 0 < value.significand < (1 << man_bits):
            raise ValueError("malformed subnormal record")
        return sign_bit | value.significand
    # normal: significand carries the implicit bit
    if not (1 << man_bits) <= value.significand < (1 << (man_bits + 1)):
        raise ValueError("normal significand out of range")
    if not 1 <= value.biased_exp <= fmt.max_finite_exp_field:
        raise ValueError("normal exponent out of range")
    return sign_bit | (value.biased_exp << man_bits) | (value.significand & ((1 << man_bits) - 1))


def value_of(value: DecodedFp, fmt: FpFormat) -> Fraction:
    """Exact rational value of a finite decoded operand."""
    if not value.is_finite:
        raise ValueError(f"{value.fp_class.value} has no finite value")
    scale = value.biased_exp - fmt.bias - fmt.man_bits
    mag = Fraction(value.significand) * Fraction(2) ** scale
    return -mag if value.sign else mag


class SpecialResult(Enum):
    """Outcome forced by special operands before any accumulation."""

    NAN = "nan"
    POS_INF = "+inf"
    NEG_INF = "-inf"


def resolve_specials(operands: Sequence[DecodedFp]) -> Optional[SpecialResult]:
    """Decide whether special inputs short-circuit a multi-term sum.

    Any NaN wins; mixing +Inf and -Inf is invalid and yields NaN; a
    single infinity sign dominates everything finite; otherwise the sum
    is an ordinary finite reduction and None is returned.
    """
    pos_inf = neg_inf = False
    for op in operands:
        if op.fp_class is FpClass.NAN:
            return SpecialResult.NAN
        if op.fp_class is FpClass.INF:
            if op.sign:
                neg_inf = True
            else:
                pos_inf = True
    if pos_inf and neg_inf:
        return SpecialResult.NAN
    if pos_inf:
        return SpecialResult.POS_INF
    if neg_inf:
        return SpecialResult.NEG_INF
    return None


# ── builtin formats and the format grammar ──────────────────────────────

_BUILTINS = {
    "fp32": FpFormat(8, 23),
    "bf16": FpFormat(8, 7),
    "e4m3": FpFormat(4, 3, has_inf=False),
    "e5m2": FpFormat(5, 2),
    "e6m1": FpFormat(6, 1),
}

_SPEC_RE = re.compile(r"^e(\d+)m(\d+)(?:b(\d+))?$")


def builtin_format(name: str) -> FpFormat:
    try:
        return _BUILTINS[name.lower()]
    except KeyError:
        raise ValueError(
            f"unknown format {name!r}; builtins are {', '.join(sorted(_BUILTINS))}"
        ) from None


def builtin_names() -> tuple[str, ...]:
    return tuple(sorted(_BUILTINS))


def parse_format(text: str) -> FpFormat:
    """Build a format from a builtin name or an ``e<E>m<M>`` descriptor.

    The descriptor grammar is ``e<E>m<M>[b<BIAS>]`` with optional
    comma-separated flags ``finite`` (no reserved encodings) and ``ftz``
    (flush subnormals to zero), e.g. ``e5m10``, ``e4m3b8``,
    ``e3m4,finite,ftz``.  Builtin names take precedence, so ``e4m3``
    means the no-Inf convention; spell out ``e4m3b7`` for a fully
    IEEE-like 4-bit-exponent format.
    """
    parts = [p.strip() for p in text.strip().lower().split(",")]
    head, flags = parts[0], parts[1:]
    if head in _BUILTINS:
        base = _BUILTINS[head]
        exp_bits, man_bits, bias = base.exp_bits, base.man_bits, base.bias
        specials, subnormals, has_inf = base.specials, base.subnormals, base.has_inf
    else:
        match = _SPEC_RE.match(head)
        if match is None:
            raise ValueError(f"cannot parse format {text!r}")
        exp_bits, man_bits = int(match.group(1)), int(match.group(2))
        bias = int(match.group(3)) if match.group(3) else None
        specials, subnormals, has_inf = (
            SpecialsPolicy.IEEE_LIKE, SubnormalPolicy.SUPPORTED, True)
    for flag in flags:
        if flag == "finite":
            specials = SpecialsPolicy.FINITE_ONLY
        elif flag == "ftz":
            subnormals = SubnormalPolicy.FLUSH_TO_ZERO
        else:
            raise ValueError(f"unknown format flag {flag!r}")
    return FpFormat(exp_bits, man_bits, bias, specials, subnormals, has_inf)


def format_name(fmt: FpFormat) -> str:
    """Short descriptor for reports; builtins print their common name."""
    for name, builtin in _BUILTINS.items():
        if builtin == fmt:
            return name
    name = f"e{fmt.exp_bits}m{fmt.man_bits}"
    if fmt.bias != (1 << (fmt.exp_bits - 1)) - 1:
        name += f"b{fmt.bias}"
    if fmt.specials is SpecialsPolicy.FINITE_ONLY:
        name += ",finite"
    if fmt.subnormals is SubnormalPolicy.FLUSH_TO_ZERO:
        name += ",ftz"
    return name
