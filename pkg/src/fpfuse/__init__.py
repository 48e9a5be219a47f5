"""Bit-accurate model of multi-term fused floating-point addition.

The package models the full datapath of an N-operand floating-point
adder that aligns every operand into one wide fixed-point accumulator
and rounds exactly once: parameterized formats, the align-and-add
combine operator, serial and online evaluation orders, mixed-radix
reduction trees, terminal rounding, an exact dyadic oracle, and
accuracy/cost sweep tooling.
"""

from .core import (
    PartialSum,
    online_sequential,
    op_combine,
    op_combine_radix,
    serial_baseline,
    to_term,
)
from .fixedpoint import AccumulatorSpec, FixedVal, LossPolicy, add, asr
from .formats import (
    DecodedFp,
    FpClass,
    FpFormat,
    SpecialResult,
    SpecialsPolicy,
    SubnormalPolicy,
    builtin_format,
    builtin_names,
    decode,
    encode,
    format_name,
    parse_format,
    resolve_specials,
    value_of,
)
from .oracle import ExactSum, exact_sum, round_exact, round_fraction, ulp_distance
from .rounding import RoundingMode, fused_sum, normalize_round
from .tree import (
    CostReport,
    TreeConfig,
    enumerate_configs,
    eval_tree,
    parse_config,
    structural_report,
)

__version__ = "0.1.0"

__all__ = [
    "AccumulatorSpec",
    "CostReport",
    "DecodedFp",
    "ExactSum",
    "FixedVal",
    "FpClass",
    "FpFormat",
    "LossPolicy",
    "PartialSum",
    "RoundingMode",
    "SpecialResult",
    "SpecialsPolicy",
    "SubnormalPolicy",
    "TreeConfig",
    "add",
    "asr",
    "builtin_format",
    "builtin_names",
    "decode",
    "encode",
    "enumerate_configs",
    "eval_tree",
    "exact_sum",
    "format_name",
    "fused_sum",
    "normalize_round",
    "online_sequential",
    "op_combine",
    "op_combine_radix",
    "parse_config",
    "parse_format",
    "resolve_specials",
    "round_exact",
    "round_fraction",
    "serial_baseline",
    "structural_report",
    "to_term",
    "ulp_distance",
    "value_of",
]
