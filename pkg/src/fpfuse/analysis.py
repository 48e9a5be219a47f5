"""Accuracy and structural-cost sweeps across tree configurations.

A sweep fixes a format and term count, walks a grid of accumulator
loss-policy/guard-width cells, and evaluates every tree configuration
on the same random vectors.  Accuracy is measured in representable-step
(ulp) distance against the exact dyadic oracle; agreement is measured
against the flat single-node tree, which is bit-identical to the serial
align-then-add baseline.
"""

from __future__ import annotations

import os
import random
import tempfile
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from . import formats
from .core import to_term
from .fixedpoint import AccumulatorSpec, LossPolicy
from .formats import FpClass, FpFormat
from .oracle import ExactSum, exact_sum, round_exact, ulp_distance
from .rounding import RoundingMode, normalize_round
from .tree import CostReport, TreeConfig, enumerate_configs, eval_tree, structural_report

# ── input vector generation ─────────────────────────────────────────────


def random_finite_word(rng: random.Random, fmt: FpFormat) -> int:
    """Uniformly random bit pattern, rejecting Inf/NaN encodings."""
    while True:
        word = rng.getrandbits(fmt.width)
        if formats.decode(word, fmt).fp_class not in (FpClass.INF, FpClass.NAN):
            return word


def uniform_vectors(
    rng: random.Random, fmt: FpFormat, n_terms: int, count: int
) -> list[list[int]]:
    return [
        [random_finite_word(rng, fmt) for _ in range(n_terms)] for _ in range(count)
    ]


def normal_vectors(
    rng: random.Random,
    fmt: FpFormat,
    n_terms: int,
    count: int,
    scale: float = 1.0,
) -> list[list[int]]:
    """Gaussian-distributed values, rounded to the nearest format word."""
    return [
        [
            round_exact(ExactSum.from_float(rng.gauss(0.0, scale)), fmt)
            for _ in range(n_terms)
        ]
        for _ in range(count)
    ]


def make_vectors(
    fmt: FpFormat, n_terms: int, count: int, seed: int, source: str = "uniform"
) -> list[list[int]]:
    rng = random.Random(seed)
    if source == "uniform":
        return uniform_vectors(rng, fmt, n_terms, count)
    if source == "normal":
        return normal_vectors(rng, fmt, n_terms, count)
    raise ValueError(f"unknown vector source {source!r}")


# ── accuracy metrics ────────────────────────────────────────────────────


def result_distance(a: int, b: int, fmt: FpFormat) -> int:
    """Ulp distance extended to overflow results.

    Infinities (and the e4m3-style NaN-as-overflow pattern) sit exactly
    one magnitude step above the largest finite word, so the plain
    sign-magnitude rank already orders them; this simply skips the
    finite-only guard of ``ulp_distance``.
    """
    if a == b:
        return 0
    half = 1 << (fmt.width - 1)
    ra = -(a & (half - 1)) if a & half else a & (half - 1)
    rb = -(b & (half - 1)) if b & half else b & (half - 1)
    return abs(ra - rb)


# ── the sweep itself ────────────────────────────────────────────────────


@dataclass(frozen=True)
class SweepResult:
    """Accuracy and structural cost of one (cell, config) pair."""

    fmt_name: str
    n_terms: int
    config: str
    depth: int
    policy: str
    guard_bits: int
    samples: int
    max_ulp: int
    mean_ulp: float
    mismatch_vs_flat: float
    cost: CostReport


def sweep(
    fmt: FpFormat,
    n_terms: int,
    cells: Sequence[tuple[LossPolicy, int]],
    samples: int = 1000,
    seed: int = 0,
    source: str = "uniform",
    mode: RoundingMode = RoundingMode.NEAREST_EVEN,
    out_fmt: Optional[FpFormat] = None,
    vectors: Optional[list[list[int]]] = None,
) -> list[SweepResult]:
    """Evaluate every tree config of ``n_terms`` over a grid of
    accumulator cells, against shared random vectors.

    ``cells`` pairs a loss policy with a guard width; the guard entry of
    a lossless cell is ignored because the policy fixes it.  Rows come
    out cell-major, then config in ``enumerate_configs`` order, so a
    fixed seed yields byte-identical reports.
    """
    if vectors is None:
        vectors = make_vectors(fmt, n_terms, samples, seed, source)
    else:
        samples = len(vectors)
    if not vectors:
        raise ValueError("sweep needs at least one vector")
    out = fmt if out_fmt is None else out_fmt
    fmt_name = formats.format_name(fmt)
    reference = [round_exact(exact_sum(v, fmt), out, mode) for v in vectors]
    configs = enumerate_configs(n_terms)
    flat = TreeConfig((n_terms,))

    results = []
    for policy, guard in cells:
        spec = AccumulatorSpec.for_format(fmt, n_terms, policy, guard)
        term_vecs = [
            [to_term(formats.decode(w, fmt), spec) for w in v] for v in vectors
        ]
        flat_words = [
            normalize_round(eval_tree(tv, flat, spec), out, mode, spec=spec)
            for tv in term_vecs
        ]
        for config in configs:
            total_ulp = 0
            max_ulp = 0
            mismatches = 0
            for tv, ref_word, flat_word in zip(term_vecs, reference, flat_words):
                word = normalize_round(
                    eval_tree(tv, config, spec), out, mode, spec=spec
                )
                d = result_distance(word, ref_word, out)
                total_ulp += d
                if d > max_ulp:
                    max_ulp = d
                if word != flat_word:
                    mismatches += 1
            results.append(
                SweepResult(
                    fmt_name=fmt_name,
                    n_terms=n_terms,
                    config=config.name,
                    depth=config.depth,
                    policy=spec.loss_policy.value,
                    guard_bits=spec.guard_bits,
                    samples=samples,
                    max_ulp=max_ulp,
                    mean_ulp=total_ulp / samples,
                    mismatch_vs_flat=mismatches / samples,
                    cost=structural_report(config, fmt, spec),
                )
            )
    return results


# ── reporting ───────────────────────────────────────────────────────────

CSV_COLUMNS = (
    "format",
    "n_terms",
    "config",
    "depth",
    "policy",
    "guard_bits",
    "samples",
    "max_ulp",
    "mean_ulp",
    "mismatch_vs_flat",
    "nodes",
    "comparators",
    "shifters",
    "adder_inputs",
    "shifter_width",
)


def _row(r: SweepResult) -> tuple[str, ...]:
    return (
        r.fmt_name,
        str(r.n_terms),
        r.config,
        str(r.depth),
        r.policy,
        str(r.guard_bits),
        str(r.samples),
        str(r.max_ulp),
        f"{r.mean_ulp:.6f}",
        f"{r.mismatch_vs_flat:.6f}",
        str(r.cost.nodes),
        str(r.cost.comparators),
        str(r.cost.shifters),
        str(r.cost.adder_inputs),
        str(r.cost.shifter_width),
    )


def write_csv(
    results: Iterable[SweepResult], path: str, meta: Optional[dict] = None
) -> None:
    """Write sweep rows as CSV, atomically and with fixed newlines."""
    lines = []
    if meta:
        pairs = " ".join(f"{k}={v}" for k, v in meta.items())
        lines.append(f"# fpfuse sweep {pairs}")
    lines.append(",".join(CSV_COLUMNS))
    lines.extend(",".join(_row(r)) for r in results)
    payload = "\n".join(lines) + "\n"
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp_path = tempfile.mkstemp(dir=directory, prefix=".fpfuse-", suffix=".csv")
    try:
        with os.fdopen(fd, "w", newline="") as handle:
            handle.write(payload)
        os.replace(tmp_path, path)
    except BaseException:
        os.unlink(tmp_path)
        raise


def format_table(results: Sequence[SweepResult]) -> str:
    """Column-aligned text rendering of sweep rows."""
    rows = [CSV_COLUMNS] + [_row(r) for r in results]
    widths = [max(len(row[i]) for row in rows) for i in range(len(CSV_COLUMNS))]
    return "\n".join(
        "  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip()
        for row in rows
    )
