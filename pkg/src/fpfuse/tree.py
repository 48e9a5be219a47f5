"""Mixed-radix reduction trees over the align-and-add combine operator.

A tree configuration is the list of node radices per level, written
leaf-first: ``4-2`` reduces 8 terms with two radix-4 nodes feeding one
radix-2 node, ``2-2-2`` is the full binary tree, and ``8`` is a single
flat node (the serial baseline's shape).  The radices of a valid
configuration multiply to the term count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .core import PartialSum, op_combine_radix
from .fixedpoint import AccumulatorSpec
from .formats import FpFormat


@dataclass(frozen=True)
class TreeConfig:
    """Leaf-first radix schedule of one reduction tree."""

    radices: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.radices:
            raise ValueError("a tree needs at least one level")
        if any(r < 2 for r in self.radices):
            raise ValueError("every radix must be at least 2")
        object.__setattr__(self, "radices", tuple(self.radices))

    @property
    def n_terms(self) -> int:
        return math.prod(self.radices)

    @property
    def depth(self) -> int:
        return len(self.radices)

    @property
    def name(self) -> str:
        return "-".join(str(r) for r in self.radices)

    def __str__(self) -> str:
        return self.name


def parse_config(text: str, n_terms: int | None = None) -> TreeConfig:
    """Parse a ``radix[-radix...]`` spelling.

    When the caller knows the term count, passing it checks that the
    radices multiply to exactly that many leaves.
    """
    try:
        radices = tuple(int(part) for part in text.strip().split("-"))
    except ValueError:
        raise ValueError(f"cannot parse tree config {text!r}") from None
    cfg = TreeConfig(radices)
    if n_terms is not None and cfg.n_terms != n_terms:
        raise ValueError(
            f"config {cfg.name} reduces {cfg.n_terms} terms, expected {n_terms}"
        )
    return cfg


def enumerate_configs(n_terms: int) -> list[TreeConfig]:
    """All ordered factorizations of n_terms into radices >= 2.

    Deepest trees come first; equal depths tie-break lexicographically
    on the radix tuple, so for 8 the order is 2-2-2, 2-4, 4-2, 8.
    """
    if n_terms < 2:
        raise ValueError("need at least two terms to reduce")

    def factorizations(n: int) -> list[tuple[int, ...]]:
        out = [(n,)]
        for r in range(2, n):
            if n % r == 0:
                out.extend((r, *rest) for rest in factorizations(n // r))
        return out

    configs = [TreeConfig(radices) for radices in factorizations(n_terms)]
    configs.sort(key=lambda c: (-c.depth, c.radices))
    return configs


def eval_tree(
    terms: Sequence[PartialSum], config: TreeConfig, spec: AccumulatorSpec
) -> PartialSum:
    """Reduce the terms level by level following the config's radices."""
    if len(terms) != config.n_terms:
        raise ValueError(
            f"config {config.name} expects {config.n_terms} terms, got {len(terms)}"
        )
    level = list(terms)
    for radix in config.radices:
        level = [
            op_combine_radix(level[i : i + radix], spec)
            for i in range(0, len(level), radix)
        ]
    assert len(level) == 1
    return level[0]


@dataclass(frozen=True)
class LevelCost:
    """Hardware inventory of one tree level."""

    radix: int
    nodes: int
    comparators: int     # (radix - 1) per node to find the max exponent
    shifters: int        # one aligner per node input
    adder_inputs: int    # fan-in of the per-node adder, summed over nodes


@dataclass(frozen=True)
class CostReport:
    """Structural cost proxies of a tree, before any gate-level detail."""

    config: str
    depth: int
    nodes: int
    comparators: int
    shifters: int
    adder_inputs: int
    shifter_width: int     # accumulator register width
    comparator_width: int  # exponent field width
    levels: tuple[LevelCost, ...]


def structural_report(
    config: TreeConfig, fmt: FpFormat, spec: AccumulatorSpec
) -> CostReport:
    """Count nodes, exponent comparators, aligners, and adder fan-in."""
    levels = []
    entering = config.n_terms
    for radix in config.radices:
        nodes = entering // radix
        levels.append(
            LevelCost(
                radix=radix,
                nodes=nodes,
                comparators=nodes * (radix - 1),
                shifters=nodes * radix,
                adder_inputs=nodes * radix,
            )
        )
        entering = nodes
    return CostReport(
        config=config.name,
        depth=config.depth,
        nodes=sum(l.nodes for l in levels),
        comparators=sum(l.comparators for l in levels),
        shifters=sum(l.shifters for l in levels),
        adder_inputs=sum(l.adder_inputs for l in levels),
        shifter_width=spec.width,
        comparator_width=fmt.exp_bits,
        levels=tuple(levels),
    )
