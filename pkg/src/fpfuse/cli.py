"""Command-line workbench for the fused multi-term adder.

Subcommands::

    fpfuse sum      fused-sum hex vectors, one result word per line
    fpfuse oracle   exactly rounded reference sums for the same vectors
    fpfuse verify   cross-check serial / online / every tree config
    fpfuse configs  enumerate tree configurations for a term count
    fpfuse sweep    accuracy + structural cost sweep, table and CSV
    fpfuse decode   unpack hex words
    fpfuse encode   pack decimal values into hex words

Vector files carry one input vector per line as whitespace-separated
hex words (bare or 0x-prefixed); ``#`` starts a comment.  Exit codes:
0 success, 1 verification counterexample, 2 usage or parse errors.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from typing import Iterator, Optional, Sequence, TextIO

from . import analysis, formats, oracle
from .core import online_sequential, serial_baseline, to_term
from .fixedpoint import AccumulatorSpec, LossPolicy
from .formats import FpFormat
from .rounding import RoundingMode, fused_sum, normalize_round, special_word
from .tree import enumerate_configs, eval_tree, parse_config

_LOSS_MODES = {p.value: p for p in LossPolicy}
_ROUND_MODES = {m.value: m for m in RoundingMode}


def _hex_width(fmt: FpFormat) -> int:
    return (fmt.width + 3) // 4


def _read_vectors(
    stream: TextIO, fmt: FpFormat, n_terms: Optional[int] = None
) -> Iterator[tuple[int, list[int]]]:
    """Yield (line number, words) for every non-empty vector line."""
    limit = 1 << fmt.width
    for lineno, raw in enumerate(stream, start=1):
        text = raw.split("#", 1)[0].strip()
        if not text:
            continue
        words = []
        for token in text.split():
            try:
                word = int(token, 16)
            except ValueError:
                raise ValueError(f"line {lineno}: {token!r} is not a hex word") from None
            if not 0 <= word < limit:
                raise ValueError(
                    f"line {lineno}: 0x{word:X} does not fit in {fmt.width} bits"
                )
            words.append(word)
        if n_terms is not None and len(words) != n_terms:
            raise ValueError(
                f"line {lineno}: expected {n_terms} words, got {len(words)}"
            )
        yield lineno, words


def _open_input(path: Optional[str]) -> TextIO:
    if path is None or path == "-":
        return sys.stdin
    return open(path, "r")


# ── subcommands ─────────────────────────────────────────────────────────


def cmd_sum(args: argparse.Namespace) -> int:
    fmt = formats.parse_format(args.fmt)
    out_fmt = formats.parse_format(args.out_fmt) if args.out_fmt else fmt
    config = parse_config(args.config)
    spec = AccumulatorSpec.for_format(fmt, config.n_terms, args.mode, args.guard)
    digits = _hex_width(out_fmt)
    stream = _open_input(args.input)
    try:
        for lineno, words in _read_vectors(stream, fmt, config.n_terms):
            try:
                word = fused_sum(words, fmt, config, spec, args.round, out_fmt)
            except ValueError as exc:
                raise ValueError(f"line {lineno}: {exc}") from None
            print(f"{word:0{digits}X}")
    finally:
        if stream is not sys.stdin:
            stream.close()
    return 0


def cmd_oracle(args: argparse.Namespace) -> int:
    fmt = formats.parse_format(args.fmt)
    out_fmt = formats.parse_format(args.out_fmt) if args.out_fmt else fmt
    digits = _hex_width(out_fmt)
    stream = _open_input(args.input)
    try:
        for lineno, words in _read_vectors(stream, fmt):
            try:
                decoded = [formats.decode(w, fmt) for w in words]
                special = formats.resolve_specials(decoded)
                if special is not None:
                    word = special_word(special, out_fmt)
                else:
                    word = oracle.round_exact(oracle.exact_sum(words, fmt), out_fmt, args.round)
            except ValueError as exc:
                raise ValueError(f"line {lineno}: {exc}") from None
            print(f"{word:0{digits}X}")
    finally:
        if stream is not sys.stdin:
            stream.close()
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    fmt = formats.parse_format(args.fmt)
    n = args.n
    spec = AccumulatorSpec.for_format(fmt, n, args.mode, args.guard)
    configs = enumerate_configs(n)
    vectors = analysis.make_vectors(fmt, n, args.samples, args.seed, args.source)
    digits = _hex_width(fmt)

    if args.mode is not LossPolicy.LOSSLESS:
        results = analysis.sweep(
            fmt, n, [(args.mode, args.guard)], mode=args.round, vectors=vectors
        )
        print(analysis.format_table(results))
        return 0

    for index, vector in enumerate(vectors):
        terms = [to_term(formats.decode(w, fmt), spec) for w in vector]
        reference = serial_baseline(terms, spec)
        ref_word = normalize_round(reference, fmt, args.round, spec=spec)
        candidates = [("online", online_sequential(terms, spec))]
        candidates += [(c.name, eval_tree(terms, c, spec)) for c in configs]
        for label, result in candidates:
            word = normalize_round(result, fmt, args.round, spec=spec)
            if result != reference or word != ref_word:
                hex_words = " ".join(f"{w:0{digits}X}" for w in vector)
                print(f"MISMATCH: vector {index} ({label}): {hex_words}")
                print(f"  serial: exp={reference.max_exp} acc={reference.acc.value:#x}")
                print(f"  {label}: exp={result.max_exp} acc={result.acc.value:#x}")
                return 1
    print(f"OK: {len(configs)} configs × {args.samples} vectors, all bit-equal")
    return 0


def cmd_configs(args: argparse.Namespace) -> int:
    for config in enumerate_configs(args.n):
        print(config.name)
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    fmt = formats.parse_format(args.fmt)
    out_fmt = formats.parse_format(args.out_fmt) if args.out_fmt else fmt
    policies = []
    for name in args.modes.split(","):
        name = name.strip().lower()
        if name not in _LOSS_MODES:
            raise ValueError(f"unknown loss mode {name!r}")
        policies.append(_LOSS_MODES[name])
    guards = [int(g) for g in args.guards.split(",")] if args.guards else [0]

    cells = []
    for policy in policies:
        if policy is LossPolicy.LOSSLESS:
            cells.append((policy, 0))
        else:
            cells.extend((policy, guard) for guard in guards)

    vectors = None
    source = args.source
    if source not in ("uniform", "normal"):
        with open(source, "r") as handle:
            vectors = [words for _, words in _read_vectors(handle, fmt, args.n)]
        source = f"file:{args.source}"

    results = analysis.sweep(
        fmt,
        args.n,
        cells,
        samples=args.samples,
        seed=args.seed,
        source=args.source if vectors is None else "uniform",
        mode=args.round,
        out_fmt=out_fmt,
        vectors=vectors,
    )
    print(analysis.format_table(results))
    if args.csv:
        meta = {
            "format": formats.format_name(fmt),
            "out_format": formats.format_name(out_fmt),
            "n": args.n,
            "samples": args.samples,
            "seed": args.seed,
            "source": source,
            "round": args.round.value,
        }
        analysis.write_csv(results, args.csv, meta)
        print(f"wrote {args.csv}")
    return 0


def cmd_decode(args: argparse.Namespace) -> int:
    fmt = formats.parse_format(args.fmt)
    digits = _hex_width(fmt)
    for token in args.words:
        word = int(token, 16)
        d = formats.decode(word, fmt)
        if d.is_finite:
            value = formats.value_of(d, fmt)
            approx = float(value)
            print(
                f"{word:0{digits}X}  {d.fp_class.value:<9} sign={d.sign} "
                f"exp={d.biased_exp} sig=0x{d.significand:X} value={value} ({approx:g})"
            )
        else:
            print(f"{word:0{digits}X}  {d.fp_class.value:<9} sign={d.sign}")
    return 0


def cmd_encode(args: argparse.Namespace) -> int:
    fmt = formats.parse_format(args.fmt)
    digits = _hex_width(fmt)
    for token in args.values:
        word = oracle.round_fraction(Fraction(token), fmt, args.round)
        print(f"{word:0{digits}X}")
    return 0


# ── argument plumbing ───────────────────────────────────────────────────


def _loss_mode(text: str) -> LossPolicy:
    try:
        return _LOSS_MODES[text.lower()]
    except KeyError:
        raise argparse.ArgumentTypeError(
            f"unknown loss mode {text!r}; choose from {', '.join(_LOSS_MODES)}"
        ) from None


def _round_mode(text: str) -> RoundingMode:
    try:
        return _ROUND_MODES[text.lower()]
    except KeyError:
        raise argparse.ArgumentTypeError(
            f"unknown rounding mode {text!r}; choose from {', '.join(_ROUND_MODES)}"
        ) from None


def _add_common(parser: argparse.ArgumentParser, *, out_fmt: bool = True) -> None:
    parser.add_argument("--fmt", required=True, help="input format (builtin name or e<E>m<M>[b<B>][,finite][,ftz])")
    if out_fmt:
        parser.add_argument("--out-fmt", default=None, help="output format (defaults to --fmt)")
    parser.add_argument("--round", type=_round_mode, default=RoundingMode.NEAREST_EVEN,
                        help="rounding mode: rne (default) or rtz")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fpfuse",
        description="Bit-accurate multi-term fused floating-point addition workbench",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sum", help="fused-sum vector file lines")
    _add_common(p)
    p.add_argument("--config", required=True, help="tree config, e.g. 4-2 or 8")
    p.add_argument("--mode", type=_loss_mode, default=LossPolicy.LOSSLESS,
                   help="accumulator loss mode: lossless (default), truncate, sticky")
    p.add_argument("--guard", type=int, default=0, help="guard bits for lossy modes")
    p.add_argument("input", nargs="?", default=None, help="vector file ('-' or omit for stdin)")
    p.set_defaults(func=cmd_sum)

    p = sub.add_parser("oracle", help="exactly rounded reference sums")
    _add_common(p)
    p.add_argument("input", nargs="?", default=None, help="vector file ('-' or omit for stdin)")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("verify", help="cross-check serial, online, and every config")
    _add_common(p, out_fmt=False)
    p.add_argument("--n", type=int, required=True, help="terms per vector")
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", type=_loss_mode, default=LossPolicy.LOSSLESS)
    p.add_argument("--guard", type=int, default=0)
    p.add_argument("--source", choices=("uniform", "normal"), default="uniform")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("configs", help="enumerate tree configurations")
    p.add_argument("--n", type=int, required=True, help="terms to reduce")
    p.set_defaults(func=cmd_configs)

    p = sub.add_parser("sweep", help="accuracy and structural cost sweep")
    _add_common(p)
    p.add_argument("--n", type=int, required=True, help="terms per vector")
    p.add_argument("--modes", default="lossless,truncate,sticky",
                   help="comma-separated loss modes to sweep")
    p.add_argument("--guards", default="0",
                   help="comma-separated guard widths for lossy modes")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--source", default="uniform",
                   help="uniform, normal, or a vector file path")
    p.add_argument("--csv", default=None, help="also write rows to this CSV path")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("decode", help="unpack hex words")
    p.add_argument("--fmt", required=True)
    p.add_argument("words", nargs="+", help="hex words")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("encode", help="round decimal values into the format")
    p.add_argument("--fmt", required=True)
    p.add_argument("--round", type=_round_mode, default=RoundingMode.NEAREST_EVEN)
    p.add_argument("values", nargs="+", help="decimal or rational values, e.g. 1.5 or 3/2")
    p.set_defaults(func=cmd_encode)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"fpfuse: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"fpfuse: {exc}", file=sys.stderr)
        return 2


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
