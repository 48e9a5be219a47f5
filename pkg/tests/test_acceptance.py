"""End-to-end acceptance checks for the fused multi-term adder.

Each test exercises one shipping requirement at its full stated size and
prints a single ``acceptance criterion N: PASS/FAIL - detail`` line that
stays visible under pytest's capture, then asserts.  A failing check
therefore still reports the numbers it measured.
"""

from __future__ import annotations

import pytest

from conftest import BUILTIN_NAMES, seeded
from fpfuse.analysis import random_finite_word, result_distance
from fpfuse.cli import main
from fpfuse.core import online_sequential, op_combine, serial_baseline, to_term
from fpfuse.fixedpoint import AccumulatorSpec, FixedVal, LossPolicy, asr
from fpfuse.formats import FpClass, builtin_format, decode
from fpfuse.oracle import exact_sum, round_exact
from fpfuse.rounding import fused_sum, normalize_round
from fpfuse.tree import TreeConfig, enumerate_configs, eval_tree, parse_config, structural_report

LOSSLESS = LossPolicy.LOSSLESS
STICKY = LossPolicy.STICKY
TRUNCATE = LossPolicy.TRUNCATE


def _report(capsys: pytest.CaptureFixture, num: int, ok: bool, detail: str) -> None:
    with capsys.disabled():
        print(f"acceptance criterion {num}: {'PASS' if ok else 'FAIL'} - {detail}")


def _vectors(tag: str, fmt_name: str, n_terms: int, count: int) -> list[list[int]]:
    fmt = builtin_format(fmt_name)
    rng = seeded(tag, fmt_name, n_terms)
    return [
        [random_finite_word(rng, fmt) for _ in range(n_terms)]
        for _ in range(count)
    ]


# ── criterion 1: online, serial, and every tree agree bit-for-bit ───────


def test_criterion_1_reduction_order_equivalence(capsys):
    sizes = (4, 8, 16, 32, 64)
    per_cell = 10_000
    checked = 0
    for name in BUILTIN_NAMES:
        fmt = builtin_format(name)
        for n in sizes:
            spec = AccumulatorSpec.for_format(fmt, n, LOSSLESS)
            configs = enumerate_configs(n)
            for vec in _vectors("acceptance-1", name, n, per_cell):
                terms = [to_term(decode(w, fmt), spec) for w in vec]
                ref = serial_baseline(terms, spec)
                ref_word = normalize_round(ref, fmt, spec=spec)
                assert online_sequential(terms, spec) == ref
                for cfg in configs:
                    got = eval_tree(terms, cfg, spec)
                    assert got == ref, (name, n, cfg.name, vec)
                    assert normalize_round(got, fmt, spec=spec) == ref_word
                checked += 2 + len(configs)
    _report(
        capsys, 1, True,
        f"{checked} exact-mode reductions bit-identical to the serial "
        f"baseline over {len(BUILTIN_NAMES)} formats, N in {sizes}",
    )


# ── criterion 2: the align-and-add operator is associative ──────────────


def test_criterion_2_operator_associativity(capsys):
    trials = 100_000
    for name in BUILTIN_NAMES:
        fmt = builtin_format(name)
        spec = AccumulatorSpec.for_format(fmt, 8, LOSSLESS)
        rng = seeded("acceptance-2", name)

        def partial():
            t = to_term(decode(random_finite_word(rng, fmt), fmt), spec)
            if rng.random() < 0.5:
                u = to_term(decode(random_finite_word(rng, fmt), fmt), spec)
                return op_combine(t, u, spec)
            return t

        for _ in range(trials):
            a, b, c = partial(), partial(), partial()
            left = op_combine(op_combine(a, b, spec), c, spec)
            right = op_combine(a, op_combine(b, c, spec), spec)
            assert left == right, (name, a, b, c)
    _report(
        capsys, 2, True,
        f"{trials} random triples per format combine identically "
        f"in either association",
    )


# ── criterion 3: exact mode rounds like the arbitrary-precision oracle ──


def test_criterion_3_correct_rounding(capsys):
    per_cell = 10_000
    cells = {4: parse_config("2-2"), 16: parse_config("4-2-2")}
    checked = 0
    for name in BUILTIN_NAMES:
        fmt = builtin_format(name)
        for n, cfg in cells.items():
            spec = AccumulatorSpec.for_format(fmt, n, LOSSLESS)
            for vec in _vectors("acceptance-3", name, n, per_cell):
                want = round_exact(exact_sum(vec, fmt), fmt)
                assert fused_sum(vec, fmt, cfg, spec) == want, (name, n, vec)
                checked += 1

    e4m3 = builtin_format("e4m3")
    pair = parse_config("2")
    spec = AccumulatorSpec.for_format(e4m3, 2, LOSSLESS)
    nan_words = {0x7F, 0xFF}
    for a in range(256):
        for b in range(256):
            if a in nan_words or b in nan_words:
                want = e4m3.nan_word()
            else:
                want = round_exact(exact_sum([a, b], e4m3), e4m3)
            assert fused_sum([a, b], e4m3, pair, spec) == want, (a, b)
            checked += 1
    _report(
        capsys, 3, True,
        f"{checked} fused sums equal the correctly rounded exact sum "
        f"(incl. all 65536 two-term e4m3 pairs)",
    )


# ── criterion 4: the flat single-node tree is the serial baseline ───────


def test_criterion_4_flat_tree_matches_serial(capsys):
    sizes = (4, 32)
    per_cell = 10_000
    checked = 0
    for name in BUILTIN_NAMES:
        fmt = builtin_format(name)
        guards = sorted({0, 3, fmt.man_bits})
        modes = [(LOSSLESS, 0)]
        modes += [(p, f) for p in (TRUNCATE, STICKY) for f in guards]
        for n in sizes:
            flat = TreeConfig((n,))
            decoded = [
                [decode(w, fmt) for w in vec]
                for vec in _vectors("acceptance-4", name, n, per_cell)
            ]
            for policy, guard in modes:
                spec = AccumulatorSpec.for_format(fmt, n, policy, guard)
                for ops in decoded:
                    terms = [to_term(d, spec) for d in ops]
                    assert eval_tree(terms, flat, spec) == serial_baseline(
                        terms, spec
                    ), (name, n, policy, guard)
                    checked += 1
    _report(
        capsys, 4, True,
        f"{checked} flat-tree reductions bit-identical to the serial "
        f"baseline across lossless/truncate/sticky at every guard width",
    )


# ── criterion 5: alignment shifts compose ───────────────────────────────


def test_criterion_5_shift_composition(capsys):
    spec = AccumulatorSpec(1, 16, 4, STICKY)
    max_total = 20
    checked = 0
    for raw in range(-(1 << 15), 1 << 15):
        x = FixedVal(raw)
        direct = [asr(x, s, spec) for s in range(max_total + 1)]
        for a in range(max_total + 1):
            y = direct[a]
            for b in range(max_total + 1 - a):
                assert asr(y, b, spec) == direct[a + b]
                checked += 1
    _report(
        capsys, 5, True,
        f"{checked} two-step shifts of every 16-bit value match the "
        f"single shift, sticky included",
    )


# ── criterion 6: structural counts and config enumeration ───────────────


def test_criterion_6_structural_counts(capsys):
    fmt = builtin_format("e4m3")
    spec = AccumulatorSpec.for_format(fmt, 8, LOSSLESS)
    full = structural_report(parse_config("2-2-2"), fmt, spec)
    assert (full.depth, full.nodes) == (3, 7)
    hybrid = structural_report(parse_config("4-2"), fmt, spec)
    assert (hybrid.depth, hybrid.nodes) == (2, 3)

    names32 = {c.name for c in enumerate_configs(32)}
    assert {"2-2-2-2-2", "8-2-2", "4-4-2"} <= names32
    assert len(enumerate_configs(8)) == 4
    _report(
        capsys, 6, True,
        "2-2-2 is depth 3 / 7 nodes, 4-2 is depth 2 / 3 nodes; "
        "enumeration yields the named 32-term configs and 4 8-term ones",
    )


# ── criterion 7: truncation drift bound and guard-width monotonicity ────


def test_criterion_7_truncation_drift(capsys):
    sizes = (4, 8, 16, 32)
    bound_vectors = 10_000
    mono_vectors = 2_000
    violations: list[tuple[str, int, str, int, int]] = []
    mono_bad = 0
    cells = 0
    for name in BUILTIN_NAMES:
        fmt = builtin_format(name)
        guard_grid = (0, fmt.man_bits, fmt.man_bits + 8)
        for n in sizes:
            vecs = _vectors("acceptance-7", name, n, bound_vectors)
            oracle = [round_exact(exact_sum(v, fmt), fmt) for v in vecs]
            spec = AccumulatorSpec.for_format(fmt, n, TRUNCATE, fmt.man_bits)
            for cfg in enumerate_configs(n):
                cells += 1
                bound = 2 + cfg.depth
                max_ulp = 0
                for vec, want in zip(vecs, oracle):
                    got = fused_sum(vec, fmt, cfg, spec)
                    err = result_distance(got, want, fmt)
                    if err > max_ulp:
                        max_ulp = err
                if max_ulp > bound:
                    violations.append((name, n, cfg.name, max_ulp, bound))

                errs = []
                for guard in guard_grid:
                    g_spec = AccumulatorSpec.for_format(fmt, n, TRUNCATE, guard)
                    errs.append([
                        result_distance(fused_sum(v, fmt, cfg, g_spec), w, fmt)
                        for v, w in zip(vecs[:mono_vectors], oracle[:mono_vectors])
                    ])
                for coarse, fine in zip(errs, errs[1:]):
                    mono_bad += sum(f > c for c, f in zip(coarse, fine))

    worst = max(violations, key=lambda v: v[3] - v[4], default=None)
    detail = (
        f"drift bound 2+depth exceeded in {len(violations)}/{cells} "
        f"(format, N, config) cells"
    )
    if worst:
        detail += (
            f"; worst {worst[0]} N={worst[1]} config {worst[2]}: "
            f"max {worst[3]} ULP > bound {worst[4]}"
        )
    detail += f"; error monotone in guard bits: {mono_bad} violations"
    ok = not violations and mono_bad == 0
    _report(capsys, 7, ok, detail)
    assert mono_bad == 0
    table = "\n".join(
        f"  {name} N={n} config {cfg}: max {ulp} ULP > bound {bound}"
        for name, n, cfg, ulp, bound in violations
    )
    assert not violations, f"truncation drift exceeds 2+depth ULP:\n{table}"


# ── criterion 8: special values dominate correctly ──────────────────────


def _expected_pair(fmt, a: int, b: int) -> int:
    ops = [decode(w, fmt) for w in (a, b)]
    if any(o.fp_class is FpClass.NAN for o in ops):
        return fmt.nan_word()
    infs = {o.sign for o in ops if o.fp_class is FpClass.INF}
    if len(infs) == 2:
        return fmt.nan_word()
    if infs:
        return fmt.inf_word(negative=bool(infs.pop()))
    return round_exact(exact_sum([a, b], fmt), fmt)


def test_criterion_8_special_values(capsys):
    pair = parse_config("2")
    checked = 0
    for name in ("e4m3", "e5m2"):
        fmt = builtin_format(name)
        spec = AccumulatorSpec.for_format(fmt, 2, LOSSLESS)
        for a in range(256):
            for b in range(256):
                got = fused_sum([a, b], fmt, pair, spec)
                assert got == _expected_pair(fmt, a, b), (name, a, b)
                checked += 1

    n = 16
    trials = 2_000
    for name in BUILTIN_NAMES:
        fmt = builtin_format(name)
        spec = AccumulatorSpec.for_format(fmt, n, LOSSLESS)
        cfg = parse_config("4-2-2")
        rng = seeded("acceptance-8", name)
        cases = ["nan"] if not fmt.has_inf else ["nan", "clash", "pos", "neg"]
        for _ in range(trials):
            vec = [random_finite_word(rng, fmt) for _ in range(n)]
            kind = rng.choice(cases)
            slots = rng.sample(range(n), rng.randint(1, 3))
            if kind == "nan":
                for s in slots:
                    vec[s] = fmt.nan_word()
                if fmt.has_inf and rng.random() < 0.5:
                    free = [i for i in range(n) if i not in slots]
                    vec[rng.choice(free)] = fmt.inf_word()
                want = fmt.nan_word()
            elif kind == "clash":
                vec[slots[0]] = fmt.inf_word()
                vec[(slots[0] + 1) % n] = fmt.inf_word(negative=True)
                want = fmt.nan_word()
            else:
                negative = kind == "neg"
                for s in slots:
                    vec[s] = fmt.inf_word(negative)
                want = fmt.inf_word(negative)
            assert fused_sum(vec, fmt, cfg, spec) == want, (name, kind, vec)
            checked += 1
    _report(
        capsys, 8, True,
        f"{checked} cases: NaN dominates, opposing infinities cancel to "
        f"NaN, single-sign infinity passes through",
    )


# ── criterion 9: the sweep command is deterministic ─────────────────────


def test_criterion_9_sweep_determinism(capsys, tmp_path):
    outs = []
    for stem in ("first", "second"):
        path = tmp_path / f"{stem}.csv"
        code = main([
            "sweep", "--fmt", "e4m3", "--n", "8", "--samples", "300",
            "--seed", "7", "--modes", "truncate,sticky",
            "--guards", "0,3", "--csv", str(path),
        ])
        assert code == 0
        outs.append(path.read_bytes())
    assert outs[0] and outs[0] == outs[1]
    rows = outs[0].decode().strip().splitlines()
    assert len(rows) == 2 + 4 * 4  # meta line, header, 4 configs x 4 cells
    _report(
        capsys, 9, True,
        f"two seeded sweep runs wrote byte-identical CSVs "
        f"({len(outs[0])} bytes, {len(rows) - 2} data rows)",
    )
