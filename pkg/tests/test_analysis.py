"""Sweep mechanics: vector sources, metrics, CSV and table output."""

import csv
import io
import os

import pytest

from fpfuse import FpClass, LossPolicy, RoundingMode, builtin_format, decode, ulp_distance
from fpfuse.analysis import (
    CSV_COLUMNS,
    format_table,
    make_vectors,
    random_finite_word,
    result_distance,
    sweep,
    write_csv,
)

from conftest import seeded

E4M3 = builtin_format("e4m3")
BF16 = builtin_format("bf16")


# ── vector sources ──────────────────────────────────────────────────────


def test_uniform_vectors_are_finite_and_seeded():
    a = make_vectors(E4M3, 6, 50, seed=42, source="uniform")
    b = make_vectors(E4M3, 6, 50, seed=42, source="uniform")
    c = make_vectors(E4M3, 6, 50, seed=43, source="uniform")
    assert a == b
    assert a != c
    assert len(a) == 50 and all(len(v) == 6 for v in a)
    for vector in a:
        for word in vector:
            assert decode(word, E4M3).is_finite


def test_normal_vectors_are_valid_words():
    vectors = make_vectors(BF16, 4, 200, seed=7, source="normal")
    assert vectors == make_vectors(BF16, 4, 200, seed=7, source="normal")
    for vector in vectors:
        for word in vector:
            assert 0 <= word < (1 << 16)
            assert decode(word, BF16).fp_class is not FpClass.NAN


def test_unknown_source_rejected():
    with pytest.raises(ValueError):
        make_vectors(E4M3, 4, 10, seed=0, source="cauchy")


def test_random_finite_word_never_yields_specials():
    rng = seeded("finite-filter")
    e5m2 = builtin_format("e5m2")
    for _ in range(3000):
        word = random_finite_word(rng, e5m2)
        assert decode(word, e5m2).fp_class not in (FpClass.INF, FpClass.NAN)


# ── result distance ─────────────────────────────────────────────────────


def test_result_distance_matches_ulp_for_finite():
    rng = seeded("dist-vs-ulp")
    for _ in range(2000):
        a = random_finite_word(rng, E4M3)
        b = random_finite_word(rng, E4M3)
        assert result_distance(a, b, E4M3) == ulp_distance(a, b, E4M3)


def test_result_distance_handles_overflow_words():
    assert result_distance(0x7F80, 0x7F80, BF16) == 0       # inf vs inf
    assert result_distance(0x7F80, 0x7F7F, BF16) == 1       # inf vs max
    assert result_distance(0x7F, 0x7E, E4M3) == 1           # nan-as-overflow vs max
    assert result_distance(0xFF80, 0x7F80, BF16) == 2 * (0x7F80 & 0x7FFF)


# ── sweep ───────────────────────────────────────────────────────────────


def test_sweep_lossless_rows_are_exact():
    cells = [(LossPolicy.LOSSLESS, 0)]
    rows = sweep(E4M3, 8, cells, samples=300, seed=5)
    assert len(rows) == 4  # one per config of 8
    for row in rows:
        assert row.policy == "lossless"
        assert row.max_ulp == 0
        assert row.mean_ulp == 0.0
        assert row.mismatch_vs_flat == 0.0


def test_sweep_row_order_and_flat_reference():
    cells = [(LossPolicy.LOSSLESS, 0), (LossPolicy.TRUNCATE, 0)]
    rows = sweep(E4M3, 8, cells, samples=100, seed=5)
    assert [r.config for r in rows] == ["2-2-2", "2-4", "4-2", "8"] * 2
    assert [r.policy for r in rows] == ["lossless"] * 4 + ["truncate"] * 4
    for row in rows:
        if row.config == "8":
            assert row.mismatch_vs_flat == 0.0  # the flat tree is the reference
        assert row.samples == 100
        assert row.n_terms == 8
        assert row.cost.config == row.config


def test_sweep_guard_bits_reduce_error_per_config():
    rows0 = sweep(E4M3, 8, [(LossPolicy.TRUNCATE, 0)], samples=400, seed=9)
    rows3 = sweep(E4M3, 8, [(LossPolicy.TRUNCATE, 3)], samples=400, seed=9)
    for r0, r3 in zip(rows0, rows3):
        assert r0.config == r3.config
        assert r3.max_ulp <= r0.max_ulp
        assert r3.mean_ulp <= r0.mean_ulp


def test_sweep_is_deterministic():
    cells = [(LossPolicy.STICKY, 2)]
    assert sweep(E4M3, 4, cells, samples=150, seed=3) == sweep(
        E4M3, 4, cells, samples=150, seed=3
    )


def test_sweep_accepts_explicit_vectors_and_out_fmt():
    vectors = [[0x38, 0x38], [0x7E, 0x7E]]
    fp32 = builtin_format("fp32")
    rows = sweep(
        E4M3, 2, [(LossPolicy.LOSSLESS, 0)], vectors=vectors, out_fmt=fp32
    )
    assert all(r.samples == 2 for r in rows)
    assert all(r.max_ulp == 0 for r in rows)


def test_sweep_rejects_empty():
    with pytest.raises(ValueError):
        sweep(E4M3, 4, [(LossPolicy.LOSSLESS, 0)], vectors=[])


# ── reports ─────────────────────────────────────────────────────────────


def test_write_csv_and_read_back(tmp_path):
    rows = sweep(E4M3, 4, [(LossPolicy.TRUNCATE, 1)], samples=50, seed=2)
    path = tmp_path / "out.csv"
    write_csv(rows, str(path), meta={"seed": 2, "source": "uniform"})
    text = path.read_text()
    assert text.startswith("# fpfuse sweep seed=2 source=uniform\n")
    assert text.endswith("\n")
    body = [line for line in text.splitlines() if not line.startswith("#")]
    parsed = list(csv.reader(io.StringIO("\n".join(body))))
    assert parsed[0] == list(CSV_COLUMNS)
    assert len(parsed) == 1 + len(rows)
    by_name = dict(zip(parsed[0], parsed[1]))
    assert by_name["format"] == "e4m3"
    assert by_name["policy"] == "truncate"
    assert by_name["guard_bits"] == "1"
    # no stray temp files left behind
    assert os.listdir(tmp_path) == ["out.csv"]


def test_write_csv_without_meta(tmp_path):
    rows = sweep(E4M3, 4, [(LossPolicy.LOSSLESS, 0)], samples=20, seed=1)
    path = tmp_path / "bare.csv"
    write_csv(rows, str(path))
    assert path.read_text().splitlines()[0] == ",".join(CSV_COLUMNS)


def test_format_table_is_aligned():
    rows = sweep(E4M3, 4, [(LossPolicy.LOSSLESS, 0)], samples=20, seed=1)
    table = format_table(rows)
    lines = table.splitlines()
    assert lines[0].startswith("format")
    assert len(lines) == 1 + len(rows)
    assert "lossless" in lines[1]
