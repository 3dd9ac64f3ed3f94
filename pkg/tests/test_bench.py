import numpy as np
import pytest

from graceperiod.bench import (
    BenchConfig,
    CSV_HEADER,
    DISTRIBUTIONS,
    run_bench,
    rows_to_csv,
)


def small(**overrides):
    defaults = dict(B=2000.0, mu=500.0, trials=20_000, seed=7)
    defaults.update(overrides)
    return BenchConfig(**defaults)


def by_cell(rows):
    return {(r.distribution, r.strategy): r for r in rows}


def test_unknown_names_rejected():
    with pytest.raises(ValueError, match="distribution"):
        BenchConfig(B=10.0, mu=5.0, distributions=("zipf",))
    with pytest.raises(ValueError, match="strategy"):
        BenchConfig(B=10.0, mu=5.0, strategies=("NOPE",))
    with pytest.raises(ValueError, match="trials"):
        BenchConfig(B=10.0, mu=5.0, trials=0)


def test_deterministic_rows():
    a = run_bench(small())
    b = run_bench(small())
    assert a == b
    assert rows_to_csv(a) == rows_to_csv(b)


def test_csv_shape():
    text = rows_to_csv(run_bench(small(trials=100)))
    lines = text.split("\r\n")
    assert lines[0] == CSV_HEADER
    assert text.endswith("\r\n")
    assert len(lines) == 2 + len(DISTRIBUTIONS) * 6  # header + cells + trailing empty
    for line in lines[1:-1]:
        assert len(line.split(",")) == 7


def test_opt_cell_is_unit_ratio():
    rows = by_cell(run_bench(small(trials=5000)))
    for dist in DISTRIBUTIONS:
        assert rows[(dist, "OPT")].ratio == 1.0


def test_high_fixed_cost_matches_theory():
    rows = by_cell(run_bench(small()))
    for dist in DISTRIBUTIONS:
        assert 1.90 <= rows[(dist, "RRW")].ratio <= 2.05
        assert 1.50 <= rows[(dist, "RRA")].ratio <= 1.66
        assert rows[(dist, "RRW(mu)")].ratio < rows[(dist, "RRW")].ratio
        assert rows[(dist, "RRA(mu)")].ratio < rows[(dist, "RRA")].ratio


def test_low_fixed_cost_mean_gives_no_edge():
    rows = by_cell(run_bench(small(B=200.0)))
    for dist in DISTRIBUTIONS:
        assert rows[(dist, "RRW(mu)")].ratio == pytest.approx(
            rows[(dist, "RRW")].ratio, rel=0.05
        )
        assert rows[(dist, "RRA(mu)")].ratio == pytest.approx(
            rows[(dist, "RRA")].ratio, rel=0.05
        )


def test_worst_case_cell():
    rows = by_cell(run_bench(small(distributions=("worst_case_det",), trials=5000)))
    assert rows[("worst_case_det", "DET")].ratio == pytest.approx(3.0)
    assert rows[("worst_case_det", "RRW")].ratio == pytest.approx(2.0, abs=0.05)


def test_stderr_tracks_noise():
    rows = by_cell(run_bench(small(trials=40_000)))
    for dist in DISTRIBUTIONS:
        cell = rows[(dist, "RRW")]
        assert 0.0 < cell.stderr < 0.05
        assert abs(cell.ratio - 2.0) < 6.0 * cell.stderr + 1e-3
