"""
Tests for synthetic data generation and the timing sweep.
"""

import logging

import numpy as np
import pandas as pd
import pytest

from benchmark import BENCH_COLUMNS, make_synthetic, run_bench, time_cell, write_bench_csv
from selection import ConfigError, CriterionKind, ItfsError


class TestMakeSynthetic:
    """Test cases for make_synthetic."""

    def test_shape_and_range(self):
        data = make_synthetic(300, 12, cardinality=5, seed=3)
        assert data.m == 300
        assert data.n == 12
        assert data.rows[:, :-1].max() < 5
        assert set(np.unique(data.labels)) <= {0, 1}

    def test_seed_is_reproducible(self):
        a = make_synthetic(100, 6, seed=7)
        b = make_synthetic(100, 6, seed=7)
        assert np.array_equal(a.rows, b.rows)

    def test_density_controls_zeros(self):
        data = make_synthetic(2000, 40, density=0.1, seed=1)
        # Informative columns are denser; the rest follow the requested density.
        noise = data.rows[:, 5:-1]
        assert np.count_nonzero(noise) / noise.size == pytest.approx(0.1, abs=0.02)

    @pytest.mark.parametrize("kwargs", [
        {"m": 0, "n": 5},
        {"m": 10, "n": 5, "cardinality": 1},
        {"m": 10, "n": 5, "density": 0.0},
    ])
    def test_invalid_parameters(self, kwargs):
        with pytest.raises(ConfigError):
            make_synthetic(**kwargs)


class TestRunBench:
    """Test cases for run_bench."""

    def test_workers_sweep_grid_shape(self):
        frame = run_bench([200], 8, [3], [1, 2, 4, 8], kind="mrmr")
        assert list(frame.columns) == BENCH_COLUMNS
        for phase in ("transform", "relevance", "redundancy", "total"):
            rows = frame[frame["phase"] == phase]
            assert sorted(rows["workers"]) == [1, 2, 4, 8]
        assert (frame["milliseconds"] >= 0).all()
        assert frame.attrs["failed"] == []

    def test_compare_sequential_adds_oracle_phase(self):
        frame = run_bench([100], 5, [2], [1], compare_sequential=True)
        assert sorted(frame["phase"]) == ["oracle", "redundancy", "relevance", "total", "transform"]

    def test_sparse_layout(self):
        frame = run_bench([150], 6, [2], [2], layout="sparse", density=0.2)
        assert set(frame["phase"]) == {"transform", "relevance", "redundancy", "total"}

    def test_failed_cell_does_not_stop_sweep(self, caplog):
        with caplog.at_level(logging.ERROR):
            frame = run_bench([100], 5, [2], [0, 1])
        assert set(frame["workers"]) == {1}
        assert frame.attrs["failed"][0]["workers"] == 0
        assert "failed" in caplog.text

    def test_empty_grid(self):
        with pytest.raises(ConfigError):
            run_bench([], 5, [2], [1])

    def test_write_csv(self, tmp_path):
        frame = run_bench([100], 5, [1, 2], [1])
        path = tmp_path / "bench.csv"
        write_bench_csv(frame, path)
        loaded = pd.read_csv(path)
        assert list(loaded.columns) == BENCH_COLUMNS
        assert sorted(set(loaded["ns"])) == [1, 2]


class TestTimeCell:
    """Test cases for time_cell."""

    def test_phases_and_npart(self):
        data = make_synthetic(120, 6, seed=2)
        phases = time_cell(data, CriterionKind.JMI, 3, workers=2, npart=3)
        assert phases["npart"] == 3
        assert phases["total"] >= phases["transform"]

    def test_errors_are_itfs_errors(self):
        data = make_synthetic(50, 4, seed=2)
        with pytest.raises(ItfsError):
            time_cell(data, CriterionKind.JMI, 0, workers=1)


@pytest.mark.slow
class TestBenchShape:
    """Smoke tests of timing trends across a sweep."""

    def test_total_grows_with_ns(self):
        frame = run_bench([20_000], 120, [10, 25, 50, 100], [4])
        totals = frame[frame["phase"] == "total"].sort_values("ns")["milliseconds"].tolist()
        assert totals == sorted(totals)
