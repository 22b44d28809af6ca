"""
End-to-end properties of the partitioned selector against the sequential reference.
"""

import math
import time

import numpy as np
import pytest

from benchmark import make_synthetic
from selection import (
    CriterionKind,
    LocalRuntime,
    RowDataset,
    columnar_transform,
    oracle_score,
    oracle_select,
    select,
    sparse_columnar_transform,
)
from selection.columnar import clamp_npart
from selection.core import DENSE
from selection.infotheory import get_histograms, sparse_histograms
from tests.conftest import random_dataset

ALL_KINDS = list(CriterionKind)


def assert_same_selection(result, reference, data, kind, tol=1e-10):
    """Same features in the same order, scores within ``tol``.

    A divergence is accepted only at a genuine tie: the reference scores the
    feature picked here within ``tol`` of its own pick, after which the runs
    are no longer comparable.
    """
    assert len(result) == len(reference)
    for rank, ((feature, score), (ref_feature, ref_score)) in enumerate(
        zip(result.selected, reference.selected)
    ):
        assert score == pytest.approx(ref_score, abs=tol)
        if feature != ref_feature:
            prefix = reference.features[:rank]
            assert oracle_score(data, kind, prefix, feature) == pytest.approx(ref_score, abs=tol)
            break


def datasets(count, seed, n_range=(5, 16), m_range=(50, 400)):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        n = int(rng.integers(n_range[0], n_range[1]))
        m = int(rng.integers(m_range[0], m_range[1]))
        yield random_dataset(rng, m, n, max_card=int(rng.integers(2, 9)), n_classes=int(rng.integers(2, 4)))


def all_cubes(store, j, runtime):
    """Cubes of every other input feature against ``j``, conditioned on the class unless ``j`` is it."""
    y = store.class_index
    jcol = runtime.broadcast(j, store.lookup(j), store.block_lengths)
    build = get_histograms if store.layout == DENSE else sparse_histograms
    if j == y:
        return build(store, j, jcol, runtime=runtime)
    ycol = runtime.broadcast(y, store.lookup(y), store.block_lengths)
    return build(store, j, jcol, y, ycol, runtime=runtime)


def check_against_oracle(kind, data, runtime):
    store = columnar_transform(data, 3, runtime)
    for ns in (1, 3, data.n):
        result = select(store, kind, ns, runtime=runtime)
        assert_same_selection(result, oracle_select(data, kind, ns), data, kind)


class TestOracleEquivalence:
    """Selection sequences match the from-scratch reference."""

    @pytest.mark.parametrize("kind", ALL_KINDS)
    def test_random_datasets(self, kind):
        runtime = LocalRuntime(workers=2)
        for data in datasets(6, seed=ALL_KINDS.index(kind)):
            check_against_oracle(kind, data, runtime)

    @pytest.mark.slow
    @pytest.mark.parametrize("kind", ALL_KINDS)
    def test_fifty_random_datasets_full_range(self, kind):
        runtime = LocalRuntime(workers=4)
        for data in datasets(50, seed=100 + ALL_KINDS.index(kind), n_range=(5, 61), m_range=(50, 2001)):
            check_against_oracle(kind, data, runtime)

    def test_synthetic_bench_dataset(self):
        data = make_synthetic(1000, 12, seed=5)
        store = columnar_transform(data, 4, LocalRuntime(workers=2))
        assert_same_selection(select(store, "mrmr", 5), oracle_select(data, "mrmr", 5), data, "mrmr")


class TestInvariance:
    """Output does not depend on how the work is split."""

    @pytest.mark.parametrize("kind", ["jmi", "cmim", "icap"])
    def test_partitions_and_workers(self, make_dataset, kind):
        data = make_dataset(m=150, n=9, max_card=5)
        reference = None
        for npart in (1, 2, 7, 2 * (data.n + 1)):
            for workers in (1, 2, 8):
                runtime = LocalRuntime(workers)
                store = columnar_transform(data, npart, runtime)
                result = select(store, kind, 5, runtime=runtime)
                reference = reference or result
                # Bit-identical, not just close.
                assert result.selected == reference.selected
        assert clamp_npart(2 * (data.n + 1), data.n) == 2 * (data.n + 1)

    @pytest.mark.parametrize("density", [0.005, 0.05, 0.5])
    def test_sparse_equals_dense(self, density):
        runtime = LocalRuntime(workers=2)
        rng = np.random.default_rng(int(density * 1000))
        for _ in range(7):
            m, n = int(rng.integers(100, 500)), int(rng.integers(5, 15))
            table = rng.integers(1, 4, size=(m, n)) * (rng.random((m, n)) < density)
            labels = rng.integers(0, 2, size=m)
            table[:, 0] = np.where(rng.random(m) < 0.5, labels, table[:, 0])
            data = RowDataset.from_rows(np.column_stack([table, labels]))
            records, sparse_labels = data.to_sparse()

            dense_store = columnar_transform(data, 4, runtime)
            sparse_store = sparse_columnar_transform(records, sparse_labels, n, 4, runtime)
            dense = select(dense_store, "jmi", 6, runtime=runtime)
            sparse = select(sparse_store, "jmi", 6, runtime=runtime)
            assert dense.features == sparse.features
            assert dense.scores == pytest.approx(sparse.scores, abs=1e-12)

            for j in [dense_store.class_index, *dense.features]:
                dense_cubes = all_cubes(dense_store, j, runtime)
                sparse_cubes = all_cubes(sparse_store, j, runtime)
                assert sorted(dense_cubes) == sorted(sparse_cubes)
                for k, cube in dense_cubes.items():
                    assert np.array_equal(cube.counts, sparse_cubes[k].counts)

    def test_cmim_equals_if(self):
        runtime = LocalRuntime(workers=2)
        for data in datasets(5, seed=11):
            store = columnar_transform(data, 3, runtime)
            assert select(store, "cmim", data.n, runtime=runtime).selected == \
                select(store, "if", data.n, runtime=runtime).selected

    def test_log_base(self):
        runtime = LocalRuntime(workers=2)
        for data in datasets(5, seed=17):
            store = columnar_transform(data, 3, runtime)
            for kind in ALL_KINDS:
                nats = select(store, kind, 4, runtime=runtime)
                bits = select(store, kind, 4, runtime=runtime, log_base=2)
                assert nats.features == bits.features
                assert bits.scores == pytest.approx([s / math.log(2) for s in nats.scores], abs=1e-10)

    def test_first_pick_is_most_relevant_for_every_kind(self):
        runtime = LocalRuntime(workers=1)
        for data in datasets(4, seed=23):
            store = columnar_transform(data, 2, runtime)
            firsts = {select(store, kind, 1, runtime=runtime).features[0] for kind in ALL_KINDS}
            assert len(firsts) == 1


@pytest.mark.slow
class TestScaling:
    """Smoke tests of the runtime shape on larger synthetic data."""

    @staticmethod
    def timed(data, workers):
        runtime = LocalRuntime(workers)
        start = time.perf_counter()
        store = columnar_transform(data, runtime.default_row_partitions, runtime)
        select(store, "mrmr", 10, runtime=runtime)
        return time.perf_counter() - start

    def test_growth_in_m_is_sub_quadratic(self):
        times = [self.timed(make_synthetic(m, 100, seed=0), workers=4) for m in (100_000, 200_000, 400_000)]
        assert times[1] / times[0] <= 3.0
        assert times[2] / times[1] <= 3.0

    def test_workers_speed_up_selection(self):
        data = make_synthetic(400_000, 100, seed=0)
        assert self.timed(data, workers=8) <= 0.6 * self.timed(data, workers=1)
