"""
Synthetic data generation and timing sweeps over data size, worker count and ns.
"""

import itertools
import logging
import time
from collections.abc import Sequence

import numpy as np
import pandas as pd
from tqdm import tqdm

from selection import (
    DENSE,
    SPARSE,
    ConfigError,
    CriterionKind,
    FeatureSelector,
    ItfsError,
    LocalRuntime,
    RowDataset,
    columnar_transform,
    oracle_select,
    sparse_columnar_transform,
)

logger = logging.getLogger(__name__)

BENCH_COLUMNS = ["m", "n", "ns", "npart", "workers", "phase", "milliseconds"]
INFORMATIVE_FEATURES = 5


def make_synthetic(
    m: int, n: int, cardinality: int = 4, density: float = 1.0, seed: int = 0
) -> RowDataset:
    """Random ``m x n`` table plus a binary class; the first few features track the class.

    ``density`` is the fraction of non-zero input cells.
    """
    if m < 1 or n < 1:
        raise ConfigError(f"synthetic data needs m >= 1 and n >= 1, got {m}x{n}")
    if cardinality < 2:
        raise ConfigError(f"cardinality must be >= 2, got {cardinality}")
    if not 0.0 < density <= 1.0:
        raise ConfigError(f"density must be in (0, 1], got {density}")

    rng = np.random.default_rng(seed)
    labels = rng.integers(0, 2, size=m)
    table = rng.integers(1, cardinality, size=(m, n))
    table[rng.random((m, n)) >= density] = 0
    for k in range(min(n, INFORMATIVE_FEATURES)):
        agree = rng.random(m) < 0.75
        table[agree, k] = (labels[agree] + k) % cardinality
    return RowDataset.from_rows(np.column_stack([table, labels]))


def _transform(data: RowDataset, npart: int, runtime: LocalRuntime, layout: str):
    if layout == SPARSE:
        records, labels = data.to_sparse()
        return sparse_columnar_transform(records, labels, data.n, npart, runtime)
    return columnar_transform(data, npart, runtime)


def time_cell(
    data: RowDataset,
    kind: CriterionKind,
    ns: int,
    workers: int,
    npart: int | None = None,
    layout: str = DENSE,
    compare_sequential: bool = False,
) -> dict[str, float]:
    """Wall time in ms of each phase of one selection run."""
    runtime = LocalRuntime(workers)
    start = time.perf_counter()
    store = _transform(data, npart or runtime.default_row_partitions, runtime, layout)
    transform_ms = (time.perf_counter() - start) * 1000.0

    selector = FeatureSelector(store, runtime)
    selector.select(kind, ns)
    phases = {
        "transform": transform_ms,
        "relevance": sum(selector.timings["relevance"]),
        "redundancy": sum(selector.timings["redundancy"]),
        "total": (time.perf_counter() - start) * 1000.0,
        "npart": store.npart,
    }
    if compare_sequential:
        start = time.perf_counter()
        oracle_select(data, kind, ns)
        phases["oracle"] = (time.perf_counter() - start) * 1000.0
    return phases


def run_bench(
    m_values: Sequence[int],
    n: int,
    ns_values: Sequence[int],
    workers_values: Sequence[int],
    kind: CriterionKind | str = CriterionKind.MRMR,
    npart: int | None = None,
    cardinality: int = 4,
    density: float = 1.0,
    seed: int = 0,
    layout: str = DENSE,
    compare_sequential: bool = False,
    progress: bool = False,
) -> pd.DataFrame:
    """Time every (m, workers, ns) cell; failed cells are logged and skipped.

    The returned frame has one row per (cell, phase) and lists the failed
    cells in ``frame.attrs["failed"]``.
    """
    kind = CriterionKind.parse(kind)
    if layout not in (DENSE, SPARSE):
        raise ConfigError(f"unknown layout '{layout}'")
    grid = list(itertools.product(m_values, workers_values, ns_values))
    if not grid:
        raise ConfigError("bench sweep grid is empty")

    datasets: dict[int, RowDataset] = {}
    rows, failed = [], []
    for m, workers, ns in tqdm(grid, desc="Benchmarking", disable=not progress):
        try:
            if m not in datasets:
                datasets[m] = make_synthetic(m, n, cardinality, density, seed)
            phases = time_cell(datasets[m], kind, ns, workers, npart, layout, compare_sequential)
        except (MemoryError, ItfsError) as e:
            logger.error(f"bench cell m={m} workers={workers} ns={ns} failed: {e}")
            failed.append({"m": m, "workers": workers, "ns": ns, "error": str(e)})
            continue
        cell_npart = phases.pop("npart")
        for phase, ms in phases.items():
            rows.append((m, n, ns, cell_npart, workers, phase, ms))

    frame = pd.DataFrame(rows, columns=BENCH_COLUMNS)
    frame.attrs["failed"] = failed
    return frame


def write_bench_csv(frame: pd.DataFrame, path) -> None:
    frame.to_csv(path, index=False, float_format="%.3f")
