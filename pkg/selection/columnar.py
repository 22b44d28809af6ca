"""
Row-major to columnar transformations (dense blocks and sparse feature vectors).
"""

import logging
from collections.abc import Sequence

import numpy as np

from .core import (
    DENSE,
    SPARSE,
    ColumnStore,
    DataValidationError,
    FeatureBlock,
    RowDataset,
    SparseFeatureVector,
    SparseRecord,
    as_integer_array,
)
from .engine import LocalRuntime, PartitionedCollection, split_evenly

logger = logging.getLogger(__name__)


def clamp_npart(npart: int, n: int) -> int:
    """Clamp to ``[1, 2 * (n + 1)]`` so each feature yields at most two histograms."""
    clamped = max(1, min(npart, 2 * (n + 1)))
    if clamped != npart:
        logger.warning(f"npart={npart} clamped to {clamped} for {n + 1} columns")
    return clamped


def columnar_transform(
    data: RowDataset,
    npart: int,
    runtime: LocalRuntime | None = None,
    row_partitions: int | None = None,
) -> ColumnStore:
    """Transpose each row partition into feature blocks and sort them by feature key.

    Every column, the class included, yields one :class:`FeatureBlock` per row
    partition. Blocks are then range-partitioned by feature into ``npart``
    partitions.
    """
    runtime = runtime or LocalRuntime()
    npart = clamp_npart(npart, data.n)
    row_partitions = row_partitions or runtime.default_row_partitions
    row_partitions = max(1, min(row_partitions, data.m))

    rows = PartitionedCollection(tuple(split_evenly(data.rows, row_partitions)))
    block_lengths = tuple(len(part) for part in rows.partitions)

    def transpose(index, part):
        matrix = np.ascontiguousarray(np.asarray(part).T)
        matrix.setflags(write=False)
        return [(k, FeatureBlock(k, index, matrix[k])) for k in range(matrix.shape[0])]

    emitted = runtime.map_partitions(rows, transpose, with_index=True)
    sorted_blocks = runtime.sort_by_key(emitted, npart)
    partitions = tuple(tuple(block for _, block in part) for part in sorted_blocks.partitions)

    maxima = runtime.reduce_by_key(
        runtime.map_partitions(
            sorted_blocks,
            lambda part: [(k, int(b.values.max())) for k, b in part if len(b.values)],
        ),
        max,
    )
    cardinalities = np.array([maxima[k] + 1 for k in range(data.width)], dtype=np.int64)
    cardinalities.setflags(write=False)

    logger.info(
        f"columnar transform: {data.m}x{data.width} into {len(emitted)} blocks "
        f"over {npart} partitions"
    )
    return ColumnStore(
        layout=DENSE,
        partitions=partitions,
        cardinalities=cardinalities,
        m=data.m,
        n=data.n,
        class_index=data.class_index,
        block_lengths=block_lengths,
    )


def _vectorize(feature: int, chunks: list[tuple[np.ndarray, np.ndarray]], m: int) -> SparseFeatureVector:
    if chunks:
        indices = np.concatenate([c[0] for c in chunks])
        values = np.concatenate([c[1] for c in chunks])
        order = np.argsort(indices, kind="stable")
        indices, values = indices[order], values[order]
    else:
        indices = np.empty(0, dtype=np.int64)
        values = np.empty(0, dtype=np.int64)
    if len(indices) and np.any(np.diff(indices) == 0):
        dup = indices[np.flatnonzero(np.diff(indices) == 0)[0]]
        raise DataValidationError(f"duplicate entry for instance {dup}, feature {feature}")
    if len(indices) and (indices[0] < 0 or indices[-1] >= m):
        raise DataValidationError(f"instance index {indices[-1]} >= m={m} in feature {feature}")
    keep = values != 0
    indices, values = indices[keep], values[keep]
    indices.setflags(write=False)
    values.setflags(write=False)
    return SparseFeatureVector(feature, indices, values)


def sparse_columnar_transform(
    records: Sequence[SparseRecord],
    labels: np.ndarray,
    n_features: int,
    npart: int,
    runtime: LocalRuntime | None = None,
) -> ColumnStore:
    """Group sparse ``(feature, (instance, value))`` tuples into one vector per feature.

    The dense class vector becomes feature ``n_features`` (the last key).
    Features absent from every record get an empty vector.
    """
    runtime = runtime or LocalRuntime()
    labels = as_integer_array(labels, "labels")
    m = len(labels)
    if m < 1 or n_features < 1:
        raise DataValidationError("sparse data needs at least one instance and one feature")
    npart = clamp_npart(npart, n_features)

    def emit(part):
        if not part:
            return []
        features = np.concatenate([np.asarray(r.features, dtype=np.int64) for r in part])
        if not len(features):
            return []
        values = as_integer_array(np.concatenate([np.asarray(r.values) for r in part]))
        instances = np.concatenate(
            [np.full(len(r.features), r.index, dtype=np.int64) for r in part]
        )
        if len(features) and (features.min() < 0 or features.max() >= n_features):
            raise DataValidationError(f"feature index outside 0..{n_features - 1}")
        order = np.argsort(features, kind="stable")
        features, values, instances = features[order], values[order], instances[order]
        keys, starts = np.unique(features, return_index=True)
        ends = np.append(starts[1:], len(features))
        return [
            (int(k), (instances[s:e], values[s:e])) for k, s, e in zip(keys, starts, ends, strict=True)
        ]

    record_parts = PartitionedCollection.from_items(
        records, max(1, min(runtime.default_row_partitions, len(records) or 1))
    )
    grouped = runtime.group_by_key(runtime.map_partitions(record_parts, emit), npart)
    vectors = runtime.map_partitions(
        grouped, lambda part: [(k, _vectorize(k, chunks, m)) for k, chunks in part]
    )
    by_feature = dict(vectors.collect())

    nz = np.flatnonzero(labels)
    by_feature[n_features] = _vectorize(n_features, [(nz, labels[nz])], m)
    for k in range(n_features):
        if k not in by_feature:
            by_feature[k] = _vectorize(k, [], m)

    keyed = PartitionedCollection.from_items(sorted(by_feature.items()), 1)
    partitions = tuple(
        tuple(v for _, v in part) for part in runtime.sort_by_key(keyed, npart).partitions
    )
    cardinalities = np.array(
        [int(by_feature[k].values.max()) + 1 if by_feature[k].nnz else 1
         for k in range(n_features + 1)],
        dtype=np.int64,
    )
    cardinalities.setflags(write=False)

    logger.info(
        f"sparse columnar transform: {m} instances, {n_features} features, "
        f"{sum(v.nnz for v in by_feature.values())} non-zeros over {npart} partitions"
    )
    return ColumnStore(
        layout=SPARSE,
        partitions=partitions,
        cardinalities=cardinalities,
        m=m,
        n=n_features,
        class_index=n_features,
    )
