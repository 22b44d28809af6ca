"""
Dataset ingestion: dense CSV tables, sparse LibSVM files and equal-width binning.
"""

import logging
from pathlib import Path

import numpy as np
import pandas as pd
import scipy.sparse
from sklearn.datasets import dump_svmlight_file, load_svmlight_file

from selection.core import (
    SPARSE,
    ColumnStore,
    ConfigError,
    DataValidationError,
    RowDataset,
    SparseRecord,
    as_integer_array,
)

logger = logging.getLogger(__name__)


def _is_integral(values: np.ndarray) -> bool:
    return bool(np.all(np.isfinite(values)) and np.all(values == np.floor(values)))


def equal_width_bins(column, bins: int) -> np.ndarray:
    """Bin index ``floor((v - min) / width)`` over the observed range, top edge inclusive.

    A constant column has no width and maps to bin 0.
    """
    if bins < 2:
        raise ConfigError(f"bin count must be >= 2, got {bins}")
    values = np.asarray(column, dtype=np.float64)
    if values.size == 0:
        return np.empty(0, dtype=np.int64)
    if not np.all(np.isfinite(values)):
        raise DataValidationError("cannot bin non-finite values")
    low, high = values.min(), values.max()
    if high == low:
        return np.zeros(len(values), dtype=np.int64)
    width = (high - low) / bins
    index = np.floor((values - low) / width).astype(np.int64)
    return np.minimum(index, bins - 1)


def _read_table(path: Path) -> pd.DataFrame:
    try:
        frame = pd.read_csv(path, header=None, dtype=str, skipinitialspace=True)
    except pd.errors.EmptyDataError:
        raise DataValidationError(f"{path} is empty") from None
    except pd.errors.ParserError as e:
        raise DataValidationError(f"ragged rows in {path}: {e}") from None
    except UnicodeDecodeError as e:
        raise DataValidationError(f"{path} is not valid UTF-8 text: {e.reason}") from None
    except ValueError as e:
        raise DataValidationError(f"cannot parse {path}: {e}") from None

    first = pd.to_numeric(frame.iloc[0], errors="coerce")
    if first.isna().any():
        logger.info(f"treating first row of {path} as a header")
        frame = frame.iloc[1:].reset_index(drop=True)
    if frame.empty:
        raise DataValidationError(f"{path} has a header but no rows")
    if frame.isna().any().any():
        row = int(frame.isna().any(axis=1).to_numpy().argmax())
        raise DataValidationError(f"ragged rows in {path}: row {row} is short")

    numeric = frame.apply(pd.to_numeric, errors="coerce")
    if numeric.isna().any().any():
        row, col = np.argwhere(numeric.isna().to_numpy())[0]
        raise DataValidationError(
            f"non-numeric cell {frame.iat[row, col]!r} at row {row}, column {col} in {path}"
        )
    return numeric


def load_csv(path, label_position: int = -1, bins: int | None = None) -> RowDataset:
    """Load a rectangular numeric CSV; the class sits at ``label_position``.

    Without ``bins`` every cell must be a non-negative integer. With ``bins``
    input columns holding non-integer values are discretized by
    :func:`equal_width_bins`; integer columns and the class pass through.
    """
    path = Path(path)
    table = _read_table(path).to_numpy(dtype=np.float64)
    width = table.shape[1]
    class_index = label_position + width if label_position < 0 else label_position
    if not 0 <= class_index < width:
        raise ConfigError(f"label position {label_position} outside a {width}-column table")

    if bins is not None:
        for k in range(width):
            if k != class_index and not _is_integral(table[:, k]):
                table[:, k] = equal_width_bins(table[:, k], bins)
    data = RowDataset.from_rows(as_integer_array(table, "cells"), class_index=class_index)
    logger.info(f"loaded {path}: {data.m} instances, {data.n} features")
    return data


def _bin_nonzeros(matrix: scipy.sparse.csr_matrix, bins: int) -> scipy.sparse.csr_matrix:
    # Zero stays its own symbol; stored values of non-integer columns land in 1..bins.
    csc = matrix.tocsc()
    for k in range(csc.shape[1]):
        start, end = csc.indptr[k], csc.indptr[k + 1]
        if end > start and not _is_integral(csc.data[start:end]):
            csc.data[start:end] = equal_width_bins(csc.data[start:end], bins) + 1
    return csc.tocsr()


def load_libsvm(
    path, bins: int | None = None, n_features: int | None = None
) -> tuple[list[SparseRecord], np.ndarray, int]:
    """Parse ``label idx:value ...`` lines (1-based, strictly increasing indices).

    Returns the sparse records (0-based feature indices, explicit zeros
    dropped), the class vector mapped to 0-based codes by first occurrence
    and the feature count.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"no such file: {path}")
    try:
        matrix, raw_labels = load_svmlight_file(
            str(path), n_features=n_features, zero_based=False, dtype=np.float64
        )
    except ValueError as e:
        raise DataValidationError(f"cannot parse {path}: {e}") from None

    matrix = scipy.sparse.csr_matrix(matrix)
    matrix.eliminate_zeros()
    matrix.sort_indices()
    if bins is not None:
        matrix = _bin_nonzeros(matrix, bins)
    values = as_integer_array(matrix.data, "feature values")
    labels, uniques = pd.factorize(raw_labels)
    logger.info(f"{path}: {len(uniques)} classes mapped by first occurrence")

    records = []
    for i in range(matrix.shape[0]):
        start, end = matrix.indptr[i], matrix.indptr[i + 1]
        records.append(
            SparseRecord(
                index=i,
                features=matrix.indices[start:end].astype(np.int64),
                values=values[start:end],
            )
        )
    return records, labels.astype(np.int64), int(matrix.shape[1])


def write_libsvm(path, records, labels, n_features: int) -> None:
    """Serialize sparse records with 1-based feature indices."""
    labels = as_integer_array(labels, "labels")
    if len(records) != len(labels):
        raise DataValidationError(f"{len(records)} records but {len(labels)} labels")
    rows, cols, data = [], [], []
    for record in records:
        rows.extend([record.index] * len(record.features))
        cols.extend(int(f) for f in record.features)
        data.extend(int(v) for v in record.values)
    matrix = scipy.sparse.csr_matrix(
        (np.asarray(data, dtype=np.int64), (rows, cols)), shape=(len(records), n_features)
    )
    dump_svmlight_file(matrix, labels, str(path), zero_based=False)


def dataset_summary(store: ColumnStore) -> dict:
    """Instances, features, classes, non-zero density and input cardinality range."""
    if store.layout == SPARSE:
        nonzero = sum(v.nnz for v in store.items() if v.feature != store.class_index)
    else:
        nonzero = sum(
            int(np.count_nonzero(b.values)) for b in store.items() if b.feature != store.class_index
        )
    inputs = store.cardinalities[store.features]
    return {
        "layout": store.layout,
        "instances": store.m,
        "features": store.n,
        "classes": int(store.cardinalities[store.class_index]),
        "density": nonzero / (store.m * store.n),
        "min_cardinality": int(inputs.min()),
        "max_cardinality": int(inputs.max()),
    }
