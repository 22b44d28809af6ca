"""
Information-theoretic filter feature selection over a partitioned in-process runtime.
"""

from .core import (
    DENSE,
    SPARSE,
    ColumnStore,
    ConfigError,
    CriterionKind,
    DataValidationError,
    ItfsError,
    RowDataset,
    SelectionResult,
    SparseRecord,
)
from .engine import LocalRuntime, PartitionedCollection
from .columnar import columnar_transform, sparse_columnar_transform
from .infotheory import MiCmiPair, compute_mutual_info, entropy
from .selector import FeatureSelector, select
from .oracle import oracle_cmi, oracle_mi, oracle_score, oracle_select

__all__ = [
    "DENSE",
    "SPARSE",
    "ColumnStore",
    "ConfigError",
    "CriterionKind",
    "DataValidationError",
    "ItfsError",
    "RowDataset",
    "SelectionResult",
    "SparseRecord",
    "LocalRuntime",
    "PartitionedCollection",
    "columnar_transform",
    "sparse_columnar_transform",
    "MiCmiPair",
    "compute_mutual_info",
    "entropy",
    "FeatureSelector",
    "select",
    "oracle_cmi",
    "oracle_mi",
    "oracle_score",
    "oracle_select",
]
