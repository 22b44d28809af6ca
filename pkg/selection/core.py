"""
Domain types shared by the columnar, information-theory and selection modules.
"""

from __future__ import annotations

import math
from collections import Counter
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from enum import Enum

import numpy as np


class ItfsError(Exception):
    """Base class for all feature-selection errors."""


class ConfigError(ItfsError, ValueError):
    """Invalid run parameters (ns, npart, criterion, binning...)."""


class DataValidationError(ItfsError, ValueError):
    """Input data violates the discrete, non-negative integer contract."""


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


def as_integer_array(values, what: str = "values") -> np.ndarray:
    """Coerce ``values`` to an int64 array, rejecting non-integers and negatives."""
    array = np.asarray(values)
    if array.dtype == object:
        raise DataValidationError(f"{what} must be a rectangular numeric table")
    if array.dtype.kind == 'f':
        if not np.all(np.isfinite(array)) or np.any(array != np.floor(array)):
            raise DataValidationError(f"{what} contain non-integer cells; enable binning")
    elif array.dtype.kind not in 'iub':
        raise DataValidationError(f"{what} must be numeric, got dtype {array.dtype}")
    array = array.astype(np.int64)
    if array.size and array.min() < 0:
        raise DataValidationError(f"{what} must be non-negative integers")
    return array


@dataclass(frozen=True, eq=False)
class SparseRecord:
    """One sparse instance: sorted feature indices with their non-zero values."""

    index: int
    features: np.ndarray
    values: np.ndarray


@dataclass(frozen=True, eq=False)
class RowDataset:
    """Dense row-major table of discretized features plus a class column."""

    rows: np.ndarray
    class_index: int

    def __post_init__(self):
        rows = self.rows
        if rows.ndim != 2:
            raise DataValidationError("rows must form a 2-D table")
        m, width = rows.shape
        if m < 1 or width < 2:
            raise DataValidationError(
                f"need at least one instance and one input feature, got {m}x{width}"
            )
        if not 0 <= self.class_index < width:
            raise DataValidationError(f"class index {self.class_index} outside 0..{width - 1}")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]] | np.ndarray, class_index: int = -1) -> RowDataset:
        """Validate and freeze ``rows``; ``class_index`` may be negative (from the end)."""
        if not isinstance(rows, np.ndarray):
            rows = list(rows)
            widths = {len(r) for r in rows}
            if len(widths) > 1:
                raise DataValidationError(f"ragged rows: found widths {sorted(widths)}")
        table = as_integer_array(rows, "rows")
        if table.ndim != 2:
            raise DataValidationError("rows must form a 2-D table")
        if class_index < 0:
            class_index += table.shape[1]
        return cls(rows=_frozen(np.ascontiguousarray(table)), class_index=class_index)

    @classmethod
    def from_sparse(
        cls, records: Sequence[SparseRecord], labels: np.ndarray, n_features: int
    ) -> RowDataset:
        """Densify sparse records; the class becomes the last column."""
        table = np.zeros((len(records), n_features + 1), dtype=np.int64)
        for record in records:
            table[record.index, record.features] = record.values
        table[:, n_features] = labels
        return cls.from_rows(table, class_index=n_features)

    @property
    def m(self) -> int:
        return self.rows.shape[0]

    @property
    def n(self) -> int:
        return self.rows.shape[1] - 1

    @property
    def width(self) -> int:
        return self.rows.shape[1]

    @property
    def input_indices(self) -> list[int]:
        return [k for k in range(self.width) if k != self.class_index]

    def column(self, k: int) -> np.ndarray:
        return self.rows[:, k]

    @property
    def labels(self) -> np.ndarray:
        return self.rows[:, self.class_index]

    def cardinalities(self) -> np.ndarray:
        return self.rows.max(axis=0) + 1

    def to_sparse(self) -> tuple[list[SparseRecord], np.ndarray]:
        """Sparse records over the input columns (re-indexed 0..n-1) and the dense class."""
        inputs = np.asarray(self.input_indices)
        records = []
        for i, row in enumerate(self.rows[:, inputs]):
            nz = np.flatnonzero(row)
            records.append(SparseRecord(index=i, features=nz, values=row[nz]))
        return records, self.labels.copy()


@dataclass(frozen=True, eq=False)
class FeatureBlock:
    """Values of one feature for the instances of one row partition."""

    feature: int
    block: int
    values: np.ndarray


@dataclass(frozen=True, eq=False)
class SparseFeatureVector:
    """Whole sparse column: instance indices (strictly increasing) and non-zero values."""

    feature: int
    indices: np.ndarray
    values: np.ndarray

    @property
    def nnz(self) -> int:
        return len(self.indices)

    def densify(self, m: int) -> np.ndarray:
        column = np.zeros(m, dtype=np.int64)
        column[self.indices] = self.values
        return column


DEFAULT_MIFS_BETA = 1.0

DENSE = "dense"
SPARSE = "sparse"


@dataclass(frozen=True, eq=False)
class ColumnStore:
    """Partitioned columnar data, keyed by feature index.

    Dense stores keep one :class:`FeatureBlock` per (feature, row partition);
    sparse stores keep one :class:`SparseFeatureVector` per feature. The class
    column travels with the features under ``class_index``.
    """

    layout: str
    partitions: tuple[tuple[FeatureBlock | SparseFeatureVector, ...], ...]
    cardinalities: np.ndarray
    m: int
    n: int
    class_index: int
    block_lengths: tuple[int, ...] = ()
    partition_reads: Counter = field(default_factory=Counter, compare=False)

    @property
    def npart(self) -> int:
        return len(self.partitions)

    @property
    def key_ranges(self) -> list[tuple[int, int] | None]:
        ranges = []
        for part in self.partitions:
            ranges.append((part[0].feature, part[-1].feature) if part else None)
        return ranges

    @property
    def features(self) -> list[int]:
        return [k for k in range(self.n + 1) if k != self.class_index]

    def __contains__(self, k: int) -> bool:
        return 0 <= k <= self.n

    def lookup(self, k: int) -> np.ndarray:
        """Materialize column ``k``, reading only partitions whose key range covers it."""
        if k not in self:
            raise DataValidationError(f"feature {k} not found in store")
        pieces = []
        for p, key_range in enumerate(self.key_ranges):
            if key_range is None or not key_range[0] <= k <= key_range[1]:
                continue
            self.partition_reads[p] += 1
            pieces.extend(item for item in self.partitions[p] if item.feature == k)
        if not pieces:
            raise DataValidationError(f"feature {k} not found in store")
        if self.layout == SPARSE:
            return pieces[0].densify(self.m)
        pieces.sort(key=lambda b: b.block)
        return np.concatenate([b.values for b in pieces])

    def items(self) -> Iterable[FeatureBlock | SparseFeatureVector]:
        for part in self.partitions:
            yield from part

    def to_matrix(self) -> np.ndarray:
        """Reassemble the m x (n+1) source matrix."""
        matrix = np.zeros((self.m, self.n + 1), dtype=np.int64)
        if self.layout == SPARSE:
            for vector in self.items():
                matrix[vector.indices, vector.feature] = vector.values
            return matrix
        offsets = np.concatenate([[0], np.cumsum(self.block_lengths)])
        for block in self.items():
            start = offsets[block.block]
            matrix[start : start + len(block.values), block.feature] = block.values
        return matrix

    def value_count(self) -> int:
        if self.layout == SPARSE:
            return sum(v.nnz for v in self.items())
        return sum(len(b.values) for b in self.items())


@dataclass(frozen=True, eq=False)
class ContingencyCube:
    """Counts indexed ``[conditioning value][candidate value][paired value]``."""

    feature: int
    counts: np.ndarray

    def __add__(self, other: ContingencyCube) -> ContingencyCube:
        if other.feature != self.feature or other.counts.shape != self.counts.shape:
            raise DataValidationError(
                f"cannot merge cubes {self.feature}{self.counts.shape} and "
                f"{other.feature}{other.counts.shape}"
            )
        return ContingencyCube(self.feature, self.counts + other.counts)

    @property
    def total(self) -> int:
        return int(self.counts.sum())


@dataclass(frozen=True, eq=False)
class BroadcastColumn:
    """Read-only full column shared with every worker.

    Dense partitions address it by ``(block, offset)``; sparse vectors by
    instance index.
    """

    feature: int
    values: np.ndarray
    block_lengths: tuple[int, ...] = ()

    def __post_init__(self):
        if self.block_lengths and sum(self.block_lengths) != len(self.values):
            raise DataValidationError("block lengths do not cover the broadcast column")

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, index):
        return self.values[index]

    def _offsets(self) -> np.ndarray:
        return np.concatenate([[0], np.cumsum(self.block_lengths, dtype=np.int64)])

    def flat_index(self, block: int, offset: int) -> int:
        return int(self._offsets()[block]) + offset

    def at(self, block: int, offset: int) -> int:
        return int(self.values[self.flat_index(block, offset)])

    def block(self, block: int) -> np.ndarray:
        offsets = self._offsets()
        return self.values[offsets[block] : offsets[block + 1]]


@dataclass
class ProportionCache:
    """Marginal ``p(v)`` and class-joint ``p(v, y)`` tables of broadcast variables."""

    m: int
    marginal: dict[int, np.ndarray] = field(default_factory=dict)
    joint: dict[int, np.ndarray] = field(default_factory=dict)

    def add_feature(self, k: int, column: np.ndarray, ycol: np.ndarray | None = None,
                    size: int | None = None, ysize: int | None = None) -> None:
        """Derive and keep the proportions of ``column`` (and its joint with ``ycol``)."""
        size = size or int(column.max()) + 1
        self.marginal[k] = _frozen(np.bincount(column, minlength=size) / self.m)
        if ycol is not None:
            ysize = ysize or int(ycol.max()) + 1
            counts = np.bincount(column * ysize + ycol, minlength=size * ysize)
            self.joint[k] = _frozen(counts.reshape(size, ysize) / self.m)

    def __contains__(self, k: int) -> bool:
        return k in self.marginal


class CriterionKind(str, Enum):
    """The eight instantiations of the generic relevance/redundancy criterion."""

    MIM = "mim"
    MIFS = "mifs"
    JMI = "jmi"
    CMI = "cmi"
    MRMR = "mrmr"
    CMIM = "cmim"
    IF = "if"
    ICAP = "icap"

    @classmethod
    def parse(cls, name: str | CriterionKind) -> CriterionKind:
        if isinstance(name, CriterionKind):
            return name
        try:
            return cls(str(name).strip().lower())
        except ValueError:
            names = ", ".join(k.value for k in cls)
            raise ConfigError(f"unknown criterion '{name}' (expected one of: {names})") from None

    def parameters(self, beta: float = DEFAULT_MIFS_BETA) -> dict:
        """Redundancy weights reported alongside a selection result."""
        if self in (CriterionKind.CMIM, CriterionKind.IF):
            return {"redundancy": "max"}
        if self is CriterionKind.ICAP:
            return {"redundancy": "capped-sum"}
        return {
            CriterionKind.MIM: {"beta": 0.0, "gamma": 0.0},
            CriterionKind.MIFS: {"beta": float(beta), "gamma": 0.0},
            CriterionKind.JMI: {"beta": "1/|S|", "gamma": "1/|S|"},
            CriterionKind.CMI: {"beta": 1.0, "gamma": 1.0},
            CriterionKind.MRMR: {"beta": "1/|S|", "gamma": 0.0},
        }[self]


@dataclass(eq=False)
class CriterionAccumulator:
    """Per-candidate cached relevance plus incrementally updated redundancy terms.

    Arrays are aligned with ``features`` (ascending feature indices). Only the
    selection driver mutates an accumulator.
    """

    kind: CriterionKind
    features: np.ndarray
    relevance: np.ndarray
    red_sum: np.ndarray
    cond_sum: np.ndarray
    max_term: np.ndarray
    icap_sum: np.ndarray
    selected: np.ndarray
    scores: np.ndarray
    beta: float = 0.0
    n_selected: int = 0

    @classmethod
    def empty(cls, kind: CriterionKind, features: np.ndarray, relevance: np.ndarray,
              beta: float) -> CriterionAccumulator:
        size = len(features)
        return cls(
            kind=kind,
            features=_frozen(np.asarray(features, dtype=np.int64)),
            relevance=_frozen(np.asarray(relevance, dtype=np.float64).copy()),
            red_sum=np.zeros(size),
            cond_sum=np.zeros(size),
            max_term=np.full(size, -math.inf),
            icap_sum=np.zeros(size),
            selected=np.zeros(size, dtype=bool),
            scores=np.asarray(relevance, dtype=np.float64).copy(),
            beta=beta,
        )

    @property
    def live(self) -> np.ndarray:
        return ~self.selected

    @property
    def live_features(self) -> list[int]:
        return [int(k) for k in self.features[self.live]]

    def position(self, feature: int) -> int:
        pos = int(np.searchsorted(self.features, feature))
        if pos >= len(self.features) or self.features[pos] != feature:
            raise KeyError(f"feature {feature} is not a candidate")
        return pos

    def score_of(self, feature: int) -> float:
        return float(self.scores[self.position(feature)])


@dataclass(frozen=True)
class SelectionResult:
    """Ordered ``(feature index, score at selection time)`` pairs."""

    selected: tuple[tuple[int, float], ...]
    criterion: CriterionKind
    parameters: dict = field(default_factory=dict)

    @property
    def features(self) -> list[int]:
        return [k for k, _ in self.selected]

    @property
    def scores(self) -> list[float]:
        return [s for _, s in self.selected]

    def __len__(self) -> int:
        return len(self.selected)
