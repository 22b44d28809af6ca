"""
In-process data-parallel runtime: map_partitions, sort/group/reduce by key, broadcast.

Partitions are executed on a joblib thread pool. Results always come back in
partition order, so every primitive is deterministic for a fixed input and
partition count regardless of the worker count.
"""

import itertools
import logging
import os
from collections.abc import Callable, Hashable, Sequence
from dataclasses import dataclass
from operator import itemgetter
from typing import Any

import numpy as np
from joblib import Parallel, delayed

from .core import BroadcastColumn, ConfigError

MAX_DEFAULT_WORKERS = 8


def default_workers() -> int:
    return max(1, min(os.cpu_count() or 1, MAX_DEFAULT_WORKERS))


def split_evenly(items: Sequence, npart: int) -> list:
    """Contiguous, balanced split of ``items`` into exactly ``npart`` chunks."""
    if npart < 1:
        raise ConfigError(f"npart must be >= 1, got {npart}")
    bounds = np.linspace(0, len(items), npart + 1).round().astype(int)
    return [items[bounds[p] : bounds[p + 1]] for p in range(npart)]


@dataclass(frozen=True)
class PartitionedCollection:
    """A sequence of partitions, each an ordered sequence of elements."""

    partitions: tuple[Sequence, ...]

    def __post_init__(self):
        if len(self.partitions) < 1:
            raise ConfigError("a collection needs at least one partition")

    @classmethod
    def from_items(cls, items: Sequence, npart: int) -> "PartitionedCollection":
        return cls(tuple(tuple(chunk) for chunk in split_evenly(list(items), npart)))

    @property
    def npart(self) -> int:
        return len(self.partitions)

    def collect(self) -> list:
        return [item for part in self.partitions for item in part]

    def __len__(self) -> int:
        return sum(len(part) for part in self.partitions)


class LocalRuntime:
    """Executes partition-level work on a pool of ``workers`` threads."""

    def __init__(self, workers: int | None = None):
        workers = default_workers() if workers is None else workers
        if workers < 1:
            raise ConfigError(f"workers must be >= 1, got {workers}")
        self.workers = workers
        self.logger = logging.getLogger(__name__)

    @property
    def default_row_partitions(self) -> int:
        # 2-4 partitions per core; the low end keeps histograms per feature small.
        return 2 * self.workers

    def _run(self, tasks: list) -> list:
        if self.workers == 1 or len(tasks) <= 1:
            return [fn(*args, **kwargs) for fn, args, kwargs in tasks]
        return Parallel(n_jobs=self.workers, prefer="threads")(tasks)

    def map_partitions(
        self,
        coll: PartitionedCollection,
        f: Callable[..., Sequence],
        with_index: bool = False,
    ) -> PartitionedCollection:
        """Apply ``f`` to every partition; ``f(index, part)`` when ``with_index``."""
        if with_index:
            tasks = [delayed(f)(p, part) for p, part in enumerate(coll.partitions)]
        else:
            tasks = [delayed(f)(part) for part in coll.partitions]
        results = self._run(tasks)
        return PartitionedCollection(tuple(tuple(r) for r in results))

    def sort_by_key(self, coll: PartitionedCollection, npart: int) -> PartitionedCollection:
        """Stable global sort of ``(key, value)`` tuples into ``npart`` contiguous ranges."""
        if npart < 1:
            raise ConfigError(f"npart must be >= 1, got {npart}")
        ordered = sorted(coll.collect(), key=itemgetter(0))
        return PartitionedCollection.from_items(ordered, npart)

    def group_by_key(self, coll: PartitionedCollection, npart: int) -> PartitionedCollection:
        """Sort then run-length group equal keys; a key never spans two partitions."""
        if npart < 1:
            raise ConfigError(f"npart must be >= 1, got {npart}")
        ordered = sorted(coll.collect(), key=itemgetter(0))
        groups = [
            (key, [value for _, value in run])
            for key, run in itertools.groupby(ordered, key=itemgetter(0))
        ]
        return PartitionedCollection.from_items(groups, npart)

    def reduce_by_key(
        self, coll: PartitionedCollection, combine: Callable[[Any, Any], Any]
    ) -> dict[Hashable, Any]:
        """Fold all values of each key with an associative, commutative ``combine``.

        Partitions are folded locally in parallel, then partition results are
        merged in partition order. The returned dict is ordered by key.
        """

        def fold(part):
            local: dict = {}
            for key, value in part:
                local[key] = combine(local[key], value) if key in local else value
            return list(local.items())

        merged: dict = {}
        for part in self.map_partitions(coll, fold).partitions:
            for key, value in part:
                merged[key] = combine(merged[key], value) if key in merged else value
        return dict(sorted(merged.items(), key=itemgetter(0)))

    def map_values(self, items: Sequence, f: Callable[[Any], Any]) -> list:
        """Apply ``f`` element-wise, spread over ``workers`` partitions, order preserved."""
        if not items:
            return []
        coll = PartitionedCollection.from_items(items, min(self.workers, len(items)))
        return self.map_partitions(coll, lambda part: [f(x) for x in part]).collect()

    def broadcast(self, feature: int, column: np.ndarray,
                  block_lengths: Sequence[int] = ()) -> BroadcastColumn:
        """Wrap ``column`` in an immutable handle readable from any worker."""
        values = np.array(column, dtype=np.int64, copy=True)
        values.setflags(write=False)
        return BroadcastColumn(feature=feature, values=values, block_lengths=tuple(block_lengths))
