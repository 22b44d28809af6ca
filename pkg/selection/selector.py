"""
Greedy forward selection driver over a columnar store.
"""

import logging
import math
import time
from collections import defaultdict

from tqdm import tqdm

from .core import (
    DENSE,
    BroadcastColumn,
    ColumnStore,
    ConfigError,
    CriterionKind,
    DataValidationError,
    ProportionCache,
    SelectionResult,
)
from .criteria import best_candidate, init_criteria, mark_selected, update_criteria
from .engine import LocalRuntime
from .infotheory import MiCmiPair, compute_mutual_info, get_histograms, sparse_histograms


class FeatureSelector:
    """Runs relevance, redundancy and criterion phases against one column store."""

    def __init__(
        self,
        store: ColumnStore,
        runtime: LocalRuntime | None = None,
        log_base: float = math.e,
        progress: bool = False,
    ):
        if not any(len(part) for part in store.partitions):
            raise DataValidationError("column store is empty")
        self.store = store
        self.runtime = runtime or LocalRuntime()
        self.log_base = log_base
        self.progress = progress
        self.cache = ProportionCache(m=store.m)
        self.ycol: BroadcastColumn | None = None
        self.selected: list[int] = []
        self.timings: dict[str, list[float]] = defaultdict(list)
        self.logger = logging.getLogger(__name__)

    def _histograms(self, j, jcol, y=None, ycol=None, exclude=()):
        build = get_histograms if self.store.layout == DENSE else sparse_histograms
        return build(self.store, j, jcol, y, ycol, runtime=self.runtime, exclude=exclude)

    def _broadcast(self, k: int) -> BroadcastColumn:
        column = self.store.lookup(k)
        return self.runtime.broadcast(k, column, self.store.block_lengths)

    def compute_relevances(self, class_index: int | None = None) -> dict[int, float]:
        """``I(Xk;Y)`` for every input feature; caches Y's broadcast and proportions."""
        start = time.perf_counter()
        y = self.store.class_index if class_index is None else class_index
        if y != self.store.class_index or y not in self.store:
            raise DataValidationError(f"class column {y} is not present in the store")

        self.ycol = self._broadcast(y)
        ysize = int(self.store.cardinalities[y])
        if ysize < 2:
            self.logger.warning("class column has a single value; every relevance is 0")
        self.cache.add_feature(y, self.ycol.values, size=ysize)

        cubes = self._histograms(y, self.ycol)
        pairs = compute_mutual_info(
            cubes, self.cache, y, None, self.store.m, self.runtime, self.log_base
        )
        self.timings["relevance"].append((time.perf_counter() - start) * 1000.0)
        self.logger.info(f"relevance computed for {len(pairs)} features")
        return {k: pair.mi for k, pair in pairs.items()}

    def compute_redundancies(self, p_best: int) -> dict[int, MiCmiPair]:
        """``I(Xj;Xi)`` and ``I(Xj;Xi|Y)`` between ``p_best`` and every live candidate."""
        if self.ycol is None:
            raise RuntimeError("relevances must be computed before redundancies")
        if p_best not in self.store or p_best == self.store.class_index:
            raise DataValidationError(f"feature {p_best} not found in store")
        start = time.perf_counter()
        y = self.store.class_index
        jcol = self._broadcast(p_best)
        self.cache.add_feature(
            p_best,
            jcol.values,
            self.ycol.values,
            size=int(self.store.cardinalities[p_best]),
            ysize=int(self.store.cardinalities[y]),
        )
        cubes = self._histograms(p_best, jcol, y, self.ycol, exclude=self.selected)
        pairs = compute_mutual_info(
            cubes, self.cache, p_best, y, self.store.m, self.runtime, self.log_base
        )
        self.timings["redundancy"].append((time.perf_counter() - start) * 1000.0)
        return pairs

    def select(
        self, kind: CriterionKind | str, ns: int, beta: float | None = None
    ) -> SelectionResult:
        """Greedily pick ``min(ns, n)`` features under ``kind``."""
        kind = CriterionKind.parse(kind)
        if ns < 1:
            raise ConfigError(f"ns must be >= 1, got {ns}")
        if ns > self.store.n:
            self.logger.warning(f"ns={ns} exceeds {self.store.n} features; selecting all")
            ns = self.store.n
        self.selected = []

        acc = init_criteria(self.compute_relevances(), kind, beta)
        chosen: list[tuple[int, float]] = []
        with tqdm(total=ns, desc=f"Selecting ({kind.value})", disable=not self.progress) as bar:
            while True:
                p_best, _ = best_candidate(acc)
                score = mark_selected(acc, p_best)
                chosen.append((p_best, score))
                self.selected.append(p_best)
                self.logger.info(f"selected feature {p_best} (score {score:.6f})")
                bar.update(1)
                if len(chosen) >= ns:
                    break
                update_criteria(acc, self.compute_redundancies(p_best))

        return SelectionResult(
            selected=tuple(chosen),
            criterion=kind,
            parameters=kind.parameters(acc.beta),
        )


def select(
    store: ColumnStore,
    kind: CriterionKind | str,
    ns: int,
    beta: float | None = None,
    runtime: LocalRuntime | None = None,
    log_base: float = math.e,
) -> SelectionResult:
    """Convenience wrapper: one-shot greedy selection over ``store``."""
    return FeatureSelector(store, runtime=runtime, log_base=log_base).select(kind, ns, beta)
