"""
Contingency cubes and plug-in mutual information estimates.

Cubes are indexed ``[conditioning value][candidate value][paired value]``.
All information quantities are in nats unless a ``log_base`` is given.
"""

import logging
import math
import operator
from collections.abc import Collection, Mapping
from dataclasses import dataclass

import numpy as np
import scipy.stats

from .core import (
    BroadcastColumn,
    ColumnStore,
    ContingencyCube,
    DataValidationError,
    ProportionCache,
)
from .engine import LocalRuntime, PartitionedCollection

logger = logging.getLogger(__name__)

NEGATIVE_FLOOR = -1e-12
MAX_CUBE_CELLS = 1 << 26


@dataclass(frozen=True)
class MiCmiPair:
    """``mi = I(Xj;Xi)`` and ``cmi = I(Xj;Xi|Y)`` for candidate ``feature``."""

    feature: int
    mi: float
    cmi: float = 0.0


def _tally(ivals, jvals, yvals, ysize, isize, jsize) -> np.ndarray:
    cells = int(ysize) * int(isize) * int(jsize)
    if cells > MAX_CUBE_CELLS:
        raise DataValidationError(
            f"contingency cube [{ysize}][{isize}][{jsize}] exceeds {MAX_CUBE_CELLS} cells; "
            "feature values look like identifiers, bin or re-encode them"
        )
    if len(ivals) and (ivals.max() >= isize or jvals.max() >= jsize or yvals.max() >= ysize):
        raise DataValidationError(
            f"value outside cube bounds [{ysize}][{isize}][{jsize}]; cardinalities are corrupt"
        )
    codes = (yvals * isize + ivals) * jsize + jvals
    return np.bincount(codes, minlength=cells).reshape(ysize, isize, jsize)


def _skip(store: ColumnStore, j: int, y: int | None, exclude: Collection[int]) -> set[int]:
    skip = {j, store.class_index, *exclude}
    if y is not None:
        skip.add(y)
    return skip


def get_histograms(
    store: ColumnStore,
    j: int,
    jcol: BroadcastColumn,
    y: int | None = None,
    ycol: BroadcastColumn | None = None,
    runtime: LocalRuntime | None = None,
    exclude: Collection[int] = (),
) -> dict[int, ContingencyCube]:
    """Per-partition cubes of every live candidate against ``j`` (and ``y``), reduced by key."""
    runtime = runtime or LocalRuntime()
    if len(jcol) != store.m or (ycol is not None and len(ycol) != store.m):
        raise DataValidationError("broadcast columns must have one value per instance")
    counter = store.cardinalities
    jsize = int(counter[j])
    ysize = int(counter[y]) if y is not None else 1
    skip = _skip(store, j, y, exclude)

    def histograms(part):
        emitted = []
        for block in part:
            if block.feature in skip:
                continue
            jvals = jcol.block(block.block)
            yvals = ycol.block(block.block) if ycol is not None else np.zeros_like(jvals)
            counts = _tally(block.values, jvals, yvals, ysize, int(counter[block.feature]), jsize)
            emitted.append((block.feature, ContingencyCube(block.feature, counts)))
        return emitted

    coll = PartitionedCollection(store.partitions)
    return runtime.reduce_by_key(runtime.map_partitions(coll, histograms), operator.add)


def sparse_histograms(
    store: ColumnStore,
    j: int,
    jcol: BroadcastColumn,
    y: int | None = None,
    ycol: BroadcastColumn | None = None,
    runtime: LocalRuntime | None = None,
    exclude: Collection[int] = (),
) -> dict[int, ContingencyCube]:
    """One cube per sparse feature vector, no reduce needed.

    Only the non-zero entries of a candidate are visited. The candidate-zero
    row is rebuilt from two accumulators: the joint histogram of (j, y) over
    instances with a non-zero j, and the class histogram.
    """
    runtime = runtime or LocalRuntime()
    counter = store.cardinalities
    jsize = int(counter[j])
    ysize = int(counter[y]) if y is not None else 1
    jvalues = jcol.values
    yvalues = ycol.values if ycol is not None else np.zeros(store.m, dtype=np.int64)
    if len(jvalues) != store.m or len(yvalues) != store.m:
        raise DataValidationError("broadcast columns must have one value per instance")

    jyhist = np.bincount(jvalues * ysize + yvalues, minlength=jsize * ysize).reshape(jsize, ysize)
    jyhist[0, :] = 0
    yhist = np.bincount(yvalues, minlength=ysize)
    skip = _skip(store, j, y, exclude)

    def histogram(vector):
        isize = int(counter[vector.feature])
        jv = jvalues[vector.indices]
        yv = yvalues[vector.indices]
        counts = _tally(vector.values, jv, yv, ysize, isize, jsize)
        nonzero_j = jv != 0
        seen = np.bincount(
            jv[nonzero_j] * ysize + yv[nonzero_j], minlength=jsize * ysize
        ).reshape(jsize, ysize)
        leftover = jyhist - seen
        if leftover.min() < 0:
            raise DataValidationError(f"negative (j, y) leftover for feature {vector.feature}")
        counts[:, 0, :] += leftover.T
        remainder = yhist - counts.sum(axis=(1, 2))
        if remainder.min() < 0:
            raise DataValidationError(f"negative zero-cell remainder for feature {vector.feature}")
        counts[:, 0, 0] += remainder
        return vector.feature, ContingencyCube(vector.feature, counts)

    coll = PartitionedCollection(store.partitions)
    cubes = runtime.map_partitions(
        coll, lambda part: [histogram(v) for v in part if v.feature not in skip]
    )
    return dict(sorted(cubes.collect()))


def _plogratio(p: np.ndarray, numerator: np.ndarray, denominator: np.ndarray) -> float:
    """``sum p * ln(numerator / denominator)`` over cells where every factor is positive."""
    mask = (p > 0) & (numerator > 0) & (denominator > 0)
    if not mask.any():
        return 0.0
    return float(np.sum(p[mask] * np.log(numerator[mask] / denominator[mask])))


def mutual_info_from_cube(
    counts: np.ndarray,
    m: int,
    pb: np.ndarray,
    pc: np.ndarray | None = None,
    pbc: np.ndarray | None = None,
) -> tuple[float, float]:
    """(mi, cmi) of one cube given the broadcast proportions of ``b`` and ``c``.

    ``pb`` is p(b), ``pc`` is p(c) and ``pbc`` is p(b, c) indexed ``[b][c]``.
    Candidate-side proportions are derived from the cube itself.
    """
    pabc = counts / m
    pab = pabc.sum(axis=0)
    pa = pab.sum(axis=1)
    mi = _plogratio(pab, pab, np.outer(pa, pb[: pab.shape[1]]))

    cmi = 0.0
    if pc is not None and pbc is not None:
        pac = pabc.sum(axis=2)  # [c][a]
        csize, asize, bsize = pabc.shape
        numerator = pabc * pc[:csize, None, None]
        denominator = pac[:, :, None] * pbc[:bsize, :csize].T[:, None, :]
        cmi = _plogratio(pabc, numerator, denominator)

    if mi < NEGATIVE_FLOOR or cmi < NEGATIVE_FLOOR:
        logger.debug(f"negative information estimate clamped: mi={mi}, cmi={cmi}")
    return max(mi, 0.0), max(cmi, 0.0)


def compute_mutual_info(
    cubes: Mapping[int, ContingencyCube],
    cache: ProportionCache,
    b: int,
    c: int | None,
    m: int,
    runtime: LocalRuntime | None = None,
    log_base: float = math.e,
) -> dict[int, MiCmiPair]:
    """MI against ``b`` and, when ``c`` is given, CMI conditioned on ``c`` for every cube."""
    runtime = runtime or LocalRuntime()
    if b not in cache or (c is not None and (c not in cache or b not in cache.joint)):
        raise DataValidationError(f"proportion cache lacks tables for b={b}, c={c}")
    pb = cache.marginal[b]
    pc = cache.marginal[c] if c is not None else None
    pbc = cache.joint[b] if c is not None else None
    scale = 1.0 / math.log(log_base)

    def evaluate(item):
        feature, cube = item
        mi, cmi = mutual_info_from_cube(cube.counts, m, pb, pc, pbc)
        if log_base != math.e:
            mi, cmi = mi * scale, cmi * scale
        return feature, MiCmiPair(feature, mi, cmi)

    return dict(runtime.map_values(list(cubes.items()), evaluate))


def entropy(column, log_base: float = math.e) -> float:
    """Plug-in entropy of an integer column."""
    column = np.asarray(column)
    if column.size == 0:
        raise DataValidationError("entropy of an empty column is undefined")
    return float(scipy.stats.entropy(np.bincount(column), base=log_base))
