"""
Sequential brute-force reference implementations.

Nothing here touches partitions, cubes or cached proportions: estimates come
from scikit-learn's contingency-table mutual information and every criterion
score is evaluated from scratch over the selected set at each iteration.
"""

import logging

import numpy as np
from sklearn.metrics import mutual_info_score

from .core import (
    DEFAULT_MIFS_BETA,
    ConfigError,
    CriterionKind,
    DataValidationError,
    RowDataset,
    SelectionResult,
)

logger = logging.getLogger(__name__)

SOFT_LIMIT_FEATURES = 200
SOFT_LIMIT_INSTANCES = 10_000


def oracle_mi(a, b) -> float:
    """I(A;B) in nats from the joint frequency table."""
    a, b = np.asarray(a), np.asarray(b)
    if a.shape != b.shape:
        raise DataValidationError(f"column lengths differ: {a.shape} vs {b.shape}")
    return float(mutual_info_score(a, b))


def oracle_cmi(a, b, c) -> float:
    """I(A;B|C) = sum over c of p(c) * I(A;B | C=c)."""
    a, b, c = np.asarray(a), np.asarray(b), np.asarray(c)
    if not a.shape == b.shape == c.shape:
        raise DataValidationError("column lengths differ")
    total = 0.0
    for value in np.unique(c):
        mask = c == value
        total += mask.mean() * mutual_info_score(a[mask], b[mask])
    return float(total)


def _score(kind: CriterionKind, beta: float, relevance: float,
           mi: list[float], cmi: list[float]) -> float:
    if not mi or kind is CriterionKind.MIM:
        return relevance
    size = len(mi)
    if kind is CriterionKind.MIFS:
        return relevance - beta * sum(mi)
    if kind is CriterionKind.JMI:
        return relevance - sum(mi) / size + sum(cmi) / size
    if kind is CriterionKind.CMI:
        return relevance - sum(mi) + sum(cmi)
    if kind is CriterionKind.MRMR:
        return relevance - sum(mi) / size
    if kind in (CriterionKind.CMIM, CriterionKind.IF):
        return relevance - max(x - y for x, y in zip(mi, cmi, strict=True))
    if kind is CriterionKind.ICAP:
        return relevance - sum(max(0.0, x - y) for x, y in zip(mi, cmi, strict=True))
    raise ConfigError(f"unsupported criterion {kind}")


def oracle_score(
    data: RowDataset,
    kind: CriterionKind | str,
    selected: list[int],
    candidate: int,
    beta: float | None = None,
) -> float:
    """From-scratch score of ``candidate`` given the already selected features."""
    kind = CriterionKind.parse(kind)
    if beta is None:
        beta = DEFAULT_MIFS_BETA if kind is CriterionKind.MIFS else 0.0
    y, xi = data.labels, data.column(candidate)
    mi = [oracle_mi(data.column(j), xi) for j in selected]
    cmi = [oracle_cmi(data.column(j), xi, y) for j in selected]
    return _score(kind, beta, oracle_mi(xi, y), mi, cmi)


def oracle_select(
    data: RowDataset, kind: CriterionKind | str, ns: int, beta: float | None = None
) -> SelectionResult:
    """Greedy selection recomputing every candidate's full score each iteration."""
    kind = CriterionKind.parse(kind)
    if ns < 1:
        raise ConfigError(f"ns must be >= 1, got {ns}")
    if data.n > SOFT_LIMIT_FEATURES or data.m > SOFT_LIMIT_INSTANCES:
        logger.warning(
            f"oracle run on {data.m}x{data.n} exceeds the {SOFT_LIMIT_INSTANCES}x"
            f"{SOFT_LIMIT_FEATURES} soft limit; expect a slow run"
        )
    if beta is None:
        beta = DEFAULT_MIFS_BETA if kind is CriterionKind.MIFS else 0.0
    y = data.labels
    candidates = data.input_indices
    ns = min(ns, len(candidates))

    # Pairwise estimates are memoized; the scores themselves are not.
    pairs: dict[tuple[int, int], tuple[float, float]] = {}

    def pair(j: int, i: int) -> tuple[float, float]:
        if (j, i) not in pairs:
            xj, xi = data.column(j), data.column(i)
            pairs[(j, i)] = (oracle_mi(xj, xi), oracle_cmi(xj, xi, y))
        return pairs[(j, i)]

    relevance = {i: oracle_mi(data.column(i), y) for i in candidates}
    chosen: list[tuple[int, float]] = []
    while len(chosen) < ns:
        taken = [k for k, _ in chosen]
        best, best_score = None, -np.inf
        for i in candidates:
            if i in taken:
                continue
            terms = [pair(j, i) for j in taken]
            score = _score(kind, beta, relevance[i], [t[0] for t in terms], [t[1] for t in terms])
            if score > best_score:
                best, best_score = i, score
        chosen.append((best, best_score))

    return SelectionResult(
        selected=tuple(chosen), criterion=kind, parameters=kind.parameters(beta)
    )
