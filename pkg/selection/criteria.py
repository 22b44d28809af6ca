"""
The generic relevance/redundancy criterion and its eight instantiations.

Every criterion scores a candidate ``Xi`` given the selected set ``S`` as

    J = I(Xi;Y) - beta * sum I(Xj;Xi) + gamma * sum I(Xj;Xi|Y)

or, for CMIM/IF and ICAP, with a max or a capped sum over ``S``. Redundancy
terms are folded in one selected feature at a time, so an update costs one
pass over the live candidates.
"""

from collections.abc import Callable, Mapping

import numpy as np

from .core import (
    DEFAULT_MIFS_BETA,
    ConfigError,
    CriterionAccumulator,
    CriterionKind,
    DataValidationError,
)
from .infotheory import MiCmiPair


def _mim(acc: CriterionAccumulator) -> np.ndarray:
    return acc.relevance.copy()


def _mifs(acc: CriterionAccumulator) -> np.ndarray:
    return acc.relevance - acc.beta * acc.red_sum


def _jmi(acc: CriterionAccumulator) -> np.ndarray:
    return acc.relevance - (acc.red_sum - acc.cond_sum) / acc.n_selected


def _cmi(acc: CriterionAccumulator) -> np.ndarray:
    return acc.relevance - acc.red_sum + acc.cond_sum


def _mrmr(acc: CriterionAccumulator) -> np.ndarray:
    return acc.relevance - acc.red_sum / acc.n_selected


def _cmim(acc: CriterionAccumulator) -> np.ndarray:
    return acc.relevance - acc.max_term


def _icap(acc: CriterionAccumulator) -> np.ndarray:
    return acc.relevance - acc.icap_sum


SCORERS: dict[CriterionKind, Callable[[CriterionAccumulator], np.ndarray]] = {
    CriterionKind.MIM: _mim,
    CriterionKind.MIFS: _mifs,
    CriterionKind.JMI: _jmi,
    CriterionKind.CMI: _cmi,
    CriterionKind.MRMR: _mrmr,
    CriterionKind.CMIM: _cmim,
    CriterionKind.IF: _cmim,
    CriterionKind.ICAP: _icap,
}


def init_criteria(
    relevances: Mapping[int, float],
    kind: CriterionKind | str,
    beta: float | None = None,
    gamma: float | None = None,
) -> CriterionAccumulator:
    """Start an accumulator whose every score equals the candidate's relevance."""
    kind = CriterionKind.parse(kind)
    if gamma is not None:
        raise ConfigError(f"gamma is fixed by the {kind.value} criterion")
    if beta is not None and kind is not CriterionKind.MIFS:
        raise ConfigError(f"beta is fixed by the {kind.value} criterion")
    if beta is None:
        beta = DEFAULT_MIFS_BETA if kind is CriterionKind.MIFS else 0.0
    if not relevances:
        raise DataValidationError("no candidate features to score")

    features = np.array(sorted(relevances), dtype=np.int64)
    relevance = np.array([relevances[k] for k in features], dtype=np.float64)
    if np.any(relevance < 0):
        raise DataValidationError("relevances must be non-negative")
    return CriterionAccumulator.empty(kind, features, relevance, float(beta))


def mark_selected(acc: CriterionAccumulator, feature: int) -> float:
    """Freeze ``feature``'s score and drop it from later updates and argmax queries."""
    pos = acc.position(feature)
    if acc.selected[pos]:
        raise DataValidationError(f"feature {feature} is already selected")
    acc.selected[pos] = True
    return float(acc.scores[pos])


def update_criteria(
    acc: CriterionAccumulator, red: Mapping[int, MiCmiPair]
) -> CriterionAccumulator:
    """Fold the (mi, cmi) of the newest selected feature into every live candidate."""
    live = acc.live
    if not live.any():
        raise DataValidationError("every feature is already selected")
    live_features = acc.features[live]
    missing = [int(k) for k in live_features if int(k) not in red]
    if missing:
        raise DataValidationError(f"redundancies missing for live candidates {missing[:10]}")

    mi = np.array([red[int(k)].mi for k in live_features])
    cmi = np.array([red[int(k)].cmi for k in live_features])
    acc.red_sum[live] += mi
    acc.cond_sum[live] += cmi
    acc.max_term[live] = np.maximum(acc.max_term[live], mi - cmi)
    acc.icap_sum[live] += np.maximum(0.0, mi - cmi)
    acc.n_selected += 1

    acc.scores[live] = SCORERS[acc.kind](acc)[live]
    return acc


def best_candidate(acc: CriterionAccumulator) -> tuple[int, float]:
    """Highest-scoring live candidate; ties go to the smallest feature index."""
    live = np.flatnonzero(acc.live)
    if not len(live):
        raise DataValidationError("no live candidates left")
    pos = live[np.argmax(acc.scores[live])]
    return int(acc.features[pos]), float(acc.scores[pos])
