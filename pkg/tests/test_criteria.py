"""
Tests for criterion initialization, incremental updates and argmax.
"""

import numpy as np
import pytest

from selection.core import ConfigError, CriterionKind, DataValidationError
from selection.criteria import best_candidate, init_criteria, mark_selected, update_criteria
from selection.infotheory import MiCmiPair


def closed_form(kind, beta, relevance, mi, cmi):
    """Score of one candidate evaluated directly over the selected set."""
    mi, cmi = np.asarray(mi), np.asarray(cmi)
    size = len(mi)
    if size == 0 or kind is CriterionKind.MIM:
        return relevance
    return {
        CriterionKind.MIFS: lambda: relevance - beta * mi.sum(),
        CriterionKind.JMI: lambda: relevance - mi.sum() / size + cmi.sum() / size,
        CriterionKind.CMI: lambda: relevance - mi.sum() + cmi.sum(),
        CriterionKind.MRMR: lambda: relevance - mi.sum() / size,
        CriterionKind.CMIM: lambda: relevance - np.max(mi - cmi),
        CriterionKind.IF: lambda: relevance - np.max(mi - cmi),
        CriterionKind.ICAP: lambda: relevance - np.maximum(0.0, mi - cmi).sum(),
    }[kind]()


def run_greedy(kind, relevances, pair_table, steps, beta=None):
    """Drive the accumulator for ``steps`` selections, yielding it after each update."""
    acc = init_criteria(relevances, kind, beta)
    selected = []
    for _ in range(steps):
        p_best, _ = best_candidate(acc)
        mark_selected(acc, p_best)
        selected.append(p_best)
        red = {k: MiCmiPair(k, *pair_table[p_best, k]) for k in acc.live_features}
        update_criteria(acc, red)
        yield acc, list(selected)


class TestInitCriteria:
    """Test cases for init_criteria."""

    @pytest.mark.parametrize("kind", list(CriterionKind))
    def test_initial_scores_equal_relevance(self, kind):
        relevances = {0: 0.1, 3: 0.7, 5: 0.4}
        acc = init_criteria(relevances, kind)
        assert acc.features.tolist() == [0, 3, 5]
        assert acc.scores.tolist() == [0.1, 0.7, 0.4]
        assert best_candidate(acc) == (3, 0.7)

    def test_gamma_is_never_user_set(self):
        with pytest.raises(ConfigError, match="gamma"):
            init_criteria({0: 0.1}, "jmi", gamma=0.5)

    def test_beta_only_for_mifs(self):
        with pytest.raises(ConfigError, match="beta"):
            init_criteria({0: 0.1}, "mrmr", beta=0.5)
        assert init_criteria({0: 0.1}, "mifs", beta=0.5).beta == 0.5
        assert init_criteria({0: 0.1}, "mifs").beta == 1.0

    def test_unknown_kind(self):
        with pytest.raises(ConfigError):
            init_criteria({0: 0.1}, "fisher")

    def test_negative_relevance_rejected(self):
        with pytest.raises(DataValidationError):
            init_criteria({0: 0.1, 1: -0.2}, "mim")

    def test_equal_relevances_pick_lowest_index(self):
        acc = init_criteria({4: 0.3, 2: 0.3, 7: 0.3}, "mrmr")
        assert best_candidate(acc)[0] == 2


class TestUpdateCriteria:
    """Test cases for update_criteria."""

    @pytest.fixture
    def pair_table(self, rng):
        n = 8
        mi = rng.random((n, n)) * 0.3
        cmi = rng.random((n, n)) * 0.3
        mi = (mi + mi.T) / 2
        return np.stack([mi, cmi], axis=-1)

    @pytest.fixture
    def relevances(self, rng):
        return {k: float(v) for k, v in enumerate(rng.random(8))}

    def test_mrmr_first_update(self):
        acc = init_criteria({0: 0.9, 1: 0.5, 2: 0.4}, "mrmr")
        mark_selected(acc, 0)
        update_criteria(acc, {1: MiCmiPair(1, 0.3, 0.1), 2: MiCmiPair(2, 0.05, 0.0)})
        assert acc.score_of(1) == pytest.approx(0.5 - 0.3)
        assert acc.score_of(2) == pytest.approx(0.4 - 0.05)
        assert best_candidate(acc)[0] == 2

    def test_cmi_score_is_exact(self):
        acc = init_criteria({0: 0.9, 1: 0.5}, "cmi")
        mark_selected(acc, 0)
        update_criteria(acc, {1: MiCmiPair(1, 0.3, 0.2)})
        assert acc.score_of(1) == 0.5 - 0.3 + 0.2

    @pytest.mark.parametrize("kind", list(CriterionKind))
    def test_incremental_equals_closed_form(self, kind, relevances, pair_table):
        beta = 0.7 if kind is CriterionKind.MIFS else None
        for acc, selected in run_greedy(kind, relevances, pair_table, steps=7, beta=beta):
            for k in acc.live_features:
                expected = closed_form(
                    kind, acc.beta, relevances[k],
                    [pair_table[j, k, 0] for j in selected],
                    [pair_table[j, k, 1] for j in selected],
                )
                assert acc.score_of(k) == pytest.approx(expected, abs=1e-10)

    def test_cmim_and_if_agree_at_every_step(self, relevances, pair_table):
        for (cmim, _), (inf, _) in zip(
            run_greedy("cmim", relevances, pair_table, 7),
            run_greedy("if", relevances, pair_table, 7),
        ):
            assert np.array_equal(cmim.scores, inf.scores)

    def test_mim_scores_never_change(self, relevances, pair_table):
        for acc, _ in run_greedy("mim", relevances, pair_table, 5):
            live = acc.live
            assert np.array_equal(acc.scores[live], acc.relevance[live])

    def test_selected_scores_are_frozen(self):
        acc = init_criteria({0: 0.9, 1: 0.5, 2: 0.1}, "mifs")
        score = mark_selected(acc, 0)
        update_criteria(acc, {1: MiCmiPair(1, 0.3), 2: MiCmiPair(2, 0.2)})
        assert score == 0.9
        assert acc.score_of(0) == 0.9

    def test_missing_candidate_rejected(self):
        acc = init_criteria({0: 0.9, 1: 0.5, 2: 0.1}, "jmi")
        mark_selected(acc, 0)
        with pytest.raises(DataValidationError, match="missing"):
            update_criteria(acc, {1: MiCmiPair(1, 0.3)})

    def test_update_after_exhaustion_rejected(self):
        acc = init_criteria({0: 0.9}, "jmi")
        mark_selected(acc, 0)
        with pytest.raises(DataValidationError):
            update_criteria(acc, {})


class TestBestCandidate:
    """Test cases for best_candidate."""

    def test_single_live_candidate(self):
        acc = init_criteria({0: 0.9, 1: 0.5}, "icap")
        mark_selected(acc, 0)
        update_criteria(acc, {1: MiCmiPair(1, 0.6, 0.0)})
        assert best_candidate(acc) == (1, pytest.approx(-0.1))

    def test_no_live_candidates(self):
        acc = init_criteria({0: 0.9}, "mim")
        mark_selected(acc, 0)
        with pytest.raises(DataValidationError):
            best_candidate(acc)

    def test_double_selection_rejected(self):
        acc = init_criteria({0: 0.9, 1: 0.2}, "mim")
        mark_selected(acc, 0)
        with pytest.raises(DataValidationError, match="already selected"):
            mark_selected(acc, 0)
