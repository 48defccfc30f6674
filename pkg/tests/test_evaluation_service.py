import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from src.models.network_models import LinkKind, CellState, NetworkData
from src.models.prior_models import BHyper
from src.models.sampler_models import LatentSnapshot, ModelKind, RunConfig
from src.services import evaluation_service
from src.services.errors import DataError
from src.services.inference_service import crossvalidate
from src.services.link_models import BernoulliBetaLink, PoissonGammaLink, SigmoidGaussianLink

T, S, U = CellState.TRAIN, CellState.TEST, CellState.UNOBSERVED


def _two_entity(edge_01=1, edge_10=0, kind=LinkKind.BINARY):
    """Cell (0,1) is Test, (1,0) is Train"""
    return NetworkData(
        n=2,
        edges=np.array([[0, edge_01], [edge_10, 0]]),
        kind=kind,
        mask=np.array([[U, S], [T, U]]),
    )


def _single_block(B):
    return LatentSnapshot(iteration=1, B=np.array([[B]]), eta=np.zeros((0, 1)), pi=np.ones((2, 1)))


class TestAuc:

    @pytest.mark.parametrize("scores, labels, expected", [
        ([0.9, 0.1], [1, 0], 1.0),
        ([0.5, 0.5, 0.5], [1, 0, 0], 0.5),
        ([0.8, 0.4, 0.6, 0.2], [1, 1, 0, 0], 0.75),
    ])
    def test_examples(self, scores, labels, expected):
        assert evaluation_service.auc_from_labels(np.array(scores), np.array(labels)) == pytest.approx(expected)

    def test_single_class(self):
        with pytest.raises(DataError):
            evaluation_service.auc_from_labels(np.array([0.2, 0.4]), np.array([1, 1]))

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.tuples(st.integers(0, 4), st.booleans()), min_size=2, max_size=25))
    def test_pair_counting(self, cells):
        scores = np.array([c[0] for c in cells], dtype=float)
        labels = np.array([c[1] for c in cells])
        if labels.all() or not labels.any():
            return
        pos, neg = scores[labels], scores[~labels]
        wins = (pos[:, None] > neg[None, :]).sum() + 0.5 * (pos[:, None] == neg[None, :]).sum()
        expected = wins / (pos.size * neg.size)
        assert evaluation_service.auc_from_labels(scores, labels) == pytest.approx(expected)

    def test_restricted_to_cell_state(self):
        data = NetworkData(
            n=3,
            edges=np.array([[0, 1, 0], [0, 0, 1], [1, 1, 0]]),
            kind=LinkKind.BINARY,
            mask=np.array([[U, S, S], [S, U, T], [T, S, U]]),
        )
        scores = np.array([[0, 0.9, 0.1], [0.2, 0, 0.0], [0.0, 0.15, 0]])
        # Test cells: (0,1)=1 .9, (0,2)=0 .1, (1,0)=0 .2, (2,1)=1 .15 -> 3 of 4 pairs
        assert evaluation_service.auc(scores, data, CellState.TEST) == pytest.approx(0.75)


class TestPredictiveMetrics:

    def test_loglik_single_sample(self):
        ll = evaluation_service.test_loglik([_single_block(0.5)], _two_entity(), BernoulliBetaLink(BHyper()))
        assert ll == pytest.approx(np.log(0.5))

    def test_loglik_averages_probabilities(self):
        samples = [_single_block(0.3), _single_block(0.5)]
        ll = evaluation_service.test_loglik(samples, _two_entity(), BernoulliBetaLink(BHyper()))
        assert ll == pytest.approx(np.log(0.4))

    def test_loglik_mixture_over_blocks(self):
        pi = np.array([[0.5, 0.5], [0.5, 0.5]])
        sample = LatentSnapshot(iteration=1, B=np.array([[0.2, 0.4], [0.6, 0.8]]), eta=np.zeros((0, 2)), pi=pi)
        ll = evaluation_service.test_loglik([sample], _two_entity(), BernoulliBetaLink(BHyper()))
        assert ll == pytest.approx(np.log(0.5))

    def test_loglik_latent_features(self):
        sample = LatentSnapshot(iteration=1, B=np.array([[0.0]]), eta=np.zeros((0, 1)), z=np.ones((2, 1), dtype=np.int8))
        ll = evaluation_service.test_loglik([sample], _two_entity(), SigmoidGaussianLink(BHyper()))
        assert ll == pytest.approx(np.log(0.5))

    def test_no_test_cells(self):
        data = _two_entity().with_mask(np.array([[U, T], [T, U]]))
        with pytest.raises(DataError):
            evaluation_service.test_loglik([_single_block(0.5)], data, BernoulliBetaLink(BHyper()))

    def test_no_samples(self):
        with pytest.raises(DataError):
            evaluation_service.predictive_scores([], _two_entity(), BernoulliBetaLink(BHyper()))

    def test_scores_average_over_samples(self):
        prediction = evaluation_service.predictive_scores(
            [_single_block(0.2), _single_block(0.6)], _two_entity(), BernoulliBetaLink(BHyper())
        )
        np.testing.assert_allclose(prediction.scores, 0.4)
        np.testing.assert_allclose(prediction.event_prob, 0.4)

    def test_count_scores(self):
        prediction = evaluation_service.predictive_scores(
            [_single_block(np.log(2.0))], _two_entity(kind=LinkKind.COUNT), PoissonGammaLink(BHyper())
        )
        np.testing.assert_allclose(prediction.scores, np.log(2.0))
        np.testing.assert_allclose(prediction.event_prob, 0.5)

    def test_binarized_loglik(self):
        data = _two_entity(edge_01=3, kind=LinkKind.COUNT)
        ll = evaluation_service.binarized_test_loglik([_single_block(np.log(2.0))], data, PoissonGammaLink(BHyper()))
        assert ll == pytest.approx(np.log(0.5))

    @pytest.mark.parametrize("score_01, score_10, state, expected", [
        (0.7, 0.6, CellState.TEST, 0.0),
        (0.3, 0.6, CellState.TEST, 1.0),
        (0.3, 0.6, CellState.TRAIN, 1.0),
        (0.3, 0.4, CellState.TRAIN, 0.0),
    ])
    def test_zero_one_error(self, score_01, score_10, state, expected):
        scores = np.array([[0.0, score_01], [score_10, 0.0]])
        assert evaluation_service.zero_one_error(scores, _two_entity(), state) == expected


class TestEvaluateSamples:

    def test_all_metrics(self):
        row = evaluation_service.evaluate_samples([_single_block(0.7)], _two_entity(), BernoulliBetaLink(BHyper()), fold=2, chain=1)
        assert (row.fold, row.chain) == (2, 1)
        assert row.train_error == 1.0
        assert row.test_error == 0.0
        assert row.test_loglik == pytest.approx(np.log(0.7))
        # a single Test cell has no negative to rank against
        assert row.auc is None

    def test_without_test_cells(self):
        data = _two_entity().with_mask(np.array([[U, T], [T, U]]))
        row = evaluation_service.evaluate_samples([_single_block(0.7)], data, BernoulliBetaLink(BHyper()))
        assert row.test_error is None and row.test_loglik is None

    def test_map_labels_and_ari(self):
        pi_a = np.array([[0.9, 0.1], [0.2, 0.8], [0.7, 0.3]])
        pi_b = np.array([[0.8, 0.1, 0.1], [0.1, 0.3, 0.6], [0.6, 0.2, 0.2]])
        samples = [
            LatentSnapshot(iteration=1, B=np.eye(2), eta=np.zeros((0, 2)), pi=pi_a),
            LatentSnapshot(iteration=2, B=np.eye(3), eta=np.zeros((0, 3)), pi=pi_b),
        ]
        labels = evaluation_service.map_labels(samples)
        assert labels.tolist() == [0, 1, 0]
        assert evaluation_service.coclustering_ari(np.array([5, 7, 5]), labels) == pytest.approx(1.0)


class TestCrossvalidate:

    def test_one_row_per_fold_and_chain(self, planted_binary):
        data, _ = planted_binary
        run = RunConfig(iterations=4, burn_in=1, chains=2, init_k=2, k_max=3, seed=5)
        report = crossvalidate(ModelKind.IMMM, data, None, run, n_folds=3)
        assert [(row.fold, row.chain) for row in report.rows] == [(f, c) for f in range(3) for c in range(2)]
        again = crossvalidate(ModelKind.IMMM, data, None, run, n_folds=3)
        assert report.to_frame().equals(again.to_frame())
