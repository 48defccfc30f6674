"""
Statistical benchmarks on synthetic networks (run with --runslow)
"""

import time

import numpy as np
import pytest

from src.models.network_models import LinkKind, CellState, MetadataMatrix
from src.models.prior_models import BHyper
from src.models.sampler_models import ModelKind, RunConfig
from src.models.simulation_models import SyntheticSpec
from src.services.chain_service import run_chain, make_sampler
from src.services.data_service import DataService
from src.services.evaluation_service import (
    auc,
    binarized_test_loglik,
    coclustering_ari,
    map_labels,
    predictive_scores,
    test_loglik as heldout_loglik,
)
from src.services.inference_service import importance_frame, link_for
from src.services.link_models import link_model_for
from src.services.simulation_service import simulate, simulate_edges, plant_communities, random_metadata

SEEDS = range(10)


def _hold_out(data, seed):
    return DataService().make_cv_folds(data, seed, 10).apply(data, 0)


@pytest.mark.slow
def test_planted_partition_recovery():
    successes = 0
    for seed in SEEDS:
        data, labels = plant_communities(60, 3, 0.8, LinkKind.BINARY, seed=seed)
        held_out = _hold_out(data, seed)
        result = run_chain(ModelKind.IMMM, held_out, None, RunConfig(iterations=2000, burn_in=1000, thinning=10, init_k=3, seed=seed))
        prediction = predictive_scores(result.samples, held_out, link_for(ModelKind.IMMM, held_out))
        score = auc(prediction.event_prob, held_out, CellState.TEST)
        ari = coclustering_ari(labels, map_labels(result.samples[-20:]))
        successes += score >= 0.90 and ari >= 0.8
    assert successes >= 9


@pytest.mark.slow
def test_informative_attribute_has_smaller_importance():
    successes = 0
    pinned = np.array([[0.05, 1.0, 1.0], [1.0, 1.0, 1.0]])
    for seed in SEEDS:
        rng = np.random.default_rng(seed)
        phi = random_metadata(40, 2, rng)
        spec = SyntheticSpec(n=40, F=2, model=ModelKind.INFMM, family=LinkKind.BINARY, truncation=3, eta=pinned, seed=seed)
        data, _ = simulate(spec, phi, rng)
        result = run_chain(ModelKind.INFMM, data, phi, RunConfig(iterations=600, burn_in=300, truncation=3, seed=seed))
        frame = importance_frame(result.samples, phi.attribute_names, ModelKind.INFMM).set_index('attribute')
        successes += frame.loc['attr_0', 'importance'] < frame.loc['attr_1', 'importance']
    assert successes >= 9


@pytest.mark.slow
def test_count_model_beats_binarized_model_on_counts():
    successes = 0
    for seed in SEEDS:
        rng = np.random.default_rng(seed)
        phi = random_metadata(50, 2, rng)
        spec = SyntheticSpec(n=50, F=2, model=ModelKind.INFMM, family=LinkKind.COUNT, truncation=3, seed=seed)
        data, _ = simulate(spec, phi, rng)
        held_out = _hold_out(data, seed)
        binary = held_out.binarized()
        run = RunConfig(iterations=600, burn_in=300, thinning=5, init_k=3, seed=seed)

        count_samples = run_chain(ModelKind.INFMM, held_out, phi, run).samples
        binary_samples = run_chain(ModelKind.INFMM, binary, phi, run).samples
        count_ll = binarized_test_loglik(count_samples, held_out, link_for(ModelKind.INFMM, held_out))
        binary_ll = heldout_loglik(binary_samples, binary, link_for(ModelKind.INFMM, binary))
        successes += count_ll > binary_ll
    assert successes >= 9


def _planted_features(n, rng):
    """Two binary features sharing a few entities; links are likely only within a pure feature group"""
    z = np.zeros((n, 2), dtype=np.int8)
    z[: n // 2 + n // 10, 0] = 1
    z[n // 2 - n // 10:, 1] = 1
    B = np.array([[2.5, -4.0], [-4.0, 2.5]])
    data = simulate_edges(z @ B @ z.T, link_model_for(LinkKind.BINARY, True, BHyper()), rng)
    return data, MetadataMatrix(phi=z)


@pytest.mark.slow
def test_planted_features_predict_heldout_links():
    successes = 0
    for seed in SEEDS:
        data, phi = _planted_features(30, np.random.default_rng(seed))
        held_out = _hold_out(data, seed)
        run = RunConfig(iterations=600, burn_in=300, thinning=5, k_max=3, seed=seed)
        result = run_chain(ModelKind.INFLF, held_out, phi, run)
        prediction = predictive_scores(result.samples, held_out, link_for(ModelKind.INFLF, held_out))
        successes += auc(prediction.event_prob, held_out, CellState.TEST) > 0.8
    assert successes >= 9


@pytest.mark.slow
def test_metadata_model_recovers_planted_partition():
    successes = 0
    for seed in SEEDS:
        data, labels = plant_communities(40, 2, 0.8, LinkKind.BINARY, seed=seed)
        noise = np.random.default_rng(seed).integers(0, 2, size=40)
        phi = MetadataMatrix(phi=np.column_stack([labels == 0, labels == 1, noise]).astype(np.int8))
        result = run_chain(ModelKind.INFMM, data, phi, RunConfig(iterations=500, burn_in=250, thinning=5, init_k=2, seed=seed))
        successes += coclustering_ari(labels, map_labels(result.samples[-20:])) >= 0.9
    assert successes >= 9


def _median_sweep_seconds(n, F, sweeps=15, warmup=3):
    data, _ = plant_communities(n, 5, 0.5, LinkKind.BINARY, seed=0)
    phi = random_metadata(n, F, np.random.default_rng(0))
    sampler = make_sampler(ModelKind.INFMM, data, phi, RunConfig(iterations=sweeps, burn_in=0, truncation=5))
    state = sampler.initialize(np.random.default_rng(0))
    for _ in range(warmup):
        sampler.sweep(state)
    timings = []
    for _ in range(sweeps):
        start = time.perf_counter()
        sampler.sweep(state)
        timings.append(time.perf_counter() - start)
    return float(np.median(timings))


@pytest.mark.slow
def test_sweep_cost_scaling():
    n_ratio = _median_sweep_seconds(200, 2) / _median_sweep_seconds(100, 2)
    assert 3.4 <= n_ratio <= 4.6
    f_ratio = _median_sweep_seconds(200, 20) / _median_sweep_seconds(200, 2)
    assert f_ratio <= 1.3
