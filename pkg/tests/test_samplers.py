import numpy as np
import pytest

from src.config import Config
from src.models.network_models import CellState, LinkKind, NetworkData
from src.models.sampler_models import ModelKind, RunConfig
from src.services.chain_service import ChainService, ChainJob, run_chain, chain_seed
from src.services.checkpoint_service import CheckpointService
from src.services.data_service import DataService
from src.services.errors import CheckpointError, DataError, SamplerError
from src.services.sampling.base_sampler import normalize_log_weights
from src.services.sampling.infmm_sampler import InfMMSampler, indicator_conditional_infmm
from src.services.sampling.cinfmm_sampler import CInfMMSampler, cinfmm_indicator_conditional, log_walk_proposal
from src.services.sampling.inflf_sampler import InfLFSampler
from src.services.simulation_service import random_metadata
from tests.helpers import full_network

MODELS = [ModelKind.INFMM, ModelKind.CINFMM, ModelKind.INFLF]


def _metadata(n, F=2, seed=0):
    return random_metadata(n, F, np.random.default_rng(seed))


def _same_trajectory(first, second):
    assert len(first.samples) == len(second.samples)
    for a, b in zip(first.samples, second.samples):
        assert a.iteration == b.iteration
        assert np.array_equal(a.B, b.B)
        assert np.array_equal(a.eta, b.eta)
    assert [t.log_joint for t in first.traces] == [t.log_joint for t in second.traces]


class TestConditionals:

    def test_infmm_indicator_with_new_community(self):
        p = indicator_conditional_infmm(
            np.array([0.5, 0.25]), np.log([0.9, 0.1]), residual=0.25, log_marginal=np.log(0.5)
        )
        np.testing.assert_allclose(p, [0.75, 0.025 / 0.6, 0.125 / 0.6])

    def test_infmm_indicator_without_residual(self):
        np.testing.assert_allclose(indicator_conditional_infmm(np.array([0.5, 0.5]), np.zeros(2)), [0.5, 0.5])

    def test_cinfmm_indicator_flat_likelihood(self):
        np.testing.assert_allclose(cinfmm_indicator_conditional(np.array([2, 0]), np.ones(2), np.zeros(2)), [0.75, 0.25])

    def test_log_walk_rejects_instead_of_clipping(self):
        rng = np.random.default_rng(9)
        at_ceiling = [log_walk_proposal(Config.ETA_CEILING, rng) for _ in range(2000)]
        kept = [x for x in at_ceiling if x is not None]
        assert all(x <= Config.ETA_CEILING for x in kept)
        assert 0.4 < 1 - len(kept) / len(at_ceiling) < 0.6
        at_floor = [log_walk_proposal(Config.ETA_FLOOR, rng) for _ in range(2000)]
        assert all(x >= Config.ETA_FLOOR for x in at_floor if x is not None)
        assert at_floor.count(None) > 800

    def test_negative_counts(self):
        with pytest.raises(SamplerError):
            cinfmm_indicator_conditional(np.array([-1, 2]), np.ones(2), np.zeros(2))

    def test_all_zero_weights(self):
        with pytest.raises(SamplerError):
            normalize_log_weights(np.full(3, -np.inf))

    @pytest.mark.parametrize("role", ["sender", "receiver"])
    @pytest.mark.parametrize("seed", range(20))
    def test_cinfmm_conditional_matches_collapsed_joint(self, role, seed):
        """Normalised exp(log joint) over the values of one indicator equals its conditional"""
        rng = np.random.default_rng(seed)
        edges = (rng.random((3, 3)) < 0.5).astype(int)
        np.fill_diagonal(edges, 0)
        data = full_network(edges, LinkKind.BINARY)
        run = RunConfig(iterations=2, burn_in=0, k_max=2, seed=seed)
        sampler = CInfMMSampler(ModelKind.CINFMM, data, _metadata(3, F=int(rng.integers(1, 3)), seed=seed), run)
        state = sampler.initialize(rng)
        target = state.s if role == "sender" else state.r
        for i, j in zip(*np.nonzero(~np.eye(3, dtype=bool))):
            conditional = sampler.indicator_conditional(state, i, j, role)
            original = target[i, j]
            joint = []
            for k in range(2):
                target[i, j] = k
                joint.append(sampler.log_joint(state))
            target[i, j] = original
            np.testing.assert_allclose(conditional, normalize_log_weights(np.array(joint))[0], rtol=1e-10)


class TestInfMMSampler:

    def test_no_empty_communities_after_sweep(self, planted_binary):
        data, _ = planted_binary
        run = RunConfig(iterations=10, burn_in=0, init_k=3, seed=1)
        sampler = InfMMSampler(ModelKind.INFMM, data, _metadata(data.n), run)
        state = sampler.initialize(np.random.default_rng(1))
        for _ in range(5):
            sampler.sweep(state)
            assert (state.counts().sum(axis=0) > 0).all()
            assert state.psi.shape == (data.n, state.K_active)
            np.testing.assert_allclose(state.pi.sum(axis=1) + state.residual, 1.0)
            assert np.isfinite(sampler.log_joint(state))

    def test_truncated_mode_keeps_K(self, planted_count):
        data, _ = planted_count
        run = RunConfig(iterations=5, burn_in=0, truncation=3, seed=2)
        sampler = InfMMSampler(ModelKind.INFMM, data, _metadata(data.n), run)
        state = sampler.initialize(np.random.default_rng(2))
        for _ in range(4):
            sampler.sweep(state)
            assert state.K_active == 3
            assert np.allclose(state.residual, 0.0)

    @pytest.mark.parametrize("alpha", [1.0, 2.0])
    def test_metadata_free_run_matches_immm_updates(self, planted_binary, alpha):
        """Every psi and B conditional of a 100-sweep iMMM run equals the metadata-free update"""
        data, _ = planted_binary
        sampler = InfMMSampler(ModelKind.IMMM, data, None, RunConfig(iterations=100, burn_in=0, seed=8), immm_alpha=alpha)
        rows, cols = np.nonzero(data.train_mask)
        seen = {'psi': [], 'B': []}

        def record(name, params):
            snapshot = {'s': state.s[rows, cols].copy(), 'r': state.r[rows, cols].copy(), 'hyper': sampler.link.hyper}
            seen[name].append(params | snapshot)

        sampler.observer = record
        state = sampler.initialize(np.random.default_rng(8))
        assert np.array_equal(sampler.transforms(state.eta), np.full((data.n, state.K_active), alpha))
        for _ in range(100):
            sampler.sweep(state)
            assert state.eta_frozen and np.array_equal(state.eta, np.full(state.eta.shape, alpha))
        assert len(seen['psi']) == len(seen['B']) == 100

        values = data.edges[rows, cols]
        for psi_params, b_params in zip(seen['psi'], seen['B']):
            s, r = psi_params['s'], psi_params['r']
            assert np.array_equal(s, b_params['s']) and np.array_equal(r, b_params['r'])
            K = psi_params['N'].shape[1]
            N = np.zeros((data.n, K))
            np.add.at(N, (rows, s), 1)
            np.add.at(N, (cols, r), 1)
            tail = N[:, ::-1].cumsum(axis=1)[:, ::-1] - N
            assert np.array_equal(psi_params['N'], N)
            assert np.array_equal(psi_params['a'], 1.0 + N)
            assert np.array_equal(psi_params['b'], alpha + tail)

            ones = np.zeros((K, K))
            cells = np.zeros((K, K))
            np.add.at(ones, (s, r), values)
            np.add.at(cells, (s, r), 1)
            hyper = b_params['hyper']
            assert np.array_equal(b_params['a'], hyper.a_B + ones)
            assert np.array_equal(b_params['b'], hyper.b_B + (cells - ones))

    def test_metadata_size_mismatch(self, planted_binary):
        data, _ = planted_binary
        with pytest.raises(DataError):
            InfMMSampler(ModelKind.INFMM, data, _metadata(data.n + 1), RunConfig(iterations=2, burn_in=0))


class TestInfLFSampler:

    @pytest.mark.parametrize("fixture", ["planted_binary", "planted_count"])
    def test_sweeps_stay_valid(self, request, fixture):
        data, _ = request.getfixturevalue(fixture)
        run = RunConfig(iterations=4, burn_in=0, k_max=3, seed=6)
        sampler = InfLFSampler(ModelKind.INFLF, data, _metadata(data.n), run)
        state = sampler.initialize(np.random.default_rng(6))
        for _ in range(3):
            sampler.sweep(state)
            assert set(np.unique(state.z)) <= {0, 1}
            assert state.B.shape == (3, 3)
            assert ((state.psi > 0) & (state.psi < 1)).all()
            assert np.isfinite(sampler.log_joint(state))
        if data.kind == LinkKind.COUNT:
            assert (state.B > 0).all()

    def test_lfrm_freezes_eta(self, planted_binary):
        data, _ = planted_binary
        run = RunConfig(iterations=3, burn_in=0, k_max=2, seed=0)
        sampler = InfLFSampler(ModelKind.LFRM, data, None, run, immm_alpha=3.0)
        state = sampler.initialize(np.random.default_rng(0))
        sampler.sweep(state)
        np.testing.assert_allclose(state.eta, 3.0)

    def test_flat_likelihood_features_follow_membership(self):
        """With every cell unobserved each z_ik is a Bernoulli(pi_ik) draw"""
        n, K, sweeps = 15, 4, 400
        mask = np.full((n, n), CellState.UNOBSERVED, dtype=np.int8)
        data = NetworkData(n=n, edges=np.zeros((n, n)), kind=LinkKind.BINARY, mask=mask)
        sampler = InfLFSampler(ModelKind.INFLF, data, _metadata(n), RunConfig(iterations=sweeps, burn_in=0, k_max=K, seed=10))
        state = sampler.initialize(np.random.default_rng(10))
        z_total = np.zeros((n, K))
        pi_total = np.zeros((n, K))
        variance = 0.0
        for _ in range(sweeps):
            pi = state.pi.copy()
            sampler.sweep(state)
            z_total += state.z
            pi_total += pi
            variance += (pi * (1.0 - pi)).sum()
        assert abs((z_total - pi_total).sum()) < 4 * np.sqrt(variance)
        np.testing.assert_allclose(z_total / sweeps, pi_total / sweeps, atol=0.15)

    def test_mixed_membership_needs_training_cells(self):
        mask = np.full((4, 4), CellState.UNOBSERVED, dtype=np.int8)
        data = NetworkData(n=4, edges=np.zeros((4, 4)), kind=LinkKind.BINARY, mask=mask)
        with pytest.raises(DataError):
            InfMMSampler(ModelKind.INFMM, data, _metadata(4), RunConfig(iterations=2, burn_in=0))


class TestChainService:

    def test_retained_records(self, planted_binary):
        data, _ = planted_binary
        result = run_chain(ModelKind.INFMM, data, _metadata(data.n), RunConfig(iterations=100, burn_in=50, seed=0))
        assert len(result.traces) == 50
        assert len(result.samples) == 50
        assert [t.iteration for t in result.traces] == list(range(51, 101))

    def test_thinning(self, planted_binary):
        data, _ = planted_binary
        run = RunConfig(iterations=10, burn_in=2, thinning=3, seed=0)
        result = run_chain(ModelKind.CINFMM, data, _metadata(data.n), run)
        assert [t.iteration for t in result.traces] == [5, 8]
        assert run.retained_count == 2

    @pytest.mark.parametrize("model", MODELS)
    def test_same_seed_same_chain(self, planted_binary, quick_run, model):
        data, _ = planted_binary
        phi = _metadata(data.n)
        _same_trajectory(run_chain(model, data, phi, quick_run), run_chain(model, data, phi, quick_run))

    def test_chain_streams_are_distinct(self):
        first = np.random.default_rng(chain_seed(0, 0)).random(4)
        assert not np.array_equal(first, np.random.default_rng(chain_seed(0, 1)).random(4))
        assert not np.array_equal(first, np.random.default_rng(chain_seed(0, 0, fold=1)).random(4))

    @pytest.mark.parametrize("model", MODELS)
    def test_test_cells_never_reach_the_sampler(self, planted_binary, quick_run, model):
        data, _ = planted_binary
        held_out = DataService().make_cv_folds(data, 0, 4).apply(data, 1)
        flipped = NetworkData(
            n=held_out.n,
            edges=np.where(held_out.test_mask, 1 - held_out.edges, held_out.edges),
            kind=held_out.kind,
            mask=held_out.mask,
        )
        run = quick_run.model_copy(update={'record_heldout': False})
        phi = _metadata(data.n)
        _same_trajectory(run_chain(model, held_out, phi, run), run_chain(model, flipped, phi, run))

    def test_heldout_trace(self, planted_binary, quick_run):
        data, _ = planted_binary
        held_out = DataService().make_cv_folds(data, 0, 3).apply(data, 0)
        result = run_chain(ModelKind.INFMM, held_out, _metadata(data.n), quick_run)
        assert all(np.isfinite(t.heldout_loglik) for t in result.traces)
        assert all(t.heldout_auc is None or 0.0 <= t.heldout_auc <= 1.0 for t in result.traces)

    def test_parallel_matches_serial(self, planted_binary, quick_run):
        data, _ = planted_binary
        run = quick_run.model_copy(update={'chains': 2})
        jobs = [ChainJob(model=ModelKind.INFMM, data=data, phi=_metadata(data.n), run=run, chain_id=c) for c in range(2)]
        serial = ChainService().run_chains(jobs, n_jobs=1)
        parallel = ChainService().run_chains(jobs, n_jobs=2)
        for a, b in zip(serial, parallel):
            assert a.chain_id == b.chain_id
            _same_trajectory(a, b)


class TestCheckpointResume:

    @pytest.mark.parametrize("model", MODELS)
    def test_resume_continues_the_same_trajectory(self, tmp_path, planted_binary, model):
        data, _ = planted_binary
        phi = _metadata(data.n)
        path = tmp_path / "chain_00.json"
        service = ChainService()

        straight = service.run_chain(ChainJob(model=model, data=data, phi=phi, run=RunConfig(iterations=10, burn_in=2, seed=9)))
        service.run_chain(ChainJob(
            model=model, data=data, phi=phi, run=RunConfig(iterations=5, burn_in=2, seed=9, checkpoint_every=5),
            checkpoint_path=path,
        ))
        assert path.exists()
        resumed = service.run_chain(ChainJob(
            model=model, data=data, phi=phi, run=RunConfig(iterations=10, burn_in=2, seed=9, checkpoint_every=5),
            checkpoint_path=path, resume=True,
        ))
        _same_trajectory(straight, resumed)

    def test_fingerprint_mismatch(self, tmp_path, planted_binary, quick_run):
        data, _ = planted_binary
        path = tmp_path / "chain_00.json"
        run = quick_run.model_copy(update={'checkpoint_every': 2})
        ChainService().run_chain(ChainJob(model=ModelKind.INFMM, data=data, phi=_metadata(data.n), run=run, checkpoint_path=path))
        with pytest.raises(CheckpointError, match="different training data"):
            CheckpointService().load(path, ModelKind.INFMM, "0" * 64)
        with pytest.raises(CheckpointError, match="model"):
            CheckpointService().load(path, ModelKind.INFLF, data.training_fingerprint())

    def test_unreadable_checkpoint(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        with pytest.raises(CheckpointError):
            CheckpointService().load(path, ModelKind.INFMM, "")
