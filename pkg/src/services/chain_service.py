"""
Chain orchestration: sampler construction, burn-in/thinning bookkeeping,
per-iteration traces, checkpointing and parallel execution of independent chains
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Type
import logging

import numpy as np

from ..models.network_models import NetworkData, MetadataMatrix
from ..models.prior_models import EtaHyper, BHyper
from ..models.sampler_models import ModelKind, RunConfig, TraceRecord, ChainResult
from .checkpoint_service import CheckpointService
from .errors import DataError
from .evaluation_service import auc_from_labels, cell_log_likelihoods, sample_matrices
from .sampling.base_sampler import BaseSampler
from .sampling.infmm_sampler import InfMMSampler
from .sampling.cinfmm_sampler import CInfMMSampler
from .sampling.inflf_sampler import InfLFSampler

logger = logging.getLogger(__name__)

SAMPLER_CLASSES = {
    ModelKind.INFMM: InfMMSampler,
    ModelKind.CINFMM: CInfMMSampler,
    ModelKind.INFLF: InfLFSampler,
}


def sampler_class(model: ModelKind) -> Type[BaseSampler]:
    return SAMPLER_CLASSES[ModelKind(model).base]


def make_sampler(
    model: ModelKind,
    data: NetworkData,
    phi: Optional[MetadataMatrix],
    run: RunConfig,
    eta_hyper: Optional[EtaHyper] = None,
    b_hyper: Optional[BHyper] = None,
    immm_alpha: float = 1.0,
) -> BaseSampler:
    return sampler_class(model)(model, data, phi, run, eta_hyper, b_hyper, immm_alpha)


def chain_seed(seed: int, chain: int, fold: Optional[int] = None) -> np.random.SeedSequence:
    """Independent stream per (fold, chain), whatever order jobs run in"""
    key = (chain,) if fold is None else (fold, chain)
    return np.random.SeedSequence(entropy=seed, spawn_key=key)


@dataclass
class ChainJob:
    model: ModelKind
    data: NetworkData
    phi: Optional[MetadataMatrix]
    run: RunConfig
    chain_id: int = 0
    fold: Optional[int] = None
    eta_hyper: Optional[EtaHyper] = None
    b_hyper: Optional[BHyper] = None
    immm_alpha: float = 1.0
    checkpoint_path: Optional[Path] = None
    resume: bool = False


class ChainService:
    """Runs chains; each chain owns its state and generator"""

    def __init__(self, checkpoint_service: Optional[CheckpointService] = None):
        self.checkpoint_service = checkpoint_service or CheckpointService()

    def run_chain(self, job: ChainJob) -> ChainResult:
        run = job.run
        sampler = make_sampler(job.model, job.data, job.phi, run, job.eta_hyper, job.b_hyper, job.immm_alpha)
        fingerprint = job.data.training_fingerprint()

        resume_from = job.checkpoint_path if job.resume and job.checkpoint_path and Path(job.checkpoint_path).exists() else None
        if resume_from:
            state, result = self.checkpoint_service.load(resume_from, job.model, fingerprint)
        else:
            rng = np.random.default_rng(chain_seed(run.seed, job.chain_id, job.fold))
            state = sampler.initialize(rng)
            result = ChainResult(chain_id=job.chain_id, seed=run.seed)

        heldout = self._heldout_cells(job.data) if run.record_heldout else None
        logger.info(f"Chain {job.chain_id} ({job.model.value}, fold {job.fold}) starting at iteration {state.iteration}")

        for iteration in range(state.iteration + 1, run.iterations + 1):
            sampler.sweep(state)
            if run.is_retained(iteration):
                sample = sampler.snapshot(state)
                result.samples.append(sample)
                trace = TraceRecord(iteration=iteration, K_active=state.K_active, log_joint=sampler.log_joint(state))
                if heldout is not None:
                    trace.heldout_auc, trace.heldout_loglik = self._heldout_metrics(sample, sampler, heldout)
                result.traces.append(trace)
            if job.checkpoint_path and run.checkpoint_every and iteration % run.checkpoint_every == 0:
                self.checkpoint_service.save(job.checkpoint_path, result, state, fingerprint, job.fold)

        result.final_state = state
        logger.info(f"Chain {job.chain_id} finished with {len(result.samples)} retained samples, K={state.K_active}")
        return result

    def _heldout_cells(self, data: NetworkData):
        rows, cols = np.nonzero(data.test_mask)
        if rows.size == 0:
            return None
        return rows, cols, data.edges[rows, cols]

    def _heldout_metrics(self, sample, sampler: BaseSampler, heldout):
        """Single-sample AUC and log likelihood on the Test cells"""
        rows, cols, e = heldout
        _, event = sample_matrices(sample, sampler.link)
        try:
            auc = auc_from_labels(event[rows, cols], e > 0)
        except DataError:
            auc = None
        loglik = float(cell_log_likelihoods(sample, sampler.link, rows, cols, e).sum())
        return auc, loglik

    def run_chains(self, jobs: List[ChainJob], n_jobs: int = 1) -> List[ChainResult]:
        """Results come back in job order regardless of n_jobs"""
        if n_jobs <= 1 or len(jobs) <= 1:
            return [self.run_chain(job) for job in jobs]
        with ProcessPoolExecutor(max_workers=n_jobs) as executor:
            return list(executor.map(_run_chain_job, jobs))


def _run_chain_job(job: ChainJob) -> ChainResult:
    return ChainService().run_chain(job)


def run_chain(model: ModelKind, data: NetworkData, phi: Optional[MetadataMatrix], config: RunConfig, **kwargs) -> ChainResult:
    return ChainService().run_chain(ChainJob(model=ModelKind(model), data=data, phi=phi, run=config, **kwargs))
