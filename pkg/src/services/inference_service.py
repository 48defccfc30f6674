"""
Fit and cross-validation pipelines on top of the chain runner
"""

from pathlib import Path
from typing import List, Optional, Sequence
import logging

import numpy as np
import pandas as pd

from ..models.network_models import NetworkData, MetadataMatrix, HoldoutPlan
from ..models.prior_models import EtaHyper, BHyper
from ..models.report_models import MetricsReport, FitReport
from ..models.sampler_models import ModelKind, RunConfig, LatentSnapshot, ChainResult
from .chain_service import ChainService, ChainJob
from .data_service import DataService
from .errors import DataError
from .evaluation_service import evaluate_samples, predictive_scores
from .link_models import LinkModel, link_model_for
from .prior_service import importance_summary

logger = logging.getLogger(__name__)

POLARITY = {
    ModelKind.INFMM: "smaller_is_stronger",
    ModelKind.CINFMM: "smaller_is_stronger",
    ModelKind.INFLF: "larger_is_stronger",
}

IMPORTANCE_COLUMNS = ['attribute', 'importance', 'polarity']


def link_for(model: ModelKind, data: NetworkData, b_hyper: Optional[BHyper] = None) -> LinkModel:
    return link_model_for(data.kind, ModelKind(model).base == ModelKind.INFLF, b_hyper or BHyper())


def importance_frame(samples: Sequence[LatentSnapshot], attribute_names: List[str], model: ModelKind) -> pd.DataFrame:
    """Geometric mean over retained samples of each attribute's importance summary"""
    model = ModelKind(model)
    if not model.uses_metadata or not attribute_names or not samples:
        return pd.DataFrame(columns=IMPORTANCE_COLUMNS)
    log_summaries = np.vstack([np.log(importance_summary(sample.eta)) for sample in samples])
    return pd.DataFrame({
        'attribute': attribute_names,
        'importance': np.exp(log_summaries.mean(axis=0)),
        'polarity': POLARITY[model.base],
    })


class InferenceService:
    """Builds chain jobs, runs them and turns the retained samples into reports"""

    def __init__(self, chain_service: Optional[ChainService] = None, data_service: Optional[DataService] = None):
        self.chain_service = chain_service or ChainService()
        self.data_service = data_service or DataService()

    def build_jobs(
        self,
        model: ModelKind,
        data: NetworkData,
        phi: Optional[MetadataMatrix],
        run: RunConfig,
        eta_hyper: Optional[EtaHyper] = None,
        b_hyper: Optional[BHyper] = None,
        immm_alpha: float = 1.0,
        fold: Optional[int] = None,
        checkpoint_dir: Optional[Path] = None,
        resume: bool = False,
    ) -> List[ChainJob]:
        jobs = []
        for chain in range(run.chains):
            checkpoint = None
            if checkpoint_dir is not None:
                tag = f"chain_{chain:02d}" if fold is None else f"fold_{fold:02d}_chain_{chain:02d}"
                checkpoint = Path(checkpoint_dir) / f"{tag}.json"
            jobs.append(ChainJob(
                model=ModelKind(model), data=data, phi=phi, run=run, chain_id=chain, fold=fold,
                eta_hyper=eta_hyper, b_hyper=b_hyper, immm_alpha=immm_alpha,
                checkpoint_path=checkpoint, resume=resume,
            ))
        return jobs

    def fit(
        self,
        model: ModelKind,
        data: NetworkData,
        phi: Optional[MetadataMatrix],
        run: RunConfig,
        eta_hyper: Optional[EtaHyper] = None,
        b_hyper: Optional[BHyper] = None,
        immm_alpha: float = 1.0,
        fold: Optional[int] = None,
        n_jobs: int = 1,
        checkpoint_dir: Optional[Path] = None,
        resume: bool = False,
    ) -> FitReport:
        """Run config.chains chains on one network; `fold` only tags the seeds"""
        model = ModelKind(model)
        jobs = self.build_jobs(model, data, phi, run, eta_hyper, b_hyper, immm_alpha, fold, checkpoint_dir, resume)
        results = self.chain_service.run_chains(jobs, n_jobs)
        link = link_for(model, data, b_hyper)

        metrics = MetricsReport()
        for result in results:
            metrics.rows.append(evaluate_samples(result.samples, data, link, fold=fold, chain=result.chain_id))
        pooled = [sample for result in results for sample in result.samples]
        names = phi.attribute_names if phi is not None and model.uses_metadata else []
        return FitReport(
            chains=results,
            metrics=metrics,
            prediction=predictive_scores(pooled, data, link),
            importance=importance_frame(pooled, names, model),
        )

    def crossvalidate(
        self,
        model: ModelKind,
        data: NetworkData,
        phi: Optional[MetadataMatrix],
        run: RunConfig,
        n_folds: int,
        eta_hyper: Optional[EtaHyper] = None,
        b_hyper: Optional[BHyper] = None,
        immm_alpha: float = 1.0,
        n_jobs: int = 1,
        plan: Optional[HoldoutPlan] = None,
    ) -> MetricsReport:
        """One metrics row per (fold, chain); every fold x chain job runs in one pool"""
        model = ModelKind(model)
        plan = plan or self.data_service.make_cv_folds(data, run.seed, n_folds)
        link = link_for(model, data, b_hyper)

        fold_data = [plan.apply(data, fold) for fold in range(plan.n_folds)]
        jobs: List[ChainJob] = []
        for fold, held_out in enumerate(fold_data):
            if not held_out.train_mask.any():
                raise DataError(f"Fold {fold} leaves no training cells")
            jobs.extend(self.build_jobs(model, held_out, phi, run, eta_hyper, b_hyper, immm_alpha, fold=fold))
        logger.info(f"Cross-validating {model.value}: {plan.n_folds} folds x {run.chains} chains")
        results: List[ChainResult] = self.chain_service.run_chains(jobs, n_jobs)

        report = MetricsReport()
        for job, result in zip(jobs, results):
            report.rows.append(evaluate_samples(result.samples, fold_data[job.fold], link, fold=job.fold, chain=job.chain_id))
        return report


def crossvalidate(
    model: ModelKind,
    data: NetworkData,
    phi: Optional[MetadataMatrix],
    config: RunConfig,
    n_folds: int = 10,
    **kwargs,
) -> MetricsReport:
    return InferenceService().crossvalidate(model, data, phi, config, n_folds, **kwargs)
