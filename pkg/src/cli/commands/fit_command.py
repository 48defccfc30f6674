from pathlib import Path
import logging

import numpy as np
import pandas as pd

from ...models.network_models import CellState
from ...models.report_models import FitReport
from ...services.inference_service import InferenceService
from .base_command import BaseCommand

logger = logging.getLogger(__name__)


class FitCommand(BaseCommand):
    """Run the chains on one network (optionally with one fold held out) and write every artifact"""

    name = "fit"

    def __init__(self, settings, file_service=None, inference_service=None):
        super().__init__(settings, file_service)
        self.inference_service = inference_service or InferenceService(data_service=self.data_service)

    def run(self, outdir: Path):
        settings = self.settings
        data, phi = self.load_inputs()
        if settings.fold is not None:
            plan = self.data_service.make_cv_folds(data, settings.seed, settings.folds)
            data = plan.apply(data, settings.fold)
            self.file_service.write_csv(outdir / "folds.csv", plan.to_frame())
            logger.info(f"Holding out fold {settings.fold}: {int(data.test_mask.sum())} test cells")

        report = self.inference_service.fit(
            settings.model, data, phi, settings.run_config(),
            eta_hyper=settings.eta_hyper(),
            b_hyper=settings.b_hyper(),
            immm_alpha=settings.immm_alpha,
            fold=settings.fold,
            n_jobs=settings.jobs,
            checkpoint_dir=outdir / "checkpoints" if settings.checkpoint_every else None,
            resume=settings.resume,
        )
        self._write_chains(outdir, report)
        self._write_scores(outdir, data, report)

        self.file_service.write_csv(outdir / "eta_importance.csv", report.importance)
        if phi is not None:
            self.file_service.write_csv(outdir / "phi.csv", phi.to_frame())
        self.file_service.write_csv(outdir / "metrics.csv", report.metrics.to_frame())
        self.file_service.write_json(outdir / "report.json", {
            'model': settings.model.value,
            'family': settings.family.value,
            'fold': settings.fold,
            'final_K': {str(result.chain_id): result.final_state.K_active for result in report.chains},
            'retained_samples': sum(len(result.samples) for result in report.chains),
            'metrics': report.metrics.to_dict(),
        })

    def _write_chains(self, outdir: Path, report: FitReport):
        trace = report.trace_frame()
        self.file_service.write_csv(outdir / "trace.csv", trace)
        self.file_service.write_csv(outdir / "auc_trace.csv", trace[['chain', 'iteration', 'auc', 'loglik']])
        for result in report.chains:
            chain_dir = self.file_service.ensure_dir(outdir / "chains" / f"chain_{result.chain_id:02d}")
            self.file_service.write_csv(chain_dir / "trace.csv", trace[trace['chain'] == result.chain_id].drop(columns='chain'))
            self.file_service.write_jsonl(chain_dir / "samples.jsonl", [sample.to_dict() for sample in result.samples])
            if result.samples and result.samples[-1].eta.size and self.settings.model.uses_metadata:
                eta = result.samples[-1].eta
                frame = pd.DataFrame(eta, columns=[f"community_{k}" for k in range(eta.shape[1])])
                names = report.importance['attribute'].tolist()
                frame.insert(0, 'attribute', names if len(names) == eta.shape[0] else np.arange(eta.shape[0]))
                self.file_service.write_csv(chain_dir / "eta_last.csv", frame)

    def _write_scores(self, outdir: Path, data, report: FitReport):
        """Score and truth per observed cell, for external ROC plotting"""
        rows, cols = np.nonzero(data.observed_mask)
        states = data.mask[rows, cols]
        self.file_service.write_csv(outdir / "scores.csv", pd.DataFrame({
            'i': rows,
            'j': cols,
            'state': [CellState(s).name.lower() for s in states],
            'edge': data.edges[rows, cols],
            'score': report.prediction.scores[rows, cols],
            'event_prob': report.prediction.event_prob[rows, cols],
        }))
