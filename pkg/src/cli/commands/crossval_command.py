from pathlib import Path
import logging

from ...services.inference_service import InferenceService
from ...utils.formatting import aggregate_table
from .base_command import BaseCommand

logger = logging.getLogger(__name__)


class CrossvalCommand(BaseCommand):
    """k-fold link prediction: one metrics row per (fold, chain) plus a mean ∓ std row"""

    name = "crossval"

    def __init__(self, settings, file_service=None, inference_service=None):
        super().__init__(settings, file_service)
        self.inference_service = inference_service or InferenceService(data_service=self.data_service)

    def run(self, outdir: Path):
        settings = self.settings
        data, phi = self.load_inputs()
        plan = self.data_service.make_cv_folds(data, settings.seed, settings.folds)
        self.file_service.write_csv(outdir / "folds.csv", plan.to_frame())

        report = self.inference_service.crossvalidate(
            settings.model, data, phi, settings.run_config(), settings.folds,
            eta_hyper=settings.eta_hyper(),
            b_hyper=settings.b_hyper(),
            immm_alpha=settings.immm_alpha,
            n_jobs=settings.jobs,
            plan=plan,
        )
        summary = report.aggregate()
        self.file_service.write_csv(outdir / "metrics.csv", report.to_frame())
        self.file_service.write_csv(outdir / "aggregate.csv", aggregate_table(summary, settings.model.value))
        self.file_service.write_json(outdir / "report.json", {
            'model': settings.model.value,
            'family': settings.family.value,
            'folds': settings.folds,
            'chains': settings.chains,
            **report.to_dict(),
        })
        auc = summary['auc']
        if auc['mean'] is not None:
            logger.info(f"Cross-validated AUC {auc['mean']:.4f} ∓ {auc['std']:.4f} over {len(report.rows)} runs")
