from pathlib import Path
import logging

import pandas as pd

from ...services.diagnostics_service import diagnose_trace, summarize_reports
from ...services.errors import DataError
from .base_command import BaseCommand

logger = logging.getLogger(__name__)


class DiagnoseCommand(BaseCommand):
    name = "diagnose"

    def run(self, outdir: Path):
        column = self.settings.column
        frame = self.file_service.read_table(self.require('trace'))
        if 'iteration' not in frame.columns:
            raise DataError(f"Trace {self.settings.trace} has no iteration column")
        reports = diagnose_trace(frame, column)
        chains = sorted(frame['chain'].unique().tolist()) if 'chain' in frame.columns else [0]

        if len(reports) == 1:
            payload = reports[0].to_dict()
        else:
            payload = {
                'column': column,
                'chains': [{'chain': chain, **report.to_dict()} for chain, report in zip(chains, reports)],
                'summary': summarize_reports(reports),
            }
        self.file_service.write_json(outdir / "report.json", payload)

        rho = pd.concat([
            pd.DataFrame({'chain': chain, 'lag': range(len(report.rho)), 'rho': report.rho})
            for chain, report in zip(chains, reports)
        ], ignore_index=True)
        self.file_service.write_csv(outdir / "rho.csv", rho)
        for chain, report in zip(chains, reports):
            logger.info(f"chain {chain}: tau_hat={report.tau_hat:.3f} ESS={report.ess:.1f} (C={report.cutoff_C}, M={report.M})")
