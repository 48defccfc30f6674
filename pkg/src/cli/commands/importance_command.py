from pathlib import Path
import logging

import pandas as pd

from ...models.prior_models import ImportanceMatrix
from ...models.sampler_models import ModelKind
from ...services.errors import DataError
from ...services.inference_service import POLARITY
from ...services.prior_service import importance_summary
from .base_command import BaseCommand

logger = logging.getLogger(__name__)


class ImportanceCommand(BaseCommand):
    """Per-attribute geometric mean of an attribute x community eta table"""

    name = "importance"

    def run(self, outdir: Path):
        frame = self.file_service.read_table(self.require('eta'))
        names = frame.iloc[:, 0].astype(str).tolist()
        values = frame.iloc[:, 1:].apply(pd.to_numeric, errors='coerce')
        if values.isna().any().any():
            raise DataError(f"eta table {self.settings.eta} has non-numeric entries")
        try:
            summary = importance_summary(ImportanceMatrix(values.to_numpy()))
        except ValueError as e:
            raise DataError(f"Invalid eta table: {e}")
        result = pd.DataFrame({
            'attribute': names,
            'importance': summary,
            'polarity': POLARITY[self.settings.model.base],
        })
        self.file_service.write_csv(outdir / "importance.csv", result)
        if result.empty:
            return
        larger_wins = self.settings.model.base == ModelKind.INFLF
        strongest = result['importance'].idxmax() if larger_wins else result['importance'].idxmin()
        logger.info(f"Most influential attribute: {result.loc[strongest, 'attribute']}")
