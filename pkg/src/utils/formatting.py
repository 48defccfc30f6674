"""
Text formatting for report tables
"""

from typing import Dict, Optional

import pandas as pd

from ..models.report_models import METRIC_COLUMNS


def format_mean_std(mean: Optional[float], std: Optional[float], digits: int = 4) -> str:
    """'m ∓ s'; an undefined metric renders as 'nan'"""
    if mean is None or std is None:
        return "nan"
    return f"{mean:.{digits}f} ∓ {std:.{digits}f}"


def aggregate_table(summary: Dict[str, Dict[str, Optional[float]]], model: str, digits: int = 4) -> pd.DataFrame:
    """One-row table in the reporting column order"""
    row = {'model': model}
    for column in METRIC_COLUMNS:
        stats = summary.get(column, {})
        row[column] = format_mean_std(stats.get('mean'), stats.get('std'), digits)
    return pd.DataFrame([row], columns=['model'] + METRIC_COLUMNS)
