"""
Convergence diagnostics for sampler traces: autocorrelation, integrated
autocorrelation time and effective sample size
"""

from typing import Dict, List, Optional, Any
import logging

import numpy as np
import pandas as pd
from scipy.signal import correlate

from ..config import Config
from ..models.report_models import DiagnosticsReport
from .errors import DataError

logger = logging.getLogger(__name__)

MIN_SERIES_LENGTH = 4


def autocorr(series: np.ndarray, max_lag: Optional[int] = None) -> np.ndarray:
    """Biased sample autocorrelation rho_0..rho_max_lag"""
    x = np.asarray(series, dtype=float).ravel()
    if x.size < 2:
        raise DataError("Autocorrelation needs at least two values")
    centred = x - x.mean()
    denom = float(centred @ centred)
    if denom <= 0.0:
        raise DataError("zero-variance series")
    max_lag = x.size - 1 if max_lag is None else min(int(max_lag), x.size - 1)
    full = correlate(centred, centred, mode='full', method='fft')
    rho = full[x.size - 1:x.size + max_lag] / denom
    rho[0] = 1.0
    return rho


def iat_ess(series: np.ndarray, column: str = "K") -> DiagnosticsReport:
    """tau_hat = 1/2 + sum_{l<C} rho_l and ESS = 2M / (1 + tau_hat) on the second half.

    C is the first lag whose |rho_l| drops below 2/sqrt(M); when no lag does,
    C = M.
    """
    x = np.asarray(series, dtype=float).ravel()
    if x.size < MIN_SERIES_LENGTH:
        raise DataError(f"Diagnostics need at least {MIN_SERIES_LENGTH} values, got {x.size}")
    if not np.isfinite(x).all():
        raise DataError("Series contains missing or non-finite values")
    M = x.size // 2
    # first half is burn-in
    tail = x[x.size - M:]
    rho = autocorr(tail, max_lag=M - 1)

    below = np.flatnonzero(np.abs(rho[1:]) < 2.0 / np.sqrt(M)) + 1
    cutoff = int(below[0]) if below.size else M
    tau_hat = 0.5 + float(rho[1:cutoff].sum())
    if 1.0 + tau_hat <= 0:
        raise DataError(f"Integrated autocorrelation time {tau_hat} gives no valid ESS")
    ess = 2.0 * M / (1.0 + tau_hat)
    # antithetic chains can push tau_hat to zero or below
    ess_conventional = M / (2.0 * max(tau_hat, Config.TAU_FLOOR))
    return DiagnosticsReport(
        tau_hat=tau_hat,
        ess=ess,
        ess_conventional=ess_conventional,
        cutoff_C=cutoff,
        M=M,
        rho=rho,
        column=column,
    )


def diagnose_trace(frame: pd.DataFrame, column: str = "K") -> List[DiagnosticsReport]:
    """One report per chain; a trace without a `chain` column is a single chain"""
    if column not in frame.columns:
        raise DataError(f"Trace has no column {column!r}; available: {list(frame.columns)}")
    if 'chain' not in frame.columns:
        return [iat_ess(pd.to_numeric(frame[column], errors='coerce').to_numpy(), column)]
    reports = []
    for chain, group in frame.groupby('chain', sort=True):
        values = pd.to_numeric(group.sort_values('iteration')[column] if 'iteration' in group else group[column], errors='coerce')
        try:
            reports.append(iat_ess(values.to_numpy(), column))
        except DataError as e:
            raise DataError(f"chain {chain}: {e}")
    return reports


def summarize_reports(reports: List[DiagnosticsReport]) -> Dict[str, Any]:
    """Mean and population standard deviation of tau_hat and ESS across chains"""
    summary = {}
    for name in ('tau_hat', 'ess', 'ess_conventional'):
        values = np.array([getattr(report, name) for report in reports], dtype=float)
        values = values[np.isfinite(values)]
        summary[name] = {
            'mean': float(values.mean()) if values.size else None,
            'std': float(values.std()) if values.size else None,
        }
    return summary
