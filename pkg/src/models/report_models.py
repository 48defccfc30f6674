from dataclasses import dataclass, field, asdict
from typing import Dict, List, Optional, Any

import numpy as np
import pandas as pd


@dataclass
class PredictionMatrix:
    """Posterior predictive scores; event_prob is Pr(e_ij > 0)"""
    scores: np.ndarray
    event_prob: np.ndarray


@dataclass
class MetricsRow:
    fold: Optional[int]
    chain: int
    train_error: Optional[float] = None
    test_error: Optional[float] = None
    test_loglik: Optional[float] = None
    auc: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


METRIC_COLUMNS = ['train_error', 'test_error', 'test_loglik', 'auc']


@dataclass
class MetricsReport:
    rows: List[MetricsRow] = field(default_factory=list)

    def to_frame(self) -> pd.DataFrame:
        columns = ['fold', 'chain'] + METRIC_COLUMNS
        return pd.DataFrame([row.to_dict() for row in self.rows], columns=columns)

    def aggregate(self) -> Dict[str, Dict[str, Optional[float]]]:
        """Mean and standard deviation of every metric across rows"""
        frame = self.to_frame()
        summary = {}
        for column in METRIC_COLUMNS:
            values = pd.to_numeric(frame[column], errors='coerce').dropna()
            if values.empty:
                summary[column] = {'mean': None, 'std': None}
            else:
                summary[column] = {'mean': float(values.mean()), 'std': float(values.std(ddof=0))}
        return summary

    def to_dict(self) -> Dict[str, Any]:
        return {
            'rows': [row.to_dict() for row in self.rows],
            'aggregate': self.aggregate(),
        }


@dataclass
class DiagnosticsReport:
    tau_hat: float
    ess: float
    ess_conventional: float
    cutoff_C: int
    M: int
    rho: np.ndarray
    column: str = "K"

    def to_dict(self) -> Dict[str, Any]:
        return {
            'column': self.column,
            'tau_hat': self.tau_hat,
            'ess': self.ess,
            'ess_conventional': self.ess_conventional,
            'cutoff_C': self.cutoff_C,
            'M': self.M,
        }


@dataclass
class FitReport:
    """Everything a fit produces for one network: per-chain results and their metrics"""
    chains: List[Any]
    metrics: MetricsReport
    prediction: PredictionMatrix
    importance: pd.DataFrame

    def trace_frame(self) -> pd.DataFrame:
        frames = []
        for result in self.chains:
            frame = pd.DataFrame([trace.to_dict() for trace in result.traces],
                                 columns=['iteration', 'K', 'log_joint', 'auc', 'loglik'])
            frame.insert(0, 'chain', result.chain_id)
            frames.append(frame)
        return pd.concat(frames, ignore_index=True)
