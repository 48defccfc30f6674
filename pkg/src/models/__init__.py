"""
Data models and schemas for InfoRel
"""

from .network_models import LinkKind, CellState, NetworkData, MetadataMatrix, HoldoutPlan
from .prior_models import EtaHyper, BHyper, ImportanceMatrix, MembershipProfile
from .sampler_models import ModelKind, RunConfig, SamplerState, TraceRecord, LatentSnapshot, ChainResult
from .report_models import PredictionMatrix, MetricsRow, MetricsReport, DiagnosticsReport, FitReport
from .simulation_models import SyntheticSpec, GroundTruth
from .settings_models import RunSettings

__all__ = [
    'LinkKind',
    'CellState',
    'NetworkData',
    'MetadataMatrix',
    'HoldoutPlan',
    'EtaHyper',
    'BHyper',
    'ImportanceMatrix',
    'MembershipProfile',
    'ModelKind',
    'RunConfig',
    'SamplerState',
    'TraceRecord',
    'LatentSnapshot',
    'ChainResult',
    'PredictionMatrix',
    'MetricsRow',
    'MetricsReport',
    'DiagnosticsReport',
    'FitReport',
    'SyntheticSpec',
    'GroundTruth',
    'RunSettings'
]
