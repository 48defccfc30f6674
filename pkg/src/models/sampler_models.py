from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..config import Config
from .prior_models import EtaHyper, BHyper


class ModelKind(str, Enum):
    INFMM = "infmm"
    CINFMM = "cinfmm"
    INFLF = "inflf"
    IMMM = "immm"
    LFRM = "lfrm"

    @property
    def base(self) -> 'ModelKind':
        """Sampler that runs this model (iMMM and LFRM are metadata-free special cases)"""
        return {ModelKind.IMMM: ModelKind.INFMM, ModelKind.LFRM: ModelKind.INFLF}.get(self, self)

    @property
    def uses_metadata(self) -> bool:
        return self not in (ModelKind.IMMM, ModelKind.LFRM)


class RunConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    iterations: int = Field(default=Config.DEFAULT_ITERATIONS, ge=1)
    burn_in: int = Field(default=Config.DEFAULT_BURN_IN, ge=0)
    thinning: int = Field(default=Config.DEFAULT_THINNING, ge=1)
    chains: int = Field(default=Config.DEFAULT_CHAINS, ge=1)
    k_max: int = Field(default=Config.DEFAULT_K_MAX, ge=1)
    init_k: int = Field(default=Config.DEFAULT_INIT_K, ge=1)
    seed: int = Field(default=Config.DEFAULT_SEED, ge=0)
    truncation: Optional[int] = Field(default=None, ge=1)
    checkpoint_every: int = Field(default=Config.DEFAULT_CHECKPOINT_EVERY, ge=0)
    resample_hyper: bool = False
    random_scan: bool = False
    record_heldout: bool = True

    @model_validator(mode='after')
    def _check_burn_in(self) -> 'RunConfig':
        if self.burn_in >= self.iterations:
            raise ValueError(f"burn_in ({self.burn_in}) must be smaller than iterations ({self.iterations})")
        return self

    def is_retained(self, iteration: int) -> bool:
        return iteration > self.burn_in and (iteration - self.burn_in) % self.thinning == 0

    @property
    def retained_count(self) -> int:
        return (self.iterations - self.burn_in) // self.thinning


@dataclass
class SamplerState:
    """All latent variables of one chain"""
    model: ModelKind
    eta: np.ndarray
    B: np.ndarray
    eta_hyper: EtaHyper
    b_hyper: BHyper
    rng: np.random.Generator
    psi: Optional[np.ndarray] = None
    pi: Optional[np.ndarray] = None
    residual: Optional[np.ndarray] = None
    s: Optional[np.ndarray] = None
    r: Optional[np.ndarray] = None
    z: Optional[np.ndarray] = None
    iteration: int = 0
    truncation: Optional[int] = None
    eta_frozen: bool = False

    @property
    def K_active(self) -> int:
        return int(self.B.shape[0])

    def counts(self) -> np.ndarray:
        """N_ik: sender indicators of i plus receiver indicators pointing at i"""
        n = self.s.shape[0]
        K = self.K_active
        N = np.zeros((n, K), dtype=np.int64)
        rows, cols = np.nonzero(self.s >= 0)
        np.add.at(N, (rows, self.s[rows, cols]), 1)
        np.add.at(N, (cols, self.r[rows, cols]), 1)
        return N


@dataclass
class TraceRecord:
    iteration: int
    K_active: int
    log_joint: float
    heldout_auc: Optional[float] = None
    heldout_loglik: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            'iteration': self.iteration,
            'K': self.K_active,
            'log_joint': self.log_joint,
            'auc': self.heldout_auc,
            'loglik': self.heldout_loglik,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'TraceRecord':
        return cls(
            iteration=int(data['iteration']),
            K_active=int(data['K']),
            log_joint=float(data['log_joint']),
            heldout_auc=data.get('auc'),
            heldout_loglik=data.get('loglik'),
        )


@dataclass
class LatentSnapshot:
    """Retained sample: what prediction and importance summaries need"""
    iteration: int
    B: np.ndarray
    eta: np.ndarray
    pi: Optional[np.ndarray] = None
    z: Optional[np.ndarray] = None

    @property
    def K(self) -> int:
        return int(self.B.shape[0])

    def to_dict(self) -> Dict[str, Any]:
        return {
            'iteration': self.iteration,
            'B': self.B.tolist(),
            'eta': self.eta.tolist(),
            'pi': None if self.pi is None else self.pi.tolist(),
            'z': None if self.z is None else self.z.astype(int).tolist(),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'LatentSnapshot':
        K = len(data['B'])
        eta = np.array(data['eta'], dtype=float)
        return cls(
            iteration=int(data['iteration']),
            B=np.array(data['B'], dtype=float).reshape(K, K),
            eta=eta.reshape(-1, K) if eta.size else np.zeros((0, K)),
            pi=None if data.get('pi') is None else np.array(data['pi'], dtype=float),
            z=None if data.get('z') is None else np.array(data['z'], dtype=np.int8),
        )


@dataclass
class ChainResult:
    chain_id: int
    seed: int
    samples: List[LatentSnapshot] = field(default_factory=list)
    traces: List[TraceRecord] = field(default_factory=list)
    final_state: Optional[SamplerState] = None
