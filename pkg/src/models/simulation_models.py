from dataclasses import dataclass, field
from typing import Dict, Optional, Any

import numpy as np

from .network_models import LinkKind
from .prior_models import EtaHyper, BHyper
from .sampler_models import ModelKind


@dataclass
class SyntheticSpec:
    """Forward-simulation settings; `eta` pins the importance indicators instead of drawing them"""
    n: int
    F: int
    model: ModelKind = ModelKind.INFMM
    family: LinkKind = LinkKind.BINARY
    eta_hyper: EtaHyper = field(default_factory=EtaHyper)
    b_hyper: BHyper = field(default_factory=BHyper)
    truncation: int = 5
    seed: int = 0
    eta: Optional[np.ndarray] = None
    metadata_density: float = 0.5

    def __post_init__(self):
        self.model = ModelKind(self.model)
        self.family = LinkKind(self.family)
        if self.n < 2:
            raise ValueError(f"Synthetic networks need n >= 2, got {self.n}")
        if self.truncation < 1:
            raise ValueError(f"Truncation must be at least 1, got {self.truncation}")
        if self.F < 0:
            raise ValueError(f"Attribute count must be non-negative, got {self.F}")
        if self.eta is not None:
            self.eta = np.asarray(self.eta, dtype=float)
            if self.eta.shape != (self.F, self.truncation):
                raise ValueError(f"Pinned eta must be {self.F}x{self.truncation}, got {self.eta.shape}")


@dataclass
class GroundTruth:
    """Every latent drawn on the way to a synthetic network"""
    B: np.ndarray
    eta: Optional[np.ndarray] = None
    psi: Optional[np.ndarray] = None
    pi: Optional[np.ndarray] = None
    s: Optional[np.ndarray] = None
    r: Optional[np.ndarray] = None
    z: Optional[np.ndarray] = None
    labels: Optional[np.ndarray] = None

    @property
    def K(self) -> int:
        return int(self.B.shape[0])

    def to_dict(self) -> Dict[str, Any]:
        payload = {'K': self.K}
        for name in ('B', 'eta', 'psi', 'pi', 's', 'r', 'z', 'labels'):
            value = getattr(self, name)
            payload[name] = None if value is None else np.asarray(value).tolist()
        return payload
