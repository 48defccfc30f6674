from dataclasses import dataclass, asdict
from typing import Dict, Optional

import numpy as np


def _check_positive(**values: float):
    for name, value in values.items():
        if not (np.isfinite(value) and value > 0):
            raise ValueError(f"{name} must be a positive finite number, got {value}")


@dataclass
class EtaHyper:
    alpha_eta: float = 1.0
    beta_eta: float = 1.0

    def __post_init__(self):
        _check_positive(alpha_eta=self.alpha_eta, beta_eta=self.beta_eta)

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


@dataclass
class BHyper:
    """Hyperparameters of every compatibility prior; each family reads its own pair"""
    alpha_B: float = 1.0
    beta_B: float = 1.0
    a_B: float = 1.0
    b_B: float = 1.0
    sigma_B: float = 1.0

    def __post_init__(self):
        _check_positive(
            alpha_B=self.alpha_B, beta_B=self.beta_B,
            a_B=self.a_B, b_B=self.b_B, sigma_B=self.sigma_B,
        )

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


@dataclass
class ImportanceMatrix:
    """Attribute-to-community importance indicators eta (F x K)"""
    eta: np.ndarray

    def __post_init__(self):
        self.eta = np.asarray(self.eta, dtype=float)
        if self.eta.ndim != 2:
            raise ValueError("eta must be an F x K matrix")
        if self.eta.size and not (self.eta > 0).all():
            raise ValueError("eta entries must be strictly positive")

    @property
    def K(self) -> int:
        return self.eta.shape[1]


@dataclass
class MembershipProfile:
    """Community weights per entity; residual is the unassigned stick mass (InfMM)"""
    pi: np.ndarray
    residual: Optional[np.ndarray] = None

    @property
    def total(self) -> np.ndarray:
        extra = self.residual if self.residual is not None else 0.0
        return self.pi.sum(axis=1) + extra
