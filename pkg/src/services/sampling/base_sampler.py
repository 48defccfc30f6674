"""
Shared plumbing for the Gibbs samplers: training-cell bookkeeping, metadata
handling for the metadata-free variants and categorical draws
"""

from abc import ABC, abstractmethod
from typing import Callable, Optional, Dict, Any
import logging

import numpy as np

from ...models.network_models import NetworkData, MetadataMatrix
from ...models.prior_models import EtaHyper, BHyper
from ...models.sampler_models import ModelKind, RunConfig, SamplerState, LatentSnapshot
from ..errors import DataError, SamplerError
from ..link_models import LinkModel, link_model_for
from ..prior_service import eta_products, sample_eta_prior
from .hyper_sampler import resample_hyper

logger = logging.getLogger(__name__)


def draw_categorical(P: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """One category per row of an (unnormalised) weight matrix, by inverse CDF"""
    cdf = np.cumsum(P, axis=1)
    u = rng.random(P.shape[0]) * cdf[:, -1]
    return np.minimum((u[:, None] >= cdf).sum(axis=1), P.shape[1] - 1)


def normalize_log_weights(log_w: np.ndarray) -> np.ndarray:
    """Row-wise softmax; a row with no finite weight is an invalid sampler state"""
    log_w = np.atleast_2d(log_w)
    top = log_w.max(axis=1, keepdims=True)
    if not np.isfinite(top).all():
        raise SamplerError("Zero normalizer in a conditional distribution")
    w = np.exp(log_w - top)
    return w / w.sum(axis=1, keepdims=True)


def draw_log_categorical(log_w: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    return draw_categorical(normalize_log_weights(log_w), rng)


class BaseSampler(ABC):
    """One chain's transition kernel over a fixed training set"""

    latent_feature = False

    def __init__(
        self,
        model: ModelKind,
        data: NetworkData,
        phi: Optional[MetadataMatrix],
        run: RunConfig,
        eta_hyper: Optional[EtaHyper] = None,
        b_hyper: Optional[BHyper] = None,
        immm_alpha: float = 1.0,
    ):
        self.model = ModelKind(model)
        self.run = run
        self.eta_hyper = eta_hyper or EtaHyper()
        self.b_hyper = b_hyper or BHyper()
        self.immm_alpha = float(immm_alpha)
        if self.immm_alpha <= 0:
            raise DataError(f"Concentration must be positive, got {immm_alpha}")

        if not self.model.uses_metadata:
            phi = MetadataMatrix.all_ones(data.n)
        elif phi is None:
            phi = MetadataMatrix.empty(data.n)
        if phi.n != data.n:
            raise DataError(f"Metadata has {phi.n} entities but the network has {data.n}")
        self.metadata = phi
        self.phi = phi.phi.astype(float)
        self.link: LinkModel = link_model_for(data.kind, self.latent_feature, self.b_hyper)
        # called as observer(update_name, params) after each conditional is formed
        self.observer: Optional[Callable[[str, Dict[str, Any]], None]] = None
        self.set_data(data)

    def set_data(self, data: NetworkData):
        """Point the kernel at a (possibly re-simulated) network with the same entities"""
        self.data = data
        self.n = data.n
        self.train = data.train_mask
        self.rows, self.cols = np.nonzero(self.train)
        # feature models can run on the prior alone; indicators need at least one cell
        if self.rows.size == 0 and not self.latent_feature:
            raise DataError("The network has no training cells")
        self.values = data.edges[self.rows, self.cols]
        try:
            self.link.check_edges(self.values)
        except ValueError as e:
            raise DataError(f"Training edges outside the {self.link.family.value} domain: {e}")
        self._row_cells = [np.flatnonzero(self.rows == i) for i in range(self.n)]
        col_order = np.argsort(self.cols, kind='stable')
        split_at = np.searchsorted(self.cols[col_order], np.arange(1, self.n))
        self._col_cells = np.split(col_order, split_at)

    @property
    def F(self) -> int:
        return self.phi.shape[1]

    def frozen_eta(self, K: int) -> np.ndarray:
        """eta tied to alpha^(1/F) so every metadata transform equals alpha"""
        value = self.immm_alpha if self.F == 1 else self.immm_alpha ** (1.0 / self.F)
        return np.full((self.F, K), value)

    def transforms(self, eta: np.ndarray) -> np.ndarray:
        """n x K metadata transforms; exactly alpha when the model ignores metadata"""
        if not self.model.uses_metadata:
            return np.full((self.n, eta.shape[1]), self.immm_alpha)
        return eta_products(self.phi, eta)

    def initial_eta(self, K: int, rng: np.random.Generator) -> np.ndarray:
        if not self.model.uses_metadata:
            return self.frozen_eta(K)
        return sample_eta_prior(self.F, K, self.eta_hyper, rng)

    def entity_order(self, rng: np.random.Generator) -> np.ndarray:
        return rng.permutation(self.n) if self.run.random_scan else np.arange(self.n)

    def new_state(self, rng: np.random.Generator, **latents) -> SamplerState:
        return SamplerState(
            model=self.model,
            eta_hyper=self.eta_hyper,
            b_hyper=self.b_hyper,
            rng=rng,
            truncation=self.run.truncation,
            eta_frozen=not self.model.uses_metadata,
            **latents,
        )

    def notify(self, name: str, **params):
        if self.observer is not None:
            self.observer(name, params)

    def begin_sweep(self, state: SamplerState):
        self.link.hyper = state.b_hyper

    def finish_sweep(self, state: SamplerState):
        if self.run.resample_hyper:
            state.eta_hyper, state.b_hyper = resample_hyper(state, self.link, state.rng)
            self.link.hyper = state.b_hyper
        state.iteration += 1

    @abstractmethod
    def initialize(self, rng: np.random.Generator) -> SamplerState:
        pass

    @abstractmethod
    def sweep(self, state: SamplerState) -> SamplerState:
        pass

    @abstractmethod
    def log_joint(self, state: SamplerState) -> float:
        pass

    @abstractmethod
    def snapshot(self, state: SamplerState) -> LatentSnapshot:
        pass

    @abstractmethod
    def edge_parameters(self, state: SamplerState) -> np.ndarray:
        """n x n likelihood parameters implied by the current latents"""
