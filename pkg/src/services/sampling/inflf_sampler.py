"""
Gibbs sampler for the informative latent feature model (truncated at K features).

Binary links go through sigma(z_i B z_j^T) with Normal weights updated by
Metropolis. Count links use the additive rate z_i B z_j^T; each positive count
is split across the active feature pairs by a multinomial draw, which leaves
every B_kl with a Gamma conjugate update.
"""

import logging

import numpy as np
from scipy import stats
from scipy.special import expit

from ...config import Config
from ...models.network_models import LinkKind
from ...models.sampler_models import SamplerState, LatentSnapshot
from ..errors import SamplerError
from ..prior_service import (
    STICK_INFLF,
    sweep_eta,
    sample_psi_prior,
    sweep_psi_inflf,
    pi_from_sticks_inflf,
)
from .base_sampler import BaseSampler

logger = logging.getLogger(__name__)


class InfLFSampler(BaseSampler):
    latent_feature = True

    @property
    def K(self) -> int:
        return self.run.truncation or self.run.k_max

    def initialize(self, rng: np.random.Generator) -> SamplerState:
        K = self.K
        eta = self.initial_eta(K, rng)
        psi = sample_psi_prior(self.transforms(eta), rng, stick=STICK_INFLF)
        pi = pi_from_sticks_inflf(psi)
        z = (rng.random((self.n, K)) < pi).astype(np.int8)
        if self.link.kind == LinkKind.COUNT:
            # a shared first feature keeps every rate positive
            z[:, 0] = 1
        B = self.link.sample_prior((K, K), rng)
        return self.new_state(rng, eta=eta, B=B, psi=psi, pi=pi, z=z)

    def sweep(self, state: SamplerState) -> SamplerState:
        self.begin_sweep(state)
        rng = state.rng
        self._resample_features(state)

        prods = self.transforms(state.eta)
        state.psi = sweep_psi_inflf(state.z, state.psi, prods, rng)
        if not state.eta_frozen:
            state.eta = sweep_eta(self.phi, state.eta, state.psi, state.eta_hyper, rng, stick=STICK_INFLF)

        if self.link.kind == LinkKind.COUNT:
            self._resample_B_augmented(state)
        else:
            self._resample_B_metropolis(state)

        self.finish_sweep(state)
        state.pi = pi_from_sticks_inflf(state.psi)
        logger.debug(f"InfLF sweep {state.iteration}: {int(state.z.any(axis=0).sum())} features in use")
        return state

    def _resample_features(self, state: SamplerState):
        """Flip each z_ik from its two-point conditional, entity by entity"""
        rng = state.rng
        z, B = state.z, state.B
        edges = self.data.edges
        with np.errstate(divide='ignore'):
            log_on = np.log(state.pi)
            log_off = np.log1p(-state.pi)
        zB = z @ B
        BzT = B @ z.T

        for i in self.entity_order(rng):
            row_m = self.train[i]
            col_m = self.train[:, i]
            e_row = edges[i, row_m]
            e_col = edges[col_m, i]
            Bz_row = BzT[:, row_m]
            zB_col = zB[col_m]
            zi = z[i].astype(float)
            for k in range(z.shape[1]):
                lp = np.empty(2)
                for v in (0, 1):
                    zi[k] = v
                    lp[v] = (
                        self.link.loglik(e_row, zi @ Bz_row).sum()
                        + self.link.loglik(e_col, zB_col @ zi).sum()
                        + (log_on[i, k] if v else log_off[i, k])
                    )
                if not np.isfinite(lp).any():
                    raise SamplerError(f"Both values of z[{i},{k}] have zero probability")
                p_on = expit(lp[1] - lp[0])
                zi[k] = float(rng.random() < p_on)
            if not np.array_equal(zi, z[i]):
                z[i] = zi.astype(np.int8)
                zB[i] = z[i] @ B
                BzT[:, i] = B @ z[i]
        state.z = z

    def _resample_B_metropolis(self, state: SamplerState):
        """Random-walk Metropolis on each weight; untouched weights come from the prior"""
        rng = state.rng
        z = state.z.astype(float)
        B = state.B.copy()
        X = z @ B @ z.T
        scale = Config.SIGMOID_PROPOSAL_SCALE
        sigma = state.b_hyper.sigma_B
        accepted = 0
        for k in range(B.shape[0]):
            for l in range(B.shape[1]):
                pair = np.outer(z[:, k], z[:, l])
                affected = (pair > 0) & self.train
                if not affected.any():
                    new = float(self.link.sample_prior(None, rng))
                    X += (new - B[k, l]) * pair
                    B[k, l] = new
                    continue
                new = B[k, l] + scale * rng.standard_normal()
                delta = new - B[k, l]
                e_a = self.data.edges[affected]
                x_a = X[affected]
                log_ratio = (
                    self.link.loglik(e_a, x_a + delta).sum()
                    - self.link.loglik(e_a, x_a).sum()
                    + stats.norm.logpdf(new, 0.0, sigma)
                    - stats.norm.logpdf(B[k, l], 0.0, sigma)
                )
                if np.log(rng.random()) < log_ratio:
                    X += delta * pair
                    B[k, l] = new
                    accepted += 1
        self.notify('B_acceptance', accepted=accepted, proposed=B.size)
        state.B = B

    def _resample_B_augmented(self, state: SamplerState):
        rng = state.rng
        z = state.z.astype(float)
        K = state.K_active
        positive = self.values > 0
        rows, cols = self.rows[positive], self.cols[positive]
        counts = self.values[positive].astype(np.int64)

        allocated = np.zeros((K, K))
        if counts.size:
            weights = (z[rows][:, :, None] * z[cols][:, None, :] * state.B[None, :, :]).reshape(counts.size, K * K)
            totals = weights.sum(axis=1)
            if (totals <= 0).any():
                raise SamplerError("A positive count has zero rate under the current features")
            split = rng.multinomial(counts, weights / totals[:, None])
            allocated = split.sum(axis=0).reshape(K, K)

        exposure = z.T @ self.train.astype(float) @ z
        state.B = self.link.sample_posterior(allocated, exposure, rng)

    def log_joint(self, state: SamplerState) -> float:
        X = self.edge_parameters(state)
        total = float(self.link.loglik(self.values, X[self.rows, self.cols]).sum())
        with np.errstate(divide='ignore'):
            total += float(np.where(state.z > 0, np.log(state.pi), np.log1p(-state.pi)).sum())
        prods = self.transforms(state.eta)
        total += float((np.log(prods) + (prods - 1.0) * np.log(state.psi)).sum())
        if not state.eta_frozen:
            total += float(stats.gamma.logpdf(state.eta, state.eta_hyper.alpha_eta, scale=1.0 / state.eta_hyper.beta_eta).sum())
        total += self.link.log_prior(state.B)
        return total

    def snapshot(self, state: SamplerState) -> LatentSnapshot:
        return LatentSnapshot(iteration=state.iteration, B=state.B.copy(), eta=state.eta.copy(), z=state.z.copy())

    def edge_parameters(self, state: SamplerState) -> np.ndarray:
        z = state.z.astype(float)
        return z @ state.B @ z.T
