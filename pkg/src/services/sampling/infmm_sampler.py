"""
Uncollapsed Gibbs sampler for the informative mixed-membership model.

Membership profiles are sampled explicitly through their sticks. In the
default (infinite) mode an indicator may open an undiscovered community,
scored by the entity's unassigned stick mass times the marginal predictive of
the edge; communities left empty after the indicator scan are pruned. With
`truncation` set the model is the finite one the forward simulator draws from:
the last community takes the remaining stick mass and K never changes.
"""

from typing import Optional
import logging

import numpy as np
from scipy import stats

from ...models.sampler_models import SamplerState, LatentSnapshot
from ..prior_service import (
    STICK_INFMM,
    sweep_eta,
    sample_eta_prior,
    psi_posterior_params_infmm,
    sweep_psi_infmm,
    sample_psi_prior,
    pi_from_sticks_infmm,
    pi_truncated_infmm,
)
from .base_sampler import BaseSampler, draw_categorical, draw_log_categorical, normalize_log_weights

logger = logging.getLogger(__name__)

SENDER = "sender"
RECEIVER = "receiver"


def indicator_conditional_infmm(
    pi_row: np.ndarray,
    loglik_row: np.ndarray,
    residual: Optional[float] = None,
    log_marginal: Optional[float] = None,
) -> np.ndarray:
    """Probabilities over the active communities, plus an undiscovered one when
    `residual` is given: pi_ik g(e | B) for k <= K and residual * marginal(e)"""
    with np.errstate(divide='ignore'):
        log_w = np.log(np.asarray(pi_row, dtype=float)) + np.asarray(loglik_row, dtype=float)
        if residual is not None:
            log_w = np.append(log_w, np.log(residual) + log_marginal)
    return normalize_log_weights(log_w)[0]


class InfMMSampler(BaseSampler):

    @property
    def truncated(self) -> bool:
        return self.run.truncation is not None

    def refresh_membership(self, state: SamplerState):
        if self.truncated:
            state.pi = pi_truncated_infmm(state.psi)
            state.residual = np.zeros(self.n)
        else:
            profile = pi_from_sticks_infmm(state.psi)
            state.pi, state.residual = profile.pi, profile.residual

    def initialize(self, rng: np.random.Generator) -> SamplerState:
        K = self.run.truncation or self.run.init_k
        eta = self.initial_eta(K, rng)
        psi = sample_psi_prior(self.transforms(eta), rng)
        B = self.link.sample_prior((K, K), rng)
        state = self.new_state(rng, eta=eta, B=B, psi=psi)
        self.refresh_membership(state)

        s = np.full((self.n, self.n), -1, dtype=np.int64)
        r = np.full((self.n, self.n), -1, dtype=np.int64)
        s[self.rows, self.cols] = draw_categorical(state.pi[self.rows], rng)
        r[self.rows, self.cols] = draw_categorical(state.pi[self.cols], rng)
        state.s, state.r = s, r
        if not self.truncated:
            self.prune(state)
            self.refresh_membership(state)
        return state

    def sweep(self, state: SamplerState) -> SamplerState:
        self.begin_sweep(state)
        rng = state.rng
        self._resample_role(state, SENDER)
        self._resample_role(state, RECEIVER)
        if not self.truncated:
            self.prune(state)

        N = state.counts()
        prods = self.transforms(state.eta)
        if self.observer is not None:
            a, b = psi_posterior_params_infmm(N, prods, self.truncated)
            self.notify('psi', a=a, b=b, N=N, eta_prods=prods)
        state.psi = sweep_psi_infmm(N, prods, rng, truncated=self.truncated)

        if not state.eta_frozen:
            state.eta = sweep_eta(self.phi, state.eta, state.psi, state.eta_hyper, rng, stick=STICK_INFMM)

        stat_sum, m = self.link.block_statistics(self.values, self._s_train(state), self._r_train(state), state.K_active)
        if self.observer is not None:
            a, b = self.link.posterior_params(stat_sum, m)
            self.notify('B', a=a, b=b)
        state.B = self.link.sample_posterior(stat_sum, m, rng)

        self.finish_sweep(state)
        self.refresh_membership(state)
        logger.debug(f"InfMM sweep {state.iteration}: K={state.K_active}")
        return state

    def _s_train(self, state: SamplerState) -> np.ndarray:
        return state.s[self.rows, self.cols]

    def _r_train(self, state: SamplerState) -> np.ndarray:
        return state.r[self.rows, self.cols]

    def _resample_role(self, state: SamplerState, role: str):
        """Resample every sender (or receiver) indicator in entity scan order.

        Given pi, B and the other role's indicators the cells are conditionally
        independent, so they are drawn together; when a cell opens a community
        the cells after it are redrawn against the enlarged state, which matches
        a sequential scan.
        """
        blocks = self._row_cells if role == SENDER else self._col_cells
        pending = np.concatenate([blocks[i] for i in self.entity_order(state.rng)])
        while pending.size:
            K = state.K_active
            e = self.values[pending]
            rows, cols = self.rows[pending], self.cols[pending]
            if role == SENDER:
                owner = rows
                params = state.B[:, state.r[rows, cols]].T
            else:
                owner = cols
                params = state.B[state.s[rows, cols], :]
            with np.errstate(divide='ignore'):
                log_w = np.log(state.pi[owner]) + self.link.loglik(e[:, None], params)
                if not self.truncated:
                    tail = np.log(state.residual[owner]) + self.link.log_marginal(e)
                    log_w = np.hstack([log_w, tail[:, None]])
            choice = draw_log_categorical(log_w, state.rng)

            opened = np.flatnonzero(choice == K)
            stop = opened[0] if opened.size else pending.size
            target = state.s if role == SENDER else state.r
            target[rows[:stop], cols[:stop]] = choice[:stop]
            if not opened.size:
                return
            self._open_community(state, pending[stop], role)
            pending = pending[stop + 1:]

    def _open_community(self, state: SamplerState, cell: int, role: str):
        """Instantiate community K+1 for the cell that selected it"""
        rng = state.rng
        K = state.K_active
        if state.eta_frozen:
            eta_new = self.frozen_eta(1)
        else:
            eta_new = sample_eta_prior(self.F, 1, state.eta_hyper, rng)
        psi_new = sample_psi_prior(self.transforms(eta_new), rng)
        state.eta = np.hstack([state.eta, eta_new])
        state.psi = np.hstack([state.psi, psi_new])

        B = np.zeros((K + 1, K + 1))
        B[:K, :K] = state.B
        fresh = self.link.sample_prior(2 * K + 1, rng)
        B[K, :] = fresh[:K + 1]
        B[:K, K] = fresh[K + 1:]

        i, j = self.rows[cell], self.cols[cell]
        e = self.values[cell]
        pair = (K, state.r[i, j]) if role == SENDER else (state.s[i, j], K)
        B[pair] = self.link.sample_posterior(self.link.edge_statistic(e), np.asarray(1), rng)
        state.B = B

        if role == SENDER:
            state.s[i, j] = K
        else:
            state.r[i, j] = K
        self.refresh_membership(state)
        logger.debug(f"Opened community {K + 1} from cell ({i}, {j}) as {role}")

    def prune(self, state: SamplerState):
        """Drop communities no training indicator points at"""
        s_train, r_train = self._s_train(state), self._r_train(state)
        used = np.zeros(state.K_active, dtype=bool)
        used[s_train] = True
        used[r_train] = True
        if used.all():
            return
        keep = np.flatnonzero(used)
        remap = np.full(state.K_active, -1, dtype=np.int64)
        remap[keep] = np.arange(keep.size)
        state.s[self.rows, self.cols] = remap[s_train]
        state.r[self.rows, self.cols] = remap[r_train]
        state.psi = state.psi[:, keep]
        state.eta = state.eta[:, keep]
        state.B = state.B[np.ix_(keep, keep)]
        logger.debug(f"Pruned {used.size - keep.size} empty communities")

    def log_joint(self, state: SamplerState) -> float:
        params = state.B[self._s_train(state), self._r_train(state)]
        total = float(self.link.loglik(self.values, params).sum())
        N = state.counts()
        with np.errstate(divide='ignore', invalid='ignore'):
            total += float(np.where(N > 0, N * np.log(state.pi), 0.0).sum())
        prods = self.transforms(state.eta)
        total += float((np.log(prods) + (prods - 1.0) * np.log1p(-state.psi)).sum())
        if not state.eta_frozen:
            total += float(stats.gamma.logpdf(state.eta, state.eta_hyper.alpha_eta, scale=1.0 / state.eta_hyper.beta_eta).sum())
        total += self.link.log_prior(state.B)
        return total

    def snapshot(self, state: SamplerState) -> LatentSnapshot:
        # unassigned stick mass is spread back over the active communities
        pi = state.pi / state.pi.sum(axis=1, keepdims=True)
        return LatentSnapshot(iteration=state.iteration, B=state.B.copy(), eta=state.eta.copy(), pi=pi)

    def edge_parameters(self, state: SamplerState) -> np.ndarray:
        param = np.zeros((self.n, self.n))
        param[self.rows, self.cols] = state.B[self._s_train(state), self._r_train(state)]
        return param
