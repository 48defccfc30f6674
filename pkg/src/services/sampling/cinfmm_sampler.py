"""
Collapsed Gibbs sampler for the finite informative mixed-membership model.

Membership profiles are integrated out, so each indicator is drawn from a
Dirichlet-multinomial conditional (N_ik without the indicator + a_ik) times the
edge likelihood. Without explicit sticks the importance indicators have no
conjugate update; each eta_fk takes a random-walk Metropolis step on its log
against the collapsed joint.
"""

from typing import Optional
import logging

import numpy as np
from scipy import stats
from scipy.special import gammaln

from ...config import Config
from ...models.sampler_models import SamplerState, LatentSnapshot
from ..errors import SamplerError
from .base_sampler import BaseSampler, draw_categorical, normalize_log_weights

logger = logging.getLogger(__name__)


def cinfmm_indicator_conditional(counts_excluded: np.ndarray, eta_prods_row: np.ndarray, loglik_row: np.ndarray) -> np.ndarray:
    """p(k) proportional to (N_ik without this indicator + prod_f eta_fk^phi_if) * g(e | B)"""
    counts_excluded = np.asarray(counts_excluded, dtype=float)
    if (counts_excluded < 0).any():
        raise SamplerError("Indicator counts went negative")
    with np.errstate(divide='ignore'):
        log_w = np.log(counts_excluded + eta_prods_row) + loglik_row
    return normalize_log_weights(log_w)[0]


def posterior_mean_membership(N: np.ndarray, eta_prods: np.ndarray) -> np.ndarray:
    """(N_ik + a_ik) / (N_i + sum_k a_ik)"""
    weights = N + eta_prods
    return weights / weights.sum(axis=1, keepdims=True)


def collapsed_membership_loglik(N: np.ndarray, eta_prods: np.ndarray) -> float:
    """log prod_i Gamma(A_i)/Gamma(N_i + A_i) prod_k Gamma(N_ik + a_ik)/Gamma(a_ik)"""
    A = eta_prods.sum(axis=1)
    total = gammaln(A) - gammaln(N.sum(axis=1) + A)
    total += (gammaln(N + eta_prods) - gammaln(eta_prods)).sum(axis=1)
    return float(total.sum())


def log_walk_proposal(old: float, rng: np.random.Generator) -> Optional[float]:
    """old * exp(scale * z), or None when the proposal leaves [ETA_FLOOR, ETA_CEILING]"""
    new = float(old * np.exp(Config.ETA_PROPOSAL_SCALE * rng.standard_normal()))
    if not Config.ETA_FLOOR <= new <= Config.ETA_CEILING:
        return None
    return new


class CInfMMSampler(BaseSampler):

    @property
    def K(self) -> int:
        return self.run.truncation or self.run.k_max

    def initialize(self, rng: np.random.Generator) -> SamplerState:
        K = self.K
        eta = self.initial_eta(K, rng)
        prods = self.transforms(eta)
        pi = np.vstack([rng.dirichlet(row) for row in prods])
        s = np.full((self.n, self.n), -1, dtype=np.int64)
        r = np.full((self.n, self.n), -1, dtype=np.int64)
        s[self.rows, self.cols] = draw_categorical(pi[self.rows], rng)
        r[self.rows, self.cols] = draw_categorical(pi[self.cols], rng)
        B = self.link.sample_prior((K, K), rng)
        state = self.new_state(rng, eta=eta, B=B, s=s, r=r)
        state.pi = posterior_mean_membership(state.counts(), prods)
        return state

    def indicator_conditional(self, state: SamplerState, i: int, j: int, role: str) -> np.ndarray:
        """Conditional of s_ij (role 'sender') or r_ij (role 'receiver') given everything else"""
        if state.s[i, j] < 0:
            raise SamplerError(f"Cell ({i}, {j}) carries no indicators")
        N = state.counts()
        prods = self.transforms(state.eta)
        e = self.data.edges[i, j]
        if role == "sender":
            N[i, state.s[i, j]] -= 1
            return cinfmm_indicator_conditional(N[i], prods[i], self.link.loglik(e, state.B[:, state.r[i, j]]))
        N[j, state.r[i, j]] -= 1
        return cinfmm_indicator_conditional(N[j], prods[j], self.link.loglik(e, state.B[state.s[i, j], :]))

    def sweep(self, state: SamplerState) -> SamplerState:
        self.begin_sweep(state)
        rng = state.rng
        K = state.K_active
        N = state.counts()
        prods = self.transforms(state.eta)
        # every training cell against every (k, l) pair; B is fixed during the scan
        table = self.link.loglik(self.values[:, None, None], state.B[None, :, :])
        s, r = state.s, state.r

        for i in self.entity_order(rng):
            for c in self._row_cells[i]:
                row, col = self.rows[c], self.cols[c]
                N[i, s[row, col]] -= 1
                p = cinfmm_indicator_conditional(N[i], prods[i], table[c, :, r[row, col]])
                k = min(int(np.searchsorted(np.cumsum(p), rng.random(), side='right')), K - 1)
                s[row, col] = k
                N[i, k] += 1
        for j in self.entity_order(rng):
            for c in self._col_cells[j]:
                row, col = self.rows[c], self.cols[c]
                N[j, r[row, col]] -= 1
                p = cinfmm_indicator_conditional(N[j], prods[j], table[c, s[row, col], :])
                k = min(int(np.searchsorted(np.cumsum(p), rng.random(), side='right')), K - 1)
                r[row, col] = k
                N[j, k] += 1

        if not state.eta_frozen:
            state.eta = self._metropolis_eta(state, N)
            prods = self.transforms(state.eta)

        stat_sum, m = self.link.block_statistics(self.values, s[self.rows, self.cols], r[self.rows, self.cols], K)
        state.B = self.link.sample_posterior(stat_sum, m, rng)

        self.finish_sweep(state)
        state.pi = posterior_mean_membership(N, prods)
        logger.debug(f"cInfMM sweep {state.iteration} done")
        return state

    def _metropolis_eta(self, state: SamplerState, N: np.ndarray) -> np.ndarray:
        """Per-entry log-scale random walk on eta against the collapsed joint"""
        rng = state.rng
        hyper = state.eta_hyper
        eta = state.eta.copy()
        a = self.transforms(eta)
        A = a.sum(axis=1)
        N_tot = N.sum(axis=1)
        accepted = 0

        for f in range(self.F):
            holders = self.phi[:, f] > 0
            for k in range(eta.shape[1]):
                if not holders.any():
                    # no entity carries f: the conditional is the prior
                    eta[f, k] = np.clip(rng.gamma(hyper.alpha_eta, 1.0 / hyper.beta_eta), Config.ETA_FLOOR, Config.ETA_CEILING)
                    continue
                old = eta[f, k]
                new = log_walk_proposal(old, rng)
                if new is None:
                    # outside the support: rejected
                    continue
                ratio = new / old
                a_old = a[holders, k]
                a_new = a_old * ratio
                A_old = A[holders]
                A_new = A_old - a_old + a_new
                n_ik = N[holders, k]
                n_i = N_tot[holders]

                log_ratio = (
                    gammaln(A_new) - gammaln(n_i + A_new) + gammaln(n_ik + a_new) - gammaln(a_new)
                    - gammaln(A_old) + gammaln(n_i + A_old) - gammaln(n_ik + a_old) + gammaln(a_old)
                ).sum()
                # Gamma prior on eta plus the Jacobian of the log-scale walk
                log_ratio += hyper.alpha_eta * np.log(ratio) - hyper.beta_eta * (new - old)
                if np.log(rng.random()) < log_ratio:
                    eta[f, k] = new
                    a[holders, k] = a_new
                    A[holders] = A_new
                    accepted += 1

        self.notify('eta_acceptance', accepted=accepted, proposed=eta.size)
        return eta

    def log_joint(self, state: SamplerState) -> float:
        params = state.B[state.s[self.rows, self.cols], state.r[self.rows, self.cols]]
        total = float(self.link.loglik(self.values, params).sum())
        total += collapsed_membership_loglik(state.counts(), self.transforms(state.eta))
        if not state.eta_frozen:
            total += float(stats.gamma.logpdf(state.eta, state.eta_hyper.alpha_eta, scale=1.0 / state.eta_hyper.beta_eta).sum())
        total += self.link.log_prior(state.B)
        return total

    def snapshot(self, state: SamplerState) -> LatentSnapshot:
        return LatentSnapshot(iteration=state.iteration, B=state.B.copy(), eta=state.eta.copy(), pi=state.pi.copy())

    def edge_parameters(self, state: SamplerState) -> np.ndarray:
        param = np.zeros((self.n, self.n))
        param[self.rows, self.cols] = state.B[state.s[self.rows, self.cols], state.r[self.rows, self.cols]]
        return param
