"""
Edge likelihood families with conjugate compatibility posteriors.

Every family exposes the same surface: an elementwise log-likelihood, prior
draws, a conjugate posterior driven by per-block sufficient statistics and,
for the conjugate families, the marginal predictive used when an edge opens an
undiscovered community.
"""

from abc import ABC, abstractmethod
from enum import Enum
from typing import Tuple
import logging

import numpy as np
from scipy import stats
from scipy.special import gammaln, log_expit, expit

from ..config import Config
from ..models.network_models import LinkKind
from ..models.prior_models import BHyper
from .errors import ConfigError

logger = logging.getLogger(__name__)


class LinkFamily(str, Enum):
    BERNOULLI_BETA = "bernoulli_beta"
    POISSON_GAMMA = "poisson_gamma"
    BETA_UNIT_GAMMA = "beta_unit_gamma"
    SIGMOID_GAUSSIAN = "sigmoid_gaussian"


def _check_counts(*values):
    for value in values:
        if np.any(np.asarray(value) < 0):
            raise ValueError("sufficient-statistic counts must be non-negative")


class LinkModel(ABC):
    family: LinkFamily
    kind: LinkKind
    conjugate = True

    def __init__(self, hyper: BHyper):
        self.hyper = hyper

    @abstractmethod
    def check_edges(self, e: np.ndarray):
        """Raise ValueError if any edge value is outside the family's domain"""

    @abstractmethod
    def loglik(self, e: np.ndarray, B: np.ndarray) -> np.ndarray:
        """Elementwise log pmf/pdf of e given the compatibility value(s) B"""

    @abstractmethod
    def sample_prior(self, size, rng: np.random.Generator) -> np.ndarray:
        pass

    @abstractmethod
    def log_prior(self, B: np.ndarray) -> float:
        pass

    @abstractmethod
    def predictive_mean(self, B: np.ndarray) -> np.ndarray:
        pass

    @abstractmethod
    def event_prob(self, B: np.ndarray) -> np.ndarray:
        """Pr(e > 0) given B"""

    @abstractmethod
    def sample_edges(self, B: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        """One edge value per entry of the parameter matrix"""

    # conjugate families only below

    def edge_statistic(self, e: np.ndarray) -> np.ndarray:
        return np.asarray(e, dtype=float)

    def posterior_params(self, stat_sum: np.ndarray, m: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError(f"{self.family.value} has no conjugate posterior")

    def log_marginal(self, e: np.ndarray) -> np.ndarray:
        raise NotImplementedError(f"{self.family.value} has no closed-form marginal")

    def marginal(self, e: np.ndarray) -> np.ndarray:
        return np.exp(self.log_marginal(e))

    def block_statistics(self, e: np.ndarray, s: np.ndarray, r: np.ndarray, K: int) -> Tuple[np.ndarray, np.ndarray]:
        """Per-(k, l) sum of edge statistics and number of assigned cells"""
        flat = np.asarray(s) * K + np.asarray(r)
        stat_sum = np.bincount(flat, weights=self.edge_statistic(e), minlength=K * K).reshape(K, K)
        m = np.bincount(flat, minlength=K * K).reshape(K, K)
        return stat_sum, m

    def sample_posterior(self, stat_sum: np.ndarray, m: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        a, b = self.posterior_params(stat_sum, m)
        return self._draw(a, b, rng)

    def _draw(self, a: np.ndarray, b: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        return rng.gamma(a, 1.0 / b)


class BernoulliBetaLink(LinkModel):
    family = LinkFamily.BERNOULLI_BETA
    kind = LinkKind.BINARY

    def check_edges(self, e):
        if not np.isin(e, (0, 1)).all():
            raise ValueError("binary edges must be 0 or 1")

    def loglik(self, e, B):
        e = np.asarray(e)
        B = np.asarray(B, dtype=float)
        with np.errstate(divide='ignore'):
            return np.where(e > 0, np.log(B), np.log1p(-B))

    def sample_prior(self, size, rng):
        return rng.beta(self.hyper.a_B, self.hyper.b_B, size=size)

    def log_prior(self, B):
        return float(stats.beta.logpdf(B, self.hyper.a_B, self.hyper.b_B).sum())

    def predictive_mean(self, B):
        return np.asarray(B, dtype=float)

    def event_prob(self, B):
        return np.asarray(B, dtype=float)

    def sample_edges(self, B, rng):
        B = np.asarray(B, dtype=float)
        return (rng.random(B.shape) < B).astype(np.int64)

    def posterior_params(self, stat_sum, m):
        _check_counts(stat_sum, m)
        n1 = np.asarray(stat_sum, dtype=float)
        n0 = np.asarray(m, dtype=float) - n1
        _check_counts(n0)
        return self.hyper.a_B + n1, self.hyper.b_B + n0

    def log_marginal(self, e):
        e = np.asarray(e)
        total = self.hyper.a_B + self.hyper.b_B
        return np.where(e > 0, np.log(self.hyper.a_B / total), np.log(self.hyper.b_B / total))

    def _draw(self, a, b, rng):
        return np.clip(rng.beta(a, b), 1e-12, 1.0 - 1e-12)


class PoissonGammaLink(LinkModel):
    family = LinkFamily.POISSON_GAMMA
    kind = LinkKind.COUNT

    def check_edges(self, e):
        e = np.asarray(e, dtype=float)
        if (e < 0).any() or not np.all(np.mod(e, 1) == 0):
            raise ValueError("count edges must be non-negative integers")

    def loglik(self, e, B):
        return stats.poisson.logpmf(np.asarray(e), np.asarray(B, dtype=float))

    def sample_prior(self, size, rng):
        return rng.gamma(self.hyper.alpha_B, 1.0 / self.hyper.beta_B, size=size)

    def log_prior(self, B):
        return float(stats.gamma.logpdf(B, self.hyper.alpha_B, scale=1.0 / self.hyper.beta_B).sum())

    def predictive_mean(self, B):
        return np.asarray(B, dtype=float)

    def event_prob(self, B):
        return -np.expm1(-np.asarray(B, dtype=float))

    def sample_edges(self, B, rng):
        return rng.poisson(np.asarray(B, dtype=float)).astype(np.int64)

    def posterior_params(self, stat_sum, m):
        _check_counts(stat_sum, m)
        return self.hyper.alpha_B + np.asarray(stat_sum, dtype=float), self.hyper.beta_B + np.asarray(m, dtype=float)

    def log_marginal(self, e):
        e = np.asarray(e, dtype=float)
        if (e < 0).any():
            raise ValueError("count edges must be non-negative")
        alpha, beta = self.hyper.alpha_B, self.hyper.beta_B
        # prod_{q=0}^{e} (alpha+q) / (alpha+e) == Gamma(alpha+e) / Gamma(alpha)
        return (
            alpha * np.log(beta)
            - gammaln(e + 1.0)
            - (alpha + e) * np.log(beta + 1.0)
            + gammaln(alpha + e)
            - gammaln(alpha)
        )


class BetaUnitGammaLink(LinkModel):
    family = LinkFamily.BETA_UNIT_GAMMA
    kind = LinkKind.UNIT

    def check_edges(self, e):
        e = np.asarray(e, dtype=float)
        if not ((e > 0) & (e <= 1)).all():
            raise ValueError("unit edges must lie in (0,1]")

    def loglik(self, e, B):
        e = np.asarray(e, dtype=float)
        B = np.asarray(B, dtype=float)
        return np.log(B) + (B - 1.0) * np.log(e)

    def sample_prior(self, size, rng):
        return rng.gamma(self.hyper.alpha_B, 1.0 / self.hyper.beta_B, size=size)

    def log_prior(self, B):
        return float(stats.gamma.logpdf(B, self.hyper.alpha_B, scale=1.0 / self.hyper.beta_B).sum())

    def predictive_mean(self, B):
        B = np.asarray(B, dtype=float)
        return B / (B + 1.0)

    def event_prob(self, B):
        return self.predictive_mean(B)

    def sample_edges(self, B, rng):
        # Beta(B, 1) draws underflow to 0 for small B
        draws = rng.beta(np.asarray(B, dtype=float), 1.0)
        return np.clip(draws, Config.UNIT_SIM_FLOOR, 1.0)

    def edge_statistic(self, e):
        return np.log(np.asarray(e, dtype=float))

    def posterior_params(self, stat_sum, m):
        _check_counts(m)
        log_sum = np.asarray(stat_sum, dtype=float)
        if (log_sum > 0).any():
            raise ValueError("sum of log unit edges must be non-positive")
        return self.hyper.alpha_B + np.asarray(m, dtype=float), self.hyper.beta_B - log_sum

    def log_marginal(self, e):
        e = np.asarray(e, dtype=float)
        self.check_edges(e)
        alpha, beta = self.hyper.alpha_B, self.hyper.beta_B
        log_e = np.log(e)
        return np.log(alpha) - log_e + alpha * np.log(beta) - (alpha + 1.0) * np.log(beta - log_e)


class SigmoidGaussianLink(LinkModel):
    """Binary edges through sigma(z_i B z_j^T) with Normal(0, sigma_B^2) weights"""
    family = LinkFamily.SIGMOID_GAUSSIAN
    kind = LinkKind.BINARY
    conjugate = False

    def check_edges(self, e):
        if not np.isin(e, (0, 1)).all():
            raise ValueError("binary edges must be 0 or 1")

    def loglik(self, e, B):
        e = np.asarray(e)
        x = np.asarray(B, dtype=float)
        return np.where(e > 0, log_expit(x), log_expit(-x))

    def sample_prior(self, size, rng):
        return rng.normal(0.0, self.hyper.sigma_B, size=size)

    def log_prior(self, B):
        return float(stats.norm.logpdf(B, 0.0, self.hyper.sigma_B).sum())

    def predictive_mean(self, B):
        return expit(np.asarray(B, dtype=float))

    def event_prob(self, B):
        return self.predictive_mean(B)

    def sample_edges(self, B, rng):
        p = self.predictive_mean(B)
        return (rng.random(p.shape) < p).astype(np.int64)


def link_model_for(kind: LinkKind, latent_feature: bool, hyper: BHyper) -> LinkModel:
    """Likelihood family used by a model type for a given edge kind"""
    kind = LinkKind(kind)
    if kind == LinkKind.BINARY:
        return SigmoidGaussianLink(hyper) if latent_feature else BernoulliBetaLink(hyper)
    if kind == LinkKind.COUNT:
        return PoissonGammaLink(hyper)
    if latent_feature:
        raise ConfigError("unit-interval edges are not supported by latent feature models")
    return BetaUnitGammaLink(hyper)


def loglik_edge(e, B_value, family: LinkFamily, hyper: BHyper = None) -> np.ndarray:
    """Exact log pmf/pdf of an edge value under one family"""
    model = FAMILY_CLASSES[LinkFamily(family)](hyper or BHyper())
    model.check_edges(np.atleast_1d(e))
    return model.loglik(e, B_value)


def sample_B_poisson(edge_sums: float, m_kl: int, hyper: BHyper, rng: np.random.Generator) -> float:
    return float(PoissonGammaLink(hyper).sample_posterior(np.asarray(edge_sums), np.asarray(m_kl), rng))


def marginal_count(e, hyper: BHyper) -> np.ndarray:
    return PoissonGammaLink(hyper).marginal(e)


def sample_B_unit(log_edge_sum: float, m_kl: int, hyper: BHyper, rng: np.random.Generator) -> float:
    return float(BetaUnitGammaLink(hyper).sample_posterior(np.asarray(log_edge_sum), np.asarray(m_kl), rng))


def marginal_unit(e, hyper: BHyper) -> np.ndarray:
    return BetaUnitGammaLink(hyper).marginal(e)


def sample_B_bernoulli(n1: int, n0: int, hyper: BHyper, rng: np.random.Generator) -> float:
    _check_counts(n1, n0)
    return float(BernoulliBetaLink(hyper).sample_posterior(np.asarray(n1), np.asarray(n1 + n0), rng))


FAMILY_CLASSES = {
    LinkFamily.BERNOULLI_BETA: BernoulliBetaLink,
    LinkFamily.POISSON_GAMMA: PoissonGammaLink,
    LinkFamily.BETA_UNIT_GAMMA: BetaUnitGammaLink,
    LinkFamily.SIGMOID_GAUSSIAN: SigmoidGaussianLink,
}
