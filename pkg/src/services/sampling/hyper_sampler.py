"""
Optional Metropolis resampling of the prior hyperparameters under Gamma(1, 1)
hyperpriors, with log-normal random-walk proposals
"""

from dataclasses import replace
from typing import Callable, Tuple
import logging

import numpy as np
from scipy import stats

from ...config import Config
from ...models.prior_models import EtaHyper, BHyper
from ...models.sampler_models import SamplerState

logger = logging.getLogger(__name__)

HYPERPRIOR_SHAPE = 1.0
HYPERPRIOR_RATE = 1.0

# hyperparameters each compatibility family actually reads
FAMILY_HYPER_FIELDS = {
    'bernoulli_beta': ('a_B', 'b_B'),
    'poisson_gamma': ('alpha_B', 'beta_B'),
    'beta_unit_gamma': ('alpha_B', 'beta_B'),
    'sigmoid_gaussian': ('sigma_B',),
}


def _hyperprior_logpdf(value: float) -> float:
    return float(stats.gamma.logpdf(value, HYPERPRIOR_SHAPE, scale=1.0 / HYPERPRIOR_RATE))


def metropolis_positive(
    value: float,
    log_target: Callable[[float], float],
    rng: np.random.Generator,
    scale: float = Config.HYPER_PROPOSAL_SCALE,
) -> float:
    """One random-walk step on log(value); the log term is the change-of-variables Jacobian"""
    proposal = value * np.exp(scale * rng.standard_normal())
    log_ratio = (log_target(proposal) + np.log(proposal)) - (log_target(value) + np.log(value))
    if np.log(rng.random()) < log_ratio:
        return float(proposal)
    return float(value)


def _resample_eta_hyper(eta: np.ndarray, hyper: EtaHyper, rng: np.random.Generator) -> EtaHyper:
    def target_alpha(alpha):
        return float(stats.gamma.logpdf(eta, alpha, scale=1.0 / hyper.beta_eta).sum()) + _hyperprior_logpdf(alpha)

    hyper = replace(hyper, alpha_eta=metropolis_positive(hyper.alpha_eta, target_alpha, rng))

    def target_beta(beta):
        return float(stats.gamma.logpdf(eta, hyper.alpha_eta, scale=1.0 / beta).sum()) + _hyperprior_logpdf(beta)

    return replace(hyper, beta_eta=metropolis_positive(hyper.beta_eta, target_beta, rng))


def _resample_b_hyper(B: np.ndarray, link, rng: np.random.Generator) -> BHyper:
    hyper = link.hyper
    for name in FAMILY_HYPER_FIELDS[link.family.value]:
        def target(value, name=name):
            trial = replace(hyper, **{name: value})
            return type(link)(trial).log_prior(B) + _hyperprior_logpdf(value)

        hyper = replace(hyper, **{name: metropolis_positive(getattr(hyper, name), target, rng)})
    return hyper


def resample_hyper(state: SamplerState, link, rng: np.random.Generator) -> Tuple[EtaHyper, BHyper]:
    eta_hyper = state.eta_hyper
    if not state.eta_frozen and state.eta.size:
        eta_hyper = _resample_eta_hyper(state.eta, state.eta_hyper, rng)
    b_hyper = _resample_b_hyper(state.B, link, rng)
    logger.debug(f"Hyperparameters now eta={eta_hyper.to_dict()} B={b_hyper.to_dict()}")
    return eta_hyper, b_hyper
