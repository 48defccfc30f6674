"""
Metadata-informed stick-breaking priors shared by the InfMM and InfLF samplers.

Both models give entity i a stick weight psi_ik whose Beta parameter is the
metadata transform prod_f eta_fk^phi_if. InfMM uses Beta(1, a) sticks and the
usual stick-breaking weights; InfLF uses Beta(a, 1) sticks and cumulative
products, so the same eta plays opposite roles in the two models.
"""

from typing import Tuple, Optional
import logging

import numpy as np

from ..config import Config
from ..models.prior_models import EtaHyper, ImportanceMatrix, MembershipProfile
from .sampling.slice_sampler import slice_sample_bounded

logger = logging.getLogger(__name__)

STICK_INFMM = "infmm"
STICK_INFLF = "inflf"


def _log_eta(eta: np.ndarray) -> np.ndarray:
    eta = np.asarray(eta, dtype=float)
    if eta.size and not (eta > 0).all():
        raise ValueError("importance indicators must be strictly positive")
    return np.log(eta)


def _check_sticks(psi: np.ndarray):
    if psi.size and not ((psi > 0) & (psi < 1)).all():
        raise ValueError("stick weights must lie strictly inside (0,1)")


def eta_product(phi_row: np.ndarray, eta_col: np.ndarray) -> float:
    """prod_f eta_fk^phi_if for one entity and one community"""
    phi_row = np.asarray(phi_row, dtype=float)
    log_eta = _log_eta(eta_col)
    if phi_row.shape != log_eta.shape:
        raise ValueError(f"phi row has {phi_row.size} entries but eta column has {log_eta.size}")
    return float(np.exp(phi_row @ log_eta))


def eta_products(phi: np.ndarray, eta: np.ndarray) -> np.ndarray:
    """n x K matrix of metadata transforms, accumulated in the log domain"""
    phi = np.asarray(phi, dtype=float)
    log_eta = _log_eta(eta)
    if phi.shape[1] != log_eta.shape[0]:
        raise ValueError(f"phi has {phi.shape[1]} attributes but eta has {log_eta.shape[0]}")
    return np.exp(phi @ log_eta)


def log_stick_term(psi: np.ndarray, stick: str) -> np.ndarray:
    """ln(1 - psi) for Beta(1, a) sticks, ln(psi) for Beta(a, 1) sticks"""
    psi = np.asarray(psi, dtype=float)
    _check_sticks(psi)
    return np.log1p(-psi) if stick == STICK_INFMM else np.log(psi)


def eta_posterior_params(
    f: int,
    phi: np.ndarray,
    eta: np.ndarray,
    psi: np.ndarray,
    hyper: EtaHyper,
    stick: str = STICK_INFMM,
    columns: Optional[np.ndarray] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """Gamma shape and rate of eta_f. for every community (or the given columns)"""
    phi = np.asarray(phi, dtype=float)
    log_eta = _log_eta(eta)
    log_stick = log_stick_term(psi, stick)
    if columns is not None:
        log_eta = log_eta[:, columns]
        log_stick = log_stick[:, columns]

    return _eta_row_params(f, phi, log_eta, log_stick, phi @ log_eta, hyper)


def _eta_row_params(
    f: int,
    phi: np.ndarray,
    log_eta: np.ndarray,
    log_stick: np.ndarray,
    log_prods: np.ndarray,
    hyper: EtaHyper,
) -> Tuple[np.ndarray, np.ndarray]:
    holders = phi[:, f]
    # product over the other attributes F != f
    others = np.exp(log_prods - np.outer(holders, log_eta[f]))
    shape = hyper.alpha_eta + holders.sum()
    rate = hyper.beta_eta - (holders[:, None] * log_stick * others).sum(axis=0)
    return np.full(rate.shape, shape), rate


def _draw_eta(shape: np.ndarray, rate: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    draws = rng.gamma(shape, 1.0 / rate)
    return np.clip(draws, Config.ETA_FLOOR, Config.ETA_CEILING)


def sample_eta(
    f: int,
    k: int,
    phi: np.ndarray,
    eta: np.ndarray,
    psi: np.ndarray,
    hyper: EtaHyper,
    rng: np.random.Generator,
    stick: str = STICK_INFMM,
) -> float:
    shape, rate = eta_posterior_params(f, phi, eta, psi, hyper, stick, columns=np.array([k]))
    return float(_draw_eta(shape, rate, rng)[0])


def sweep_eta(
    phi: np.ndarray,
    eta: np.ndarray,
    psi: np.ndarray,
    hyper: EtaHyper,
    rng: np.random.Generator,
    stick: str = STICK_INFMM,
    columns: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Update every eta_fk in row-major (f, k) order.

    For a fixed attribute the communities do not interact, so each row is
    drawn in one vectorised call; rows stay sequential. The log products are
    updated in place after each row, so a sweep costs O(FnK).
    """
    phi = np.asarray(phi, dtype=float)
    eta = np.array(eta, dtype=float, copy=True)
    cols = np.arange(eta.shape[1]) if columns is None else np.asarray(columns)
    if cols.size == 0:
        return eta
    log_eta = _log_eta(eta)[:, cols]
    log_stick = log_stick_term(psi, stick)[:, cols]
    log_prods = phi @ log_eta
    for f in range(eta.shape[0]):
        shape, rate = _eta_row_params(f, phi, log_eta, log_stick, log_prods, hyper)
        row = _draw_eta(shape, rate, rng)
        log_row = np.log(row)
        log_prods += np.outer(phi[:, f], log_row - log_eta[f])
        log_eta[f] = log_row
        eta[f, cols] = row
    return eta


def sample_eta_prior(F: int, K: int, hyper: EtaHyper, rng: np.random.Generator) -> np.ndarray:
    draws = rng.gamma(hyper.alpha_eta, 1.0 / hyper.beta_eta, size=(F, K))
    return np.clip(draws, Config.ETA_FLOOR, Config.ETA_CEILING)


def tail_counts(N: np.ndarray) -> np.ndarray:
    """sum_{l > k} N_il for every (i, k)"""
    reversed_cumsum = np.cumsum(N[:, ::-1], axis=1)[:, ::-1]
    return reversed_cumsum - N


def psi_posterior_params_infmm(N: np.ndarray, eta_prods: np.ndarray, truncated: bool = False) -> Tuple[np.ndarray, np.ndarray]:
    N = np.asarray(N)
    if (N < 0).any():
        raise ValueError("indicator counts must be non-negative")
    a = N + 1.0
    b = tail_counts(N) + eta_prods
    if truncated and N.shape[1]:
        # the last stick is never broken under truncation; its draw is prior only
        a[:, -1] = 1.0
        b[:, -1] = eta_prods[:, -1]
    return a, b


def _clip_sticks(psi: np.ndarray) -> np.ndarray:
    return np.clip(psi, Config.STICK_EPS, 1.0 - Config.STICK_EPS)


def sample_psi_infmm(i: int, k: int, N: np.ndarray, eta_prod: float, rng: np.random.Generator) -> float:
    """Draw psi_ik ~ Beta(N_ik + 1, sum_{l>k} N_il + eta_prod)"""
    row = np.asarray(N)[i]
    if (row < 0).any():
        raise ValueError("indicator counts must be non-negative")
    a = row[k] + 1.0
    b = row[k + 1:].sum() + eta_prod
    return float(_clip_sticks(rng.beta(a, b)))


def sweep_psi_infmm(N: np.ndarray, eta_prods: np.ndarray, rng: np.random.Generator, truncated: bool = False) -> np.ndarray:
    a, b = psi_posterior_params_infmm(N, eta_prods, truncated)
    return _clip_sticks(rng.beta(a, b))


def sample_psi_prior(eta_prods: np.ndarray, rng: np.random.Generator, stick: str = STICK_INFMM) -> np.ndarray:
    if stick == STICK_INFMM:
        draws = rng.beta(1.0, eta_prods)
    else:
        draws = rng.beta(eta_prods, 1.0)
    return _clip_sticks(draws)


def pi_from_sticks_infmm(psi: np.ndarray) -> MembershipProfile:
    """pi_ik = psi_ik prod_{l<k} (1 - psi_il); residual is the unbroken remainder"""
    psi = np.atleast_2d(np.asarray(psi, dtype=float))
    _check_sticks(psi)
    remaining = np.cumprod(1.0 - psi, axis=1)
    before = np.hstack([np.ones((psi.shape[0], 1)), remaining[:, :-1]])
    pi = psi * before
    residual = remaining[:, -1] if psi.shape[1] else np.ones(psi.shape[0])
    return MembershipProfile(pi=pi, residual=residual)


def pi_truncated_infmm(psi: np.ndarray) -> np.ndarray:
    """Weights when the last of K communities takes all remaining stick mass"""
    psi = np.atleast_2d(np.asarray(psi, dtype=float))
    head = pi_from_sticks_infmm(psi[:, :-1])
    return np.hstack([head.pi, head.residual[:, None]])


def pi_from_sticks_inflf(psi: np.ndarray) -> np.ndarray:
    """pi_ik = prod_{l<=k} psi_il (non-increasing in k)"""
    psi = np.atleast_2d(np.asarray(psi, dtype=float))
    _check_sticks(psi)
    return np.cumprod(psi, axis=1)


def _inflf_stick_logpdf(k: int, psi: np.ndarray, z: np.ndarray, eta_prods: np.ndarray):
    """Log full conditional of psi_.k for every row at once"""
    log_psi = np.log(psi)
    # log prod_{m<=l, m!=k} psi_im for l >= k
    log_other = np.cumsum(log_psi, axis=1)[:, k:] - log_psi[:, [k]]
    z_tail = z[:, k:].astype(float)
    a = eta_prods[:, k]

    def logpdf(x: np.ndarray) -> np.ndarray:
        with np.errstate(divide='ignore'):
            log_x = np.log(x)
            log_pi = log_x[:, None] + log_other
            log_one_minus = np.log1p(-np.exp(log_pi))
        terms = np.where(z_tail > 0, log_pi, log_one_minus)
        return (a - 1.0) * log_x + terms.sum(axis=1)

    return logpdf


def sample_psi_inflf(
    i: int,
    k: int,
    z: np.ndarray,
    psi: np.ndarray,
    eta_prods: np.ndarray,
    rng: np.random.Generator,
) -> float:
    """One slice update of psi_ik under Beta(a, 1) prior and Bernoulli(pi) features"""
    z_row = np.atleast_2d(np.asarray(z)[i])
    if not np.isin(z_row, (0, 1)).all():
        raise ValueError("latent features must be 0 or 1")
    psi_row = np.atleast_2d(np.asarray(psi, dtype=float)[i])
    prods_row = np.atleast_2d(np.asarray(eta_prods, dtype=float)[i])
    logpdf = _inflf_stick_logpdf(k, psi_row, z_row, prods_row)
    draw = slice_sample_bounded(logpdf, psi_row[:, k], 0.0, 1.0, rng)
    return float(_clip_sticks(draw)[0])


def sweep_psi_inflf(z: np.ndarray, psi: np.ndarray, eta_prods: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Slice-update every stick column in order; rows are independent given z"""
    if not np.isin(z, (0, 1)).all():
        raise ValueError("latent features must be 0 or 1")
    psi = np.array(psi, dtype=float, copy=True)
    for k in range(psi.shape[1]):
        logpdf = _inflf_stick_logpdf(k, psi, z, eta_prods)
        psi[:, k] = _clip_sticks(slice_sample_bounded(logpdf, psi[:, k], 0.0, 1.0, rng))
    return psi


def importance_summary(eta) -> np.ndarray:
    """Geometric mean of each attribute's indicators over the active communities"""
    matrix = eta.eta if isinstance(eta, ImportanceMatrix) else np.asarray(eta, dtype=float)
    if matrix.ndim != 2 or matrix.shape[1] == 0:
        raise ValueError("importance summary needs at least one active community")
    return np.exp(_log_eta(matrix).mean(axis=1))
