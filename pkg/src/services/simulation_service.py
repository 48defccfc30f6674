"""
Forward simulation of the generative processes and planted-partition benchmarks
"""

from typing import Tuple, Optional
import logging

import numpy as np

from ..models.network_models import LinkKind, CellState, NetworkData, MetadataMatrix
from ..models.sampler_models import ModelKind
from ..models.simulation_models import SyntheticSpec, GroundTruth
from ..models.prior_models import BHyper
from .errors import ConfigError
from .link_models import LinkModel, link_model_for
from .sampling.base_sampler import draw_categorical
from .prior_service import (
    STICK_INFLF,
    eta_products,
    sample_eta_prior,
    sample_psi_prior,
    pi_truncated_infmm,
    pi_from_sticks_inflf,
)

logger = logging.getLogger(__name__)

SIMULATED_MODELS = (ModelKind.INFMM, ModelKind.CINFMM, ModelKind.INFLF)


def off_diagonal_cells(n: int) -> Tuple[np.ndarray, np.ndarray]:
    off = ~np.eye(n, dtype=bool)
    return np.nonzero(off)


def random_metadata(n: int, F: int, rng: np.random.Generator, density: float = 0.5) -> MetadataMatrix:
    phi = (rng.random((n, F)) < density).astype(np.int8)
    return MetadataMatrix(phi=phi, attribute_names=[f"attr_{f}" for f in range(F)])


def simulate_edges(param: np.ndarray, link: LinkModel, rng: np.random.Generator) -> NetworkData:
    """Fully observed network with one edge drawn per off-diagonal parameter"""
    n = param.shape[0]
    param = np.array(param, dtype=float, copy=True)
    # self-loops are never observed; any value valid for every family
    np.fill_diagonal(param, 0.5)
    edges = link.sample_edges(param, rng)
    np.fill_diagonal(edges, 0)
    mask = np.full((n, n), CellState.TRAIN, dtype=np.int8)
    np.fill_diagonal(mask, CellState.UNOBSERVED)
    return NetworkData(n=n, edges=edges, kind=link.kind, mask=mask)


def simulate(spec: SyntheticSpec, phi: MetadataMatrix, rng: Optional[np.random.Generator] = None) -> Tuple[NetworkData, GroundTruth]:
    """Draw eta, sticks, memberships, compatibilities and edges in generative order"""
    if phi.n != spec.n or phi.F != spec.F:
        raise ConfigError(f"Metadata is {phi.n}x{phi.F} but the synthetic spec asks for {spec.n}x{spec.F}")
    if spec.model not in SIMULATED_MODELS:
        raise ConfigError(f"Forward simulation supports {[m.value for m in SIMULATED_MODELS]}, got {spec.model.value}")

    rng = rng if rng is not None else np.random.default_rng(spec.seed)
    latent_feature = spec.model == ModelKind.INFLF
    link = link_model_for(spec.family, latent_feature, spec.b_hyper)
    n, K = spec.n, spec.truncation

    if spec.eta is not None:
        eta = np.array(spec.eta, dtype=float, copy=True)
    else:
        eta = sample_eta_prior(spec.F, K, spec.eta_hyper, rng)
    prods = eta_products(phi.phi, eta)

    if latent_feature:
        psi = sample_psi_prior(prods, rng, stick=STICK_INFLF)
        pi = pi_from_sticks_inflf(psi)
        z = (rng.random((n, K)) < pi).astype(np.int8)
        B = link.sample_prior((K, K), rng)
        data = simulate_edges(z @ B @ z.T, link, rng)
        truth = GroundTruth(B=B, eta=eta, psi=psi, pi=pi, z=z)
    else:
        if spec.model == ModelKind.INFMM:
            psi = sample_psi_prior(prods, rng)
            pi = pi_truncated_infmm(psi)
        else:
            psi = None
            pi = np.vstack([rng.dirichlet(row) for row in prods])
        rows, cols = off_diagonal_cells(n)
        s = np.full((n, n), -1, dtype=np.int64)
        r = np.full((n, n), -1, dtype=np.int64)
        s[rows, cols] = draw_categorical(pi[rows], rng)
        r[rows, cols] = draw_categorical(pi[cols], rng)
        B = link.sample_prior((K, K), rng)
        param = np.zeros((n, n))
        param[rows, cols] = B[s[rows, cols], r[rows, cols]]
        data = simulate_edges(param, link, rng)
        truth = GroundTruth(B=B, eta=eta, psi=psi, pi=pi, s=s, r=r)

    logger.debug(f"Simulated {spec.model.value}/{spec.family.value} network with n={n}, K={K}")
    return data, truth


def plant_contrast(K: int, separation: float, family: LinkKind) -> np.ndarray:
    """Diagonal-dominant compatibility matrix for a planted partition"""
    if separation < 0:
        raise ConfigError(f"Separation must be non-negative, got {separation}")
    c = min(separation, 0.9)
    if LinkKind(family) == LinkKind.BINARY:
        within, between = 0.5 + c / 2.0, 0.5 - c / 2.0
    else:
        within, between = 1.0 + 10.0 * c, 1.0 - c
    B = np.full((K, K), between)
    np.fill_diagonal(B, within)
    return B


def plant_communities(
    n: int,
    K: int,
    separation: float,
    family: LinkKind,
    seed: int = 0,
    rng: Optional[np.random.Generator] = None,
) -> Tuple[NetworkData, np.ndarray]:
    """Hard-membership block network with balanced, shuffled labels"""
    if K < 1 or K > n:
        raise ConfigError(f"Planted community count must lie in 1..{n}, got {K}")
    rng = rng if rng is not None else np.random.default_rng(seed)
    family = LinkKind(family)
    labels = rng.permutation(np.arange(n) % K)
    B = plant_contrast(K, separation, family)
    link = link_model_for(family, False, BHyper())
    data = simulate_edges(B[labels[:, None], labels[None, :]], link, rng)
    return data, labels
