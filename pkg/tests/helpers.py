import numpy as np

from src.models.network_models import CellState, NetworkData


def full_network(edges: np.ndarray, kind) -> NetworkData:
    """Every off-diagonal cell Train"""
    edges = np.asarray(edges)
    n = edges.shape[0]
    mask = np.full((n, n), CellState.TRAIN, dtype=np.int8)
    np.fill_diagonal(mask, CellState.UNOBSERVED)
    return NetworkData(n=n, edges=edges, kind=kind, mask=mask)
