from dataclasses import dataclass, field
from enum import Enum, IntEnum
from typing import List, Tuple
import hashlib

import numpy as np
import pandas as pd


class LinkKind(str, Enum):
    BINARY = "binary"
    COUNT = "count"
    UNIT = "unit"


class CellState(IntEnum):
    TRAIN = 0
    TEST = 1
    UNOBSERVED = 2


def _frozen(array: np.ndarray, dtype) -> np.ndarray:
    out = np.array(array, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class NetworkData:
    """Directed n x n edge matrix plus its train/test/unobserved mask"""
    n: int
    edges: np.ndarray
    kind: LinkKind
    mask: np.ndarray
    directed: bool = True

    def __post_init__(self):
        dtype = float if self.kind == LinkKind.UNIT else np.int64
        object.__setattr__(self, 'edges', _frozen(self.edges, dtype))
        object.__setattr__(self, 'mask', _frozen(self.mask, np.int8))
        if self.edges.shape != (self.n, self.n) or self.mask.shape != (self.n, self.n):
            raise ValueError(f"Edge and mask matrices must be {self.n}x{self.n}")

    def __eq__(self, other) -> bool:
        if not isinstance(other, NetworkData):
            return NotImplemented
        return (
            self.n == other.n
            and self.kind == other.kind
            and self.directed == other.directed
            and np.array_equal(self.edges, other.edges)
            and np.array_equal(self.mask, other.mask)
        )

    __hash__ = None

    @property
    def train_mask(self) -> np.ndarray:
        return self.mask == CellState.TRAIN

    @property
    def test_mask(self) -> np.ndarray:
        return self.mask == CellState.TEST

    @property
    def observed_mask(self) -> np.ndarray:
        return self.mask != CellState.UNOBSERVED

    def with_mask(self, mask: np.ndarray) -> 'NetworkData':
        return NetworkData(n=self.n, edges=self.edges, kind=self.kind, mask=mask, directed=self.directed)

    def binarized(self) -> 'NetworkData':
        """Binary view of the same network (edge present iff e > 0)"""
        return NetworkData(
            n=self.n,
            edges=(self.edges > 0).astype(np.int64),
            kind=LinkKind.BINARY,
            mask=self.mask,
            directed=self.directed,
        )

    def training_fingerprint(self) -> str:
        """Hash of everything a sampler is allowed to see"""
        train = self.train_mask
        visible = np.where(train, self.edges, 0).astype(float)
        digest = hashlib.sha256()
        digest.update(self.kind.value.encode())
        digest.update(train.astype(np.int8).tobytes())
        digest.update(np.ascontiguousarray(visible).tobytes())
        return digest.hexdigest()


@dataclass(frozen=True, eq=False)
class MetadataMatrix:
    """Binary entity-attribute matrix phi (n x F)"""
    phi: np.ndarray
    attribute_names: List[str] = field(default_factory=list)

    def __post_init__(self):
        phi = np.asarray(self.phi)
        if phi.ndim != 2:
            raise ValueError("phi must be a 2-D matrix")
        if phi.size and not np.isin(phi, (0, 1)).all():
            raise ValueError("phi entries must be 0 or 1")
        object.__setattr__(self, 'phi', _frozen(phi, np.int8))
        names = list(self.attribute_names) or [f"attr_{f}" for f in range(phi.shape[1])]
        if len(names) != phi.shape[1]:
            raise ValueError(f"Expected {phi.shape[1]} attribute names, got {len(names)}")
        object.__setattr__(self, 'attribute_names', names)

    @classmethod
    def empty(cls, n: int) -> 'MetadataMatrix':
        return cls(phi=np.zeros((n, 0), dtype=np.int8), attribute_names=[])

    @classmethod
    def all_ones(cls, n: int) -> 'MetadataMatrix':
        return cls(phi=np.ones((n, 1), dtype=np.int8), attribute_names=['constant'])

    @property
    def n(self) -> int:
        return self.phi.shape[0]

    @property
    def F(self) -> int:
        return self.phi.shape[1]

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(self.phi, columns=self.attribute_names)
        frame.insert(0, 'entity', np.arange(self.n))
        return frame


@dataclass(frozen=True, eq=False)
class HoldoutPlan:
    """Per-row partition of observed cells into cross-validation folds"""
    fold_of: np.ndarray
    n_folds: int
    seed: int

    def __post_init__(self):
        object.__setattr__(self, 'fold_of', _frozen(self.fold_of, np.int64))

    def __eq__(self, other) -> bool:
        if not isinstance(other, HoldoutPlan):
            return NotImplemented
        return (
            self.n_folds == other.n_folds
            and self.seed == other.seed
            and np.array_equal(self.fold_of, other.fold_of)
        )

    __hash__ = None

    def fold_cells(self, fold: int) -> Tuple[np.ndarray, np.ndarray]:
        return np.nonzero(self.fold_of == fold)

    def apply(self, net: NetworkData, fold: int) -> NetworkData:
        """Mark the fold's cells Test; every other observed cell becomes Train"""
        if not 0 <= fold < self.n_folds:
            raise ValueError(f"Fold {fold} outside 0..{self.n_folds - 1}")
        mask = np.array(net.mask, copy=True)
        mask[mask == CellState.TEST] = CellState.TRAIN
        mask[self.fold_cells(fold)] = CellState.TEST
        return net.with_mask(mask)

    def to_frame(self) -> pd.DataFrame:
        rows, cols = np.nonzero(self.fold_of >= 0)
        return pd.DataFrame({'i': rows, 'j': cols, 'fold': self.fold_of[rows, cols]})
