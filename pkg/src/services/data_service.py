"""
Network and metadata ingestion, validation and cross-validation partitioning
"""

import math
import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Any
import logging

import numpy as np
import pandas as pd

from ..config import Config
from ..models.network_models import LinkKind, CellState, NetworkData, MetadataMatrix, HoldoutPlan
from .errors import DataError, ConfigError

logger = logging.getLogger(__name__)

RULE_KINDS = ('threshold', 'onehot', 'equals', 'ignore')


@dataclass
class AttributeRule:
    kind: str
    threshold: Optional[float] = None
    levels: Optional[List[str]] = None
    value: Optional[str] = None
    missing: str = "error"


def _level_key(value: Any) -> str:
    """Canonical text for a categorical value (1, 1.0 and '1' collapse together)"""
    if isinstance(value, (float, np.floating)) and float(value).is_integer():
        return str(int(value))
    return str(value).strip()


class DataService:
    """Service for building NetworkData, MetadataMatrix and HoldoutPlan objects"""

    def __init__(self, zero_remap: bool = False):
        self.zero_remap = zero_remap

    def parse_edge_list(self, text: str, n: int, kind: LinkKind, zero_remap: Optional[bool] = None) -> NetworkData:
        """Parse `src dst value` records into an n x n network"""
        kind = LinkKind(kind)
        remap = self.zero_remap if zero_remap is None else zero_remap
        if n < 1:
            raise DataError(f"Entity count must be positive, got {n}")

        edges = np.zeros((n, n), dtype=float)
        # unit links have no neutral value, so unlisted unit cells stay missing
        default_state = CellState.UNOBSERVED if kind == LinkKind.UNIT else CellState.TRAIN
        mask = np.full((n, n), default_state, dtype=np.int8)
        seen = set()

        for line_no, raw in enumerate(text.splitlines(), start=1):
            line = raw.split('#', 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 3:
                raise DataError(f"line {line_no}: expected 'src dst value', got {raw!r}")
            try:
                src, dst = int(parts[0]), int(parts[1])
                value = float(parts[2])
            except ValueError:
                raise DataError(f"line {line_no}: could not parse {raw!r}")
            if not (0 <= src < n and 0 <= dst < n):
                raise DataError(f"line {line_no}: index out of range for n={n}: {src} {dst}")
            if src == dst:
                raise DataError(f"line {line_no}: self-loop {src} {dst} is not modelled")
            if (src, dst) in seen:
                raise DataError(f"line {line_no}: duplicate record for cell ({src}, {dst})")
            seen.add((src, dst))
            edges[src, dst] = self._check_value(value, kind, remap, line_no)
            mask[src, dst] = CellState.TRAIN

        np.fill_diagonal(mask, CellState.UNOBSERVED)
        logger.debug(f"Parsed {len(seen)} edge records into a {n}x{n} {kind.value} network")
        return NetworkData(n=n, edges=edges, kind=kind, mask=mask)

    def infer_entity_count(self, text: str) -> int:
        """Entity count from a `# n=<count>` header, else the largest index plus one"""
        header = re.search(r'^\s*#.*\bn\s*=\s*(\d+)', text, flags=re.MULTILINE)
        if header:
            return int(header.group(1))
        largest = -1
        for raw in text.splitlines():
            parts = raw.split('#', 1)[0].split()
            if len(parts) >= 2:
                try:
                    largest = max(largest, int(parts[0]), int(parts[1]))
                except ValueError:
                    continue
        if largest < 0:
            raise DataError("Edge list has no records and no '# n=' header")
        return largest + 1

    def load_network(self, text: str, kind: LinkKind, n: Optional[int] = None) -> NetworkData:
        return self.parse_edge_list(text, n if n is not None else self.infer_entity_count(text), kind)

    def load_metadata(self, frame: pd.DataFrame, rules_text: Optional[str], n: int) -> MetadataMatrix:
        """Binarize an entity attribute table; without rules every column must already be 0/1"""
        attributes = self.align_metadata_table(frame, n)
        if rules_text is not None:
            return self.binarize_attributes(attributes, self.parse_rules(rules_text))
        numeric = attributes.apply(pd.to_numeric, errors='coerce')
        if not numeric.isin([0, 1]).all().all():
            raise DataError("Metadata without a rules file must hold only 0/1 values")
        return MetadataMatrix(phi=numeric.to_numpy().astype(np.int8), attribute_names=[str(c) for c in attributes.columns])

    def _check_value(self, value: float, kind: LinkKind, zero_remap: bool, line_no: int) -> float:
        if not math.isfinite(value):
            raise DataError(f"line {line_no}: non-finite value {value}")
        if kind == LinkKind.BINARY:
            if value not in (0.0, 1.0):
                raise DataError(f"line {line_no}: binary value must be 0 or 1, got {value}")
        elif kind == LinkKind.COUNT:
            if value < 0 or not value.is_integer():
                raise DataError(f"line {line_no}: count value must be a non-negative integer, got {value}")
        else:
            if value == 0.0 and zero_remap:
                return Config.UNIT_ZERO_REMAP
            if not 0.0 < value <= 1.0:
                raise DataError(f"line {line_no}: unit value outside (0,1]: {value}")
        return value

    def write_edge_list(self, net: NetworkData) -> str:
        """Inverse of parse_edge_list (cell states other than Unobserved are not recorded)"""
        lines = [f"# n={net.n} kind={net.kind.value}"]
        observed = net.observed_mask
        for i, j in zip(*np.nonzero(observed)):
            value = net.edges[i, j]
            if net.kind == LinkKind.UNIT:
                lines.append(f"{i} {j} {float(value)!r}")
            elif value != 0:
                lines.append(f"{i} {j} {int(value)}")
        return "\n".join(lines) + "\n"

    def parse_rules(self, text: str) -> Dict[str, AttributeRule]:
        """Parse `col.<name> = <kind>[:<arg>][,missing=zero]` lines"""
        raw_rules = Config.parse_key_value_text(text, source="<rules>")
        rules: Dict[str, AttributeRule] = {}
        for key, spec in raw_rules.items():
            if not key.startswith('col.'):
                raise ConfigError(f"Rule key must start with 'col.': {key}")
            column = key[4:]
            head, *options = [part.strip() for part in spec.split(',')]
            kind, _, arg = head.partition(':')
            kind = kind.strip().lower()
            if kind not in RULE_KINDS:
                raise ConfigError(f"Unknown rule kind {kind!r} for column {column}")

            rule = AttributeRule(kind=kind)
            if kind == 'threshold':
                try:
                    rule.threshold = float(arg)
                except ValueError:
                    raise ConfigError(f"threshold rule for {column} needs a number, got {arg!r}")
            elif kind == 'onehot' and arg:
                rule.levels = [level.strip() for level in arg.split('|') if level.strip()]
            elif kind == 'equals':
                if not arg:
                    raise ConfigError(f"equals rule for {column} needs a value")
                rule.value = arg.strip()

            for option in options:
                name, _, value = option.partition('=')
                if name.strip() != 'missing' or value.strip() not in ('zero', 'error'):
                    raise ConfigError(f"Unknown rule option {option!r} for column {column}")
                rule.missing = value.strip()
            rules[column] = rule
        return rules

    def binarize_attributes(self, raw: pd.DataFrame, rules: Dict[str, AttributeRule]) -> MetadataMatrix:
        """Turn numeric/categorical attribute columns into a binary phi matrix"""
        missing_rules = [col for col in raw.columns if col not in rules]
        if missing_rules:
            raise DataError(f"No binarization rule for columns: {missing_rules}")
        unknown = [col for col in rules if col not in raw.columns]
        if unknown:
            raise DataError(f"Rules refer to unknown columns: {unknown}")

        blocks: List[np.ndarray] = []
        names: List[str] = []
        for column in raw.columns:
            rule = rules[column]
            if rule.kind == 'ignore':
                continue
            series = raw[column]
            missing = series.isna().to_numpy()
            if missing.any() and rule.missing != 'zero':
                raise DataError(f"Column {column} has {int(missing.sum())} missing values and no imputation rule")

            if rule.kind == 'threshold':
                numeric = pd.to_numeric(series, errors='coerce')
                bad = numeric.isna().to_numpy() & ~missing
                if bad.any():
                    raise DataError(f"Column {column} has non-numeric values for a threshold rule")
                block = (numeric.fillna(-np.inf).to_numpy() > rule.threshold).astype(np.int8)[:, None]
                blocks.append(block)
                names.append(f"{column}>{rule.threshold:g}")
            elif rule.kind == 'equals':
                keys = [None if m else _level_key(v) for v, m in zip(series, missing)]
                block = np.array([key == rule.value for key in keys], dtype=np.int8)[:, None]
                blocks.append(block)
                names.append(f"{column}={rule.value}")
            else:
                keys = [None if m else _level_key(v) for v, m in zip(series, missing)]
                levels = rule.levels or sorted({key for key in keys if key is not None})
                unseen = sorted({key for key in keys if key is not None and key not in levels})
                if unseen:
                    raise DataError(f"Column {column} has unseen categorical levels: {unseen}")
                block = np.array([[key == level for level in levels] for key in keys], dtype=np.int8)
                blocks.append(block.reshape(len(keys), len(levels)))
                names.extend(f"{column}={level}" for level in levels)

        n = len(raw)
        phi = np.hstack(blocks) if blocks else np.zeros((n, 0), dtype=np.int8)
        logger.info(f"Binarized {raw.shape[1]} attributes into {phi.shape[1]} binary columns")
        return MetadataMatrix(phi=phi, attribute_names=names)

    def align_metadata_table(self, frame: pd.DataFrame, n: int) -> pd.DataFrame:
        """Index the attribute table by its first (entity id) column, ordered 0..n-1"""
        if frame.shape[1] < 1:
            raise DataError("Metadata table needs an entity id column")
        id_column = frame.columns[0]
        try:
            ids = pd.to_numeric(frame[id_column], errors='raise').astype(int)
        except (ValueError, TypeError):
            raise DataError(f"Entity id column {id_column!r} must hold integers")
        if sorted(ids.tolist()) != list(range(n)):
            raise DataError(f"Metadata entity ids must be exactly 0..{n - 1}")
        attributes = frame.drop(columns=[id_column])
        attributes.index = ids.to_numpy()
        return attributes.sort_index()

    def make_cv_folds(self, net: NetworkData, seed: int, n_folds: int = Config.DEFAULT_FOLDS) -> HoldoutPlan:
        """Shuffle each row's observed off-diagonal cells into n_folds near-equal groups"""
        rng = np.random.default_rng(seed)
        fold_of = np.full((net.n, net.n), -1, dtype=np.int64)
        observed = np.array(net.observed_mask, copy=True)
        np.fill_diagonal(observed, False)

        for i in range(net.n):
            cells = rng.permutation(np.flatnonzero(observed[i]))
            groups = np.array_split(cells, n_folds)
            # which fold receives the larger groups varies per row
            labels = rng.permutation(n_folds)
            for group, label in zip(groups, labels):
                fold_of[i, group] = label
            if len(cells) < n_folds:
                logger.debug(f"Row {i} has {len(cells)} observed cells; some folds are empty for it")

        return HoldoutPlan(fold_of=fold_of, n_folds=n_folds, seed=seed)
