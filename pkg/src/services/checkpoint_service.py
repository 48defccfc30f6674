"""
Versioned JSON checkpoints of a running chain, including the generator state
"""

import os
from pathlib import Path
from typing import Dict, Any, Tuple, Optional
import logging

import numpy as np

from ..config import Config
from ..models.prior_models import EtaHyper, BHyper
from ..models.sampler_models import ModelKind, SamplerState, TraceRecord, LatentSnapshot, ChainResult
from .errors import CheckpointError, DataError
from .file_service import FileService

logger = logging.getLogger(__name__)

ARRAY_FIELDS = {
    'eta': float,
    'B': float,
    'psi': float,
    'pi': float,
    'residual': float,
    's': np.int64,
    'r': np.int64,
    'z': np.int8,
}


def rng_from_state(rng_state: Dict[str, Any]) -> np.random.Generator:
    try:
        bit_generator = getattr(np.random, rng_state['bit_generator'])()
        bit_generator.state = rng_state
    except (AttributeError, KeyError, TypeError, ValueError) as e:
        raise CheckpointError(f"Unrecognised generator state: {e}")
    return np.random.Generator(bit_generator)


def state_to_dict(state: SamplerState) -> Dict[str, Any]:
    payload = {name: None if getattr(state, name) is None else getattr(state, name).tolist() for name in ARRAY_FIELDS}
    payload.update({
        'K': state.K_active,
        'F': int(state.eta.shape[0]),
        'iteration': state.iteration,
        'truncation': state.truncation,
        'eta_frozen': state.eta_frozen,
        'eta_hyper': state.eta_hyper.to_dict(),
        'b_hyper': state.b_hyper.to_dict(),
        'rng_state': state.rng.bit_generator.state,
    })
    return payload


def state_from_dict(model: ModelKind, payload: Dict[str, Any]) -> SamplerState:
    arrays = {}
    for name, dtype in ARRAY_FIELDS.items():
        value = payload.get(name)
        arrays[name] = None if value is None else np.array(value, dtype=dtype)
    K, F = int(payload['K']), int(payload['F'])
    # empty lists lose their shape in JSON
    arrays['eta'] = arrays['eta'].reshape(F, K)
    arrays['B'] = arrays['B'].reshape(K, K)
    return SamplerState(
        model=ModelKind(model),
        eta_hyper=EtaHyper(**payload['eta_hyper']),
        b_hyper=BHyper(**payload['b_hyper']),
        rng=rng_from_state(payload['rng_state']),
        iteration=int(payload['iteration']),
        truncation=payload.get('truncation'),
        eta_frozen=bool(payload['eta_frozen']),
        **arrays,
    )


class CheckpointService:
    """Save and restore chains so that a resumed run continues the same trajectory"""

    def __init__(self, file_service: Optional[FileService] = None):
        self.file_service = file_service or FileService()

    def save(self, path: Path, result: ChainResult, state: SamplerState, fingerprint: str, fold: Optional[int] = None) -> Path:
        payload = {
            'version': Config.CHECKPOINT_VERSION,
            'model': state.model.value,
            'fingerprint': fingerprint,
            'chain_id': result.chain_id,
            'seed': result.seed,
            'fold': fold,
            'state': state_to_dict(state),
            'samples': [sample.to_dict() for sample in result.samples],
            'traces': [trace.to_dict() for trace in result.traces],
        }
        path = Path(path)
        tmp_path = path.with_name(path.name + ".tmp")
        try:
            self.file_service.write_json(tmp_path, payload)
            os.replace(tmp_path, path)
        except OSError as e:
            raise CheckpointError(f"Could not write checkpoint {path}: {e}")
        logger.debug(f"Checkpoint for chain {result.chain_id} written at iteration {state.iteration}")
        return path

    def load(self, path: Path, model: ModelKind, fingerprint: str) -> Tuple[SamplerState, ChainResult]:
        try:
            payload = self.file_service.read_json(Path(path))
        except DataError as e:
            raise CheckpointError(str(e))
        if payload.get('version') != Config.CHECKPOINT_VERSION:
            raise CheckpointError(f"Checkpoint version {payload.get('version')} is not supported")
        if payload.get('model') != ModelKind(model).value:
            raise CheckpointError(f"Checkpoint was written by model {payload.get('model')}, not {ModelKind(model).value}")
        if payload.get('fingerprint') != fingerprint:
            raise CheckpointError("Checkpoint was written for different training data")

        state = state_from_dict(model, payload['state'])
        result = ChainResult(
            chain_id=int(payload['chain_id']),
            seed=int(payload['seed']),
            samples=[LatentSnapshot.from_dict(sample) for sample in payload['samples']],
            traces=[TraceRecord.from_dict(trace) for trace in payload['traces']],
        )
        logger.info(f"Resuming chain {result.chain_id} from iteration {state.iteration}")
        return state, result
