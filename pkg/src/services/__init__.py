"""
Service layer for InfoRel business logic
"""

from .file_service import FileService
from .data_service import DataService
from .checkpoint_service import CheckpointService
from .chain_service import ChainService
from .inference_service import InferenceService

__all__ = [
    'FileService',
    'DataService',
    'CheckpointService',
    'ChainService',
    'InferenceService'
]
