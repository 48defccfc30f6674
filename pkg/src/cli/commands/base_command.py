from abc import ABC, abstractmethod
from pathlib import Path
from typing import Optional, Tuple
import logging

from ...models.network_models import NetworkData, MetadataMatrix
from ...models.settings_models import RunSettings
from ...services.data_service import DataService
from ...services.errors import ConfigError
from ...services.file_service import FileService

logger = logging.getLogger(__name__)

RESOLVED_CONFIG = "resolved_config.conf"


class BaseCommand(ABC):
    """One subcommand: reads inputs named by the settings and writes artifacts under outdir"""

    name = ""

    def __init__(self, settings: RunSettings, file_service: Optional[FileService] = None):
        self.settings = settings
        self.file_service = file_service or FileService()
        self.data_service = DataService(zero_remap=settings.zero_remap)

    @property
    def outdir(self) -> Path:
        if not self.settings.outdir:
            raise ConfigError(f"{self.name} needs --outdir")
        return Path(self.settings.outdir)

    def require(self, field: str) -> str:
        value = getattr(self.settings, field)
        if value is None:
            raise ConfigError(f"{self.name} needs --{field.replace('_', '-')}")
        return value

    def execute(self) -> int:
        outdir = self.file_service.ensure_dir(self.outdir)
        self.run(outdir)
        self.file_service.write_text(outdir / RESOLVED_CONFIG, self.settings.to_conf_text())
        self.file_service.write_manifest(outdir)
        logger.info(f"{self.name} finished; artifacts in {outdir}")
        return 0

    @abstractmethod
    def run(self, outdir: Path):
        pass

    def load_inputs(self) -> Tuple[NetworkData, Optional[MetadataMatrix]]:
        settings = self.settings
        text = self.file_service.read_text(self.require('edges'))
        data = self.data_service.load_network(text, settings.family, settings.n)
        logger.info(f"Loaded a {data.n}-entity {data.kind.value} network with {int(data.observed_mask.sum())} observed cells")

        if settings.metadata is None:
            return data, None
        if not settings.model.uses_metadata:
            logger.warning(f"Metadata file {settings.metadata} ignored under {settings.model.value}")
            return data, None
        frame = self.file_service.read_table(settings.metadata)
        rules = self.file_service.read_text(settings.rules) if settings.rules else None
        phi = self.data_service.load_metadata(frame, rules, data.n)
        return data, phi
