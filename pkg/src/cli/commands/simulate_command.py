from pathlib import Path
import logging

import numpy as np
import pandas as pd

from ...models.network_models import MetadataMatrix
from ...models.simulation_models import SyntheticSpec
from ...services.errors import ConfigError
from ...services.simulation_service import simulate, plant_communities, plant_contrast, random_metadata
from .base_command import BaseCommand

logger = logging.getLogger(__name__)


class SimulateCommand(BaseCommand):
    """Edge list, metadata table and latent ground truth of a synthetic network"""

    name = "simulate"

    def run(self, outdir: Path):
        settings = self.settings
        n = self.require('n')
        rng = np.random.default_rng(settings.seed)

        if settings.plant is not None:
            data, labels = plant_communities(n, settings.plant, settings.separation, settings.family, rng=rng)
            phi = random_metadata(n, settings.attributes, rng, settings.metadata_density)
            latents = {
                'K': settings.plant,
                'B': plant_contrast(settings.plant, settings.separation, settings.family),
                'labels': labels,
            }
            self.file_service.write_csv(outdir / "labels.csv", pd.DataFrame({'entity': np.arange(n), 'label': labels}))
        else:
            data, phi, latents = self._simulate_model(n, rng)

        self.file_service.write_text(outdir / "edges.txt", self.data_service.write_edge_list(data))
        if phi.F:
            self.file_service.write_csv(outdir / "metadata.csv", phi.to_frame())
        self.file_service.write_json(outdir / "latents.json", {
            'model': settings.model.value,
            'family': settings.family.value,
            'n': n,
            **latents,
        })
        logger.info(f"Simulated a {n}-entity {settings.family.value} network with {int((data.edges > 0).sum())} non-zero edges")

    def _simulate_model(self, n: int, rng: np.random.Generator):
        settings = self.settings
        model = settings.model
        pinned = None
        if model.uses_metadata:
            F = settings.attributes
            phi = random_metadata(n, F, rng, settings.metadata_density)
        else:
            # metadata-free variants: a constant attribute with eta tied to the concentration
            F = 1
            phi = MetadataMatrix.all_ones(n)
            pinned = np.full((1, settings.sim_truncation), settings.immm_alpha)
        try:
            spec = SyntheticSpec(
                n=n,
                F=F,
                model=model.base,
                family=settings.family,
                eta_hyper=settings.eta_hyper(),
                b_hyper=settings.b_hyper(),
                truncation=settings.sim_truncation,
                seed=settings.seed,
                eta=pinned,
                metadata_density=settings.metadata_density,
            )
        except ValueError as e:
            raise ConfigError(f"Invalid simulation settings: {e}")
        data, truth = simulate(spec, phi, rng)
        if not model.uses_metadata:
            phi = MetadataMatrix.empty(n)
        return data, phi, truth.to_dict()
