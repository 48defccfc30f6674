from typing import Dict, Optional, Any, Mapping

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from ..config import Config
from .network_models import LinkKind
from .prior_models import EtaHyper, BHyper
from .sampler_models import ModelKind, RunConfig

RUN_FIELDS = (
    'iterations', 'burn_in', 'thinning', 'chains', 'k_max', 'init_k', 'seed',
    'truncation', 'checkpoint_every', 'resample_hyper', 'random_scan', 'record_heldout',
)


class RunSettings(BaseModel):
    """Resolved settings of one CLI invocation (flags > config file > environment > defaults)"""
    model_config = ConfigDict(extra='forbid', frozen=True)

    model: ModelKind = ModelKind(Config.DEFAULT_MODEL)
    family: LinkKind = LinkKind(Config.DEFAULT_FAMILY)

    edges: Optional[str] = None
    metadata: Optional[str] = None
    rules: Optional[str] = None
    outdir: Optional[str] = None
    trace: Optional[str] = None
    eta: Optional[str] = None
    n: Optional[int] = Field(default=None, ge=2)

    iterations: int = Field(default=Config.DEFAULT_ITERATIONS, ge=1)
    burn_in: int = Field(default=Config.DEFAULT_BURN_IN, ge=0)
    thinning: int = Field(default=Config.DEFAULT_THINNING, ge=1)
    chains: int = Field(default=Config.DEFAULT_CHAINS, ge=1)
    k_max: int = Field(default=Config.DEFAULT_K_MAX, ge=1)
    init_k: int = Field(default=Config.DEFAULT_INIT_K, ge=1)
    seed: int = Field(default=Config.DEFAULT_SEED, ge=0)
    truncation: Optional[int] = Field(default=None, ge=1)
    checkpoint_every: int = Field(default=Config.DEFAULT_CHECKPOINT_EVERY, ge=0)
    resample_hyper: bool = False
    random_scan: bool = False
    record_heldout: bool = True
    resume: bool = False

    alpha_eta: float = Field(default=Config.DEFAULT_HYPER['alpha_eta'], gt=0)
    beta_eta: float = Field(default=Config.DEFAULT_HYPER['beta_eta'], gt=0)
    alpha_B: float = Field(default=Config.DEFAULT_HYPER['alpha_B'], gt=0)
    beta_B: float = Field(default=Config.DEFAULT_HYPER['beta_B'], gt=0)
    a_B: float = Field(default=Config.DEFAULT_HYPER['a_B'], gt=0)
    b_B: float = Field(default=Config.DEFAULT_HYPER['b_B'], gt=0)
    sigma_B: float = Field(default=Config.DEFAULT_HYPER['sigma_B'], gt=0)
    immm_alpha: float = Field(default=Config.DEFAULT_HYPER['immm_alpha'], gt=0)

    folds: int = Field(default=Config.DEFAULT_FOLDS, ge=2)
    fold: Optional[int] = Field(default=None, ge=0)
    jobs: int = Field(default=Config.DEFAULT_JOBS, ge=1)
    zero_remap: bool = False

    attributes: int = Field(default=2, ge=0)
    sim_truncation: int = Field(default=5, ge=1)
    metadata_density: float = Field(default=0.5, ge=0, le=1)
    plant: Optional[int] = Field(default=None, ge=1)
    separation: float = Field(default=0.8, ge=0)

    column: str = "K"
    log_level: str = "INFO"

    @model_validator(mode='after')
    def _check_combinations(self) -> 'RunSettings':
        if self.model.base == ModelKind.INFLF and self.family == LinkKind.UNIT:
            raise ValueError(f"Model {self.model.value} does not support unit-interval links")
        if self.burn_in >= self.iterations:
            raise ValueError(f"burn_in ({self.burn_in}) must be smaller than iterations ({self.iterations})")
        if self.fold is not None and self.fold >= self.folds:
            raise ValueError(f"fold {self.fold} outside 0..{self.folds - 1}")
        if self.log_level.upper() not in ('DEBUG', 'INFO', 'WARNING', 'ERROR'):
            raise ValueError(f"Unknown log level {self.log_level}")
        return self

    @classmethod
    def resolve(
        cls,
        flags: Optional[Mapping[str, Any]] = None,
        file_values: Optional[Mapping[str, Any]] = None,
        env_values: Optional[Mapping[str, Any]] = None,
    ) -> 'RunSettings':
        """Layer the sources; unknown keys are errors except in the environment"""
        from ..services.errors import ConfigError

        known = set(cls.model_fields)
        merged: Dict[str, Any] = {}
        merged.update({k: v for k, v in (env_values or {}).items() if k in known})
        merged.update(file_values or {})
        merged.update({k: v for k, v in (flags or {}).items() if v is not None})
        # an empty value in a file or the environment means "unset"
        merged = {k: (None if isinstance(v, str) and v.strip().lower() in ('', 'none') else v) for k, v in merged.items()}
        try:
            return cls(**merged)
        except ValidationError as e:
            problems = "; ".join(f"{'.'.join(str(p) for p in err['loc']) or 'settings'}: {err['msg']}" for err in e.errors())
            raise ConfigError(f"Invalid configuration: {problems}")

    def run_config(self) -> RunConfig:
        return RunConfig(**{name: getattr(self, name) for name in RUN_FIELDS})

    def eta_hyper(self) -> EtaHyper:
        return EtaHyper(alpha_eta=self.alpha_eta, beta_eta=self.beta_eta)

    def b_hyper(self) -> BHyper:
        return BHyper(alpha_B=self.alpha_B, beta_B=self.beta_B, a_B=self.a_B, b_B=self.b_B, sigma_B=self.sigma_B)

    def to_conf_text(self) -> str:
        """Flat key = value text that resolves back to these settings"""
        lines = []
        for name in type(self).model_fields:
            value = getattr(self, name)
            if value is None:
                continue
            if hasattr(value, 'value'):
                value = value.value
            elif isinstance(value, bool):
                value = str(value).lower()
            elif isinstance(value, float):
                value = repr(value)
            lines.append(f"{name} = {value}")
        return "\n".join(lines) + "\n"
