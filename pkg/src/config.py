import os
import logging
from typing import Dict, Optional
from pathlib import Path

logger = logging.getLogger(__name__)


class Config:
    DEFAULT_MODEL = "infmm"
    DEFAULT_FAMILY = "binary"
    SUPPORTED_MODELS = ['infmm', 'cinfmm', 'inflf', 'immm', 'lfrm']
    SUPPORTED_FAMILIES = ['binary', 'count', 'unit']
    SUPPORTED_METADATA_FORMATS = ['.csv', '.xlsx', '.xls']
    DEFAULT_ITERATIONS = 10000
    DEFAULT_BURN_IN = 5000
    DEFAULT_THINNING = 1
    DEFAULT_CHAINS = 30
    DEFAULT_K_MAX = 20
    DEFAULT_INIT_K = 1
    DEFAULT_FOLDS = 10
    DEFAULT_SEED = 0
    DEFAULT_JOBS = 1
    DEFAULT_CHECKPOINT_EVERY = 0
    DEFAULT_HYPER = {
        'alpha_eta': 1.0,
        'beta_eta': 1.0,
        'alpha_B': 1.0,
        'beta_B': 1.0,
        'a_B': 1.0,
        'b_B': 1.0,
        'sigma_B': 1.0,
        'immm_alpha': 1.0,
    }
    ETA_FLOOR = 1e-8
    ETA_CEILING = 1e8
    TAU_FLOOR = 1e-6
    STICK_EPS = 1e-12
    UNIT_ZERO_REMAP = 1e-6
    UNIT_SIM_FLOOR = 1e-300
    SIGMOID_PROPOSAL_SCALE = 0.1
    ETA_PROPOSAL_SCALE = 0.5
    HYPER_PROPOSAL_SCALE = 0.3
    ZERO_ONE_THRESHOLD = 0.5
    CHECKPOINT_VERSION = 1
    ENV_PREFIX = "INFOREL_"

    @classmethod
    def _load_env_variables(cls):
        try:
            from dotenv import load_dotenv
            env_path = Path.cwd() / ".env"
            if env_path.exists():
                load_dotenv(env_path)
        except ImportError:
            logger.warning("python-dotenv not installed, using system environment variables")
        except Exception as e:
            logger.error(f"Error loading .env file: {e}")

    @classmethod
    def get_env_overrides(cls) -> Dict[str, str]:
        """Settings taken from INFOREL_* environment variables (keys lower-cased)"""
        cls._load_env_variables()
        overrides = {}
        for key, value in os.environ.items():
            if key.startswith(cls.ENV_PREFIX):
                name = key[len(cls.ENV_PREFIX):].lower()
                overrides[name] = value
        return overrides

    @classmethod
    def parse_key_value_text(cls, text: str, source: str = "<config>") -> Dict[str, str]:
        """Parse flat `key = value` lines; `#` starts a comment"""
        from .services.errors import ConfigError

        values: Dict[str, str] = {}
        for line_no, raw in enumerate(text.splitlines(), start=1):
            line = raw.split('#', 1)[0].strip()
            if not line:
                continue
            if '=' not in line:
                raise ConfigError(f"{source}:{line_no}: expected 'key = value', got {raw!r}")
            key, value = line.split('=', 1)
            key = key.strip()
            if not key:
                raise ConfigError(f"{source}:{line_no}: empty key")
            values[key] = value.strip()
        return values

    @classmethod
    def load_config_file(cls, path: Optional[str]) -> Dict[str, str]:
        from .services.errors import ConfigError

        if not path:
            return {}
        config_path = Path(path)
        if not config_path.exists():
            raise ConfigError(f"Config file not found: {path}")
        return cls.parse_key_value_text(config_path.read_text(encoding='utf-8'), source=str(config_path))
