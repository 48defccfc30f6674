"""
Exception hierarchy shared by services and the CLI
"""


class InfoRelError(Exception):
    """Base class for all InfoRel failures"""

    exit_code = 3


class ConfigError(InfoRelError, ValueError):
    """Invalid configuration or option combination"""

    exit_code = 1


class DataError(InfoRelError, ValueError):
    """Input data violates its declared domain or format"""

    exit_code = 2


class SamplerError(InfoRelError, RuntimeError):
    """Sampler reached an invalid state"""

    exit_code = 3


class CheckpointError(InfoRelError, RuntimeError):
    """Checkpoint could not be written or restored"""

    exit_code = 3
