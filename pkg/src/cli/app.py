import logging
import sys
from typing import List, Optional

from ..config import Config
from ..models.settings_models import RunSettings
from ..services.errors import InfoRelError, DataError
from .commands import COMMANDS
from .parser import parse_flags, settings_flags

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def configure_logging(level: str = "INFO"):
    logging.basicConfig(level=getattr(logging, level.upper(), logging.INFO), format=LOG_FORMAT, stream=sys.stderr, force=True)


class CommandLineApp:
    """Parses flags, layers the configuration sources and dispatches one subcommand"""

    def resolve_settings(self, parsed) -> RunSettings:
        return RunSettings.resolve(
            flags=settings_flags(parsed),
            file_values=Config.load_config_file(parsed.get('config')),
            env_values=Config.get_env_overrides(),
        )

    def run(self, argv: Optional[List[str]] = None) -> int:
        configure_logging()
        try:
            parsed = parse_flags(argv)
            settings = self.resolve_settings(parsed)
            configure_logging(settings.log_level)
            command = COMMANDS[parsed['command']](settings)
            logger.info(f"Running {parsed['command']} ({settings.model.value}, {settings.family.value}, seed {settings.seed})")
            return command.execute()
        except InfoRelError as e:
            logger.error(f"{type(e).__name__}: {e}")
            return e.exit_code
        except ValueError as e:
            # domain violations raised by the numerical layer
            logger.error(f"Invalid input: {e}")
            return DataError.exit_code
        except Exception:
            logger.exception("Unexpected failure")
            return 3


def main(argv: Optional[List[str]] = None) -> int:
    return CommandLineApp().run(argv)
