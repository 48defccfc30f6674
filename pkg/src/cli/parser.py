import argparse
from typing import Dict, Any, List, Optional

from ..config import Config
from ..services.errors import ConfigError

SUBCOMMANDS = ('simulate', 'fit', 'crossval', 'diagnose', 'importance')

# dests that are not settings fields
PARSER_ONLY = ('command', 'config')


class InfoRelArgumentParser(argparse.ArgumentParser):
    """argparse that raises ConfigError instead of exiting with status 2"""

    def error(self, message: str):
        raise ConfigError(f"{self.prog}: {message}")


def _flag(value: bool):
    return dict(action='store_const', const=value, default=None)


def _common_options() -> argparse.ArgumentParser:
    parent = InfoRelArgumentParser(add_help=False)
    parent.add_argument('--config', help="flat key = value settings file")
    parent.add_argument('--outdir', help="directory for every artifact of the run")
    parent.add_argument('--seed', type=int)
    parent.add_argument('--log-level', dest='log_level', choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'])
    return parent


def _model_options() -> argparse.ArgumentParser:
    parent = InfoRelArgumentParser(add_help=False)
    parent.add_argument('--model', choices=Config.SUPPORTED_MODELS)
    parent.add_argument('--family', choices=Config.SUPPORTED_FAMILIES)
    for name in ('alpha-eta', 'beta-eta', 'alpha-B', 'beta-B', 'a-B', 'b-B', 'sigma-B', 'immm-alpha'):
        parent.add_argument(f'--{name}', dest=name.replace('-', '_'), type=float)
    return parent


def _sampler_options() -> argparse.ArgumentParser:
    parent = InfoRelArgumentParser(add_help=False)
    parent.add_argument('--edges', help="edge list with 'src dst value' records")
    parent.add_argument('--metadata', help="entity attribute table (.csv, .xlsx, .xls)")
    parent.add_argument('--rules', help="attribute binarization rules file")
    parent.add_argument('--n', type=int, help="entity count (default: '# n=' header or largest index + 1)")
    parent.add_argument('--zero-remap', dest='zero_remap', **_flag(True))
    parent.add_argument('--iterations', type=int)
    parent.add_argument('--burn-in', dest='burn_in', type=int)
    parent.add_argument('--thinning', type=int)
    parent.add_argument('--chains', type=int)
    parent.add_argument('--k-max', dest='k_max', type=int)
    parent.add_argument('--init-k', dest='init_k', type=int)
    parent.add_argument('--truncation', type=int, help="finite number of communities/features")
    parent.add_argument('--checkpoint-every', dest='checkpoint_every', type=int)
    parent.add_argument('--resume', **_flag(True))
    parent.add_argument('--resample-hyper', dest='resample_hyper', **_flag(True))
    parent.add_argument('--random-scan', dest='random_scan', **_flag(True))
    parent.add_argument('--no-heldout-trace', dest='record_heldout', **_flag(False))
    parent.add_argument('--folds', type=int)
    parent.add_argument('--jobs', type=int, help="parallel chain/fold workers")
    return parent


def build_parser() -> InfoRelArgumentParser:
    common, model, sampler = _common_options(), _model_options(), _sampler_options()
    parser = InfoRelArgumentParser(prog='inforel', description="Informative relational models for directed networks")
    subparsers = parser.add_subparsers(dest='command', metavar='{' + ','.join(SUBCOMMANDS) + '}')
    subparsers.required = True

    simulate = subparsers.add_parser('simulate', parents=[common, model], help="write a synthetic network")
    simulate.add_argument('--n', type=int)
    simulate.add_argument('--attributes', type=int, help="number of binary metadata columns")
    simulate.add_argument('--sim-truncation', dest='sim_truncation', type=int)
    simulate.add_argument('--metadata-density', dest='metadata_density', type=float)
    simulate.add_argument('--plant', type=int, help="plant K hard communities instead of sampling the model")
    simulate.add_argument('--separation', type=float)

    fit = subparsers.add_parser('fit', parents=[common, model, sampler], help="run chains on one network")
    fit.add_argument('--fold', type=int, help="hold out this cross-validation fold")

    subparsers.add_parser('crossval', parents=[common, model, sampler], help="k-fold link prediction")

    diagnose = subparsers.add_parser('diagnose', parents=[common], help="IAT and ESS of a trace column")
    diagnose.add_argument('trace', nargs='?', help="trace CSV written by fit")
    diagnose.add_argument('--column')

    importance = subparsers.add_parser('importance', parents=[common], help="importance summary of an eta CSV")
    importance.add_argument('eta', nargs='?', help="attribute x community CSV")
    importance.add_argument('--model', choices=Config.SUPPORTED_MODELS)
    return parser


def parse_flags(argv: Optional[List[str]] = None) -> Dict[str, Any]:
    """Parsed arguments as a dict; unset flags are None"""
    return vars(build_parser().parse_args(argv))


def settings_flags(parsed: Dict[str, Any]) -> Dict[str, Any]:
    return {key: value for key, value in parsed.items() if key not in PARSER_ONLY and value is not None}
