"""
Subcommands of the InfoRel command line
"""

from .base_command import BaseCommand
from .simulate_command import SimulateCommand
from .fit_command import FitCommand
from .crossval_command import CrossvalCommand
from .diagnose_command import DiagnoseCommand
from .importance_command import ImportanceCommand

COMMANDS = {
    'simulate': SimulateCommand,
    'fit': FitCommand,
    'crossval': CrossvalCommand,
    'diagnose': DiagnoseCommand,
    'importance': ImportanceCommand,
}

__all__ = [
    'BaseCommand',
    'SimulateCommand',
    'FitCommand',
    'CrossvalCommand',
    'DiagnoseCommand',
    'ImportanceCommand',
    'COMMANDS'
]
