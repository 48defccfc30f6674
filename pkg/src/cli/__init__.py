"""
Command line interface for InfoRel
"""

from .app import CommandLineApp, main
from .parser import build_parser

__all__ = ['CommandLineApp', 'main', 'build_parser']
