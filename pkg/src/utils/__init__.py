"""
Utility modules for InfoRel
"""

from .formatting import format_mean_std, aggregate_table

__all__ = ['format_mean_std', 'aggregate_table']
