"""
InfoRel - Informative relational models for directed networks
"""

__version__ = "1.0.0"
__author__ = "InfoRel Team"
