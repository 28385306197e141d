"""
Common utilities for mimolab.
"""

__version__ = "0.1.0"
