"""
qproc CLI - batch front door for experiment configs
"""

from .app import main

__all__ = ["main"]
