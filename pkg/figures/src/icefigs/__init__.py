"""Render figures from icefloe run directories.

Strictly a reader of the solver's documented CSV formats. Nothing here
imports the solver.
"""
from .reader import ReaderError, RunData, read_run

__all__ = ["ReaderError", "RunData", "read_run"]

__version__ = "0.1.0"
