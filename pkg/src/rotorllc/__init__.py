"""Harmonic load limiting control workbench."""

__version__ = "0.1.0"

from .accel import NUMBA_ENABLED

__all__ = ["NUMBA_ENABLED", "__version__"]
