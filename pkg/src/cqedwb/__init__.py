"""Numerical workbench for superconducting-qubit circuit QED."""
__version__ = "0.1.0"

from . import errors, numkit  # noqa: F401
