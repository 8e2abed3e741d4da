"""Numerical laboratory for force-modulation Casimir measurements in air.

Subpackages cover the Lifshitz force engine, sphere-plate electrostatics,
slip-corrected hydrodynamics, topography corrections, the measurement
simulator, and the calibration/analysis pipeline.
"""
from .constants import Constants, DEFAULT_CONSTANTS
from .exceptions import (
    FomlabError,
    ConvergenceError,
    ConfigurationError,
    ContactError,
    InsufficientDataError,
)

__version__ = "0.1.0"
