"""Eigenvalue laboratory for membrane, plate and buckling spectra.

The package computes the four classical spectra (free membrane,
fixed membrane, clamped plate, buckling) on intervals, rectangles,
disks, grid-mask domains and spherical caps, then checks the
inequalities and asymptotic laws that tie them together.
"""

from .spectra import CHAIN_ORDER, MEMBRANE_KINDS, ProblemKind, Spectrum

__version__ = "0.1.0"

__all__ = [
    "CHAIN_ORDER",
    "MEMBRANE_KINDS",
    "ProblemKind",
    "Spectrum",
    "__version__",
]
