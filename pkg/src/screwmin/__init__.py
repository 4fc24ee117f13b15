"""Minimal surfaces swept out by screw motions of planar curves.

Closed-form constructions of the Scherk/Bonnet family, independent numerical
oracles for every identity they satisfy, and finite-difference machinery for
the higher-dimensional generalisation.
"""

from screwmin.params import DerivedConstants, ScrewParams, derive_constants, params_from_ab

__version__ = "0.1.0"

__all__ = [
    "DerivedConstants",
    "ScrewParams",
    "derive_constants",
    "params_from_ab",
    "__version__",
]
