"""Exact solution of n-cluster spin chains in a transverse field.

Free-fermion correlators in the thermodynamic limit, Wick/Pfaffian evaluation
of arbitrary Pauli strings, order parameters, entanglement measures and a
brute-force exact-diagonalisation oracle for small rings.
"""
from ._accel import BACKEND
from .correlators import CorrelatorTable, build_table, g_correlator
from .errors import MissingOffsetError, NumericalError, QuadratureError
from .model import (
    PHI_C,
    ModelParams,
    ModeSolution,
    d2_energy_scan,
    energy_density,
    mode_solution,
    spectral_gap,
)
from .pauli import PARITY_ODD, MajoranaMonomial, PauliString, cluster_operator, compile_pauli
from .quadrature import DEFAULT_QUAD, QuadratureSpec
from .wick import expectation, pfaffian

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "CorrelatorTable",
    "DEFAULT_QUAD",
    "MajoranaMonomial",
    "MissingOffsetError",
    "ModeSolution",
    "ModelParams",
    "NumericalError",
    "PARITY_ODD",
    "PHI_C",
    "PauliString",
    "QuadratureError",
    "QuadratureSpec",
    "build_table",
    "cluster_operator",
    "compile_pauli",
    "d2_energy_scan",
    "energy_density",
    "expectation",
    "g_correlator",
    "mode_solution",
    "pfaffian",
    "spectral_gap",
]
