"""Spin and pseudospin symmetries of Dirac Hamiltonians.

Exact gamma-matrix algebra, a catalogue of coupling structures with their
symmetry conditions, SU(2) generator checks, slab and radial spectra.
"""

from .algebra import DIRAC, GaussianRational, SpinorMatrix, anticommutator, commutator
from .catalog import CouplingKind, build_candidate, catalog, check_user_matrix, classify
from .errors import (
    CertificateError,
    ConstraintViolation,
    DiracSymError,
    DomainError,
    NumericalFailure,
    UsageError,
)
from .generators import projectors, su2_residual, verify_generators

__all__ = [
    "DIRAC", "GaussianRational", "SpinorMatrix", "anticommutator", "commutator",
    "CouplingKind", "build_candidate", "catalog", "check_user_matrix", "classify",
    "CertificateError", "ConstraintViolation", "DiracSymError", "DomainError",
    "NumericalFailure", "UsageError",
    "projectors", "su2_residual", "verify_generators",
]

__version__ = "0.1.0"
