"""Contact-discontinuity pressure blip laboratory: SPH, Godunov SPH and
Lagrange+remap finite-volume solvers for the 1D/2D compressible Euler
equations, plus blip diagnostics."""

from .eos import (
    ConservedEulerian,
    ConservedLagrangian,
    IdealGas,
    NonPhysicalState,
    PrimitiveState,
)

__version__ = "0.1.0"

__all__ = [
    "ConservedEulerian",
    "ConservedLagrangian",
    "IdealGas",
    "NonPhysicalState",
    "PrimitiveState",
]
