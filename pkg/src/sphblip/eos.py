"""Ideal-gas equation of state and the state representations shared by all
schemes.

Velocities are stored as tuples so that 1D and 2D states share one type; the
Lagrangian/Eulerian conserved forms are strictly one-dimensional.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


class NonPhysicalState(ValueError):
    """Raised for non-positive density, pressure or internal energy."""


@dataclass(frozen=True)
class IdealGas:
    gamma: float = 1.4

    def __post_init__(self):
        if not self.gamma > 1.0:
            raise ValueError(f"gamma must exceed 1, got {self.gamma}")

    def pressure(self, rho, e):
        return (self.gamma - 1.0) * rho * e

    def internal_energy(self, rho, p):
        return p / ((self.gamma - 1.0) * rho)

    def sound_speed(self, rho, p):
        """Eulerian sound speed sqrt(gamma p / rho); works on arrays."""
        return np.sqrt(self.gamma * p / rho)

    def lagrangian_sound_speed(self, rho, p):
        """Lagrangian sound speed sqrt(gamma p rho); works on arrays."""
        return np.sqrt(self.gamma * p * rho)


def _as_vel(vel) -> tuple:
    if np.isscalar(vel):
        return (float(vel),)
    return tuple(float(v) for v in vel)


@dataclass(frozen=True)
class PrimitiveState:
    rho: float
    vel: tuple = field(default=(0.0,))
    p: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "vel", _as_vel(self.vel))
        if not (self.rho > 0.0 and math.isfinite(self.rho)):
            raise NonPhysicalState(f"density must be positive, got {self.rho}")
        if not (self.p > 0.0 and math.isfinite(self.p)):
            raise NonPhysicalState(f"pressure must be positive, got {self.p}")

    @property
    def u(self) -> float:
        """Velocity component along x."""
        return self.vel[0]

    @property
    def dim(self) -> int:
        return len(self.vel)


@dataclass(frozen=True)
class ConservedLagrangian:
    tau: float
    u: float
    ehat: float

    def __post_init__(self):
        if not self.tau > 0.0:
            raise NonPhysicalState(f"specific volume must be positive, got {self.tau}")
        if not self.ehat - 0.5 * self.u * self.u > 0.0:
            raise NonPhysicalState("specific internal energy must be positive")


@dataclass(frozen=True)
class ConservedEulerian:
    rho: float
    mom: float
    etot: float

    def __post_init__(self):
        if not self.rho > 0.0:
            raise NonPhysicalState(f"density must be positive, got {self.rho}")
        if not self.etot - 0.5 * self.mom * self.mom / self.rho > 0.0:
            raise NonPhysicalState("internal energy density must be positive")


def sound_speed_eulerian(s: PrimitiveState, eos: IdealGas) -> float:
    return math.sqrt(eos.gamma * s.p / s.rho)


def sound_speed_lagrangian(s: PrimitiveState, eos: IdealGas) -> float:
    return math.sqrt(eos.gamma * s.p * s.rho)


def to_lagrangian(s: PrimitiveState, eos: IdealGas) -> ConservedLagrangian:
    e = s.p / ((eos.gamma - 1.0) * s.rho)
    return ConservedLagrangian(1.0 / s.rho, s.u, e + 0.5 * s.u * s.u)


def from_lagrangian(c: ConservedLagrangian, eos: IdealGas) -> PrimitiveState:
    rho = 1.0 / c.tau
    e = c.ehat - 0.5 * c.u * c.u
    if not e > 0.0:
        raise NonPhysicalState(f"internal energy {e} after conversion")
    return PrimitiveState(rho, (c.u,), (eos.gamma - 1.0) * rho * e)


def to_eulerian(s: PrimitiveState, eos: IdealGas) -> ConservedEulerian:
    e = s.p / ((eos.gamma - 1.0) * s.rho)
    return ConservedEulerian(s.rho, s.rho * s.u, s.rho * (e + 0.5 * s.u * s.u))


def from_eulerian(c: ConservedEulerian, eos: IdealGas) -> PrimitiveState:
    u = c.mom / c.rho
    rho_e = c.etot - 0.5 * c.mom * u
    if not rho_e > 0.0:
        raise NonPhysicalState(f"internal energy density {rho_e} after conversion")
    return PrimitiveState(c.rho, (u,), (eos.gamma - 1.0) * rho_e)


# Array forms used by the grid solvers: columns are (rho, u, p) / (rho, mom, etot).

def primitive_to_conserved(rho, u, p, gamma):
    e = p / ((gamma - 1.0) * rho)
    return rho, rho * u, rho * (e + 0.5 * u * u)


def conserved_to_primitive(rho, mom, etot, gamma):
    u = mom / rho
    rho_e = etot - 0.5 * mom * u
    if np.any(rho <= 0.0) or np.any(rho_e <= 0.0):
        raise NonPhysicalState("non-positive density or internal energy in grid state")
    return rho, u, (gamma - 1.0) * rho_e
