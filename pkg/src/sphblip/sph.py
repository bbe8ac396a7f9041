"""Particle machinery shared by the SPH schemes.

A step evaluates the particles in four barrier-separated phases: ghost and
pair construction, density/smoothing-length sweeps, pair terms, and the state
update.  Pair terms are computed once per unordered pair and scattered to both
members with opposite signs, so interior momentum and energy exchange cancel
to round-off.

Boundaries are ghost particles.  Ghost shares of a pair interaction are
dropped; what real particles receive from ghosts is accumulated as boundary
impulse and boundary work, so ``total - boundary flux`` is the conserved
quantity reported by :func:`conservation_errors`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .eos import IdealGas
from .kernels import kernel, kernel_deriv
from .neighbors import find_neighbors, find_pairs

ETA = 1.2
H_SWEEPS = 3
SEARCH_PAD = 1.3


class StepRejected(RuntimeError):
    pass


@dataclass
class DissipationParams:
    alpha_visc: float = 1.0
    beta_visc: float = 2.0
    alpha_u: float = 0.0

    def __post_init__(self):
        if min(self.alpha_visc, self.beta_visc, self.alpha_u) < 0.0:
            raise ValueError("dissipation coefficients must be non-negative")


@dataclass(frozen=True)
class Particle:
    x: tuple
    v: tuple
    m: float
    h: float
    rho: float
    e: float
    gamma: float = 1.4

    @property
    def p(self) -> float:
        return (self.gamma - 1.0) * self.rho * self.e


# ---------------------------------------------------------------------------
# boundaries

@dataclass
class GhostBlock:
    x: np.ndarray
    v: np.ndarray
    m: np.ndarray
    h: np.ndarray
    rho: np.ndarray
    e: np.ndarray
    src: np.ndarray   # source real particle, -1 for frozen ghosts
    flip: np.ndarray  # per-component velocity multiplier

    @classmethod
    def empty(cls, dim):
        z = np.empty(0)
        return cls(np.empty((0, dim)), np.empty((0, dim)), z, z, z, z,
                   np.empty(0, dtype=np.intp), np.empty((0, dim)))

    def __len__(self):
        return len(self.m)


@dataclass
class FrozenSlab:
    """Static ghost particles holding the initial state beyond a domain end."""

    x: np.ndarray
    v: np.ndarray
    m: np.ndarray
    h: np.ndarray
    rho: np.ndarray
    e: np.ndarray

    def ghosts(self, x, v, h, reach):
        n, dim = self.x.shape
        return GhostBlock(self.x.copy(), self.v.copy(), self.m.copy(), self.h.copy(),
                          self.rho.copy(), self.e.copy(), np.full(n, -1, dtype=np.intp),
                          np.ones((n, dim)))

    def wrap(self, x, v):
        pass


@dataclass
class MirrorWall:
    """Reflecting wall at ``x[axis] = pos``; ``side`` is -1 (low) or +1 (high)."""

    axis: int
    pos: float
    side: int

    def ghosts(self, x, v, h, reach):
        d = self.side * (self.pos - x[:, self.axis])  # distance inside
        sel = np.nonzero(d < reach)[0]
        gx = x[sel].copy()
        gx[:, self.axis] = 2.0 * self.pos - gx[:, self.axis]
        flip = np.ones((len(sel), x.shape[1]))
        flip[:, self.axis] = -1.0
        return GhostBlock(gx, v[sel] * flip, np.zeros(len(sel)), np.zeros(len(sel)),
                          np.zeros(len(sel)), np.zeros(len(sel)), sel, flip)

    def wrap(self, x, v):
        # a particle pushed through the wall is reflected back
        out = self.side * (x[:, self.axis] - self.pos) > 0.0
        if out.any():
            x[out, self.axis] = 2.0 * self.pos - x[out, self.axis]
            v[out, self.axis] *= -1.0


@dataclass
class PeriodicAxis:
    axis: int
    lo: float
    hi: float

    @property
    def length(self):
        return self.hi - self.lo

    def ghosts(self, x, v, h, reach):
        c = x[:, self.axis]
        low = np.nonzero(c - self.lo < reach)[0]
        high = np.nonzero(self.hi - c < reach)[0]
        sel = np.concatenate([low, high])
        shift = np.concatenate([np.full(len(low), self.length), np.full(len(high), -self.length)])
        gx = x[sel].copy()
        gx[:, self.axis] += shift
        n = len(sel)
        return GhostBlock(gx, v[sel].copy(), np.zeros(n), np.zeros(n), np.zeros(n),
                          np.zeros(n), sel, np.ones((n, x.shape[1])))

    def wrap(self, x, v):
        c = x[:, self.axis]
        x[:, self.axis] = self.lo + np.mod(c - self.lo, self.length)


# ---------------------------------------------------------------------------
# particle system

@dataclass
class ParticleSystem:
    x: np.ndarray
    v: np.ndarray
    m: np.ndarray
    h: np.ndarray
    rho: np.ndarray
    e: np.ndarray
    eos: IdealGas = field(default_factory=IdealGas)
    boundaries: list = field(default_factory=list)
    t: float = 0.0
    ids: np.ndarray | None = None
    boundary_impulse: np.ndarray | None = None
    boundary_work: float = 0.0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        if self.x.ndim == 1:
            self.x = self.x[:, None]
        self.v = np.asarray(self.v, dtype=float).reshape(self.x.shape)
        for name in ("m", "h", "rho", "e"):
            setattr(self, name, np.asarray(getattr(self, name), dtype=float).copy())
        if self.ids is None:
            self.ids = np.arange(len(self.m))
        if self.boundary_impulse is None:
            self.boundary_impulse = np.zeros(self.dim)
        if np.any(self.m <= 0.0) or np.any(self.h <= 0.0):
            raise ValueError("particle masses and smoothing lengths must be positive")

    @property
    def dim(self) -> int:
        return self.x.shape[1]

    @property
    def n(self) -> int:
        return len(self.m)

    @property
    def p(self):
        return self.eos.pressure(self.rho, self.e)

    @property
    def c(self):
        return np.sqrt(self.eos.gamma * self.p / self.rho)

    def particle(self, k: int) -> Particle:
        return Particle(tuple(self.x[k]), tuple(self.v[k]), self.m[k], self.h[k],
                        self.rho[k], self.e[k], self.eos.gamma)

    def momentum(self):
        return (self.m[:, None] * self.v).sum(axis=0)

    def energy(self):
        return float(np.sum(self.m * (self.e + 0.5 * np.sum(self.v * self.v, axis=1))))

    def copy(self) -> "ParticleSystem":
        return ParticleSystem(self.x.copy(), self.v.copy(), self.m.copy(), self.h.copy(),
                              self.rho.copy(), self.e.copy(), self.eos, self.boundaries,
                              self.t, self.ids.copy(), self.boundary_impulse.copy(),
                              self.boundary_work, dict(self.meta))


@dataclass
class Frame:
    """Real particles followed by ghosts, frozen for one evaluation."""

    x: np.ndarray
    v: np.ndarray
    m: np.ndarray
    h: np.ndarray
    rho: np.ndarray
    e: np.ndarray
    n_real: int
    src: np.ndarray
    flip: np.ndarray
    dim: int
    gamma: float
    i: np.ndarray = None
    j: np.ndarray = None
    t: float = 0.0

    @property
    def p(self):
        return (self.gamma - 1.0) * self.rho * self.e

    @property
    def c(self):
        return np.sqrt(self.gamma * self.p / self.rho)

    def pair_geometry(self):
        dx = self.x[self.i] - self.x[self.j]
        r = np.sqrt(np.einsum("ij,ij->i", dx, dx))
        return dx, r, dx / r[:, None]

    def ghost_values(self, real_values):
        """Extend a per-real-particle array to the ghosts via their sources."""
        n = self.n_real
        img = self.src[n:] >= 0
        out = np.empty((len(self.m),) + real_values.shape[1:])
        out[:n] = real_values
        return out, img

    def refresh_images(self):
        n = self.n_real
        img = np.nonzero(self.src[n:] >= 0)[0] + n
        s = self.src[img]
        self.h[img] = self.h[s]
        self.rho[img] = self.rho[s]
        self.e[img] = self.e[s]
        self.m[img] = self.m[s]

    def velocities(self, v_real, v_frozen):
        n = self.n_real
        out = np.empty_like(self.v)
        out[:n] = v_real
        g = self.src[n:]
        img = g >= 0
        out[n:][img] = v_real[g[img]] * self.flip[n:][img]
        out[n:][~img] = v_frozen
        return out


def summation_density(frame: Frame) -> np.ndarray:
    """rho_a = sum_b m_b W(|x_a - x_b|, h_a) over the pair list plus self."""
    N = len(frame.m)
    i, j = frame.i, frame.j
    dx = frame.x[i] - frame.x[j]
    r = np.sqrt(np.einsum("ij,ij->i", dx, dx))
    rho = frame.m * kernel(0.0, frame.h, frame.dim)
    rho += np.bincount(i, frame.m[j] * kernel(r, frame.h[i], frame.dim), minlength=N)
    rho += np.bincount(j, frame.m[i] * kernel(r, frame.h[j], frame.dim), minlength=N)
    return rho


def build_frame(sys: ParticleSystem, x=None, v=None, e=None, t=None,
                update_h=True) -> Frame:
    """Assemble ghosts, pairs, and converged summation densities."""
    x = sys.x if x is None else x
    v = sys.v if v is None else v
    e = sys.e if e is None else e
    n, dim = sys.n, sys.dim
    h = sys.h.copy()

    for attempt in range(4):
        reach = 2.0 * SEARCH_PAD * SEARCH_PAD * h.max()
        blocks = [b.ghosts(x, v, h, reach) for b in sys.boundaries]
        # periodic images of mirror ghosts are not needed for the layouts used here
        gx = np.concatenate([x] + [b.x for b in blocks])
        frame = Frame(
            x=gx,
            v=np.concatenate([v] + [b.v for b in blocks]),
            m=np.concatenate([sys.m] + [b.m for b in blocks]),
            h=np.concatenate([h] + [b.h for b in blocks]),
            rho=np.concatenate([sys.rho] + [b.rho for b in blocks]),
            e=np.concatenate([e] + [b.e for b in blocks]),
            n_real=n,
            src=np.concatenate([np.arange(n)] + [b.src for b in blocks]),
            flip=np.concatenate([np.ones((n, dim))] + [b.flip for b in blocks]),
            dim=dim,
            gamma=sys.eos.gamma,
            t=sys.t if t is None else t,
        )
        frame.refresh_images()
        h_search = frame.h.copy()
        frame.i, frame.j = find_pairs(gx, h_search, pad=SEARCH_PAD)
        # ghost-ghost pairs never contribute
        keep = frame.i < n
        frame.i, frame.j = frame.i[keep], frame.j[keep]

        if update_h:
            for _ in range(H_SWEEPS):
                rho = summation_density(frame)
                frame.rho[:n] = rho[:n]
                frame.h[:n] = ETA * (sys.m / rho[:n]) ** (1.0 / dim)
                frame.refresh_images()
        rho = summation_density(frame)
        frame.rho[:n] = rho[:n]
        frame.refresh_images()
        if np.all(frame.h <= SEARCH_PAD * h_search * (1.0 + 1e-12)):
            break
        h = frame.h[:n].copy()
    else:
        raise StepRejected("smoothing lengths failed to settle")

    # exact pair filter for the final smoothing lengths
    dx = frame.x[frame.i] - frame.x[frame.j]
    r2 = np.einsum("ij,ij->i", dx, dx)
    reach = 2.0 * np.maximum(frame.h[frame.i], frame.h[frame.j])
    keep = r2 < reach * reach
    frame.i, frame.j = frame.i[keep], frame.j[keep]
    return frame


def neighbor_lists(sys: ParticleSystem):
    """Neighbour index arrays for the real particles (no ghosts)."""
    return find_neighbors(sys.x, sys.h)


def update_density(sys: ParticleSystem) -> ParticleSystem:
    frame = build_frame(sys)
    sys.rho = frame.rho[: sys.n].copy()
    sys.h = frame.h[: sys.n].copy()
    return sys


# ---------------------------------------------------------------------------
# pair terms

@dataclass
class PairTerms:
    """Force on the first member of each pair, and a power function.

    ``power(vi, vj)`` returns (m_i de_i/dt, m_j de_j/dt) for the pair velocities
    used in the energy update.
    """

    i: np.ndarray
    j: np.ndarray
    force: np.ndarray
    power: Callable


def mpm_pair_terms(frame: Frame, params: DissipationParams) -> PairTerms:
    """Variational SPH with Monaghan viscosity and signal-velocity conduction."""
    i, j, dim = frame.i, frame.j, frame.dim
    dx, r, unit = frame.pair_geometry()
    p, rho, c = frame.p, frame.rho, frame.c
    dWi = kernel_deriv(r, frame.h[i], dim)
    dWj = kernel_deriv(r, frame.h[j], dim)
    dWm = 0.5 * (dWi + dWj)
    mm = frame.m[i] * frame.m[j]

    vij = frame.v[i] - frame.v[j]
    vr = np.einsum("ij,ij->i", vij, dx)
    h_bar = 0.5 * (frame.h[i] + frame.h[j])
    mu = np.where(vr < 0.0, h_bar * vr / (r * r + 0.01 * h_bar * h_bar), 0.0)
    rho_bar = 0.5 * (rho[i] + rho[j])
    c_bar = 0.5 * (c[i] + c[j])
    pi_ab = (-params.alpha_visc * c_bar * mu + params.beta_visc * mu * mu) / rho_bar

    wi = mm * (p[i] / rho[i] ** 2 * dWi + 0.5 * pi_ab * dWm)
    wj = mm * (p[j] / rho[j] ** 2 * dWj + 0.5 * pi_ab * dWm)
    force = -(wi + wj)[:, None] * unit

    if params.alpha_u > 0.0:
        vsig = np.sqrt(np.abs(p[i] - p[j]) / rho_bar)
        q = mm * params.alpha_u * vsig * (frame.e[i] - frame.e[j]) * dWm / rho_bar
    else:
        q = 0.0

    def power(vi, vj):
        proj = np.einsum("ij,ij->i", vi - vj, unit)
        return wi * proj + q, wj * proj - q

    return PairTerms(i, j, force, power)


def scatter(frame: Frame, terms: PairTerms, vbar_frame=None):
    """Per-real-particle force and power, split into total and ghost parts."""
    n, N = frame.n_real, len(frame.m)
    i, j = terms.i, terms.j
    ghost_pair = j >= n
    dim = frame.dim
    force = np.zeros((N, dim))
    ghost_force = np.zeros(dim)
    for k in range(dim):
        force[:, k] = (np.bincount(i, terms.force[:, k], minlength=N)
                       - np.bincount(j, terms.force[:, k], minlength=N))
        ghost_force[k] = terms.force[ghost_pair, k].sum()
    result = {"force": force[:n], "ghost_force": ghost_force}
    if vbar_frame is not None:
        pi, pj = terms.power(vbar_frame[i], vbar_frame[j])
        power = np.bincount(i, pi, minlength=N) + np.bincount(j, pj, minlength=N)
        result["power"] = power[:n]
        result["ghost_power"] = float(pi[ghost_pair].sum())
    return result


def mpm_accelerations(sys: ParticleSystem, params: DissipationParams, frame: Frame | None = None):
    """(dv/dt, de/dt) for the real particles at the current state."""
    frame = build_frame(sys) if frame is None else frame
    terms = mpm_pair_terms(frame, params)
    out = scatter(frame, terms, frame.v)
    return out["force"] / sys.m[:, None], out["power"] / sys.m


# ---------------------------------------------------------------------------
# time integration

def cfl_timestep(sys: ParticleSystem, alpha_visc: float = 0.0, cfl: float = 0.3) -> float:
    c = sys.c
    speed = np.sqrt(np.sum(sys.v * sys.v, axis=1))
    return float(cfl * np.min(sys.h / (c + speed + 1.2 * alpha_visc * c)))


class Integrator:
    """Midpoint predictor with an energy-consistent corrector.

    Forces are evaluated at ``x + dt/2 v``; velocities get the full kick; the
    thermal update uses the pair work at the mean of old and new velocities,
    which makes kinetic plus internal energy exchange cancel per pair.
    """

    def __init__(self, sys: ParticleSystem, terms_fn: Callable, alpha_visc: float = 0.0,
                 cfl: float = 0.3):
        self.sys = sys
        self.terms_fn = terms_fn
        self.alpha_visc = alpha_visc
        self.cfl = cfl
        self.acc = None
        self.edot = None
        self._frozen_v = None

    def _frozen_velocities(self, frame):
        n = frame.n_real
        return frame.v[n:][frame.src[n:] < 0]

    def initialize(self):
        sys = self.sys
        frame = build_frame(sys)
        sys.rho = frame.rho[: sys.n].copy()
        sys.h = frame.h[: sys.n].copy()
        terms = self.terms_fn(frame)
        out = scatter(frame, terms, frame.v)
        self.acc = out["force"] / sys.m[:, None]
        self.edot = out["power"] / sys.m

    def step(self, dt: float):
        sys = self.sys
        if self.acc is None:
            self.initialize()
        x_h = sys.x + 0.5 * dt * sys.v
        v_h = sys.v + 0.5 * dt * self.acc
        e_h = sys.e + 0.5 * dt * self.edot
        if np.any(e_h <= 0.0):
            e_h = sys.e.copy()
        frame = build_frame(sys, x_h, v_h, e_h, t=sys.t + 0.5 * dt)
        terms = self.terms_fn(frame)
        out = scatter(frame, terms)
        acc = out["force"] / sys.m[:, None]
        v_new = sys.v + dt * acc
        vbar = 0.5 * (sys.v + v_new)
        frozen = self._frozen_velocities(frame)
        vbar_frame = frame.velocities(vbar, frozen)
        out = scatter(frame, terms, vbar_frame)
        edot = out["power"] / sys.m
        e_new = sys.e + dt * edot
        if np.any(e_new <= 0.0) or not np.all(np.isfinite(e_new)):
            raise StepRejected(f"non-positive internal energy at t={sys.t:.6g}")
        x_new = x_h + 0.5 * dt * v_new
        for b in sys.boundaries:
            b.wrap(x_new, v_new)

        sys.boundary_impulse = sys.boundary_impulse + dt * out["ghost_force"]
        n = frame.n_real
        gp = frame.j >= n
        # work done on real particles by ghost pairs: force . vbar plus their heating
        f_g = terms.force[gp]
        work = np.einsum("ij,ij->", f_g, vbar[frame.i[gp]]) + out["ghost_power"]
        sys.boundary_work += dt * work

        sys.x, sys.v, sys.e = x_new, v_new, e_new
        sys.rho = frame.rho[:n].copy()
        sys.h = frame.h[:n].copy()
        sys.t += dt
        self.acc, self.edot = acc, edot

    def timestep(self):
        return cfl_timestep(self.sys, self.alpha_visc, self.cfl)

    def run(self, t_end: float, times=(), callback=None, max_steps=10_000_000):
        """Advance to ``t_end``; ``callback(sys)`` fires at each of ``times``."""
        pending = sorted(t for t in times if t <= t_end + 1e-15)
        if t_end not in pending:
            pending.append(t_end)
        steps = 0
        if self.acc is None:
            self.initialize()
        for target in pending:
            while self.sys.t < target - 1e-14 * max(1.0, target):
                dt = min(self.timestep(), target - self.sys.t)
                self.step(dt)
                steps += 1
                if steps > max_steps:
                    raise StepRejected("step budget exhausted")
            self.sys.t = target
            if callback is not None:
                callback(self.sys)
        return self.sys


def step(sys: ParticleSystem, dt: float, params: DissipationParams | None = None):
    """One MPM step; for repeated stepping use :class:`Integrator`."""
    params = DissipationParams() if params is None else params
    integ = Integrator(sys, lambda f: mpm_pair_terms(f, params), params.alpha_visc)
    integ.step(dt)
    return sys


def conservation_errors(sys0: ParticleSystem, sys1: ParticleSystem):
    """Relative drift of mass, momentum and energy net of boundary fluxes."""
    mass = abs(sys1.m.sum() - sys0.m.sum()) / sys0.m.sum()
    dP = sys1.momentum() - sys0.momentum() - (sys1.boundary_impulse - sys0.boundary_impulse)
    p_scale = max(float(np.sum(sys0.m * np.sqrt(2.0 * sys0.e))),
                  float(np.sum(sys1.m * np.linalg.norm(sys1.v, axis=1))))
    dE = sys1.energy() - sys0.energy() - (sys1.boundary_work - sys0.boundary_work)
    return {"mass": mass,
            "momentum": float(np.linalg.norm(dP)) / p_scale,
            "energy": abs(dE) / sys0.energy()}


# ---------------------------------------------------------------------------
# snapshots

def snapshot_rows(sys: ParticleSystem):
    order = np.argsort(sys.ids)
    cols = {"id": sys.ids[order]}
    names = "xy"
    for k in range(sys.dim):
        cols[names[k]] = sys.x[order, k]
    for k in range(sys.dim):
        cols["v" + names[k]] = sys.v[order, k]
    cols.update(m=sys.m[order], h=sys.h[order], rho=sys.rho[order], e=sys.e[order],
                p=sys.p[order])
    return cols


def lattice_ghost_slab(x_edge, spacing, count, direction, m, h, rho, e, v=0.0):
    """1D frozen ghost lattice continuing a particle row past ``x_edge``."""
    k = np.arange(count) + 0.5
    x = x_edge + direction * k * spacing
    n = len(x)
    return FrozenSlab(x[:, None], np.full((n, 1), v), np.full(n, m), np.full(n, h),
                      np.full(n, rho), np.full(n, e))


def ghost_count(spacing, h, extent_h=6.0):
    return int(math.ceil(extent_h * h / spacing)) + 1
