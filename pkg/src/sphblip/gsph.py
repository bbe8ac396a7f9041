"""Godunov SPH with an optional blend of regular and diffusive star states.

Each interacting pair solves a 1D Riemann problem along the pair axis
e = (x_b - x_a)/|x_b - x_a|, with particle a on the left.  The star pressure
replaces the pressure average and artificial viscosity of standard SPH.

Energy exchange is split so that every pair conserves total energy exactly.
With G the symmetrised kernel gradient term, particle a receives

    m_a de_a/dt = -m_a m_b [p_E (v*_E - v_m) + p_M (v_m - v_a)] . G

where (p_M) is the star pressure used in the momentum equation, (p_E, v*_E)
the blended star state and v_m the pair mean velocity.  Without blending
this is the usual -m_a m_b p* (v* - v_a) . G.
"""
from __future__ import annotations

import json
import math
import os
from dataclasses import asdict, dataclass, field

import numpy as np

from .eos import IdealGas, PrimitiveState
from .kernels import kernel_deriv
from .problems import (CATALOGUE, DEFAULT_RESOLUTION, UnknownProblem, get_problem,
                       initial_particles_1d, initial_particles_2d)
from .riemann import REGULAR_SOLVERS, StarState, star_hlle, star_regular
from .sph import (DissipationParams, Frame, Integrator, PairTerms, Particle, ParticleSystem,
                  build_frame, mpm_pair_terms, scatter)

BLENDS = ("none", "linear", "exponential")
RECONSTRUCTIONS = ("flat", "linear-muscl")
BLEND_SCOPES = ("energy-only", "both")
HLLE_VELOCITIES = ("energy-flux", "state")
DIFFUSIVE_STATES = ("reconstructed", "flat")


@dataclass
class GsphConfig:
    regular_solver: str = "exact"
    diffusive_solver: str = "hlle"
    blend: str = "none"
    alpha: float = 10.0
    t_final: float = 0.01
    reconstruction: str = "linear-muscl"
    blend_scope: str = "energy-only"
    hlle_velocity: str = "energy-flux"
    diffusive_states: str = "reconstructed"
    cfl: float = 0.3

    def __post_init__(self):
        if self.regular_solver not in REGULAR_SOLVERS:
            raise ValueError(f"regular_solver must be one of {REGULAR_SOLVERS}")
        if self.diffusive_solver != "hlle":
            raise ValueError("diffusive_solver must be 'hlle'")
        if self.blend not in BLENDS:
            raise ValueError(f"blend must be one of {BLENDS}")
        if self.reconstruction not in RECONSTRUCTIONS:
            raise ValueError(f"reconstruction must be one of {RECONSTRUCTIONS}")
        if self.blend_scope not in BLEND_SCOPES:
            raise ValueError(f"blend_scope must be one of {BLEND_SCOPES}")
        if self.hlle_velocity not in HLLE_VELOCITIES:
            raise ValueError(f"hlle_velocity must be one of {HLLE_VELOCITIES}")
        if self.diffusive_states not in DIFFUSIVE_STATES:
            raise ValueError(f"diffusive_states must be one of {DIFFUSIVE_STATES}")
        if not self.t_final > 0.0:
            raise ValueError("t_final must be positive")
        if self.blend == "exponential" and not self.alpha > 0.0:
            raise ValueError("alpha must be positive for the exponential blend")

    def diffusive_weight(self, t: float) -> float:
        """Share of the diffusive star state at time ``t``."""
        if self.blend == "none":
            return 0.0
        if self.blend == "linear":
            return min(1.0, max(0.0, (self.t_final - t) / self.t_final))
        return math.exp(-self.alpha * t / self.t_final)


@dataclass(frozen=True)
class PairState:
    left: PrimitiveState
    right: PrimitiveState
    unit: tuple


# ---------------------------------------------------------------------------
# reconstruction

def minmod(a, b):
    return np.where(a * b > 0.0, np.sign(a) * np.minimum(np.abs(a), np.abs(b)), 0.0)


def sph_gradients(frame: Frame):
    """SPH gradients of rho, p and the velocity tensor for every frame particle.

    grad f_a = sum_b (m_b/rho_b)(f_b - f_a) grad_a W_ab(h_a).  Ghost values are
    copied from their sources (with mirror flips); frozen ghosts get zero.
    """
    i, j, dim = frame.i, frame.j, frame.dim
    N, n = len(frame.m), frame.n_real
    dx = frame.x[i] - frame.x[j]
    r = np.sqrt(np.einsum("ij,ij->i", dx, dx))
    unit = dx / r[:, None]  # points from j to i
    dWi = kernel_deriv(r, frame.h[i], dim)
    dWj = kernel_deriv(r, frame.h[j], dim)
    vol = frame.m / frame.rho

    def scalar(f):
        df = f[j] - f[i]
        g = np.zeros((N, dim))
        for k in range(dim):
            # grad_i W_ij = dW/dr * unit; grad_j W_ji = -dW/dr * unit
            g[:, k] = (np.bincount(i, vol[j] * df * dWi * unit[:, k], minlength=N)
                       + np.bincount(j, vol[i] * df * dWj * unit[:, k], minlength=N))
        return g

    grho = scalar(frame.rho)
    gp = scalar(frame.p)
    gv = np.stack([scalar(frame.v[:, c]) for c in range(dim)], axis=1)  # [a, comp, dir]

    src = frame.src[n:]
    flip = frame.flip[n:]
    img = src >= 0
    for g in (grho, gp):
        g[n:] = 0.0
        g[n:][img] = g[src[img]] * flip[img]
    gv[n:] = 0.0
    gv[n:][img] = gv[src[img]] * flip[img][:, :, None] * flip[img][:, None, :]
    return grho, gp, gv


def pair_states_arrays(frame: Frame, cfg: GsphConfig, grads=None):
    """Left (a) and right (b) states along each pair axis, plus geometry.

    Returns (rl, ul, pl, rr, ur, pr, unit, r, vt_mean) where ``unit`` points
    from a to b and ``vt_mean`` is the mean transverse velocity.
    """
    i, j = frame.i, frame.j
    dx = frame.x[j] - frame.x[i]
    r = np.sqrt(np.einsum("ij,ij->i", dx, dx))
    unit = dx / r[:, None]
    vi, vj = frame.v[i], frame.v[j]
    ul = np.einsum("ij,ij->i", vi, unit)
    ur = np.einsum("ij,ij->i", vj, unit)
    vt_mean = 0.5 * ((vi - ul[:, None] * unit) + (vj - ur[:, None] * unit))
    rl, rr = frame.rho[i].copy(), frame.rho[j].copy()
    pl, pr = frame.p[i].copy(), frame.p[j].copy()

    if cfg.reconstruction == "linear-muscl":
        grho, gp, gv = sph_gradients(frame) if grads is None else grads
        half = 0.5 * r

        def extrap(fl, fr, gl, gr):
            d = (fr - fl) / r
            sl = minmod(np.einsum("ij,ij->i", gl, unit), d)
            sr = minmod(np.einsum("ij,ij->i", gr, unit), d)
            return fl + half * sl, fr - half * sr

        rl, rr = extrap(rl, rr, grho[i], grho[j])
        pl, pr = extrap(pl, pr, gp[i], gp[j])
        # directional derivative of the axial velocity: e . (grad v) . e
        gul = np.einsum("ikl,ik->il", gv[i], unit)
        gur = np.einsum("ikl,ik->il", gv[j], unit)
        ul, ur = extrap(ul, ur, gul, gur)
    return rl, ul, pl, rr, ur, pr, unit, r, vt_mean


def build_pair_states(a: Particle, b: Particle, cfg: GsphConfig | None = None) -> PairState:
    """Raw (flat) pair states for two particles, projected on the pair axis."""
    xa, xb = np.asarray(a.x, float), np.asarray(b.x, float)
    d = xb - xa
    r = float(np.linalg.norm(d))
    if r == 0.0:
        raise ValueError("coincident particles")
    e = d / r
    ua = float(np.dot(a.v, e))
    ub = float(np.dot(b.v, e))
    return PairState(PrimitiveState(a.rho, (ua,), a.p), PrimitiveState(b.rho, (ub,), b.p),
                     tuple(e))


def star_arrays(rl, ul, pl, rr, ur, pr, t, cfg: GsphConfig, gamma=1.4, diffusive_input=None):
    """(p_momentum, p_energy, u_energy) star arrays for the pair list.

    ``diffusive_input`` optionally replaces the six state arrays fed to the
    diffusive solver.
    """
    p_reg, u_reg = star_regular(cfg.regular_solver, rl, ul, pl, rr, ur, pr, gamma)
    w = cfg.diffusive_weight(t)
    if w == 0.0:
        return p_reg, p_reg, u_reg
    dargs = (rl, ul, pl, rr, ur, pr) if diffusive_input is None else diffusive_input
    p_dif, u_dif = star_hlle(*dargs, gamma, velocity=cfg.hlle_velocity)
    p_b = p_reg + w * (p_dif - p_reg)
    u_b = u_reg + w * (u_dif - u_reg)
    p_mom = p_b if cfg.blend_scope == "both" else p_reg
    return p_mom, p_b, u_b


def blended_star(pair: PairState, t: float, cfg: GsphConfig, eos: IdealGas | None = None) -> StarState:
    """Regular, diffusive or blended star state for one pair."""
    g = (eos or IdealGas()).gamma
    args = tuple(np.array([v]) for v in (pair.left.rho, pair.left.u, pair.left.p,
                                         pair.right.rho, pair.right.u, pair.right.p))
    p_reg, u_reg = star_regular(cfg.regular_solver, *args, gamma=g)
    if cfg.blend == "none":
        return StarState(float(p_reg[0]), float(u_reg[0]))
    p_dif, u_dif = star_hlle(*args, gamma=g, velocity=cfg.hlle_velocity)
    if cfg.blend == "linear":
        tf = cfg.t_final
        # weights first, so both end points reproduce one solver exactly
        w_reg, w_dif = t / tf, (tf - t) / tf
        p = w_reg * p_reg + w_dif * p_dif
        u = w_reg * u_reg + w_dif * u_dif
    else:
        w = math.exp(-cfg.alpha * t / cfg.t_final)
        p = p_reg + w * (p_dif - p_reg)
        u = u_reg + w * (u_dif - u_reg)
    return StarState(float(p[0]), float(u[0]))


def gsph_pair_terms(frame: Frame, cfg: GsphConfig) -> PairTerms:
    i, j, dim = frame.i, frame.j, frame.dim
    rl, ul, pl, rr, ur, pr, unit, r, vt = pair_states_arrays(frame, cfg)
    dif = None
    if (cfg.diffusive_states == "flat" and cfg.reconstruction != "flat"
            and cfg.diffusive_weight(frame.t) > 0.0):
        ul0 = np.einsum("ij,ij->i", frame.v[i], unit)
        ur0 = np.einsum("ij,ij->i", frame.v[j], unit)
        dif = (frame.rho[i], ul0, frame.p[i], frame.rho[j], ur0, frame.p[j])
    p_mom, p_en, u_en = star_arrays(rl, ul, pl, rr, ur, pr, frame.t, cfg, frame.gamma, dif)
    v_star = u_en[:, None] * unit + vt

    # G = grad_a W(h_a)/rho_a^2 + grad_a W(h_b)/rho_b^2, grad_a along -unit
    rho = frame.rho
    g = (kernel_deriv(r, frame.h[i], dim) / rho[i] ** 2
         + kernel_deriv(r, frame.h[j], dim) / rho[j] ** 2)
    G = -g[:, None] * unit
    mm = frame.m[i] * frame.m[j]
    force = -(mm * p_mom)[:, None] * G

    def power(va, vb):
        vm = 0.5 * (va + vb)
        flux = p_en[:, None] * (v_star - vm)
        pa = -mm * np.einsum("ij,ij->i", flux + p_mom[:, None] * (vm - va), G)
        pb = mm * np.einsum("ij,ij->i", flux + p_mom[:, None] * (vm - vb), G)
        return pa, pb

    return PairTerms(i, j, force, power)


def gsph_accelerations(sys: ParticleSystem, t: float, cfg: GsphConfig, frame: Frame | None = None):
    """(dv/dt, de/dt) for the real particles at the current state."""
    frame = build_frame(sys, t=t) if frame is None else frame
    frame.t = t
    terms = gsph_pair_terms(frame, cfg)
    out = scatter(frame, terms, frame.v)
    return out["force"] / sys.m[:, None], out["power"] / sys.m


# ---------------------------------------------------------------------------
# experiments

@dataclass
class Snapshot:
    t: float
    system: ParticleSystem


@dataclass
class RunResult:
    problem: str
    snapshots: list
    metadata: dict = field(default_factory=dict)

    @property
    def final(self) -> ParticleSystem:
        return self.snapshots[-1].system


def make_system(prob, resolution: int, eos: IdealGas | None = None) -> ParticleSystem:
    if prob.name.endswith("-2d"):
        return initial_particles_2d(prob, resolution, eos)
    return initial_particles_1d(prob, resolution, eos)


def run_experiment(name: str, cfg=None, resolution: int | None = None, times=(),
                   t_end: float | None = None, eos: IdealGas | None = None,
                   progress=None) -> RunResult:
    """Run a catalogue problem with GSPH (``GsphConfig``) or MPM (``DissipationParams``).

    Snapshots are taken at each of ``times`` and at the end time.
    """
    if name not in CATALOGUE:
        raise UnknownProblem(f"unknown problem {name!r}; known: {sorted(CATALOGUE)}")
    prob = get_problem(name)
    cfg = GsphConfig(t_final=prob.t_end) if cfg is None else cfg
    resolution = DEFAULT_RESOLUTION[name] if resolution is None else int(resolution)
    if resolution <= 0:
        raise ValueError("resolution must be positive")
    t_end = prob.t_end if t_end is None else float(t_end)
    eos = IdealGas() if eos is None else eos
    sys = make_system(prob, resolution, eos)

    if isinstance(cfg, GsphConfig):
        integ = Integrator(sys, lambda f: gsph_pair_terms(f, cfg), 0.0, cfg.cfl)
        method = "gsph" if cfg.blend == "none" else "gsph-hybrid"
    elif isinstance(cfg, DissipationParams):
        integ = Integrator(sys, lambda f: mpm_pair_terms(f, cfg), cfg.alpha_visc, 0.3)
        method = "mpm"
    else:
        raise TypeError(f"unsupported method parameters {type(cfg).__name__}")

    integ.initialize()
    initial = sys.copy()
    snaps = []
    integ.run(t_end, times, callback=lambda s: snaps.append(Snapshot(s.t, s.copy())))
    meta = {
        "problem": name, "method": method, "resolution": resolution, "t_end": t_end,
        "gamma": eos.gamma, "seed": None, "integrator": "midpoint kick, energy-consistent",
        "cfl": integ.cfl, "eta": 1.2, "kernel": "cubic spline",
        "params": asdict(cfg),
    }
    from .sph import conservation_errors

    meta["conservation"] = conservation_errors(initial, snaps[-1].system)
    return RunResult(name, snaps, meta)


def write_metadata(path, meta: dict):
    """Key-value metadata as a JSON object, written atomically."""
    tmp = f"{path}.tmp{os.getpid()}"
    with open(tmp, "w", encoding="utf-8") as f:
        json.dump(meta, f, indent=2, sort_keys=True, default=float)
        f.write("\n")
    os.replace(tmp, path)
