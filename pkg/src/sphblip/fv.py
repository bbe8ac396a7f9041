"""1D finite volume: Lagrange step plus conservative remap, and a direct
Eulerian Godunov scheme.

Both use exact Riemann solutions at cell edges.  Linear reconstruction is
MUSCL-Hancock in primitive variables; the remap integrates a piecewise
constant or limited piecewise linear representation of (rho, rho u, rho e_hat)
exactly over the fixed target cells.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .eos import IdealGas, NonPhysicalState, conserved_to_primitive, primitive_to_conserved
from .problems import TestProblem, get_problem
from .riemann import godunov_state, star_exact

CFL = 0.5
N_GHOST = 2


class EdgeCrossing(RuntimeError):
    pass


class CoverageMismatch(ValueError):
    pass


LIMITERS = ("minmod", "vanleer")


@dataclass(frozen=True)
class Reconstruction:
    kind: str = "constant"
    limiter: str = "minmod"

    def __post_init__(self):
        if self.kind not in ("constant", "linear"):
            raise ValueError(f"unknown reconstruction {self.kind!r}")
        if self.limiter not in LIMITERS:
            raise ValueError(f"unknown limiter {self.limiter!r}")

    def limit(self, a, b):
        """Limited slope from backward and forward differences."""
        if self.limiter == "minmod":
            return np.where(a * b > 0.0, np.sign(a) * np.minimum(np.abs(a), np.abs(b)), 0.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            s = np.where(a * b > 0.0, 2.0 * a * b / (a + b), 0.0)
        return s

    def slopes(self, q):
        """Per-cell undivided slopes of ``q`` (first/last cells get zero)."""
        s = np.zeros_like(q)
        if self.kind == "linear" and len(q) > 2:
            s[1:-1] = self.limit(q[1:-1] - q[:-2], q[2:] - q[1:-1])
        return s


@dataclass
class LagrangianGrid:
    edges: np.ndarray
    dm: np.ndarray
    tau: np.ndarray
    u: np.ndarray
    ehat: np.ndarray
    boundary: str = "outflow"
    gamma: float = 1.4
    # cumulative (mass, momentum, energy) that entered through the two ends
    inflow: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        self.edges = np.asarray(self.edges, dtype=float)
        if np.any(np.diff(self.edges) <= 0.0):
            raise EdgeCrossing("edges must be strictly increasing")
        if np.any(np.asarray(self.dm) <= 0.0):
            raise ValueError("cell masses must be positive")

    @property
    def xi(self):
        return np.concatenate([[0.0], np.cumsum(self.dm)])

    @property
    def rho(self):
        return 1.0 / self.tau

    @property
    def p(self):
        return (self.gamma - 1.0) * self.rho * (self.ehat - 0.5 * self.u ** 2)

    def totals(self):
        return self.dm.sum(), np.sum(self.dm * self.u), np.sum(self.dm * self.ehat)


@dataclass
class EulerianGrid:
    edges: np.ndarray
    rho: np.ndarray
    mom: np.ndarray
    etot: np.ndarray
    boundary: str = "outflow"
    gamma: float = 1.4
    t: float = 0.0
    inflow: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        self.edges = np.asarray(self.edges, dtype=float)
        if np.any(np.diff(self.edges) <= 0.0):
            raise ValueError("edges must be strictly increasing")

    @property
    def dx(self):
        return np.diff(self.edges)

    @property
    def centers(self):
        return 0.5 * (self.edges[1:] + self.edges[:-1])

    def primitives(self):
        return conserved_to_primitive(self.rho, self.mom, self.etot, self.gamma)

    def totals(self):
        dx = self.dx
        return np.sum(self.rho * dx), np.sum(self.mom * dx), np.sum(self.etot * dx)

    def copy(self):
        return replace(self, rho=self.rho.copy(), mom=self.mom.copy(), etot=self.etot.copy(),
                       inflow=self.inflow.copy())

    def to_lagrangian(self) -> LagrangianGrid:
        rho, u, p = self.primitives()
        ehat = self.etot / self.rho
        return LagrangianGrid(self.edges.copy(), self.rho * self.dx, 1.0 / rho, u, ehat,
                              self.boundary, self.gamma, self.inflow.copy())


def grid_from_problem(prob: TestProblem, cells: int, eos: IdealGas | None = None) -> EulerianGrid:
    eos = IdealGas() if eos is None else eos
    lo, hi = prob.domain
    edges = np.linspace(lo, hi, cells + 1)
    xc = 0.5 * (edges[1:] + edges[:-1])
    rho, u, p = prob.state_at(xc)
    r, m, e = primitive_to_conserved(rho, u, p, eos.gamma)
    bnd = "reflecting" if prob.boundary == "reflecting" else "outflow"
    return EulerianGrid(edges, r, m, e, bnd, eos.gamma)


def _pad(q, n, boundary, odd=False):
    """Ghost-cell padding: zero-gradient or mirror (odd fields change sign)."""
    if boundary == "reflecting":
        left = q[:n][::-1]
        right = q[-n:][::-1]
        if odd:
            left, right = -left, -right
    else:
        left = np.repeat(q[:1], n)
        right = np.repeat(q[-1:], n)
    return np.concatenate([left, q, right])


# ---------------------------------------------------------------------------
# Lagrange step

def lagrangian_timestep(g: LagrangianGrid, cfl: float = CFL) -> float:
    rho = g.rho
    C = np.sqrt(g.gamma * g.p * rho)
    return float(cfl * np.min(g.dm / C))


def _edge_states(rho, u, p, recon: Reconstruction, boundary, dt, dm=None, lagrangian=True, dx=None,
                 gamma=1.4):
    """Left/right primitive states at every edge (n+1 edges), with a Hancock
    half-step predictor for linear reconstruction."""
    n = len(rho)
    ng = N_GHOST
    R = _pad(rho, ng, boundary)
    U = _pad(u, ng, boundary, odd=True)
    P = _pad(p, ng, boundary)
    sR, sU, sP = recon.slopes(R), recon.slopes(U), recon.slopes(P)
    if recon.kind == "linear":
        if lagrangian:
            w = _pad(dm, ng, boundary)
            # mass-coordinate form: rho_t = -rho^2 u_xi, u_t = -p_xi, p_t = -g p rho u_xi
            k = 0.5 * dt / w
            dR = -k * R * R * sU
            dU = -k * sP
            dP = -k * gamma * P * R * sU
        else:
            w = _pad(dx, ng, boundary)
            k = 0.5 * dt / w
            dR = -k * (U * sR + R * sU)
            dU = -k * (U * sU + sP / R)
            dP = -k * (gamma * P * sU + U * sP)
    else:
        dR = dU = dP = 0.0
    # right face of cell k and left face of cell k
    Rm, Rp = R - 0.5 * sR + dR, R + 0.5 * sR + dR
    Um, Up = U - 0.5 * sU + dU, U + 0.5 * sU + dU
    Pm, Pp = P - 0.5 * sP + dP, P + 0.5 * sP + dP
    # edge e between padded cells ng-1+e and ng+e, e = 0..n
    a = np.arange(ng - 1, ng + n)
    b = a + 1
    states = (Rp[a], Up[a], Pp[a], Rm[b], Um[b], Pm[b])
    if any(np.any(s <= 0.0) for s in (states[0], states[2], states[3], states[5])):
        # fall back to first order where the predictor loses positivity
        bad = (states[0] <= 0) | (states[2] <= 0) | (states[3] <= 0) | (states[5] <= 0)
        states = tuple(np.where(bad, f, s) for s, f in
                       zip(states, (R[a], U[a], P[a], R[b], U[b], P[b])))
    return states


def lagrange_step(g: LagrangianGrid, recon: Reconstruction, dt: float) -> LagrangianGrid:
    """One conservative Lagrangian update with exact edge Riemann solutions."""
    rho, u, p = g.rho, g.u, g.p
    if np.any(p <= 0.0):
        raise NonPhysicalState("non-positive pressure on Lagrangian grid")
    rl, ul, pl, rr, ur, pr = _edge_states(rho, u, p, recon, g.boundary, dt, dm=g.dm,
                                          gamma=g.gamma)
    ps, us = star_exact(rl, ul, pl, rr, ur, pr, g.gamma)
    if g.boundary == "reflecting":
        us[0] = us[-1] = 0.0
    edges = g.edges + dt * us
    width = np.diff(edges)
    if np.any(width <= 0.0):
        raise EdgeCrossing("cell volume became non-positive")
    tau = width / g.dm
    u_new = u + dt / g.dm * (ps[:-1] - ps[1:])
    pu = ps * us
    ehat = g.ehat + dt / g.dm * (pu[:-1] - pu[1:])
    inflow = g.inflow + dt * np.array([0.0, ps[0] - ps[-1], pu[0] - pu[-1]])
    return LagrangianGrid(edges, g.dm.copy(), tau, u_new, ehat, g.boundary, g.gamma, inflow)


# ---------------------------------------------------------------------------
# remap

def _cumulative(edges, q, slopes):
    """Callable F(X) = integral of the reconstruction from edges[0] to X.

    Outside the covered range the end cells are continued as constants.
    """
    w = np.diff(edges)
    c = 0.5 * (edges[1:] + edges[:-1])
    cum = np.concatenate([[0.0], np.cumsum(q * w)])

    def F(X):
        X = np.asarray(X, dtype=float)
        j = np.clip(np.searchsorted(edges, X, side="right") - 1, 0, len(q) - 1)
        a = edges[j]
        Xc = np.clip(X, edges[0], edges[-1])
        part = q[j] * (Xc - a) + 0.5 * slopes[j] * ((Xc - c[j]) ** 2 - (a - c[j]) ** 2)
        out = cum[j] + part
        out = np.where(X < edges[0], q[0] * (X - edges[0]), out)
        out = np.where(X > edges[-1], cum[-1] + q[-1] * (X - edges[-1]), out)
        return out

    return F


def remap(g: LagrangianGrid, target: EulerianGrid, recon: Reconstruction | None = None,
          extend: bool = False, tol: float = 1e-12) -> EulerianGrid:
    """Project the moved cells onto ``target``'s fixed cells.

    The moved grid must cover the target interval; with ``extend`` the end
    cells are continued as constants instead (outflow boundaries).
    """
    recon = Reconstruction() if recon is None else recon
    X = target.edges
    x = g.edges
    scale = max(1.0, abs(X[0]), abs(X[-1]))
    if not extend and (abs(x[0] - X[0]) > tol * scale or abs(x[-1] - X[-1]) > tol * scale):
        raise CoverageMismatch(
            f"moved grid [{x[0]:.17g}, {x[-1]:.17g}] vs target [{X[0]:.17g}, {X[-1]:.17g}]")
    w = np.diff(x)
    c = 0.5 * (x[1:] + x[:-1])
    rho = g.dm / w
    fields = (rho, rho * g.u, rho * g.ehat)
    out = []
    inflow = g.inflow.copy()
    for k, q in enumerate(fields):
        if recon.kind == "linear" and len(q) > 2:
            s = np.zeros_like(q)
            s[1:-1] = recon.limit((q[1:-1] - q[:-2]) / (c[1:-1] - c[:-2]),
                                  (q[2:] - q[1:-1]) / (c[2:] - c[1:-1]))
        else:
            s = np.zeros_like(q)
        F = _cumulative(x, q, s)
        FX = F(X)
        out.append(np.diff(FX) / np.diff(X))
        # content gained beyond (or lost inside) the moved ends
        inflow[k] += (FX[-1] - F(x[-1])) - (FX[0] - F(x[0]))
    return EulerianGrid(X.copy(), out[0], out[1], out[2], target.boundary, target.gamma,
                        target.t, inflow)


# ---------------------------------------------------------------------------
# direct Eulerian Godunov

def eulerian_timestep(g: EulerianGrid, cfl: float = CFL) -> float:
    rho, u, p = g.primitives()
    c = np.sqrt(g.gamma * p / rho)
    return float(cfl * np.min(g.dx / (np.abs(u) + c)))


def euler_step_direct(g: EulerianGrid, recon: Reconstruction, dt: float) -> EulerianGrid:
    rho, u, p = g.primitives()
    gam = g.gamma
    rl, ul, pl, rr, ur, pr = _edge_states(rho, u, p, recon, g.boundary, dt, lagrangian=False,
                                          dx=g.dx, gamma=gam)
    r0, u0, p0 = godunov_state(rl, ul, pl, rr, ur, pr, gam)
    e0 = p0 / ((gam - 1.0) * r0) + 0.5 * u0 * u0
    f_rho = r0 * u0
    f_mom = r0 * u0 * u0 + p0
    f_en = u0 * (r0 * e0 + p0)
    if g.boundary == "reflecting":
        f_rho[[0, -1]] = 0.0
        f_en[[0, -1]] = 0.0
    k = dt / g.dx
    inflow = g.inflow + dt * np.array([f_rho[0] - f_rho[-1], f_mom[0] - f_mom[-1],
                                       f_en[0] - f_en[-1]])
    return EulerianGrid(g.edges, g.rho + k * (f_rho[:-1] - f_rho[1:]),
                        g.mom + k * (f_mom[:-1] - f_mom[1:]),
                        g.etot + k * (f_en[:-1] - f_en[1:]), g.boundary, gam, g.t + dt, inflow)


# ---------------------------------------------------------------------------
# drivers

@dataclass
class GridSnapshot:
    t: float
    grid: EulerianGrid


def remap_cycle(g: EulerianGrid, recon: Reconstruction, dt: float) -> EulerianGrid:
    lag = lagrange_step(g.to_lagrangian(), recon, dt)
    out = remap(lag, g, recon, extend=g.boundary != "reflecting")
    out.t = g.t + dt
    return out


def _march(g, step, timestep, t_end, times, max_steps=1_000_000):
    pending = sorted(t for t in times if t <= t_end + 1e-15)
    if not pending or pending[-1] < t_end:
        pending.append(t_end)
    snaps = []
    steps = 0
    for target in pending:
        while g.t < target - 1e-14 * max(1.0, target):
            dt = min(timestep(g), target - g.t)
            t_next = g.t + dt
            g = step(g, dt)
            g.t = t_next
            steps += 1
            if steps > max_steps:
                raise RuntimeError("step budget exhausted")
        g.t = target
        snaps.append(GridSnapshot(target, g.copy()))
    return snaps


def run_remap_experiment(problem, recon: Reconstruction | None = None, cells: int = 500,
                         t_end: float | None = None, times=(), eos=None, cfl: float = CFL):
    """Alternate Lagrange steps and remaps on a fixed grid; snapshots at ``times``."""
    prob = get_problem(problem) if isinstance(problem, str) else problem
    recon = Reconstruction() if recon is None else recon
    g = grid_from_problem(prob, cells, eos)
    t_end = prob.t_end if t_end is None else t_end
    return _march(g, lambda g, dt: remap_cycle(g, recon, dt),
                  lambda g: min(lagrangian_timestep(g.to_lagrangian(), cfl),
                                eulerian_timestep(g, cfl)), t_end, times)


def run_euler_experiment(problem, recon: Reconstruction | None = None, cells: int = 500,
                         t_end: float | None = None, times=(), eos=None, cfl: float = CFL):
    prob = get_problem(problem) if isinstance(problem, str) else problem
    recon = Reconstruction() if recon is None else recon
    g = grid_from_problem(prob, cells, eos)
    t_end = prob.t_end if t_end is None else t_end
    return _march(g, lambda g, dt: euler_step_direct(g, recon, dt),
                  lambda g: eulerian_timestep(g, cfl), t_end, times)


def grid_rows(g: EulerianGrid):
    rho, u, p = g.primitives()
    return {"j": np.arange(len(rho)), "x_center": g.centers, "rho": rho, "u": u, "p": p,
            "e": p / ((g.gamma - 1.0) * rho)}
