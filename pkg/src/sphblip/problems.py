"""Catalogue of test problems and their initial particle layouts."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .eos import IdealGas, PrimitiveState
from .sph import FrozenSlab, MirrorWall, ParticleSystem, PeriodicAxis, ETA


class UnknownProblem(KeyError):
    pass


@dataclass(frozen=True)
class TestProblem:
    """Piecewise-constant initial data on a 1D interval.

    ``segments`` lists (x_lo, x_hi, state) in order; two-state problems expose
    ``left``/``right`` and the discontinuity ``x0`` for exact solutions.
    """

    __test__ = False  # not a pytest class

    name: str
    segments: tuple
    t_end: float
    domain: tuple
    boundary: str = "outflow"
    sod_layout: bool = False

    def __post_init__(self):
        lo, hi = self.domain
        if not hi > lo:
            raise ValueError("empty domain")
        if self.boundary not in ("outflow", "reflecting"):
            raise ValueError(f"unknown boundary {self.boundary!r}")

    @property
    def left(self) -> PrimitiveState:
        return self.segments[0][2]

    @property
    def right(self) -> PrimitiveState:
        return self.segments[-1][2]

    @property
    def x0(self) -> float:
        return self.segments[0][1]

    @property
    def two_state(self) -> bool:
        return len(self.segments) == 2

    def state_at(self, x):
        """Initial (rho, u, p) arrays at positions ``x``."""
        x = np.asarray(x, dtype=float)
        rho, u, p = (np.empty_like(x) for _ in range(3))
        last = len(self.segments) - 1
        for k, (lo, hi, s) in enumerate(self.segments):
            m = np.ones(x.shape, dtype=bool)
            if k > 0:
                m &= x >= lo
            if k < last:
                m &= x < hi
            rho[m], u[m], p[m] = s.rho, s.u, s.p
        return rho, u, p

    def shifted(self, dx: float) -> "TestProblem":
        segs = tuple((lo + dx, hi + dx, s) for lo, hi, s in self.segments)
        return TestProblem(self.name, segs, self.t_end,
                           (self.domain[0] + dx, self.domain[1] + dx), self.boundary,
                           self.sod_layout)


def _ps(rho, u, p):
    return PrimitiveState(rho, (u,), p)


CATALOGUE = {
    "sod": TestProblem(
        "sod",
        ((-0.5, 0.0, _ps(1.0, 0.0, 1.0)), (0.0, 0.5, _ps(0.125, 0.0, 0.1))),
        t_end=0.15, domain=(-0.5, 0.5), sod_layout=True),
    "blastwave": TestProblem(
        "blastwave",
        ((-0.5, 0.0, _ps(1.0, 0.0, 1000.0)), (0.0, 0.5, _ps(1.0, 0.0, 0.01))),
        t_end=0.01, domain=(-0.5, 0.5)),
    # interacting blast waves on a reflecting unit interval
    "wc-two-blast": TestProblem(
        "wc-two-blast",
        ((0.0, 0.1, _ps(1.0, 0.0, 1000.0)), (0.1, 0.9, _ps(1.0, 0.0, 0.01)),
         (0.9, 1.0, _ps(1.0, 0.0, 100.0))),
        t_end=0.038, domain=(0.0, 1.0), boundary="reflecting"),
    # blast wave extruded in y; the x-profile is the 1D blast wave moved to [0, 1]
    "blastwave-2d": TestProblem(
        "blastwave-2d",
        ((0.0, 0.4, _ps(1.0, 0.0, 1000.0)), (0.4, 1.0, _ps(1.0, 0.0, 0.01))),
        t_end=0.01, domain=(0.0, 1.0)),
}

# catalogue resolutions (particles or cells); 2D counts are totals
DEFAULT_RESOLUTION = {"sod": 450, "blastwave": 1000, "wc-two-blast": 1000,
                      "blastwave-2d": 20000}
CI_RESOLUTION = {"sod": 450, "blastwave": 500, "wc-two-blast": 500, "blastwave-2d": 5000}


def get_problem(name: str) -> TestProblem:
    try:
        return CATALOGUE[name]
    except KeyError:
        raise UnknownProblem(f"unknown problem {name!r}; known: {sorted(CATALOGUE)}") from None


GHOST_LAYERS_H = 6.0


def _slab(xs, spacing, m, prob, eos, direction):
    rho, u, p = prob.state_at(xs)
    n = len(xs)
    h = np.full(n, ETA * spacing)
    return FrozenSlab(xs[:, None], u[:, None].copy(), np.full(n, m), h, rho,
                      eos.internal_energy(rho, p))


def particle_spacing_1d(prob: TestProblem, n: int):
    """(left spacing, right spacing, n_left) for the 1D layouts."""
    lo, hi = prob.domain
    if prob.sod_layout:
        n_left = (8 * n) // 9
        return (prob.x0 - lo) / n_left, (hi - prob.x0) / (n - n_left), n_left
    d = (hi - lo) / n
    return d, d, None


def initial_particles_1d(prob: TestProblem, n: int, eos: IdealGas | None = None) -> ParticleSystem:
    """Cell-centred 1D lattice; Sod uses the 8:1 split with equal masses."""
    eos = IdealGas() if eos is None else eos
    lo, hi = prob.domain
    dl, dr, n_left = particle_spacing_1d(prob, n)
    if prob.sod_layout:
        x = np.concatenate([lo + (np.arange(n_left) + 0.5) * dl,
                            prob.x0 + (np.arange(n - n_left) + 0.5) * dr])
        m = np.full(n, dl * prob.left.rho)
    else:
        x = lo + (np.arange(n) + 0.5) * dl
        rho0, _, _ = prob.state_at(x)
        m = rho0 * dl
    rho, u, p = prob.state_at(x)
    spacing = np.where(x < prob.x0, dl, dr)
    h = ETA * spacing
    e = eos.internal_energy(rho, p)

    if prob.boundary == "reflecting":
        bounds = [MirrorWall(0, lo, -1), MirrorWall(0, hi, +1)]
    else:
        nl = int(math.ceil(GHOST_LAYERS_H * ETA)) + 3
        xl = lo - (np.arange(nl) + 0.5) * dl
        xr = hi + (np.arange(nl) + 0.5) * dr
        bounds = [_slab(xl, dl, m[0], prob, eos, -1), _slab(xr, dr, m[-1], prob, eos, +1)]
    return ParticleSystem(x[:, None], u[:, None].copy(), m, h, rho, e, eos, bounds,
                          meta={"line_mass": float(m.max())})


def hcp_dims(n_total: int, aspect_rows: int = 25):
    """(nx, ny) for an HCP block with nx = aspect_rows * ny / 2 approx."""
    ny = int(round(math.sqrt(2.0 * n_total / aspect_rows)))
    ny += ny % 2  # even row count keeps the lattice periodic in y
    nx = int(round(n_total / ny))
    return nx, ny


def initial_particles_2d(prob: TestProblem, n_total: int, eos: IdealGas | None = None,
                         rows: int | None = None) -> ParticleSystem:
    """HCP block on the problem interval extruded periodically in y."""
    eos = IdealGas() if eos is None else eos
    lo, hi = prob.domain
    nx, ny = hcp_dims(n_total) if rows is None else (n_total // rows, rows)
    d = (hi - lo) / nx
    dy = d * math.sqrt(3.0) / 2.0
    ly = ny * dy

    def block(ix, iy):
        X, Y = np.meshgrid(ix, iy, indexing="xy")
        off = np.where(Y % 2 == 1, 0.5, 0.0)
        xs = lo + (X + 0.25 + off) * d
        ys = (Y + 0.5) * dy
        return np.column_stack([xs.ravel(), ys.ravel()])

    pos = block(np.arange(nx), np.arange(ny))
    rho, u, p = prob.state_at(pos[:, 0])
    m_unit = d * dy  # area per particle
    m = rho * m_unit
    h = ETA * np.sqrt(m / rho)
    e = eos.internal_energy(rho, p)
    v = np.zeros_like(pos)

    nl = int(math.ceil(GHOST_LAYERS_H * ETA * 1.1)) + 3
    pad_rows = nl + 1
    slabs = []
    for ix in (np.arange(-nl, 0), np.arange(nx, nx + nl)):
        g = block(ix, np.arange(-pad_rows, ny + pad_rows))
        # keep the row parity of the periodic lattice
        grho, gu, gp = prob.state_at(g[:, 0])
        gm = grho * m_unit
        slabs.append(FrozenSlab(g, np.zeros_like(g), gm, ETA * np.sqrt(gm / grho), grho,
                                eos.internal_energy(grho, gp)))
    bounds = slabs + [PeriodicAxis(1, 0.0, ly)]
    return ParticleSystem(pos, v, m, h, rho, e, eos, bounds,
                          meta={"rows": ny, "columns": nx, "line_mass": prob.left.rho * d})
