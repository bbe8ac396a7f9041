"""Riemann solvers for the 1D Euler equations of an ideal gas.

Two layers live here.  The array kernels (``star_*``) take left/right
primitive arrays and return ``(p_star, u_star)`` arrays; the particle and grid
solvers call these once per step for every pair or edge.  The object API
(``solve_exact``, ``sample_fan``, ``solve_hlle_lagrangian``, ...) wraps them
for single :class:`RiemannInput` problems.

The Lagrangian eigensystem, the wave-by-wave diffusive flux and its
material-wave part act on the mass-coordinate conserved vector
``(tau, u, ehat)`` with flux ``(-u, p, p u)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .eos import IdealGas, PrimitiveState, to_lagrangian


class VacuumGenerated(ValueError):
    """The data violate the pressure positivity condition."""


class NoConvergence(RuntimeError):
    pass


@dataclass(frozen=True)
class RiemannInput:
    left: PrimitiveState
    right: PrimitiveState
    eos: IdealGas = IdealGas()

    def arrays(self):
        l, r = self.left, self.right
        return (np.array([l.rho]), np.array([l.u]), np.array([l.p]),
                np.array([r.rho]), np.array([r.u]), np.array([r.p]))


@dataclass(frozen=True)
class StarState:
    p_star: float
    u_star: float

    def __post_init__(self):
        if not self.p_star > 0.0:
            raise VacuumGenerated(f"star pressure {self.p_star} is not positive")


@dataclass(frozen=True)
class WaveFan:
    """Exact solution structure.

    ``left_speeds`` is (head, tail) of the left wave and ``right_speeds`` is
    (tail, head) of the right wave; for a shock head == tail.
    """

    star: StarState
    left_wave: Literal["shock", "rarefaction"]
    right_wave: Literal["shock", "rarefaction"]
    left_speeds: tuple
    right_speeds: tuple
    rho_star_left: float
    rho_star_right: float

    @property
    def contact_speed(self) -> float:
        return self.star.u_star

    def shock_mach(self, side: str, inp: RiemannInput) -> float:
        """Shock speed relative to the pre-shock gas over its sound speed."""
        s = inp.left if side == "left" else inp.right
        c = math.sqrt(inp.eos.gamma * s.p / s.rho)
        speed = self.left_speeds[0] if side == "left" else self.right_speeds[1]
        return abs(speed - s.u) / c


# ---------------------------------------------------------------------------
# exact solver (array kernel)

def _pressure_branch(p, rho, pk, ck, gamma):
    """Toro's f_K(p) and its derivative, shock branch for p > p_K."""
    A = 2.0 / ((gamma + 1.0) * rho)
    B = (gamma - 1.0) / (gamma + 1.0) * pk
    shock = p > pk
    ps = np.where(shock, p, pk + 1.0)  # keep the unused branch finite
    q = np.sqrt(A / (ps + B))
    f_s = (ps - pk) * q
    df_s = q * (1.0 - 0.5 * (ps - pk) / (ps + B))
    z = 0.5 * (gamma - 1.0) / gamma
    pr = np.where(shock, pk, p)
    ratio = pr / pk
    f_r = 2.0 * ck / (gamma - 1.0) * (ratio**z - 1.0)
    df_r = ratio ** (-0.5 * (gamma + 1.0) / gamma) / (rho * ck)
    return np.where(shock, f_s, f_r), np.where(shock, df_s, df_r)


def pressure_function(p, rl, ul, pl, rr, ur, pr, gamma):
    cl = np.sqrt(gamma * pl / rl)
    cr = np.sqrt(gamma * pr / rr)
    fl, _ = _pressure_branch(p, rl, pl, cl, gamma)
    fr, _ = _pressure_branch(p, rr, pr, cr, gamma)
    return fl + fr + (ur - ul)


def star_exact(rl, ul, pl, rr, ur, pr, gamma=1.4, max_iter=100):
    """Exact star pressure and velocity for arrays of Riemann problems.

    Newton iteration from the two-rarefaction guess; any entry that fails to
    converge is redone by bisection.
    """
    rl, ul, pl, rr, ur, pr = np.broadcast_arrays(
        *(np.asarray(a, dtype=float) for a in (rl, ul, pl, rr, ur, pr)))
    shape = pl.shape
    rl, ul, pl, rr, ur, pr = (np.ravel(a) for a in (rl, ul, pl, rr, ur, pr))
    cl = np.sqrt(gamma * pl / rl)
    cr = np.sqrt(gamma * pr / rr)
    du = ur - ul
    if np.any(2.0 * (cl + cr) / (gamma - 1.0) <= du):
        raise VacuumGenerated("initial data generate vacuum")

    z = 0.5 * (gamma - 1.0) / gamma
    p = ((cl + cr - 0.5 * (gamma - 1.0) * du)
         / (cl / pl**z + cr / pr**z)) ** (1.0 / z)
    p = np.maximum(p, 1e-14 * np.minimum(pl, pr))
    equal = (pl == pr) & (du == 0.0)
    p = np.where(equal, pl, p)

    converged = equal.copy()
    act = np.nonzero(~converged)[0]
    for _ in range(max_iter):
        if len(act) == 0:
            break
        pa = p[act]
        fl, dfl = _pressure_branch(pa, rl[act], pl[act], cl[act], gamma)
        fr, dfr = _pressure_branch(pa, rr[act], pr[act], cr[act], gamma)
        p_new = pa - (fl + fr + du[act]) / (dfl + dfr)
        p_new = np.where(p_new <= 0.0, 0.1 * pa, p_new)
        done = np.abs(p_new - pa) < 1e-15 * 0.5 * (p_new + pa)
        p[act] = p_new
        converged[act[done]] = True
        act = act[~done]
    if len(act):
        # Newton often stalls at a 1-ulp cycle; accept tiny residuals
        fl, _ = _pressure_branch(p[act], rl[act], pl[act], cl[act], gamma)
        fr, _ = _pressure_branch(p[act], rr[act], pr[act], cr[act], gamma)
        res = np.abs(fl + fr + du[act])
        scale = cl[act] + cr[act] + np.abs(du[act])
        converged[act[res < 1e-13 * scale]] = True

    if not converged.all():
        bad = ~converged
        p[bad] = _bisect(rl[bad], ul[bad], pl[bad], rr[bad], ur[bad], pr[bad], gamma)

    fl, _ = _pressure_branch(p, rl, pl, cl, gamma)
    fr, _ = _pressure_branch(p, rr, pr, cr, gamma)
    u = 0.5 * (ul + ur) + 0.5 * (fr - fl)
    u = np.where(equal, ul, u)
    return p.reshape(shape)[()], u.reshape(shape)[()]


def _bisect(rl, ul, pl, rr, ur, pr, gamma, max_iter=400):
    lo = np.full_like(pl, 1e-300)
    hi = np.maximum(pl, pr)
    f = lambda q: pressure_function(q, rl, ul, pl, rr, ur, pr, gamma)
    for _ in range(200):
        grow = f(hi) < 0.0
        if not grow.any():
            break
        hi = np.where(grow, 2.0 * hi, hi)
    else:
        raise NoConvergence("could not bracket the star pressure")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        lo = np.where(fm < 0.0, mid, lo)
        hi = np.where(fm < 0.0, hi, mid)
        if np.all(hi - lo <= 4e-16 * hi):
            return 0.5 * (lo + hi)
    raise NoConvergence("bisection did not converge")


def solve_exact(inp: RiemannInput) -> WaveFan:
    g = inp.eos.gamma
    l, r = inp.left, inp.right
    ps, us = star_exact(*inp.arrays(), gamma=g)
    ps, us = float(ps[0]), float(us[0])
    cl = math.sqrt(g * l.p / l.rho)
    cr = math.sqrt(g * r.p / r.rho)
    gm = (g - 1.0) / (g + 1.0)

    if ps > l.p:
        rho_l = l.rho * (ps / l.p + gm) / (gm * ps / l.p + 1.0)
        s = l.u - cl * math.sqrt((g + 1.0) / (2 * g) * ps / l.p + (g - 1.0) / (2 * g))
        left_wave, left_speeds = "shock", (s, s)
    else:
        rho_l = l.rho * (ps / l.p) ** (1.0 / g)
        c_star = cl * (ps / l.p) ** ((g - 1.0) / (2 * g))
        left_wave, left_speeds = "rarefaction", (l.u - cl, us - c_star)
    if ps > r.p:
        rho_r = r.rho * (ps / r.p + gm) / (gm * ps / r.p + 1.0)
        s = r.u + cr * math.sqrt((g + 1.0) / (2 * g) * ps / r.p + (g - 1.0) / (2 * g))
        right_wave, right_speeds = "shock", (s, s)
    else:
        rho_r = r.rho * (ps / r.p) ** (1.0 / g)
        c_star = cr * (ps / r.p) ** ((g - 1.0) / (2 * g))
        right_wave, right_speeds = "rarefaction", (us + c_star, r.u + cr)
    return WaveFan(StarState(ps, us), left_wave, right_wave, left_speeds,
                   right_speeds, rho_l, rho_r)


def sample_fan_arrays(fan: WaveFan, inp: RiemannInput, xi):
    """Vectorised sampling of the self-similar solution at ``xi = x/t``.

    Returns (rho, u, p) arrays.  A point exactly on a wave belongs to the
    star side; a point exactly on the contact belongs to the right star state.
    """
    g = inp.eos.gamma
    l, r = inp.left, inp.right
    xi = np.asarray(xi, dtype=float)
    ps, us = fan.star.p_star, fan.star.u_star
    rho = np.empty_like(xi)
    u = np.empty_like(xi)
    p = np.empty_like(xi)

    left = xi < us
    # left side
    head, tail = fan.left_speeds
    outside = left & (xi < head)
    star = left & (xi >= tail)
    fanreg = left & ~outside & ~star
    rho[outside], u[outside], p[outside] = l.rho, l.u, l.p
    rho[star], u[star], p[star] = fan.rho_star_left, us, ps
    if fanreg.any():
        cl = math.sqrt(g * l.p / l.rho)
        fac = 2.0 / (g + 1.0) + (g - 1.0) / ((g + 1.0) * cl) * (l.u - xi[fanreg])
        rho[fanreg] = l.rho * fac ** (2.0 / (g - 1.0))
        u[fanreg] = 2.0 / (g + 1.0) * (cl + 0.5 * (g - 1.0) * l.u + xi[fanreg])
        p[fanreg] = l.p * fac ** (2.0 * g / (g - 1.0))

    right = ~left
    tail, head = fan.right_speeds
    outside = right & (xi > head)
    star = right & (xi <= tail)
    fanreg = right & ~outside & ~star
    rho[outside], u[outside], p[outside] = r.rho, r.u, r.p
    rho[star], u[star], p[star] = fan.rho_star_right, us, ps
    if fanreg.any():
        cr = math.sqrt(g * r.p / r.rho)
        fac = 2.0 / (g + 1.0) - (g - 1.0) / ((g + 1.0) * cr) * (r.u - xi[fanreg])
        rho[fanreg] = r.rho * fac ** (2.0 / (g - 1.0))
        u[fanreg] = 2.0 / (g + 1.0) * (-cr + 0.5 * (g - 1.0) * r.u + xi[fanreg])
        p[fanreg] = r.p * fac ** (2.0 * g / (g - 1.0))
    return rho, u, p


def sample_fan(fan: WaveFan, inp: RiemannInput, xi: float) -> PrimitiveState:
    rho, u, p = sample_fan_arrays(fan, inp, np.array([xi]))
    return PrimitiveState(float(rho[0]), (float(u[0]),), float(p[0]))


def godunov_state(rl, ul, pl, rr, ur, pr, gamma):
    """Exact solution sampled at x/t = 0 for arrays of edge problems.

    Used for Eulerian Godunov fluxes; returns (rho, u, p) at the interface.
    """
    ps, us = star_exact(rl, ul, pl, rr, ur, pr, gamma)
    g = gamma
    gm = (g - 1.0) / (g + 1.0)
    cl = np.sqrt(g * pl / rl)
    cr = np.sqrt(g * pr / rr)

    rho = np.empty_like(ps)
    u = np.empty_like(ps)
    p = np.empty_like(ps)

    # left of contact
    shock_l = ps > pl
    rho_sl = np.where(shock_l, rl * (ps / pl + gm) / (gm * ps / pl + 1.0),
                      rl * (ps / pl) ** (1.0 / g))
    s_l = ul - cl * np.sqrt((g + 1.0) / (2 * g) * ps / pl + (g - 1.0) / (2 * g))
    head_l = ul - cl
    tail_l = us - cl * (ps / pl) ** ((g - 1.0) / (2 * g))
    fac_l = np.maximum(2.0 / (g + 1.0) + (g - 1.0) / ((g + 1.0) * cl) * ul, 0.0)
    left_out = np.where(shock_l, s_l > 0.0, head_l > 0.0)
    left_fan = ~shock_l & (head_l <= 0.0) & (tail_l > 0.0)

    shock_r = ps > pr
    rho_sr = np.where(shock_r, rr * (ps / pr + gm) / (gm * ps / pr + 1.0),
                      rr * (ps / pr) ** (1.0 / g))
    s_r = ur + cr * np.sqrt((g + 1.0) / (2 * g) * ps / pr + (g - 1.0) / (2 * g))
    head_r = ur + cr
    tail_r = us + cr * (ps / pr) ** ((g - 1.0) / (2 * g))
    fac_r = np.maximum(2.0 / (g + 1.0) - (g - 1.0) / ((g + 1.0) * cr) * ur, 0.0)
    right_out = np.where(shock_r, s_r < 0.0, head_r < 0.0)
    right_fan = ~shock_r & (head_r >= 0.0) & (tail_r < 0.0)

    on_left = us > 0.0
    # left-of-contact selection
    rho_l = np.where(left_out, rl, np.where(left_fan, rl * fac_l ** (2.0 / (g - 1.0)), rho_sl))
    u_l = np.where(left_out, ul, np.where(left_fan, 2.0 / (g + 1.0) * (cl + 0.5 * (g - 1.0) * ul), us))
    p_l = np.where(left_out, pl, np.where(left_fan, pl * fac_l ** (2.0 * g / (g - 1.0)), ps))
    rho_r = np.where(right_out, rr, np.where(right_fan, rr * fac_r ** (2.0 / (g - 1.0)), rho_sr))
    u_r = np.where(right_out, ur, np.where(right_fan, 2.0 / (g + 1.0) * (-cr + 0.5 * (g - 1.0) * ur), us))
    p_r = np.where(right_out, pr, np.where(right_fan, pr * fac_r ** (2.0 * g / (g - 1.0)), ps))

    rho[:] = np.where(on_left, rho_l, rho_r)
    u[:] = np.where(on_left, u_l, u_r)
    p[:] = np.where(on_left, p_l, p_r)
    return rho, u, p


# ---------------------------------------------------------------------------
# approximate solvers (array kernels), all in the mass-coordinate frame

def lagrangian_signal_speed(rl, pl, rr, pr, gamma):
    """max(C_l, C_r, C~) with C~ from the arithmetic-average state."""
    Cl = np.sqrt(gamma * pl * rl)
    Cr = np.sqrt(gamma * pr * rr)
    Cm = np.sqrt(gamma * 0.5 * (pl + pr) * 0.5 * (rl + rr))
    return np.maximum(np.maximum(Cl, Cr), Cm)


def star_hlle(rl, ul, pl, rr, ur, pr, gamma=1.4, velocity="state"):
    """HLLE star state with symmetric Lagrangian bounds S_l = -S_r.

    ``velocity="state"`` returns the velocity of the HLL average state,
    ``(S_r u_r - S_l u_l - (p_r - p_l)) / (S_r - S_l)``.  That velocity carries
    no jump in tau or ehat, so it adds nothing across a contact.
    ``velocity="energy-flux"`` instead takes ``u* = (p u)*_HLL / p*`` from the
    HLL flux of the energy equation, whose ``S_l S_r (E_r - E_l)`` term is the
    material-wave (conduction) dissipation.
    """
    S = lagrangian_signal_speed(rl, pl, rr, pr, gamma)
    Sl, Sr = -S, S
    den = Sr - Sl
    p = (Sr * pl - Sl * pr + Sl * Sr * (ur - ul)) / den
    if velocity == "state":
        u = (Sr * ur - Sl * ul - (pr - pl)) / den
    elif velocity == "energy-flux":
        El = pl / ((gamma - 1.0) * rl) + 0.5 * ul * ul
        Er = pr / ((gamma - 1.0) * rr) + 0.5 * ur * ur
        pu = (Sr * pl * ul - Sl * pr * ur + Sl * Sr * (Er - El)) / den
        u = pu / p
    else:
        raise ValueError(f"unknown HLLE velocity mode {velocity!r}")
    return p, u


def star_roe(rl, ul, pl, rr, ur, pr, gamma=1.4, averaging="arithmetic"):
    """Linearised (acoustic) star state about a hat state.

    ``averaging="roe"`` uses sqrt(rho)-weighted averages of p, tau and u.
    """
    if averaging == "arithmetic":
        p_hat = 0.5 * (pl + pr)
        rho_hat = 0.5 * (rl + rr)
        u_hat = 0.5 * (ul + ur)
    elif averaging == "roe":
        wl, wr = np.sqrt(rl), np.sqrt(rr)
        p_hat = (wl * pl + wr * pr) / (wl + wr)
        rho_hat = (wl + wr) / (wl / rl + wr / rr)
        u_hat = (wl * ul + wr * ur) / (wl + wr)
    else:
        raise ValueError(f"unknown averaging {averaging!r}")
    C = np.sqrt(gamma * p_hat * rho_hat)
    return p_hat - 0.5 * C * (ur - ul), u_hat - 0.5 * (pr - pl) / C


def star_ducowicz(rl, ul, pl, rr, ur, pr, gamma=1.4, iters=60):
    """Two-shock approximation with impedances W = rho (c + A |du|) on
    compressive sides, A = (gamma + 1)/2, acoustic on expansive sides.

    The momentum balance is piecewise quadratic and strictly decreasing in u*;
    it is solved by Newton iteration safeguarded by a bracket.
    """
    rl, ul, pl, rr, ur, pr = np.broadcast_arrays(
        *(np.asarray(a, dtype=float) for a in (rl, ul, pl, rr, ur, pr)))
    A = 0.5 * (gamma + 1.0)
    Zl = rl * np.sqrt(gamma * pl / rl)
    Zr = rr * np.sqrt(gamma * pr / rr)

    def g(u):
        dl = np.maximum(ul - u, 0.0)
        dr = np.maximum(u - ur, 0.0)
        val = (pl - pr + Zl * (ul - u) + rl * A * dl * dl
               - Zr * (u - ur) - rr * A * dr * dr)
        dval = -Zl - 2.0 * rl * A * dl - Zr - 2.0 * rr * A * dr
        return val, dval

    Z = Zl + Zr
    lo = np.minimum(ul, ur) - np.maximum(pr - pl, 0.0) / Z
    hi = np.maximum(ul, ur) + np.maximum(pl - pr, 0.0) / Z
    u = (Zl * ul + Zr * ur - (pr - pl)) / Z
    for _ in range(iters):
        val, dval = g(u)
        lo = np.where(val > 0.0, u, lo)
        hi = np.where(val < 0.0, u, hi)
        u_new = u - val / dval
        outside = (u_new <= lo) | (u_new >= hi)
        u_new = np.where(outside, 0.5 * (lo + hi), u_new)
        done = np.abs(u_new - u) <= 1e-15 * (np.abs(u) + Z / np.maximum(rl, rr) * 1e-3)
        u = np.where(val == 0.0, u, u_new)
        if np.all(done | (val == 0.0)):
            break
    dl = np.maximum(ul - u, 0.0)
    dr = np.maximum(u - ur, 0.0)
    p = 0.5 * (pl + (Zl + rl * A * dl) * (ul - u) + pr + (Zr + rr * A * dr) * (u - ur))
    same = (rl == rr) & (ul == ur) & (pl == pr)
    return np.where(same, pl, p), np.where(same, ul, u)


REGULAR_SOLVERS = ("exact", "ducowicz", "roe")


def star_regular(kind, rl, ul, pl, rr, ur, pr, gamma=1.4):
    if kind == "exact":
        return star_exact(rl, ul, pl, rr, ur, pr, gamma)
    if kind == "ducowicz":
        return star_ducowicz(rl, ul, pl, rr, ur, pr, gamma)
    if kind == "roe":
        return star_roe(rl, ul, pl, rr, ur, pr, gamma)
    raise ValueError(f"unknown regular solver {kind!r}")


def solve_hlle_lagrangian(inp: RiemannInput, velocity="state") -> StarState:
    p, u = star_hlle(*inp.arrays(), gamma=inp.eos.gamma, velocity=velocity)
    return StarState(float(p[0]), float(u[0]))


def solve_regular(inp: RiemannInput, kind: str = "exact") -> StarState:
    if kind == "exact":
        return solve_exact(inp).star
    p, u = star_regular(kind, *inp.arrays(), gamma=inp.eos.gamma)
    return StarState(float(p[0]), float(u[0]))


# ---------------------------------------------------------------------------
# Lagrangian eigensystem and wave-by-wave dissipation

@dataclass(frozen=True)
class LagrangianEigensystem:
    R: np.ndarray
    Rinv: np.ndarray
    lambdas: np.ndarray


def eigensystem_arrays(rho, u, p, gamma):
    """Right/left eigenvector matrices in wave order (-C, 0, +C).

    The middle left eigenvector is ((g-1)/g, -u (g-1)/(g p), (g-1)/(g p)); the
    minus sign on its velocity entry is what makes R Rinv = I when u != 0.
    """
    C = np.sqrt(gamma * p * rho)
    g = gamma
    R = np.array([[1.0, 1.0, 1.0],
                  [C, 0.0, -C],
                  [u * C - p, p / (g - 1.0), -u * C - p]])
    Rinv = np.array([
        [1.0 / (2 * g), 1.0 / (2 * C) + u * (g - 1.0) / (2 * g * p), (1.0 - g) / (2 * g * p)],
        [(g - 1.0) / g, -u * (g - 1.0) / (g * p), (g - 1.0) / (g * p)],
        [1.0 / (2 * g), -1.0 / (2 * C) + u * (g - 1.0) / (2 * g * p), (1.0 - g) / (2 * g * p)],
    ])
    return R, Rinv, np.array([-C, 0.0, C])


def lagrangian_eigensystem(s: PrimitiveState, eos: IdealGas) -> LagrangianEigensystem:
    R, Rinv, lam = eigensystem_arrays(s.rho, s.u, s.p, eos.gamma)
    return LagrangianEigensystem(R, Rinv, lam)


def lagrangian_jacobian(s: PrimitiveState, eos: IdealGas) -> np.ndarray:
    """dF/dU for U = (tau, u, ehat), F = (-u, p, p u)."""
    g, rho, u, p = eos.gamma, s.rho, s.u, s.p
    dp = np.array([-p * rho, -(g - 1.0) * rho * u, (g - 1.0) * rho])
    return np.array([[0.0, -1.0, 0.0], dp, u * dp + np.array([0.0, p, 0.0])])


def hat_state(inp: RiemannInput, averaging="arithmetic") -> PrimitiveState:
    l, r = inp.left, inp.right
    if averaging == "arithmetic":
        return PrimitiveState(0.5 * (l.rho + r.rho), (0.5 * (l.u + r.u),), 0.5 * (l.p + r.p))
    wl, wr = math.sqrt(l.rho), math.sqrt(r.rho)
    rho = (wl + wr) / (wl / l.rho + wr / r.rho)
    u = (wl * l.u + wr * r.u) / (wl + wr)
    p = (wl * l.p + wr * r.p) / (wl + wr)
    return PrimitiveState(rho, (u,), p)


def _jump(inp: RiemannInput) -> np.ndarray:
    a = to_lagrangian(inp.left, inp.eos)
    b = to_lagrangian(inp.right, inp.eos)
    return np.array([b.tau - a.tau, b.u - a.u, b.ehat - a.ehat])


def wave_contributions(inp: RiemannInput, averaging="arithmetic") -> np.ndarray:
    """Per-family terms -1/2 r_k |lambda_k| (l_k . dU), shape (3 waves, 3)."""
    hat = hat_state(inp, averaging)
    R, Rinv, lam = eigensystem_arrays(hat.rho, hat.u, hat.p, inp.eos.gamma)
    strengths = Rinv @ _jump(inp)
    return np.array([-0.5 * R[:, k] * abs(lam[k]) * strengths[k] for k in range(3)])


def diffusive_flux(inp: RiemannInput, averaging="arithmetic") -> np.ndarray:
    """Dissipative part of a linearised interface flux, as (tau, u, ehat)."""
    return wave_contributions(inp, averaging).sum(axis=0)


def material_wave_dissipation(inp: RiemannInput, lambda2: float,
                              averaging="arithmetic") -> np.ndarray:
    """Material-wave term with an explicitly supplied speed ``lambda2``.

    It is zero in a pure Lagrangian frame (lambda2 = 0) and otherwise acts
    only on tau and ehat, along (1, 0, p/(gamma-1)).
    """
    if lambda2 < 0.0:
        raise ValueError("lambda2 must be non-negative")
    hat = hat_state(inp, averaging)
    R, Rinv, _ = eigensystem_arrays(hat.rho, hat.u, hat.p, inp.eos.gamma)
    strength = Rinv[1] @ _jump(inp)
    out = -0.5 * abs(lambda2) * strength * R[:, 1]
    out[1] = 0.0  # R[1, 1] is exactly zero; drop the signed zero
    return out

