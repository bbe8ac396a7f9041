"""Exact shock-tube solutions, the contact blip metric, and study harnesses."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields
from typing import Callable, Sequence

import numpy as np

from .eos import IdealGas, PrimitiveState
from .problems import TestProblem
from .riemann import RiemannInput, WaveFan, sample_fan_arrays, solve_exact


class WindowEmpty(ValueError):
    pass


@dataclass
class Profile:
    """Sampled 1D fields ordered by position."""

    x: np.ndarray
    rho: np.ndarray
    u: np.ndarray
    p: np.ndarray
    e: np.ndarray | None = None
    t: float = 0.0

    def __post_init__(self):
        order = np.argsort(self.x, kind="stable")
        for f in ("x", "rho", "u", "p", "e"):
            val = getattr(self, f)
            if val is not None:
                setattr(self, f, np.asarray(val, dtype=float)[order])

    @classmethod
    def from_particles(cls, sys, rows: int | None = None) -> "Profile":
        """Particle fields; 2D systems are averaged over y.

        In 2D the particles are sorted by x and averaged in groups of ``rows``
        (one lattice column each), which follows the compression of a slab
        flow without empty bins.
        """
        if sys.dim == 1:
            return cls(sys.x[:, 0], sys.rho, sys.v[:, 0], sys.p, sys.e, sys.t)
        rows = sys.meta.get("rows") if rows is None else rows
        if not rows:
            raise ValueError("2D profile needs the lattice row count")
        order = np.argsort(sys.x[:, 0], kind="stable")
        ncol = sys.n // rows
        order = order[: ncol * rows].reshape(ncol, rows)

        def avg(f):
            return f[order].mean(axis=1)

        return cls(avg(sys.x[:, 0]), avg(sys.rho), avg(sys.v[:, 0]), avg(sys.p), avg(sys.e),
                   sys.t)

    def shifted(self, dx: float) -> "Profile":
        return Profile(self.x + dx, self.rho, self.u, self.p, self.e, self.t)


def problem_input(prob: TestProblem, eos: IdealGas | None = None) -> RiemannInput:
    if not prob.two_state:
        raise ValueError(f"{prob.name} has no single Riemann fan")
    return RiemannInput(prob.left, prob.right, IdealGas() if eos is None else eos)


def problem_fan(prob: TestProblem, eos: IdealGas | None = None) -> WaveFan:
    return solve_exact(problem_input(prob, eos))


def contact_spacing(prob: TestProblem, line_mass: float, eos: IdealGas | None = None) -> float:
    """Particle spacing on the denser side of the exact contact.

    ``line_mass`` is the particle mass in 1D (mass per lattice column per unit
    transverse length in 2D).  This is the finest spacing near the contact and
    keeps the metric window inside the star region at coarse resolution.
    """
    fan = problem_fan(prob, eos)
    return line_mass / max(fan.rho_star_left, fan.rho_star_right)


def exact_solution(prob: TestProblem, t: float, xs, eos: IdealGas | None = None) -> Profile:
    """Exact self-similar solution sampled at ``xs``."""
    if not t > 0.0:
        raise ValueError("exact solution needs t > 0")
    inp = problem_input(prob, eos)
    fan = solve_exact(inp)
    xs = np.asarray(xs, dtype=float)
    rho, u, p = sample_fan_arrays(fan, inp, (xs - prob.x0) / t)
    return Profile(xs, rho, u, p, inp.eos.internal_energy(rho, p), t)


def exact_states(prob: TestProblem, t: float, xs, eos=None) -> list:
    prof = exact_solution(prob, t, xs, eos)
    return [PrimitiveState(r, (u,), p) for r, u, p in zip(prof.rho, prof.u, prof.p)]


@dataclass
class BlipReport:
    peak: float
    width: float
    location: float
    contact_x: float
    star_noise: float
    detected: bool
    peak_up: float = 0.0      # largest p - p* in the window
    peak_down: float = 0.0    # largest p* - p in the window
    u_dip: float = 0.0        # largest drop of u below the star plateau in the window
    u_noise: float = 0.0
    e_max: float = 0.0        # largest e in the window
    e_star: float = 0.0       # exact e on the hotter (left) side of the contact

    def row(self):
        return asdict(self)


def star_region(fan: WaveFan, prob: TestProblem, t: float):
    """(left edge, contact, right edge) of the exact star region."""
    return (prob.x0 + fan.left_speeds[1] * t, prob.x0 + fan.star.u_star * t,
            prob.x0 + fan.right_speeds[0] * t)


def blip_metric(snap: Profile, prob: TestProblem, t: float, scale: float,
                window: float = 20.0, buffer: float = 10.0, eos=None) -> BlipReport:
    """Pressure error diagnostics around the contact.

    The window [x_c - window*scale, x_c + window*scale] is clipped to the star
    region shrunk by ``buffer*scale`` at both ends.  The noise level is the RMS
    of |p - p*| over the rest of the shrunk star region; with no samples there
    it is NaN and nothing is reported as detected.
    """
    if not scale > 0.0:
        raise ValueError("scale must be positive")
    eos = IdealGas() if eos is None else eos
    fan = problem_fan(prob, eos)
    ps, us = fan.star.p_star, fan.star.u_star
    xl, xc, xr = star_region(fan, prob, t)
    lo = max(xc - window * scale, xl + buffer * scale)
    hi = min(xc + window * scale, xr - buffer * scale)
    x = snap.x
    inwin = (x >= lo) & (x <= hi)
    if not inwin.any():
        raise WindowEmpty(f"no samples in contact window [{lo:.6g}, {hi:.6g}]")
    dp = snap.p - ps
    adp = np.abs(dp)
    idx = np.nonzero(inwin)[0]
    k = idx[np.argmax(adp[idx])]
    peak = float(adp[k])
    width = _half_width(x, adp, k, inwin, peak)

    star = (x >= xl + buffer * scale) & (x <= xr - buffer * scale) & ~inwin
    if star.sum() >= 2:
        noise = float(np.sqrt(np.mean(adp[star] ** 2)))
        # velocity is judged against the numerical plateau, not the exact u*
        u_ref = float(np.median(snap.u[star]))
        u_noise = float(np.sqrt(np.mean((snap.u[star] - u_ref) ** 2)))
    else:
        noise = u_noise = math.nan
        u_ref = us
    detected = bool(np.isfinite(noise) and peak > 3.0 * noise)

    e_star = eos.internal_energy(fan.rho_star_left, ps)
    e_max = float(np.max(snap.e[idx])) if snap.e is not None else math.nan
    return BlipReport(
        peak=peak, width=width, location=float(x[k]), contact_x=xc, star_noise=noise,
        detected=detected, peak_up=float(max(0.0, dp[idx].max())),
        peak_down=float(max(0.0, -dp[idx].min())),
        u_dip=float(max(0.0, u_ref - snap.u[idx].min())), u_noise=u_noise,
        e_max=e_max, e_star=float(e_star))


def _half_width(x, a, k, inwin, peak):
    """Extent of the contiguous run around ``k`` where ``a > peak/2``."""
    if peak <= 0.0:
        return 0.0
    half = 0.5 * peak
    n = len(x)
    i = k
    while i > 0 and inwin[i - 1] and a[i - 1] > half:
        i -= 1
    j = k
    while j < n - 1 and inwin[j + 1] and a[j + 1] > half:
        j += 1
    # interpolate the half-level crossings where a neighbour exists
    left = x[i]
    if i > 0 and inwin[i - 1]:
        left = x[i - 1] + (half - a[i - 1]) / (a[i] - a[i - 1]) * (x[i] - x[i - 1])
    right = x[j]
    if j < n - 1 and inwin[j + 1]:
        right = x[j] + (a[j] - half) / (a[j] - a[j + 1]) * (x[j + 1] - x[j])
    return float(right - left)


def pressure_errors(snap: Profile, prob: TestProblem, t: float, margin: float = 0.0, eos=None):
    """(L1, Linf) of p against the exact solution over the interior.

    L1 is the trapezoid integral of |p - p_exact| divided by the interval length;
    ``margin`` trims each domain end.
    """
    return field_errors(snap, prob, t, "p", margin, eos)


def field_errors(snap: Profile, prob: TestProblem, t: float, name: str, margin=0.0, eos=None):
    lo, hi = prob.domain
    m = (snap.x >= lo + margin) & (snap.x <= hi - margin)
    x = snap.x[m]
    ex = exact_solution(prob, t, x, eos)
    err = np.abs(getattr(snap, name)[m] - getattr(ex, name))
    l1 = float(np.trapezoid(err, x) / (x[-1] - x[0]))
    return l1, float(err.max())


@dataclass
class StudyRow:
    resolution_or_time: float
    peak: float
    width: float
    location: float
    star_noise: float
    detected: bool
    L1_p: float
    Linf_p: float


STUDY_HEADER = [f.name for f in fields(StudyRow)]


def _study_row(key, snap, prob, t, scale, margin, eos):
    rep = blip_metric(snap, prob, t, scale, eos=eos)
    l1, linf = pressure_errors(snap, prob, t, margin, eos)
    return StudyRow(key, rep.peak, rep.width, rep.location, rep.star_noise, rep.detected,
                    l1, linf), rep


def refinement_study(runner: Callable, prob: TestProblem, resolutions: Sequence[int],
                     t: float | None = None, eos=None, workers: int = 1):
    """Run ``runner(resolution) -> (Profile, scale, margin)`` at each resolution.

    Returns (rows, reports) in input order.
    """
    if len(resolutions) < 3:
        raise ValueError("a refinement study needs at least three resolutions")
    t = prob.t_end if t is None else t
    results = _fan_out(runner, list(resolutions), workers)
    rows, reps = [], []
    for n, (snap, scale, margin) in zip(resolutions, results):
        row, rep = _study_row(n, snap, prob, t, scale, margin, eos)
        rows.append(row)
        reps.append(rep)
    return rows, reps


def time_history_study(runner: Callable, prob: TestProblem, times: Sequence[float], eos=None):
    """``runner(times) -> list of (Profile, scale, margin)``, one per time."""
    times = list(times)
    if any(b <= a for a, b in zip(times, times[1:])):
        raise ValueError("times must be increasing")
    rows, reps = [], []
    for t, (snap, scale, margin) in zip(times, runner(times)):
        row, rep = _study_row(t, snap, prob, t, scale, margin, eos)
        rows.append(row)
        reps.append(rep)
    return rows, reps


def _fan_out(fn, items, workers):
    if workers <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    from concurrent.futures import ProcessPoolExecutor

    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))


def transition_width(x, f, lo, hi, x_lo, x_hi):
    """Width over which ``f`` moves from 10% to 90% between plateau values.

    ``lo``/``hi`` are the plateau values on either side; the search is limited
    to [x_lo, x_hi].
    """
    m = (x >= x_lo) & (x <= x_hi)
    xs, fs = x[m], f[m]
    s = (fs - lo) / (hi - lo)
    inside = np.nonzero((s > 0.1) & (s < 0.9))[0]
    if len(inside) == 0:
        return 0.0
    return float(xs[inside[-1]] - xs[inside[0]])
