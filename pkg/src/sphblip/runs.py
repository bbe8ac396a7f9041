"""Execute a :class:`RunConfig` with whichever solver it names."""
from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import fv
from .analysis import Profile, WindowEmpty, blip_metric, contact_spacing
from .config import RunConfig, default_params
from .gsph import run_experiment
from .problems import get_problem
from .sph import snapshot_rows


@dataclass
class SnapshotData:
    t: float
    columns: dict      # CSV columns in file order
    profile: Profile   # 1D (y-averaged in 2D) profile for analysis


@dataclass
class RunOutcome:
    config: RunConfig
    snapshots: list
    scale: float
    metadata: dict = field(default_factory=dict)

    @property
    def final(self) -> SnapshotData:
        return self.snapshots[-1]

    def blip(self, window=20.0, buffer=10.0):
        """BlipReport for the final snapshot, or None without a single contact."""
        prob = get_problem(self.config.problem)
        if not prob.two_state:
            return None
        snap = self.final
        try:
            return blip_metric(snap.profile, prob, snap.t, self.scale, window, buffer)
        except WindowEmpty:
            return None


def resolved_params(cfg: RunConfig):
    if cfg.params is not None:
        return cfg.params
    if cfg.method == "gsph-hybrid":
        raise ValueError("gsph-hybrid needs explicit parameters")
    return default_params(cfg.method, cfg.end_time)


def execute(cfg: RunConfig) -> RunOutcome:
    """Run ``cfg`` to its end time, snapshotting at ``cfg.cadence``."""
    params = resolved_params(cfg)
    prob = get_problem(cfg.problem)
    t0 = time.perf_counter()
    if cfg.method.startswith("fv"):
        runner = fv.run_remap_experiment if cfg.method == "fv-remap" else fv.run_euler_experiment
        snaps = runner(prob, params, cells=cfg.cells, t_end=cfg.end_time, times=cfg.cadence)
        out = []
        for s in snaps:
            cols = fv.grid_rows(s.grid)
            out.append(SnapshotData(s.t, cols, Profile(cols["x_center"], cols["rho"], cols["u"],
                                                       cols["p"], cols["e"], s.t)))
        g0 = fv.grid_from_problem(prob, cfg.cells)
        scale = float(g0.dx.max())
        meta = {"method": cfg.method, "problem": cfg.problem, "resolution": cfg.cells,
                "t_end": cfg.end_time, "params": asdict(params), "cfl": fv.CFL,
                "conservation": _fv_drift(g0, snaps[-1].grid)}
    else:
        res = run_experiment(cfg.problem, params, cfg.resolution, times=cfg.cadence,
                             t_end=cfg.end_time)
        out = [SnapshotData(s.t, snapshot_rows(s.system), Profile.from_particles(s.system))
               for s in res.snapshots]
        meta = dict(res.metadata)
        meta["method"] = cfg.method
        scale = contact_spacing(prob, res.snapshots[0].system.meta["line_mass"]) \
            if prob.two_state else float("nan")
    meta["blip_window"] = 20.0
    meta["blip_buffer"] = 10.0
    meta["wall_seconds"] = time.perf_counter() - t0
    return RunOutcome(cfg, out, scale, meta)


def _fv_drift(g0, g1):
    """Relative change of the totals net of what entered through the ends.

    Momentum is measured against the larger of the total |momentum| and the
    momentum that entered, since the net total can be near zero.
    """
    m0, p0, e0 = g0.totals()
    m1, p1, e1 = g1.totals()
    dm, dp, de = (np.array([m1, p1, e1]) - np.array([m0, p0, e0])) - (g1.inflow - g0.inflow)
    p_scale = max(float(np.sum(np.abs(g1.mom) * g1.dx)), abs(float(g1.inflow[1])), 1e-300)
    return {"mass": abs(dm) / m0, "momentum": abs(dp) / p_scale, "energy": abs(de) / e0,
            "inflow": g1.inflow - g0.inflow}
