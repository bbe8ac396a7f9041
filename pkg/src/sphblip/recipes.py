"""One recipe per study figure: the runs, the analysis and the emitted files."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .analysis import (STUDY_HEADER, exact_solution, refinement_study, time_history_study,
                       _fan_out)
from .config import InvalidValue, RunConfig, config_text, default_params
from .output import rows_to_columns, write_csv, write_json
from .problems import get_problem
from .runs import RunOutcome, execute

TIERS = ("ci", "full")
ALPHA_U_SWEEP = (0.0, 0.5, 1.0, 2.0, 4.0)
TIMEHIST_TIMES = (0.0025, 0.005, 0.0075, 0.01)
REFINEMENT = (100, 200, 400)


@dataclass
class FigureRecipe:
    fig_id: str
    description: str
    runs: dict                      # label -> RunConfig
    analysis: str = "profiles"      # profiles | convergence | timehist | sweep
    expectation: str = ""
    extra: dict = field(default_factory=dict)


def _res(full: int, tier: str, dim: int = 1) -> int:
    if tier == "full":
        return full
    return 5000 if dim == 2 else max(100, full // 2)


def _cfg(problem, method, resolution, **params) -> RunConfig:
    prob = get_problem(problem)
    return RunConfig(problem, method, default_params(method, prob.t_end, **params),
                     resolution=resolution, dim=2 if problem.endswith("2d") else 1)


def recipe(fig_id: str, tier: str = "ci") -> FigureRecipe:
    if tier not in TIERS:
        raise InvalidValue(f"tier must be one of {TIERS}")
    try:
        build = _BUILDERS[fig_id]
    except KeyError:
        raise InvalidValue(f"unknown figure {fig_id!r}; known: {list(_BUILDERS)}") from None
    return build(tier)


def _fig1(tier):
    return FigureRecipe("fig1", "Sod shock tube, SPH without conduction, against exact",
                        {"mpm": _cfg("sod", "mpm", _res(450, tier), alpha_u=0.0),
                         "remap-linear": _cfg("sod", "fv-remap", 500, reconstruction="linear")},
                        expectation="pressure blip detected at the contact (mpm)")


def _fig2(tier):
    n = _res(1000, tier)
    return FigureRecipe("fig2", "blast wave, SPH without conduction and linear remap",
                        {"mpm": _cfg("blastwave", "mpm", n, alpha_u=0.0),
                         "remap-linear": _cfg("blastwave", "fv-remap", 500,
                                              reconstruction="linear")},
                        expectation="two-sided pressure jump at the contact (mpm)")


def _fig3(tier):
    n = _res(1000, tier)
    return FigureRecipe("fig3", "blast wave, SPH with conduction and linear remap",
                        {"mpm": _cfg("blastwave", "mpm", n, alpha_u=1.0),
                         "remap-linear": _cfg("blastwave", "fv-remap", 500,
                                              reconstruction="linear")},
                        expectation="blip much smaller than in fig2")


def _fig4(tier):
    # the resolutions are the subject of the study, so both tiers use them
    return FigureRecipe("fig4", "blast wave SPH refinement study",
                        {f"mpm-{n}": _cfg("blastwave", "mpm", n, alpha_u=0.0)
                         for n in REFINEMENT},
                        analysis="convergence",
                        expectation="width decreasing, peak constant, L-inf floor")


def _fig5(tier):
    cfg = _cfg("blastwave", "mpm", _res(1000, tier), alpha_u=0.0).with_(cadence=TIMEHIST_TIMES[:-1])
    return FigureRecipe("fig5", "blast wave SPH blip advection", {"mpm": cfg},
                        analysis="timehist", expectation="peak constant, location u* t")


def _fig6(tier):
    return FigureRecipe("fig6", "blast wave, remap with constant and linear reconstruction",
                        {"remap-constant": _cfg("blastwave", "fv-remap", 500),
                         "remap-linear": _cfg("blastwave", "fv-remap", 500,
                                              reconstruction="linear"),
                         "euler": _cfg("blastwave", "fv-euler", 500)},
                        expectation="no blip with constant reconstruction")


def _gsph_pair(problem, n, **hybrid):
    return {"gsph": _cfg(problem, "gsph", n),
            "gsph-hybrid": _cfg(problem, "gsph-hybrid", n, **hybrid)}


def _fig7(tier):
    return FigureRecipe("fig7", "blast wave, standard and hybrid GSPH pressure",
                        _gsph_pair("blastwave", _res(1000, tier), blend="linear"),
                        expectation="hybrid blip well below standard")


def _fig8(tier):
    return FigureRecipe("fig8", "blast wave, hybrid GSPH, all fields",
                        {"gsph-hybrid": _cfg("blastwave", "gsph-hybrid", _res(1000, tier),
                                             blend="linear")},
                        expectation="all fields close to exact")


def _fig9(tier):
    n = _res(1000, tier)
    return FigureRecipe("fig9", "blast wave, MPM conduction sweep",
                        {f"alpha_u={a:g}": _cfg("blastwave", "mpm", n, alpha_u=a)
                         for a in ALPHA_U_SWEEP},
                        analysis="sweep", expectation="peak falls, velocity dip grows")


def _fig10(tier):
    return FigureRecipe("fig10", "Woodward-Colella, standard and linear-blend GSPH",
                        _gsph_pair("wc-two-blast", _res(1000, tier), blend="linear"),
                        expectation="contacts near 0.1 and 0.3 smeared by the hybrid")


def _fig11(tier):
    return FigureRecipe("fig11", "Woodward-Colella, standard and exponential-blend GSPH",
                        _gsph_pair("wc-two-blast", _res(1000, tier), blend="exponential",
                                   alpha=10.0),
                        expectation="hybrid close to standard on [0.15, 0.3]")


def _fig12(tier):
    return FigureRecipe("fig12", "2D blast wave, standard and hybrid GSPH fields",
                        _gsph_pair("blastwave-2d", _res(20000, tier, dim=2),
                                   blend="exponential", alpha=3.0),
                        expectation="hybrid blip well below standard; no e spike")


_BUILDERS: dict[str, Callable] = {f"fig{k}": globals()[f"_fig{k}"] for k in range(1, 13)}
FIGURES = tuple(_BUILDERS)


# -- emission ---------------------------------------------------------------

def snapshot_name(t: float) -> str:
    return f"snapshot_t{t:.6g}.csv"


def write_outcome(outcome: RunOutcome, folder) -> list:
    """Snapshots, metadata, config echo and the final blip report."""
    folder = Path(folder)
    paths = []
    for s in outcome.snapshots:
        p = folder / snapshot_name(s.t)
        write_csv(p, s.columns)
        paths.append(p)
    rep = outcome.blip()
    if rep is not None:
        p = folder / "blip.csv"
        write_csv(p, {k: [v] for k, v in asdict(rep).items()})
        paths.append(p)
    meta = dict(outcome.metadata)
    meta["config"] = config_text(outcome.config)
    p = folder / "metadata.json"
    write_json(p, meta)
    return paths + [p]


def write_exact(problem: str, t: float, path, n: int = 2000):
    prob = get_problem(problem)
    lo, hi = prob.domain
    xs = lo + (np.arange(n) + 0.5) * (hi - lo) / n
    ex = exact_solution(prob, t, xs)
    write_csv(path, {"x": ex.x, "rho": ex.rho, "u": ex.u, "p": ex.p, "e": ex.e})
    return path


def long_format(outcomes: dict) -> dict:
    """Plot-ready long table: run, t, x, field, value."""
    cols = {"run": [], "t": [], "x": [], "field": [], "value": []}
    for label, oc in outcomes.items():
        for s in oc.snapshots:
            prof = s.profile
            for name in ("rho", "u", "p", "e"):
                vals = getattr(prof, name)
                cols["run"] += [label] * len(prof.x)
                cols["t"] += [s.t] * len(prof.x)
                cols["x"] += list(prof.x)
                cols["field"] += [name] * len(prof.x)
                cols["value"] += list(vals)
    return cols


def _execute_labelled(item):
    return item[0], execute(item[1])


def run_recipe(rec: FigureRecipe, out, workers: int = 1) -> dict:
    """Run every configuration of ``rec`` and write its files under ``out/<fig>``.

    Returns the outcomes by run label.
    """
    root = Path(out) / rec.fig_id
    outcomes = dict(_fan_out(_execute_labelled, list(rec.runs.items()), workers))
    outcomes = {k: outcomes[k] for k in rec.runs}  # keep recipe order
    for label, oc in outcomes.items():
        write_outcome(oc, root / label)
    first = next(iter(outcomes.values()))
    prob = get_problem(first.config.problem)
    if prob.two_state:
        for s in first.snapshots:
            write_exact(prob.name, s.t, root / f"exact_t{s.t:.6g}.csv")
    write_csv(root / "long.csv", long_format(outcomes))

    if rec.analysis == "convergence":
        rows, _ = refinement_study(lambda n: _profile_of(outcomes[f"mpm-{n}"]), prob,
                                   REFINEMENT)
        write_csv(root / "study.csv", rows_to_columns(rows, STUDY_HEADER))
    elif rec.analysis == "timehist":
        oc = first
        snaps = {s.t: s for s in oc.snapshots}
        rows, _ = time_history_study(
            lambda ts: [(snaps[t].profile, oc.scale, 0.05) for t in ts], prob, list(snaps))
        write_csv(root / "study.csv", rows_to_columns(rows, STUDY_HEADER))
    elif rec.analysis == "sweep":
        cols = {"alpha_u": [], "peak": [], "width": [], "u_dip": [], "u_noise": [],
                "star_noise": [], "detected": []}
        for oc in outcomes.values():
            rep = oc.blip()
            cols["alpha_u"].append(oc.config.params.alpha_u)
            for k in list(cols)[1:]:
                cols[k].append(getattr(rep, k))
        write_csv(root / "sweep.csv", cols)
    return outcomes


def _profile_of(oc: RunOutcome):
    return oc.final.profile, oc.scale, 0.05
