"""Two-blast comparison: blended GSPH against a 4x standard-GSPH reference.

Writes x, rho columns for every run and prints the L1 distances on the
figure window [0.15, 0.3] (catalogue frame [0.65, 0.8]).

    python3 scripts/wc_reference.py --n 500 --out wc
"""
import argparse
from pathlib import Path

import numpy as np

from sphblip.analysis import transition_width
from sphblip.config import RunConfig, default_params
from sphblip.output import write_csv
from sphblip.runs import execute

SHIFT = 0.5  # figure frame = catalogue frame - 0.5


def run(method, n, **kw):
    cfg = RunConfig("wc-two-blast", method, default_params(method, 0.038, **kw), resolution=n)
    return execute(cfg).final.profile


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=500)
    ap.add_argument("--out", default="wc")
    args = ap.parse_args()
    out = Path(args.out)
    profs = {"reference": run("gsph", 4 * args.n),
             "standard": run("gsph", args.n),
             "linear": run("gsph-hybrid", args.n, blend="linear"),
             "exponential": run("gsph-hybrid", args.n, blend="exponential", alpha=10.0)}
    ref = profs["reference"]
    lo, hi = 0.15 + SHIFT, 0.3 + SHIFT
    for name, p in profs.items():
        write_csv(out / f"{name}.csv", {"x": p.x, "x_figure": p.x - SHIFT, "rho": p.rho,
                                        "u": p.u, "p": p.p})
        m = (p.x >= lo) & (p.x <= hi)
        l1 = np.trapezoid(np.abs(p.rho[m] - np.interp(p.x[m], ref.x, ref.rho)), p.x[m])
        w1 = transition_width(p.x, p.rho, 0.2, 2.0, 0.05 + SHIFT, 0.125 + SHIFT)
        w2 = transition_width(p.x, p.rho, 3.3, 6.2, 0.25 + SHIFT, 0.285 + SHIFT)
        print(f"{name:12s} L1={l1 / (hi - lo):.4g} width@0.1={w1:.4g} width@0.3={w2:.4g}")


if __name__ == "__main__":
    main()
