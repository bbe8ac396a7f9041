"""Run figure recipes and write their data files.

    python3 scripts/run_figures.py --tier ci --out figures fig1 fig6
    python3 scripts/run_figures.py --all
"""
import argparse
import time

from sphblip.recipes import FIGURES, recipe, run_recipe


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("figures", nargs="*", default=[])
    ap.add_argument("--all", action="store_true")
    ap.add_argument("--tier", choices=("ci", "full"), default="ci")
    ap.add_argument("--out", default="figures")
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()
    ids = list(FIGURES) if args.all else args.figures
    if not ids:
        ap.error("name at least one figure or pass --all")
    for fid in ids:
        t0 = time.perf_counter()
        rec = recipe(fid, args.tier)
        outcomes = run_recipe(rec, args.out, args.workers)
        print(f"{fid}: {len(outcomes)} runs in {time.perf_counter() - t0:.1f} s  "
              f"({rec.expectation})")
        for label, oc in outcomes.items():
            rep = oc.blip()
            if rep is not None:
                print(f"  {label:16s} peak={rep.peak:.4g} detected={rep.detected}")


if __name__ == "__main__":
    main()
