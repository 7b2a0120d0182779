"""Convergence tables for all catalog methods in relaxation and IDT mode."""

import argparse
from pathlib import Path

from relaxrk.cli import ExperimentSpec, convergence_csv, run_convergence, summary_slope
from relaxrk.tableaus import CATALOG_NAMES


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results/convergence")
    ap.add_argument("--problem", default="conserved-exp")
    ap.add_argument("--t-end", type=float, default=2.0)
    ap.add_argument("--ladder", default="0.2,0.1,0.05,0.025,0.0125")
    args = ap.parse_args()
    ladder = tuple(float(v) for v in args.ladder.split(","))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    for name in CATALOG_NAMES:
        for mode in ("baseline", "idt", "relaxation"):
            spec = ExperimentSpec("convergence", name, mode, ladder, args.t_end, args.problem)
            rows = run_convergence(spec)
            slug = name.replace("(", "").replace(")", "").replace(",", "-")
            (out / f"{args.problem}_{slug}_{mode}.csv").write_text(convergence_csv(rows))
            print(f"{name:11s} {mode:10s} slope {summary_slope(rows):6.3f}")


if __name__ == "__main__":
    main()
