"""Entropy conservation and dissipation on the scalar-exponential test problems.

Writes one entropy trace per method and mode and prints the worst drift.
"""

import argparse
from pathlib import Path

from relaxrk.cli import format_csv
from relaxrk.integrator import StepMode, integrate
from relaxrk.problems import get_problem
from relaxrk.tableaus import builtin

METHODS = ("SSPRK(2,2)", "SSPRK(3,3)", "RK(4,4)", "BSRK(8,5)")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results/conservation")
    ap.add_argument("--dt", type=float, default=0.05)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    for pname in ("conserved-exp", "dissipated-exp"):
        entry = get_problem(pname)
        t_end = entry.default_tspan[1]
        for name in METHODS:
            for mode in StepMode:
                tr = integrate(entry.problem, builtin(name), 0.0, entry.default_u0, args.dt, t_end, mode)
                eta0 = tr.entropies[0]
                drift = max(abs(v - eta0) for v in tr.entropies) / abs(eta0)
                rise = max(b - a for a, b in zip(tr.entropies, tr.entropies[1:]))
                path = out / f"{pname}_{name}_{mode.value}.csv".replace("(", "").replace(")", "").replace(",", "-")
                path.write_text(format_csv(["step", "t", "value"],
                                           [(k, t, v) for k, (t, v) in enumerate(zip(tr.times, tr.entropies))]))
                print(f"{pname:15s} {name:11s} {mode.value:10s} rel. drift {drift:9.2e}  max step rise {rise:9.2e}")


if __name__ == "__main__":
    main()
