"""Long-time energy behaviour of the nonlinear pendulum at a large step."""

import argparse
from pathlib import Path

from relaxrk.cli import format_csv
from relaxrk.integrator import StepMode, integrate
from relaxrk.problems import nonlinear_pendulum
from relaxrk.tableaus import builtin


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results/pendulum")
    ap.add_argument("--method", default="RK(4,4)")
    ap.add_argument("--dt", type=float, default=0.9)
    ap.add_argument("--t-end", type=float, default=500.0)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    entry = nonlinear_pendulum()
    for mode in StepMode:
        tr = integrate(entry.problem, builtin(args.method), 0.0, entry.default_u0, args.dt, args.t_end, mode)
        rows = [(k, t, v, g) for k, (t, v, g) in enumerate(zip(tr.times, tr.entropies, tr.gammas))]
        (out / f"energy_{mode.value}.csv").write_text(format_csv(["step", "t", "energy", "gamma"], rows))
        drift = max(abs(v - tr.entropies[0]) for v in tr.entropies)
        print(f"{mode.value:10s} steps {tr.step_count:4d}  max energy drift {drift:.3e}")


if __name__ == "__main__":
    main()
