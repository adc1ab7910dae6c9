"""Residual ratio versus omega(lambda) for single lattice modes, every catalogue function."""
import argparse

from bernstein_helmholtz import bernstein as bn
from bernstein_helmholtz import multiplier as mp
from bernstein_helmholtz.io import write_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--lambdas", default="0.25,0.5,2,4,5,9,16")
    ap.add_argument("--out", default="omega_sweep.csv")
    args = ap.parse_args()
    lambdas = [float(s) for s in args.lambdas.split(",")]
    rows = []
    for f in bn.catalogue():
        if f.is_constant:
            continue
        for row in mp.omega_ratio_sweep(f, lambdas):
            err = abs(row.ratio - row.omega_pred) if row.ratio is not None else None
            rows.append([f.name, row.lam, row.res_f, row.res_lap, row.ratio, row.omega_pred, err])
    write_csv(args.out, ["fn", "lambda", "res_f", "res_lap", "ratio", "omega", "abs_err"], rows)
    worst = max(r[-1] for r in rows if r[-1] is not None)
    print(f"{len(rows)} rows -> {args.out}; max |ratio - omega| = {worst:.2e}")


if __name__ == "__main__":
    main()
