"""Profile g(R) = R^-1 int_{|x|<R} |u|^2 for the Herglotz wave of the uniform density."""
import argparse

import numpy as np

from bernstein_helmholtz import sphere as sp
from bernstein_helmholtz.io import write_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--d", type=int, default=3, choices=(2, 3))
    ap.add_argument("--r-max", type=float, default=200.0)
    ap.add_argument("--num", type=int, default=128)
    ap.add_argument("--degree", type=int, default=32)
    ap.add_argument("--out", default="bstar_profile.csv")
    args = ap.parse_args()
    res = sp.bstar_norm(sp.uniform_density(args.d), args.r_max, sp.make_quadrature(args.d, args.degree), args.num)
    write_csv(args.out, ["R", "g_R", "limit"], [[R, g, res.limit] for R, g in zip(res.R, res.g)])
    print(f"sup g = {res.sup:.6f}; limit = {res.limit:.6f}; g(R_max)/limit = {res.g[-1] / res.limit:.5f}")
    if args.d == 3:
        print(f"sup / pi^3 = {res.sup / np.pi**3:.4f}")


if __name__ == "__main__":
    main()
