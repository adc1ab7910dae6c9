"""Grid refinement of the weighted seminorms of f(|x|^2) phi_hat for an annular test function."""
import argparse

from bernstein_helmholtz import bernstein as bn
from bernstein_helmholtz import testfn as tf
from bernstein_helmholtz.io import write_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--fn", default="fractional:0.5")
    ap.add_argument("--order", type=int, default=2, help="max |alpha| and |beta|")
    ap.add_argument("--resolutions", default="64,128,256,512")
    ap.add_argument("--out", default="seminorm_convergence.csv")
    args = ap.parse_args()
    f = bn.from_id(args.fn)
    phi = tf.ZTestFunction.annulus(2, 0.6, 1.4)
    res = [int(s) for s in args.resolutions.split(",")]
    idx = [a for k in range(args.order + 1) for a in tf.multi_indices(2, k)]
    rows = []
    for alpha in idx:
        for beta in idx:
            vals = [tf.seminorm(f, phi, alpha, beta, n).value for n in res]
            for n, v in zip(res, vals):
                rel = abs(v - vals[-1]) / vals[-1] if vals[-1] > 0 else 0.0
                rows.append([str(alpha), str(beta), n, v, rel])
    write_csv(args.out, ["alpha", "beta", "resolution", "value", "rel_change_vs_finest"], rows)
    for n in res:
        worst = max(r[4] for r in rows if r[2] == n)
        print(f"resolution {n:5d}: max relative change vs finest {worst:.3%}")


if __name__ == "__main__":
    main()
