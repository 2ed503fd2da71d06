"""Radial eigenvalues for m = 20..400 in 2D and 3D, the power-law fit of
k/nu - 1 and the consecutive decay of the rela1 residual.

    python3 scripts/radial_sweep.py [--out radial.csv]
"""
import argparse
import csv
import sys

from aetrans.params import NondimParams
from aetrans.radial import asymptotic_fit, decay_ratio, sweep


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--tau", type=float, default=0.5)
    ap.add_argument("--mu", type=float, default=1 / 3)
    ap.add_argument("--delta", type=float, default=0.1)
    ap.add_argument("--out", help="CSV destination (default stdout)")
    args = ap.parse_args(argv)
    p = NondimParams(delta=args.delta, tau=args.tau, lam=1 - 2 * args.mu, mu=args.mu)
    q10 = decay_ratio(p.tau) ** 10

    rows = []
    for dim in (2, 3):
        recs, failed = sweep(dim, range(20, 401, 10), p)
        for m, msg in failed.items():
            print(f"{dim}D m={m}: {msg}", file=sys.stderr)
        a, c = asymptotic_fit(recs)
        print(f"{dim}D: k/nu - 1 ~ {c:.4f} nu^{a:.4f}", file=sys.stderr)
        prev = None
        for r in recs:
            ratio = "" if prev is None else repr(float(r.rela1_residual / prev / q10))
            rows.append({"dim": dim, "m": r.mode.m, "nu": r.mode.nu, "k": repr(float(r.k)),
                         "k_over_nu_minus_1": repr(float(r.k / r.mode.nu - 1)), "rela1_residual": repr(float(r.rela1_residual)),
                         "step_ratio_over_q10": ratio})
            prev = r.rela1_residual

    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    fh.write(f"# tau={p.tau} mu={p.mu} delta={p.delta}\n")
    w = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    if args.out:
        fh.close()


if __name__ == "__main__":
    main()
