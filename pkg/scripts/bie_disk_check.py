"""Disk sigma_min scan next to the radial characteristic roots.

    python3 scripts/bie_disk_check.py [--n 256] [--steps 701]
"""
import argparse

from aetrans.bie import BoundaryCurve, sigma_min_scan
from aetrans.params import NondimParams
from aetrans.radial import BracketFailure, ModeIndex, PreconditionFailure, find_eigenvalue


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=256)
    ap.add_argument("--steps", type=int, default=701)
    ap.add_argument("--k-min", type=float, default=7.5)
    ap.add_argument("--k-max", type=float, default=11.0)
    args = ap.parse_args(argv)
    p = NondimParams(delta=0.1, tau=0.5, lam=1 / 3, mu=1 / 3)

    print("radial roots:")
    for m in range(2, 10):
        try:
            print(f"  m={m}: {find_eigenvalue(ModeIndex(2, m), p).k:.6f}")
        except (BracketFailure, PreconditionFailure) as exc:
            print(f"  m={m}: {type(exc).__name__}")

    res = sigma_min_scan(BoundaryCurve.circle(), p, (args.k_min, args.k_max), args.steps, n=args.n)
    print(f"\nrefined sigma_min minima, n={args.n}:")
    for mn in res.minima:
        print(f"  k={mn.k:.6f}  sigma_min/sigma_max={mn.relative:.2e}")


if __name__ == "__main__":
    main()
