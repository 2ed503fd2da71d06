"""Kite sigma_min scan over k in (10, 20) and the eps-ratio of the
reconstructed acoustic field at every detected minimum.

    python3 scripts/kite_localization.py [--n 192] [--steps 401] [--eps 0.5]
"""
import argparse
import warnings

from aetrans.bie import (
    BoundaryCurve,
    NearBoundaryWarning,
    PolarGrid,
    assemble_block,
    localization_ratio_general,
    null_vector,
    reconstruct_fields,
    refine_minimum,
    sigma_min_scan,
)
from aetrans.params import NondimParams


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=192)
    ap.add_argument("--steps", type=int, default=401)
    ap.add_argument("--eps", type=float, default=0.5)
    args = ap.parse_args(argv)
    p = NondimParams(delta=0.1, tau=0.5, lam=1 / 3, mu=1 / 3)
    kite = BoundaryCurve.kite()
    nodes = kite.nodes(args.n)
    grid = PolarGrid.build(kite, args.eps)

    scan = sigma_min_scan(kite, p, (10.0, 20.0), args.steps, n=args.n, refine=False)
    print(f"{len(scan.minima)} candidate minima")
    print(f"{'k':>10} {'rel sigma':>10} {'v ratio':>8} {'u ratio':>8}")
    for cand in scan.minima:
        mn = refine_minimum(nodes, p, cand.window)
        _, vec, _ = null_vector(assemble_block(nodes, mn.k, p).matrix)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", NearBoundaryWarning)
            fs = reconstruct_fields(kite, mn.k, p, vec, grid.points)
        rv = localization_ratio_general(fs.v, grid)
        ru = localization_ratio_general(fs.u, grid)
        print(f"{mn.k:10.5f} {mn.relative:10.1e} {rv:8.3f} {ru:8.3f}", flush=True)


if __name__ == "__main__":
    main()
