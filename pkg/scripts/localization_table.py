"""Localization ratios at eps = 0.5 next to their C = 1 envelopes, plus the
elastic ratio at m = 100 across the speed contrast tau.

    python3 scripts/localization_table.py
"""
import math

from aetrans.eigfun import build_eigenpair, localization_ratio
from aetrans.params import NondimParams
from aetrans.radial import ModeIndex, PreconditionFailure, find_eigenvalue


def table(p, eps=0.5):
    print(f"{'dim':>3} {'m':>4} {'field':>9} {'ratio':>11} {'envelope':>11} {'ratio^2/env':>12}")
    for dim in (2, 3):
        for m in range(20, 101, 10):
            pair = build_eigenpair(find_eigenvalue(ModeIndex(dim, m), p))
            for field in ("acoustic", "elastic"):
                r = localization_ratio(pair, eps, field)
                q = r.ratio ** 2 / r.bound if r.bound_is_squared else r.ratio / r.bound
                print(f"{dim:>3} {m:>4} {field:>9} {r.ratio:11.3e} {r.bound:11.3e} {q:12.3e}")


def tau_sweep(m=100, eps=0.5):
    # the bracket precondition needs tau < j_{m,1}/j_{m,2}
    print(f"\nelastic ratio at m={m}, eps={eps} against tau (mu=1/3, delta=0.1)")
    for tau in (0.2, 0.4, 0.6, 0.8, 0.9, 0.95):
        p = NondimParams(delta=0.1, tau=tau, lam=1 / 3, mu=1 / 3)
        try:
            pair = build_eigenpair(find_eigenvalue(ModeIndex(2, m), p))
        except PreconditionFailure as exc:
            print(f"  tau={tau:<5} skipped: {exc}")
            continue
        r = localization_ratio(pair, eps, "elastic")
        a = localization_ratio(pair, eps, "acoustic")
        print(f"  tau={tau:<5} k={pair.k:9.4f} elastic {r.ratio:.3e} (log10 {math.log10(r.ratio):6.1f})"
              f"  acoustic {a.ratio:.3e}")


if __name__ == "__main__":
    table(NondimParams(delta=0.1, tau=0.5, lam=1 / 3, mu=1 / 3))
    tau_sweep()
