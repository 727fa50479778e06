"""Canonical width of HWB_n for n in a range, on balanced and both linear vtrees.

Linear vtrees go through the reduced OBDD for speed; the balanced one is built
from the truth table directly.
"""

import argparse
import time

from treedd.bench import hwb, table_to_tdd
from treedd.convert import obdd_from_table, obdd_to_tdd
from treedd.minimize import canonize
from treedd.vtree import balanced_vtree


def widths(n: int) -> dict[str, int]:
    f = hwb(n)
    vs = list(range(1, n + 1))
    out = {"balanced": table_to_tdd(f, balanced_vtree(vs)).width}
    # the OBDD for order pi lives on the linear vtree over reversed(pi)
    out["linear"] = canonize(obdd_to_tdd(obdd_from_table(f, vs[::-1]))).width
    out["linear-reversed"] = canonize(obdd_to_tdd(obdd_from_table(f, vs))).width
    return out


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--lo", type=int, default=6)
    ap.add_argument("--hi", type=int, default=14)
    args = ap.parse_args()
    print("n,balanced,linear,linear-reversed,best,seconds")
    for n in range(args.lo, args.hi + 1):
        t0 = time.time()
        w = widths(n)
        print(f"{n},{w['balanced']},{w['linear']},{w['linear-reversed']},{min(w.values())},{time.time() - t0:.2f}")


if __name__ == "__main__":
    main()
