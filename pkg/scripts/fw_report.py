"""Per-node subfunction counts of HWB, MUX or PARITY on the three standard vtrees, as CSV."""

import argparse
import sys

from treedd.bench import VTREE_KINDS, fw_report, hwb, mux, mux_order, parity, rows_to_csv


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("family", choices=["hwb", "mux", "parity"])
    ap.add_argument("-n", type=int, nargs="+", default=[6])
    args = ap.parse_args()
    rows = []
    for n in args.n:
        if args.family == "mux":
            f, order = mux(n), mux_order(n)
        else:
            f = hwb(n) if args.family == "hwb" else parity(n)
            order = list(f.variables)
        vts = {kind: mk(order) for kind, mk in VTREE_KINDS.items()}
        rows += fw_report(f, f"{args.family}{n}", vts)
    sys.stdout.write(rows_to_csv(rows))


if __name__ == "__main__":
    main()
