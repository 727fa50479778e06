"""Intermediate widths of clause-by-clause compilation on grid CNFs of small treewidth.

For each k the CNF has 2-clauses along a k x (n/k) grid, numbered column by
column, so the span-k path decomposition has width k. Reports the maximum
canonical width reached with that decomposition, with min-fill on the primal
graph, and with min-fill on the incidence graph.
"""

import argparse
import random
import sys
from pathlib import Path

from treedd.compile import compile_cnf_trace
from treedd.decomp import min_fill_td, path_decomposition, vtree_from_incidence_td, vtree_from_primal_td
from treedd.formula import incidence_graph, primal_graph

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))
from helpers import grid_cnf  # noqa: E402


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k", type=int, nargs="+", default=[1, 2, 3])
    ap.add_argument("--n", type=int, nargs="+", default=[20, 40, 60])
    ap.add_argument("--seeds", type=int, default=5)
    args = ap.parse_args()
    print("k,n,seed,path-td,min-fill-primal,min-fill-primal-width,min-fill-incidence,incidence-width")
    for k in args.k:
        for n in args.n:
            for seed in range(args.seeds):
                F = grid_cnf(k, n // k, random.Random(seed))
                path = path_decomposition(range(1, F.num_vars + 1), k)
                w_path = max(compile_cnf_trace(F, vtree_from_primal_td(path, F))[1])
                ptd = min_fill_td(primal_graph(F))
                w_p = max(compile_cnf_trace(F, vtree_from_primal_td(ptd, F))[1])
                itd = min_fill_td(incidence_graph(F))
                w_i = max(compile_cnf_trace(F, vtree_from_incidence_td(itd, F))[1])
                print(f"{k},{F.num_vars},{seed},{w_path},{w_p},{ptd.width},{w_i},{itd.width}")


if __name__ == "__main__":
    main()
