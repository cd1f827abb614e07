#!/usr/bin/env python3
"""HiGHS adapter: reads an MPS model, solves, writes the solution protocol."""

import argparse
import math
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))
import mps_io


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("model")
    ap.add_argument("solution")
    ap.add_argument("--time-limit", type=float, default=600.0)
    ap.add_argument("--gap", type=float, default=0.0)
    args = ap.parse_args()

    import numpy as np
    from scipy import sparse
    from scipy.optimize import Bounds, LinearConstraint, milp

    m = mps_io.parse_mps(args.model)
    n = len(m.col_names)
    c = np.asarray(m.obj)
    integrality = np.asarray(m.integrality)
    bounds = Bounds(np.asarray(m.lb), np.asarray(m.ub))

    constraints = []
    if m.row_names:
        rows = np.fromiter((e[0] for e in m.entries), dtype=np.int64, count=len(m.entries))
        cols = np.fromiter((e[1] for e in m.entries), dtype=np.int64, count=len(m.entries))
        vals = np.fromiter((e[2] for e in m.entries), dtype=np.float64, count=len(m.entries))
        A = sparse.csc_array(
            sparse.coo_array((vals, (rows, cols)), shape=(len(m.row_names), n))
        )
        lo = np.empty(len(m.row_names))
        hi = np.empty(len(m.row_names))
        for i, sense in enumerate(m.row_sense):
            if sense == "L":
                lo[i], hi[i] = -np.inf, m.rhs[i]
            elif sense == "G":
                lo[i], hi[i] = m.rhs[i], np.inf
            else:
                lo[i] = hi[i] = m.rhs[i]
        constraints = LinearConstraint(A, lo, hi)

    options = {"time_limit": args.time_limit, "presolve": True, "disp": False}
    if args.gap > 0.0:
        options["mip_rel_gap"] = args.gap
    res = milp(
        c=c,
        constraints=constraints,
        integrality=integrality,
        bounds=bounds,
        options=options,
    )

    gap = getattr(res, "mip_gap", None)
    if gap is None or (isinstance(gap, float) and math.isnan(gap)):
        gap = 0.0
    if res.status == 0:
        status = "optimal"
    elif res.status == 1:
        status = "timeout" if res.x is None else "feasible"
    elif res.status == 2:
        status = "infeasible"
    elif res.status == 3:
        status = "unbounded"
    else:
        status = "error"
    if status in ("optimal", "feasible") and res.x is None:
        status = "error"

    if res.x is not None:
        objective = float(np.dot(c, res.x))
        mps_io.write_solution(args.solution, status, objective, float(gap),
                              m.col_names, [float(v) for v in res.x])
    else:
        mps_io.write_solution(args.solution, status, 0.0, float(gap), m.col_names, None)


if __name__ == "__main__":
    main()
