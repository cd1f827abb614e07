#!/usr/bin/env python3
"""GLPK adapter: reads an MPS model, solves, writes the solution protocol.

Kept for cross-backend agreement checks on desk-size models; variable bounds
are lowered into inequality rows because the ilp entry point takes none.
"""

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

    from cvxopt import glpk, matrix, spmatrix

    m = mps_io.parse_mps(args.model)
    n = len(m.col_names)

    g_rows = []  # (coeffs dict, rhs) meaning coeffs . x <= rhs
    e_rows = []
    row_coeffs = [dict() for _ in m.row_names]
    for r, c, v in m.entries:
        row_coeffs[r][c] = row_coeffs[r].get(c, 0.0) + v
    for i, sense in enumerate(m.row_sense):
        if sense == "L":
            g_rows.append((row_coeffs[i], m.rhs[i]))
        elif sense == "G":
            g_rows.append(({c: -v for c, v in row_coeffs[i].items()}, -m.rhs[i]))
        else:
            e_rows.append((row_coeffs[i], m.rhs[i]))
    for c in range(n):
        if m.ub[c] != math.inf:
            g_rows.append(({c: 1.0}, m.ub[c]))
        if m.lb[c] != -math.inf:
            g_rows.append(({c: -1.0}, -m.lb[c]))
    if not g_rows:
        g_rows.append(({0: 0.0}, 1.0))

    def to_sp(rows):
        vals, ri, ci = [], [], []
        rhs = []
        for i, (coeffs, b) in enumerate(rows):
            rhs.append(b)
            for c, v in coeffs.items():
                ri.append(i)
                ci.append(c)
                vals.append(v)
        return spmatrix(vals, ri, ci, (len(rows), n)), matrix(rhs)

    G, h = to_sp(g_rows)
    cvec = matrix(m.obj)
    ints = {c for c in range(n) if m.integrality[c]}
    options = {"msg_lev": "GLP_MSG_OFF", "tm_lim": int(args.time_limit * 1000)}
    if args.gap > 0.0:
        options["mip_gap"] = args.gap

    if e_rows:
        A, b = to_sp(e_rows)
        status, x = glpk.ilp(cvec, G, h, A, b, I=ints, B=set(), options=options)
    else:
        status, x = glpk.ilp(cvec, G, h, I=ints, B=set(), options=options)

    if status == "optimal":
        out = "optimal"
    elif "infeasible" in status or status in ("primal infeasible", "LP relaxation is primal infeasible"):
        out = "infeasible"
    elif "unbounded" in status or status == "dual infeasible":
        out = "unbounded"
    elif x is not None:
        out = "feasible"
    else:
        out = "timeout"

    if x is not None:
        xs = [float(v) for v in x]
        objective = sum(m.obj[c] * xs[c] for c in range(n))
        mps_io.write_solution(args.solution, out, objective, 0.0, m.col_names, xs)
    else:
        mps_io.write_solution(args.solution, out, 0.0, 0.0, m.col_names, None)


if __name__ == "__main__":
    main()
