"""Free-format MPS ingestion shared by the solver adapters.

Supports the subset emitted by the planner's exchange writer: N/L/G/E rows,
INTORG/INTEND markers, RHS, and LO/UP/FX/FR/MI/BV bounds.
"""

import math


class MpsModel:
    def __init__(self):
        self.col_names = []
        self.col_index = {}
        self.integrality = []
        self.lb = []
        self.ub = []
        self.obj = []
        self.row_names = []
        self.row_index = {}
        self.row_sense = []  # 'L', 'G', 'E'
        self.rhs = []
        self.entries = []  # (row, col, coeff)

    def add_col(self, name, integral):
        idx = self.col_index.get(name)
        if idx is None:
            idx = len(self.col_names)
            self.col_index[name] = idx
            self.col_names.append(name)
            self.integrality.append(1 if integral else 0)
            self.lb.append(0.0)
            self.ub.append(math.inf)
            self.obj.append(0.0)
        return idx


def parse_mps(path):
    m = MpsModel()
    section = None
    in_int = False
    with open(path) as fh:
        for raw in fh:
            tok = raw.split()
            if not tok or tok[0].startswith("*"):
                continue
            if tok[0] in ("NAME", "ENDATA"):
                continue
            if len(tok) == 1 and tok[0] in ("ROWS", "COLUMNS", "RHS", "RANGES", "BOUNDS"):
                section = tok[0]
                continue
            if section == "ROWS":
                sense, name = tok
                if sense == "N":
                    continue
                m.row_index[name] = len(m.row_names)
                m.row_names.append(name)
                m.row_sense.append(sense)
                m.rhs.append(0.0)
            elif section == "COLUMNS":
                if len(tok) >= 3 and tok[1] == "'MARKER'":
                    in_int = tok[2] == "'INTORG'"
                    continue
                col = m.add_col(tok[0], in_int)
                for i in range(1, len(tok) - 1, 2):
                    row, val = tok[i], float(tok[i + 1])
                    if row == "OBJ":
                        m.obj[col] += val
                    else:
                        m.entries.append((m.row_index[row], col, val))
            elif section == "RHS":
                for i in range(1, len(tok) - 1, 2):
                    m.rhs[m.row_index[tok[i]]] = float(tok[i + 1])
            elif section == "BOUNDS":
                kind, col = tok[0], m.col_index[tok[2]]
                if kind == "BV":
                    m.integrality[col] = 1
                    m.lb[col], m.ub[col] = 0.0, 1.0
                elif kind == "FX":
                    m.lb[col] = m.ub[col] = float(tok[3])
                elif kind == "LO":
                    m.lb[col] = float(tok[3])
                elif kind == "UP":
                    m.ub[col] = float(tok[3])
                elif kind == "MI":
                    m.lb[col] = -math.inf
                elif kind == "FR":
                    m.lb[col], m.ub[col] = -math.inf, math.inf
                else:
                    raise ValueError(f"unsupported bound kind {kind}")
    return m


def write_solution(path, status, objective, gap, names, values):
    with open(path, "w") as fh:
        fh.write(f"status {status}\n")
        fh.write(f"objective {objective!r}\n")
        fh.write(f"gap {gap!r}\n")
        if values is not None:
            for name, val in zip(names, values):
                fh.write(f"var {name} {val!r}\n")
