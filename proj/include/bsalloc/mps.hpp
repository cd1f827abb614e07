// Free-format MPS emission and ingestion. The writer orders rows and columns
// by name so repeated runs produce byte-identical files; the reader exists for
// round-trip checking and for loading small hand-written models in tests.
#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "bsalloc/linexpr.hpp"

namespace bsalloc {

namespace detail {

inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline bool name_ok(const std::string& n) {
  if (n.empty() || n.size() > 255) return false;
  for (char c : n)
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '$') return false;
  return true;
}

}  // namespace detail

// Writes the model as free MPS (minimization, objective row OBJ). Throws on
// unwritable paths or names that cannot survive the format.
inline void write_exchange_file(const MilpModel& model, const std::string& path) {
  const auto& cat = model.vars();

  std::vector<size_t> col_order(cat.size());
  for (size_t i = 0; i < col_order.size(); ++i) col_order[i] = i;
  std::sort(col_order.begin(), col_order.end(), [&](size_t a, size_t b) {
    return cat.info(static_cast<VarId>(a)).name < cat.info(static_cast<VarId>(b)).name;
  });

  const auto& rows = model.constraints();
  std::vector<size_t> row_order(rows.size());
  for (size_t i = 0; i < row_order.size(); ++i) row_order[i] = i;
  std::sort(row_order.begin(), row_order.end(),
            [&](size_t a, size_t b) { return rows[a].name < rows[b].name; });
  std::vector<size_t> row_rank(rows.size());
  for (size_t r = 0; r < row_order.size(); ++r) row_rank[row_order[r]] = r;

  for (const auto& v : cat.all())
    if (!detail::name_ok(v.name))
      throw std::invalid_argument("variable name not exchange-safe: " + v.name);
  for (const auto& c : rows)
    if (!detail::name_ok(c.name) || c.name == "OBJ")
      throw std::invalid_argument("row name not exchange-safe: " + c.name);

  // Column-major triplets: (sorted col rank, sorted row rank, coeff).
  struct Trip {
    std::uint32_t col, row;
    double v;
  };
  std::vector<size_t> col_rank(cat.size());
  for (size_t r = 0; r < col_order.size(); ++r) col_rank[col_order[r]] = r;

  std::vector<Trip> trips;
  size_t nnz = 0;
  for (const auto& c : rows) nnz += c.expr.terms().size();
  trips.reserve(nnz);
  for (size_t ri = 0; ri < rows.size(); ++ri)
    for (const auto& [v, coef] : rows[ri].expr.terms())
      trips.push_back(Trip{static_cast<std::uint32_t>(col_rank[static_cast<size_t>(v)]),
                           static_cast<std::uint32_t>(row_rank[ri]), coef});
  std::sort(trips.begin(), trips.end(), [](const Trip& a, const Trip& b) {
    return a.col != b.col ? a.col < b.col : a.row < b.row;
  });

  std::vector<double> obj_coeff(cat.size(), 0.0);
  for (const auto& [v, coef] : model.objective().terms())
    obj_coeff[static_cast<size_t>(v)] += coef;

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for write: " + path);

  out << "NAME bsalloc\n";
  out << "ROWS\n";
  out << " N OBJ\n";
  for (size_t r : row_order) {
    char s = rows[r].sense == Sense::Le ? 'L' : rows[r].sense == Sense::Ge ? 'G' : 'E';
    out << ' ' << s << ' ' << rows[r].name << '\n';
  }

  out << "COLUMNS\n";
  size_t ti = 0;
  bool in_int = false;
  for (size_t cr = 0; cr < col_order.size(); ++cr) {
    const VarInfo& vi = cat.info(static_cast<VarId>(col_order[cr]));
    bool integral = vi.kind == VarKind::Binary;
    if (integral && !in_int) {
      out << " M" << cr << " 'MARKER' 'INTORG'\n";
      in_int = true;
    } else if (!integral && in_int) {
      out << " M" << cr << " 'MARKER' 'INTEND'\n";
      in_int = false;
    }
    bool wrote = false;
    if (obj_coeff[col_order[cr]] != 0.0) {
      out << ' ' << vi.name << " OBJ " << detail::fmt_double(obj_coeff[col_order[cr]])
          << '\n';
      wrote = true;
    }
    while (ti < trips.size() && trips[ti].col == cr) {
      out << ' ' << vi.name << ' ' << rows[row_order[trips[ti].row]].name << ' '
          << detail::fmt_double(trips[ti].v) << '\n';
      wrote = true;
      ++ti;
    }
    if (!wrote) out << ' ' << vi.name << " OBJ 0\n";
  }
  if (in_int) out << " MEND 'MARKER' 'INTEND'\n";

  out << "RHS\n";
  for (size_t r : row_order)
    if (rows[r].rhs != 0.0)
      out << " RHS " << rows[r].name << ' ' << detail::fmt_double(rows[r].rhs) << '\n';

  out << "BOUNDS\n";
  const double kInf = std::numeric_limits<double>::infinity();
  for (size_t c : col_order) {
    const VarInfo& vi = cat.info(static_cast<VarId>(c));
    if (vi.kind == VarKind::Binary && vi.lb == 0.0 && vi.ub == 1.0) {
      out << " BV BND " << vi.name << '\n';
      continue;
    }
    if (vi.lb == vi.ub) {
      out << " FX BND " << vi.name << ' ' << detail::fmt_double(vi.lb) << '\n';
      continue;
    }
    if (vi.lb == -kInf && vi.ub == kInf) {
      out << " FR BND " << vi.name << '\n';
      continue;
    }
    if (vi.lb == -kInf)
      out << " MI BND " << vi.name << '\n';
    else if (vi.lb != 0.0)
      out << " LO BND " << vi.name << ' ' << detail::fmt_double(vi.lb) << '\n';
    if (vi.ub != kInf)
      out << " UP BND " << vi.name << ' ' << detail::fmt_double(vi.ub) << '\n';
  }
  out << "ENDATA\n";
  if (!out.good()) throw std::runtime_error("write failed: " + path);
}

// Parsed image of an exchange file, keyed by names. Used to verify that
// write->parse is the identity on coefficients, senses, bounds and kinds.
struct ParsedMps {
  struct Row {
    Sense sense = Sense::Le;
    double rhs = 0.0;
    std::map<std::string, double> coeffs;
  };
  struct Col {
    bool integral = false;
    double lb = 0.0;
    double ub = std::numeric_limits<double>::infinity();
    bool ub_set = false;
    double obj = 0.0;
  };
  std::map<std::string, Row> rows;
  std::map<std::string, Col> cols;
};

inline ParsedMps parse_exchange_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for read: " + path);
  ParsedMps m;
  std::string line, section;
  bool in_int = false;
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    std::vector<std::string> tok;
    for (std::string t; ss >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    if (tok[0] == "NAME" || tok[0] == "ENDATA") continue;
    if (tok.size() == 1 &&
        (tok[0] == "ROWS" || tok[0] == "COLUMNS" || tok[0] == "RHS" ||
         tok[0] == "RANGES" || tok[0] == "BOUNDS")) {
      section = tok[0];
      continue;
    }
    if (section == "ROWS") {
      if (tok.size() != 2) throw std::runtime_error("bad ROWS line: " + line);
      if (tok[0] == "N") continue;  // objective row
      Sense s = tok[0] == "L" ? Sense::Le : tok[0] == "G" ? Sense::Ge : Sense::Eq;
      m.rows[tok[1]].sense = s;
    } else if (section == "COLUMNS") {
      if (tok.size() >= 3 && tok[1] == "'MARKER'") {
        in_int = tok[2] == "'INTORG'";
        continue;
      }
      for (size_t i = 1; i + 1 < tok.size(); i += 2) {
        auto& col = m.cols[tok[0]];
        col.integral = col.integral || in_int;
        double v = std::stod(tok[i + 1]);
        if (tok[i] == "OBJ")
          col.obj += v;
        else
          m.rows.at(tok[i]).coeffs[tok[0]] += v;
      }
    } else if (section == "RHS") {
      for (size_t i = 1; i + 1 < tok.size(); i += 2)
        m.rows.at(tok[i]).rhs = std::stod(tok[i + 1]);
    } else if (section == "BOUNDS") {
      const std::string& kind = tok[0];
      const std::string& col = tok[2];
      auto& c = m.cols[col];
      const double kInf = std::numeric_limits<double>::infinity();
      if (kind == "BV") {
        c.integral = true;
        c.lb = 0.0;
        c.ub = 1.0;
        c.ub_set = true;
      } else if (kind == "FR") {
        c.lb = -kInf;
      } else if (kind == "MI") {
        c.lb = -kInf;
      } else if (kind == "FX") {
        c.lb = c.ub = std::stod(tok[3]);
        c.ub_set = true;
      } else if (kind == "LO") {
        c.lb = std::stod(tok[3]);
      } else if (kind == "UP") {
        c.ub = std::stod(tok[3]);
        c.ub_set = true;
      } else {
        throw std::runtime_error("unsupported bound kind: " + kind);
      }
    }
  }
  return m;
}

// Coefficient-identical comparison between a model and a parsed file.
// Returns an empty string on success, else a description of the first
// discrepancy found.
inline std::string diff_against_parsed(const MilpModel& model, const ParsedMps& p) {
  const auto& cat = model.vars();
  if (p.cols.size() != cat.size()) return "column count mismatch";
  for (const auto& v : cat.all()) {
    auto it = p.cols.find(v.name);
    if (it == p.cols.end()) return "missing column " + v.name;
    const auto& c = it->second;
    if (c.integral != (v.kind == VarKind::Binary)) return "kind mismatch " + v.name;
    if (c.lb != v.lb) return "lb mismatch " + v.name;
    double ub = c.ub_set ? c.ub : std::numeric_limits<double>::infinity();
    if (ub != v.ub) return "ub mismatch " + v.name;
  }
  if (p.rows.size() != model.constraints().size()) return "row count mismatch";
  std::map<std::string, double> obj;
  for (const auto& [v, coef] : model.objective().terms())
    obj[cat.info(v).name] += coef;
  for (const auto& [name, col] : p.cols) {
    double want = 0.0;
    if (auto it = obj.find(name); it != obj.end()) want = it->second;
    if (col.obj != want) return "objective coeff mismatch " + name;
  }
  for (const auto& c : model.constraints()) {
    auto it = p.rows.find(c.name);
    if (it == p.rows.end()) return "missing row " + c.name;
    if (it->second.sense != c.sense) return "sense mismatch " + c.name;
    if (it->second.rhs != c.rhs) return "rhs mismatch " + c.name;
    if (it->second.coeffs.size() != c.expr.terms().size())
      return "nnz mismatch " + c.name;
    for (const auto& [v, coef] : c.expr.terms()) {
      auto jt = it->second.coeffs.find(cat.info(v).name);
      if (jt == it->second.coeffs.end() || jt->second != coef)
        return "coeff mismatch " + c.name + " / " + cat.info(v).name;
    }
  }
  return {};
}

}  // namespace bsalloc
