// Linear-model building blocks: variable catalog, expressions, constraints,
// and the assembled MILP container consumed by the exchange-file writer.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace bsalloc {

enum class VarKind { Continuous, Binary };
enum class Sense { Le, Ge, Eq };

using VarId = std::int32_t;

struct VarInfo {
  std::string name;
  std::string family;
  VarKind kind = VarKind::Continuous;
  double lb = 0.0;
  double ub = 0.0;
};

// Sparse linear expression: sum of coeff*var plus a constant offset.
class LinExpr {
 public:
  LinExpr() = default;
  explicit LinExpr(double constant) : constant_(constant) {}

  LinExpr& add(VarId v, double coeff) {
    if (coeff != 0.0) terms_.emplace_back(v, coeff);
    return *this;
  }
  LinExpr& add(const LinExpr& other, double scale = 1.0) {
    for (const auto& [v, c] : other.terms_) terms_.emplace_back(v, c * scale);
    constant_ += other.constant_ * scale;
    return *this;
  }
  LinExpr& add_constant(double c) {
    constant_ += c;
    return *this;
  }

  // Merges duplicate variables and drops zero coefficients.
  void compact() {
    std::sort(terms_.begin(), terms_.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<std::pair<VarId, double>> out;
    out.reserve(terms_.size());
    for (const auto& [v, c] : terms_) {
      if (!out.empty() && out.back().first == v)
        out.back().second += c;
      else
        out.emplace_back(v, c);
    }
    out.erase(std::remove_if(out.begin(), out.end(),
                             [](const auto& t) { return t.second == 0.0; }),
              out.end());
    terms_ = std::move(out);
  }

  const std::vector<std::pair<VarId, double>>& terms() const { return terms_; }
  double constant() const { return constant_; }
  bool empty() const { return terms_.empty(); }

  double evaluate(const std::vector<double>& x) const {
    double acc = constant_;
    for (const auto& [v, c] : terms_) acc += c * x[static_cast<size_t>(v)];
    return acc;
  }

 private:
  std::vector<std::pair<VarId, double>> terms_;
  double constant_ = 0.0;
};

struct LinConstraint {
  std::string name;    // unique; prefixed by its family tag
  std::string family;  // rule family, e.g. "radial.count"
  LinExpr expr;        // constraint reads: expr (sense) rhs
  Sense sense = Sense::Le;
  double rhs = 0.0;
};

// Catalog of named decision variables. Registration is append-only; the
// exchange writer re-orders by name so emitted files are byte-stable.
class VarCatalog {
 public:
  VarId add(const std::string& family, const std::string& suffix, VarKind kind,
            double lb, double ub) {
    std::string name = suffix.empty() ? family : family + "." + suffix;
    if (lb > ub) throw std::invalid_argument("lb > ub for " + name);
    auto [it, inserted] = index_.emplace(name, static_cast<VarId>(vars_.size()));
    if (!inserted) throw std::invalid_argument("duplicate variable: " + name);
    vars_.push_back(VarInfo{std::move(name), family, kind, lb, ub});
    return it->second;
  }

  VarId lookup(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw std::out_of_range("unknown variable: " + name);
    return it->second;
  }
  bool contains(const std::string& name) const { return index_.count(name) > 0; }

  const VarInfo& info(VarId id) const { return vars_.at(static_cast<size_t>(id)); }
  size_t size() const { return vars_.size(); }
  const std::vector<VarInfo>& all() const { return vars_; }

 private:
  std::vector<VarInfo> vars_;
  std::unordered_map<std::string, VarId> index_;
};

struct ModelStats {
  std::map<std::string, size_t> vars_per_family;
  std::map<std::string, size_t> constraints_per_family;
  size_t n_vars = 0;
  size_t n_binary = 0;
  size_t n_constraints = 0;
  size_t n_nonzeros = 0;
};

// Solver-agnostic MILP: catalog + rows + a single minimization objective.
class MilpModel {
 public:
  VarCatalog& vars() { return catalog_; }
  const VarCatalog& vars() const { return catalog_; }

  void add_constraint(std::string family, std::string suffix, LinExpr expr,
                      Sense sense, double rhs) {
    std::string name = suffix.empty() ? family : family + "." + suffix;
    if (!row_names_.emplace(name, 0).second)
      throw std::invalid_argument("duplicate constraint: " + name);
    expr.compact();
    for (const auto& [v, c] : expr.terms())
      if (!std::isfinite(c))
        throw std::invalid_argument("non-finite coefficient in " + name);
    // Constant folded into the right-hand side.
    double adj_rhs = rhs - expr.constant();
    LinExpr e = std::move(expr);
    e.add_constant(-e.constant());
    constraints_.push_back(
        LinConstraint{std::move(name), std::move(family), std::move(e), sense, adj_rhs});
  }

  void add_objective_term(const LinExpr& e, double scale = 1.0) {
    objective_.add(e, scale);
  }
  void finalize_objective() { objective_.compact(); }

  const LinExpr& objective() const { return objective_; }
  const std::vector<LinConstraint>& constraints() const { return constraints_; }

  double big_m = 1.0e4;
  double eps_hz = 0.02;

  ModelStats stats() const {
    ModelStats s;
    s.n_vars = catalog_.size();
    for (const auto& v : catalog_.all()) {
      s.vars_per_family[v.family]++;
      if (v.kind == VarKind::Binary) s.n_binary++;
    }
    s.n_constraints = constraints_.size();
    for (const auto& c : constraints_) {
      s.constraints_per_family[c.family]++;
      s.n_nonzeros += c.expr.terms().size();
    }
    return s;
  }

 private:
  VarCatalog catalog_;
  std::vector<LinConstraint> constraints_;
  std::unordered_map<std::string, char> row_names_;
  LinExpr objective_;
};

}  // namespace bsalloc
