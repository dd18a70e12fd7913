// Dense two-phase tableau simplex for small, well-scaled maximization
// problems: max c'x subject to Ex = e, Gx <= g, x >= 0. Deterministic by
// construction: Dantzig pricing with lowest-index ties, switching to Bland's
// rule after a fixed iteration budget to rule out cycling.
#pragma once

#include <vector>

namespace ia {

struct SimplexProblem {
  int num_vars = 0;
  std::vector<double> objective;             // length num_vars, maximize
  std::vector<std::vector<double>> eq_rows;  // each length num_vars
  std::vector<double> eq_rhs;
  std::vector<std::vector<double>> le_rows;
  std::vector<double> le_rhs;

  // Optional starting basis, one column per row (eq rows first, then le rows;
  // slack column of le row i is num_vars + i). Invalid or infeasible hints
  // fall back to phase one silently.
  std::vector<int> basis_hint;
};

enum class SimplexStatus { optimal, infeasible, unbounded, iteration_limit };

struct SimplexResult {
  SimplexStatus status = SimplexStatus::iteration_limit;
  std::vector<double> x;  // structural variables only
  double value = 0.0;
  long iterations = 0;
};

SimplexResult simplex_maximize(const SimplexProblem& p);

}  // namespace ia
