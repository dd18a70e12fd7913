#include "ia/lp.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include "ia/errors.hpp"
#include "ia/simplex.hpp"

namespace ia {

MechanismLP build_lp(double epsilon, const UtilityVector& r_receiver,
                     const UtilityVector& r_sender, std::span<const DeviationMatrix> mats) {
  if (std::isnan(epsilon) || epsilon < 0.0)
    throw NegativeEpsilon("epsilon must be >= 0 or +infinity");
  if (!r_receiver.values.same_shape(r_sender.values))
    throw DimensionMismatch("receiver and sender utility vectors differ in shape");

  const int K = r_receiver.values.rows(), A = r_receiver.values.cols();
  MechanismLP lp;
  lp.num_classes = K;
  lp.num_actions = A;
  lp.epsilon = epsilon;
  lp.objective.assign(static_cast<std::size_t>(K) * A, 0.0);
  for (int c = 0; c < K; ++c)
    for (int a = 0; a < A; ++a) lp.objective[static_cast<std::size_t>(c) * A + a] =
        r_receiver.values(c, a);
  for (double v : lp.objective)
    if (!std::isfinite(v)) throw NumericalFailure("objective contains a non-finite entry");

  if (std::isinf(epsilon)) return lp;  // sentinel: no incentive rows

  lp.ic_rows.reserve(mats.size());
  for (const DeviationMatrix& m : mats) {
    if (m.block.rows() != K || m.block.cols() != K)
      throw DimensionMismatch("deviation matrix does not match the utility vectors");
    std::vector<double> row(static_cast<std::size_t>(K) * A, 0.0);
    // coefficient on xi(c,a): (A^f r_s)[c,a] - r_s[c,a]
    for (int c = 0; c < K; ++c) {
      for (int a = 0; a < A; ++a) {
        double v = -r_sender.values(c, a);
        for (int cp = 0; cp < K; ++cp) {
          const double w = m.block(c, cp);
          if (w != 0.0) v += w * r_sender.values(cp, a);
        }
        row[static_cast<std::size_t>(c) * A + a] = v;
        if (!std::isfinite(v)) throw NumericalFailure("incentive row contains a non-finite entry");
      }
    }
    lp.ic_rows.push_back(std::move(row));
  }
  return lp;
}

LpSolution solve_lp(const MechanismLP& lp) {
  const int K = lp.num_classes, A = lp.num_actions;
  const int n = K * A;
  SimplexProblem p;
  p.num_vars = n;
  p.objective = lp.objective;
  p.eq_rows.assign(K, std::vector<double>(n, 0.0));
  p.eq_rhs.assign(K, 1.0);
  for (int c = 0; c < K; ++c)
    for (int a = 0; a < A; ++a) p.eq_rows[c][static_cast<std::size_t>(c) * A + a] = 1.0;
  p.le_rows = lp.ic_rows;
  p.le_rhs.assign(lp.ic_rows.size(), lp.epsilon);

  // constant action 0 plus incentive slacks is always a feasible basis
  p.basis_hint.resize(K + lp.ic_rows.size());
  for (int c = 0; c < K; ++c) p.basis_hint[c] = c * A;
  for (std::size_t f = 0; f < lp.ic_rows.size(); ++f) p.basis_hint[K + f] = n + static_cast<int>(f);

  SimplexResult r = simplex_maximize(p);
  if (r.status == SimplexStatus::infeasible)
    throw InternalError("mechanism polytope reported infeasible for epsilon >= 0");
  if (r.status != SimplexStatus::optimal)
    throw NumericalFailure("simplex did not converge on the mechanism polytope");

  LpSolution sol;
  sol.iterations = r.iterations;
  sol.mechanism.probs = Table(K, A, 0.0);
  for (int c = 0; c < K; ++c)
    for (int a = 0; a < A; ++a)
      sol.mechanism.probs(c, a) = r.x[static_cast<std::size_t>(c) * A + a];
  sol.value = r.value;

  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& row : lp.ic_rows) {
    double lhs = 0.0;
    for (int j = 0; j < n; ++j) lhs += row[j] * r.x[j];
    worst = std::max(worst, lhs - lp.epsilon);
  }
  sol.max_ic_residual = lp.ic_rows.empty() ? 0.0 : worst;
  if (sol.max_ic_residual > 1e-8)
    throw NumericalFailure("solution violates its own incentive rows beyond tolerance");
  return sol;
}

void write_lp_text(const MechanismLP& lp, std::ostream& os) {
  const int A = lp.num_actions;
  auto var = [&](int j) {
    return "x_c" + std::to_string(j / A) + "_a" + std::to_string(j % A);
  };
  os << "Maximize\n obj:";
  for (std::size_t j = 0; j < lp.objective.size(); ++j) {
    os << (lp.objective[j] < 0 ? " - " : " + ") << std::abs(lp.objective[j]) << " "
       << var(static_cast<int>(j));
  }
  os << "\nSubject To\n";
  for (int c = 0; c < lp.num_classes; ++c) {
    os << " row" << c << ":";
    for (int a = 0; a < A; ++a) os << (a ? " + " : " ") << var(c * A + a);
    os << " = 1\n";
  }
  for (std::size_t f = 0; f < lp.ic_rows.size(); ++f) {
    os << " ic" << f << ":";
    for (std::size_t j = 0; j < lp.ic_rows[f].size(); ++j) {
      const double v = lp.ic_rows[f][j];
      if (v == 0.0) continue;
      os << (v < 0 ? " - " : " + ") << std::abs(v) << " " << var(static_cast<int>(j));
    }
    os << " <= " << lp.epsilon << "\n";
  }
  os << "Bounds\nEnd\n";
}

}  // namespace ia
