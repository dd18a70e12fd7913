// The receiver's optimization: maximize expected receiver utility over
// row-stochastic class-action tables subject to one incentive row per
// deviation function. Epsilon = +infinity is the sentinel that drops the
// incentive rows entirely.
#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "ia/mechanisms.hpp"

namespace ia {

struct MechanismLP {
  int num_classes = 0;
  int num_actions = 0;
  double epsilon = 0.0;                      // +inf means unconstrained
  std::vector<double> objective;             // flattened, index c * |A| + a
  std::vector<std::vector<double>> ic_rows;  // row f: coefficients of xi'(A^f r_s - r_s)
};

// Throws NegativeEpsilon for epsilon < 0 or NaN; throws NumericalFailure if
// any input entry is not finite.
MechanismLP build_lp(double epsilon, const UtilityVector& r_receiver,
                     const UtilityVector& r_sender, std::span<const DeviationMatrix> mats);

struct LpSolution {
  SymmetricMechanism mechanism;
  double value = 0.0;
  long iterations = 0;
  // max over incentive rows of (row'xi - epsilon); how far the returned point
  // is from satisfying its own constraints (<= 0 when clean)
  double max_ic_residual = 0.0;
};

// Always feasible for epsilon >= 0 (constant mechanisms have zero incentive
// gap), so an infeasible report is an InternalError, never a user-facing
// outcome. NumericalFailure covers iteration limits.
LpSolution solve_lp(const MechanismLP& lp);

// Debug dump in LP interchange text format
void write_lp_text(const MechanismLP& lp, std::ostream& os);

}  // namespace ia
