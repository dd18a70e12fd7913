// Error types thrown across the library. Each carries a formatted message;
// a few keep the offending index around for callers that want it.
#pragma once

#include <stdexcept>
#include <string>

namespace ia {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};

// instance validation
struct NonStochasticPrior : Error {
  using Error::Error;
};
struct NonStochasticSignaling : Error {
  explicit NonStochasticSignaling(const std::string& msg, int state_index = -1)
      : Error(msg), state(state_index) {}
  int state;
};
struct UtilityOutOfRange : Error {
  using Error::Error;
};
struct ZeroPriorState : Error {
  explicit ZeroPriorState(const std::string& msg, int state_index = -1)
      : Error(msg), state(state_index) {}
  int state;
};

// combinatorics
struct OverflowError : Error {
  explicit OverflowError(const std::string& msg, int bits = 0)
      : Error(msg), required_bits(bits) {}
  int required_bits;
};
struct InvalidSignalIndex : Error {
  using Error::Error;
};
struct TooLarge : Error {
  using Error::Error;
};
struct EmptyDeviationSet : Error {
  using Error::Error;
};

// linear programs
struct NegativeEpsilon : Error {
  using Error::Error;
};
struct NumericalFailure : Error {
  using Error::Error;
};
// An infeasible mechanism polytope cannot happen for epsilon >= 0; if the
// solver reports it anyway that is a bug in this library, not user error.
struct InternalError : Error {
  using Error::Error;
};

// estimators and online loops
struct InvalidDelta : Error {
  using Error::Error;
};
struct InvalidIndex : Error {
  using Error::Error;
};
struct InconsistentAction : Error {
  using Error::Error;
};
struct InvalidExploration : Error {
  using Error::Error;
};

// experiment layer
struct UnknownFixture : Error {
  using Error::Error;
};
struct EpsOutOfRange : Error {
  using Error::Error;
};
struct InsufficientData : Error {
  using Error::Error;
};
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace ia
