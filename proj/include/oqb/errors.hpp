#pragma once

#include <stdexcept>
#include <string>

namespace oqb {

// Invalid run configuration (bad key, out-of-range value, inconsistent times).
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A matrix failed density-operator validation harder than the clip policy allows.
struct state_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numerical failure inside an integrator or solver (PSD violation, no steady state).
struct numerical_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace oqb
