#pragma once

#include <vector>

#include "oqb/protocol.hpp"

namespace oqb {

// Deterministic expectation of the ensemble ledger: the protocol's phase
// distribution is propagated as probability mass over segment positions, so
// the expected work and loss curves come out without Monte Carlo sampling.
// Serves as an independent route for break-even and rate cross-checks.
struct expected_curves {
  std::vector<double> times;
  std::vector<double> work;
  std::vector<double> loss;
  double p_excited_first = 0.0;  // P_e at the first measurement
  double zeno_failure_probability = 0.0;  // P_g(rho_alpha) at the snapped tau
};

expected_curves expected_ensemble_curves(const protocol_config& cfg);

}  // namespace oqb
