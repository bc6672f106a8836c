#include "oqb/meanfield.hpp"

#include <cmath>

namespace oqb {

namespace {

struct segment_profile {
  std::vector<double> e;        // Tr[H rho_j] along the segment
  std::vector<double> current;  // Tr[D[rho_j] H]
  double p_excited_end = 0.0;   // P_e of the final (pre-measurement) state
};

segment_profile make_profile(const liouvillian& l, const qubit_state& start, int steps,
                             double h) {
  const hamiltonian& ham = l.h0();
  segment_profile prof;
  prof.e.reserve(steps + 1);
  prof.current.reserve(steps + 1);
  qubit_state cur = start;
  prof.e.push_back(energy(cur, ham));
  prof.current.push_back(energy_current(cur, ham, l.noise()));
  for (int j = 0; j < steps; ++j) {
    cur = l.propagate(cur, h);
    prof.e.push_back(energy(cur, ham));
    prof.current.push_back(energy_current(cur, ham, l.noise()));
  }
  prof.p_excited_end = outcome_distribution::of_state(cur, ham).p_excited;
  return prof;
}

}  // namespace

expected_curves expected_ensemble_curves(const protocol_config& cfg) {
  cfg.validate();
  liouvillian l(cfg.h0, dephasing_generator::pure_dephasing(cfg.gamma));
  const int ns = cfg.steps_per_t_star();
  const int nt = cfg.steps_per_tau();
  const int grid = cfg.grid_points();

  const qubit_state rho0 = cfg.initial_state();
  const fast_unitary_result fu_first = fast_unitary_init(rho0, cfg.h0);
  const fast_unitary_result fu_reinit = fast_unitary_init(cfg.h0.ground_state(), cfg.h0);

  const segment_profile first = make_profile(l, fu_first.state, ns, cfg.h);
  const segment_profile charge = make_profile(l, fu_reinit.state, ns, cfg.h);
  const segment_profile zeno = make_profile(l, cfg.h0.excited_state(), nt, cfg.h);

  const double e_rho0 = energy(rho0, cfg.h0);
  const double e_ground = cfg.h0.ground_energy();
  const double q_fail = 1.0 - zeno.p_excited_end;
  const double beta = cfg.beta;

  const auto landauer_of = [&](double pe) {
    return shannon_entropy(outcome_distribution::make(pe)) / beta;
  };
  const double land_first = landauer_of(first.p_excited_end);
  const double land_charge = landauer_of(charge.p_excited_end);
  const double land_zeno = landauer_of(zeno.p_excited_end);

  expected_curves out;
  out.times.resize(grid);
  out.work.resize(grid);
  out.loss.resize(grid);
  out.p_excited_first = first.p_excited_end;
  out.zeno_failure_probability = q_fail;

  // probability mass per segment position
  std::vector<double> chg(ns + 1, 0.0), zen(nt + 1, 0.0);
  double first_mass = 1.0;  // the initial attempt is deterministic
  int first_pos = 0;

  double w = 0.0, loss = 0.0;
  out.times[0] = 0.0;
  out.work[0] = 0.0;
  out.loss[0] = 0.0;

  for (int k = 1; k < grid; ++k) {
    double dw = 0.0, dl = 0.0;

    // advance the first-attempt blob
    if (first_mass > 0.0 && first_pos < ns) {
      const int j = first_pos;
      dw += first_mass * (first.e[j + 1] - (j == 0 ? e_rho0 : first.e[j]));
      dl += first_mass * 0.5 * cfg.h * (first.current[j] + first.current[j + 1]);
      ++first_pos;
    }

    // advance re-initialized charging mass (positions walk backwards so each
    // cell moves exactly once per step)
    for (int j = ns - 1; j >= 0; --j) {
      const double m = chg[j];
      if (m == 0.0) continue;
      dw += m * (charge.e[j + 1] - (j == 0 ? e_ground : charge.e[j]));
      dl += m * 0.5 * cfg.h * (charge.current[j] + charge.current[j + 1]);
      chg[j + 1] += m;
      chg[j] = 0.0;
    }

    // advance Zeno mass
    for (int j = nt - 1; j >= 0; --j) {
      const double m = zen[j];
      if (m == 0.0) continue;
      dl += m * 0.5 * cfg.h * (zeno.current[j] + zeno.current[j + 1]);
      zen[j + 1] += m;
      zen[j] = 0.0;
    }

    // measurement branchings at the boundaries; <dE_meas> vanishes exactly
    if (first_mass > 0.0 && first_pos == ns) {
      dw += first_mass * land_first;
      zen[0] += first_mass * first.p_excited_end;
      chg[0] += first_mass * (1.0 - first.p_excited_end);
      first_mass = 0.0;
    }
    if (zen[nt] > 0.0) {
      const double m = zen[nt];
      zen[nt] = 0.0;
      dw += m * land_zeno;
      zen[0] += m * (1.0 - q_fail);
      chg[0] += m * q_fail;
    }
    if (chg[ns] > 0.0) {
      const double m = chg[ns];
      chg[ns] = 0.0;
      dw += m * land_charge;
      zen[0] += m * charge.p_excited_end;
      chg[0] += m * (1.0 - charge.p_excited_end);
    }

    w += dw;
    loss += dl;
    out.times[k] = k * cfg.h;
    out.work[k] = w;
    out.loss[k] = loss;
  }
  return out;
}

}  // namespace oqb
