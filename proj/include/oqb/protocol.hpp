#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "oqb/liouville.hpp"
#include "oqb/qubit.hpp"
#include "oqb/rng.hpp"
#include "oqb/thermo.hpp"

// The three-step stabilization protocol: fast unitary + free evolution to the
// first projective energy measurement, Zeno protection on success,
// re-initialization on failure, repeated until t_fin. Single runs are
// deterministic in (master_seed, realization index); ensembles reduce in
// index order so results are independent of the worker count.

namespace oqb {

struct protocol_config {
  hamiltonian h0;
  double gamma = 2.0 / 3.0;
  std::optional<qubit_state> rho0{};  // defaults to the ground projector of h0
  double t_star = 0.33;
  double tau = 0.0662;
  double t_fin = 10.0;
  double beta = 1.0;
  double h = 1e-3;  // recording step
  int realizations = 1000;
  std::uint64_t master_seed = 42;
  int threads = 0;  // 0 = hardware concurrency

  // Reference defaults: H0 = 3 sigma_x + sigma_z, gamma = 2/3, t* = 0.33,
  // tau = 0.0662, t_fin = 10, beta = 1, h = 1e-3, 1000 realizations, seed 42.
  static protocol_config defaults();

  void validate() const;  // 0 < h <= tau <= t_star <= t_fin, gamma >= 0, beta > 0

  // Measurement times are snapped to the recording grid: t_star and tau are
  // rounded to the nearest positive multiple of h.
  int steps_per_t_star() const;
  int steps_per_tau() const;
  int grid_points() const;  // round(t_fin / h) + 1
  double t_star_snapped() const { return steps_per_t_star() * h; }
  double tau_snapped() const { return steps_per_tau() * h; }

  qubit_state initial_state() const { return rho0 ? *rho0 : h0.ground_state(); }
};

enum class outcome : std::uint8_t { excited, ground };
enum class measurement_phase : std::uint8_t { first, zeno, reinit };

struct measurement_event {
  double time = 0.0;
  outcome result = outcome::excited;
  measurement_phase phase = measurement_phase::first;
  double p_excited = 0.0;
  double energy_before = 0.0;
  double energy_after = 0.0;
  double landauer = 0.0;  // beta^{-1} H(P)
};

struct fast_unitary_result {
  qubit_state state;
  double angle = 0.0;      // rotation angle phi about the y axis
  bool via_formula = false;  // arctan formula vs overlap maximization
  bool off_plane = false;    // input Bloch vector had a y component
};

// V rho V^dag with V = exp(-i phi sigma_y) chosen to maximize the |0>
// population. Pure states in the x-z plane use the closed-form angle
// arctan(rho_00 / Re rho_10) (phi = pi/2 when the denominator vanishes);
// other inputs are optimized numerically and flagged.
fast_unitary_result fast_unitary_init(const qubit_state& rho0, const hamiltonian& h);

struct trajectory_record {
  std::vector<double> times;
  std::vector<qubit_state> states;
  std::vector<measurement_event> events;
  std::vector<double> segment_losses;  // per evolution segment, trapezoid rule
  std::vector<double> segment_durations;
  energy_ledger ledger;
  int attempts = 0;  // initialization attempts (1 + re-initializations)
  int zeno_measurements = 0;
  int zeno_failures = 0;
};

struct ensemble_result {
  std::vector<double> times;
  std::vector<qubit_state> mean_states;
  std::vector<double> fidelity_of_mean;    // F(rho_e, <rho_t>)
  std::vector<double> mean_fidelity;       // < F(rho_e, rho_t) >
  std::vector<double> mean_work;           // < W_stab(t) >
  std::vector<double> mean_loss;           // < Delta L(t) > along controlled runs
  double mean_attempts = 0.0;              // N_bar + 1
  double mean_zeno_measurements = 0.0;     // m_bar
  double zeno_failure_rate = 0.0;          // failures per Zeno measurement
  long long total_zeno_measurements = 0;
  int realizations = 0;

  double nbar() const { return mean_attempts - 1.0; }
};

struct init_segment {
  qubit_state rho_i;
  fast_unitary_result unitary;
  double de_evol = 0.0;  // Tr[H (rho_i - rho_0)]
  double dl_evol = 0.0;  // trapezoid loss integral over the segment
  std::vector<qubit_state> states;
  double duration = 0.0;
};

// Fast unitary (zero duration) followed by free evolution for the snapped
// t_star; states are sampled at step h.
init_segment initialize(const qubit_state& rho0, const protocol_config& cfg,
                        const liouvillian& l);

// Draw u in [0,1); collapse to rho_e iff u < Tr[rho rho_e], else to rho_g.
std::pair<measurement_event, qubit_state> projective_measurement(
    const qubit_state& rho, const hamiltonian& h, double beta, rng_stream& rng,
    measurement_phase phase, double time = 0.0);

// One Zeno period: propagate by cfg.tau (exact, not grid-snapped), then measure.
std::pair<measurement_event, qubit_state> zeno_step(const qubit_state& rho,
                                                    const liouvillian& l,
                                                    const protocol_config& cfg,
                                                    rng_stream& rng, double time = 0.0);

trajectory_record run_single(const protocol_config& cfg, int realization_index);

ensemble_result run_ensemble(const protocol_config& cfg);

// Free evolution from |0><0| with no measurements; W_stab is identically zero
// and the loss curve is the uncontrolled leakage baseline.
trajectory_record uncontrolled_run(const protocol_config& cfg);

// rho_alpha: the (deterministic) pre-measurement state in the Zeno regime.
qubit_state zeno_premeasurement_state(const liouvillian& l, double tau);

}  // namespace oqb
