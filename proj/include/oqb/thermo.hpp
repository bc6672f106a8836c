#pragma once

#include <optional>
#include <span>
#include <vector>

#include "oqb/liouville.hpp"
#include "oqb/qubit.hpp"

// Thermodynamic bookkeeping of the stabilization protocol: work and loss
// ledgers, Landauer erasure costs, the closed-form work/loss estimates, the
// measurement entropy production, and the minimum-power bound report.

namespace oqb {

enum class ledger_kind { evol, meas, landauer, zeno_loss };

struct ledger_entry {
  double time = 0.0;
  ledger_kind kind = ledger_kind::evol;
  double value = 0.0;
};

// Cumulative stabilization work W_stab(t) and the controlled-trajectory
// leakage Delta L(t) on the recording grid, plus the per-event entries.
// Work entries (evol, meas, landauer) sum to work.back(); zeno_loss entries
// are the per-period Zeno leakage integrals and belong to the loss side.
struct energy_ledger {
  std::vector<double> times;
  std::vector<double> work;
  std::vector<double> loss;
  std::vector<ledger_entry> entries;
  double capacity = 0.0;

  double final_work() const { return work.empty() ? 0.0 : work.back(); }
  double final_loss() const { return loss.empty() ? 0.0 : loss.back(); }
  // sum of evol + meas + landauer entries
  double work_entry_total() const;
};

// Tr[H (rho_i - rho_0)], the per-attempt initialization cost.
double delta_e_evol(const qubit_state& rho0, const qubit_state& rho_i, const hamiltonian& h);

// Tr[H (rho_post - rho_pre)] with rho_post the projector of the outcome.
double measurement_energy(const qubit_state& rho_pre, bool excited, const hamiltonian& h);

// beta^{-1} H(P), natural log. Throws config_error for beta <= 0.
double landauer_cost(const outcome_distribution& p, double beta);

// Composite trapezoid of Tr[D[rho_t] H] over a segment sampled at step h.
// Throws config_error for fewer than 2 samples.
double loss_integral(std::span<const qubit_state> segment, double h, const hamiltonian& ham,
                     const dephasing_generator& g);

// 1 + sum_{k=1}^{nbar} pg^k, evaluated continuously in nbar via the partial
// geometric sum pg (1 - pg^nbar) / (1 - pg).
double repetition_factor(double p_g, double nbar);

// Average total work at t_fin: (1 + sum pg^k) dE_evol + mbar beta^{-1} H(P(rho_alpha)).
double total_work_estimate(double de_evol, double p_g, double nbar, double mbar, double beta,
                           const qubit_state& rho_alpha, const hamiltonian& h);

// Average total leakage at t_fin: (1 + sum pg^k) dL_evol + mbar * per_period_loss.
double total_loss_estimate(double dl_evol, double p_g, double nbar, double mbar,
                           double per_period_loss);

struct relative_costs_result {
  double varsigma = 0.0;  // <W(t)> / E_max
  double xi = 0.0;        // |<W(t)> - <dL(t)>_uncontrolled| / E_max
};

relative_costs_result relative_costs(double work_at_t, double baseline_loss_at_t,
                                     double capacity);

struct rate_fit {
  double rate = 0.0;      // least-squares slope of varsigma over the final third
  double residual = 0.0;  // rms residual of the fit
};

// Throws config_error when the record covers fewer than 10 Zeno periods.
rate_fit stabilization_rate(std::span<const double> times, std::span<const double> varsigma,
                            double tau);

// Eq.-(3)-style average power [Tr[H(rho_i - rho_0)] + mbar beta^{-1} H(P(rho_alpha))]/tau.
double avg_power_estimate(const qubit_state& rho0, const qubit_state& rho_i,
                          const hamiltonian& h, double mbar, double beta,
                          const qubit_state& rho_alpha, double tau);

// Measurement entropy production rate -Pdot_e log(P_e / (1 - P_e)) with
// P_e clamped to [1e-12, 1 - 1e-12] and Pdot_e = Tr[L[rho] rho_e].
double sigma_nu(const qubit_state& rho, const liouvillian& l, const hamiltonian& h);

// Entropic cost of a Zeno stage of duration t_zeno probed every tau:
// mbar * [H(P(rho_alpha(tau))) - H(P(rho_e))] with mbar = t_zeno / tau.
// The integral of sigma_nu over one period is evaluated in closed form since
// the integrand is an exact time derivative of H(P).
double sigma_zeno(double tau, double t_zeno, const liouvillian& l, const hamiltonian& h);

// mbar * P_g(rho_alpha(tau)) with mbar = t_zeno / tau; the expected number of
// failure collapses over the stage; dimensionless, so the E_max
// normalization advertised for it cancels (see README).
double unstored_energy_fraction(double tau, double t_zeno, const liouvillian& l,
                                const hamiltonian& h);

struct power_bound_report {
  std::vector<double> times;
  std::vector<double> e_dot;        // total energy rate, jump contributions included
  std::vector<double> s_dot_d;      // entropy rate of the uncontrolled generator
  std::vector<double> e_dot_d;      // environmental energy current
  std::vector<double> sigma_d;      // Spohn entropy production rate
  std::vector<double> rel_entropy;  // S(rho_t || rho_ss)
  effective_temperature_result t_eff;
  std::optional<double> reference_temperature;
  // W_dot - (E_dot - T S_dot_D) per step when a finite temperature is
  // available (effective or user-supplied); empty otherwise.
  std::vector<double> bound_slack;
  double min_sigma_d = 0.0;
};

// Rates along a recorded trajectory. Measurement jumps enter e_dot (and the
// slack) through curve differences over the step containing them; nothing is
// differentiated across a jump.
power_bound_report make_power_bound_report(std::span<const double> times,
                                           std::span<const qubit_state> states,
                                           std::span<const double> work_curve,
                                           const liouvillian& l, const steady_state_result& ss,
                                           std::optional<double> reference_temperature = {});

struct break_even_result {
  bool crossed = false;
  double time = 0.0;  // meaningful only when crossed
};

// First time with work(t) >= capacity, linearly interpolated on the grid.
break_even_result break_even_time(std::span<const double> times,
                                  std::span<const double> work, double capacity);

}  // namespace oqb
