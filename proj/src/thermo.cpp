#include "oqb/thermo.hpp"

#include <algorithm>
#include <cmath>

namespace oqb {

double energy_ledger::work_entry_total() const {
  double sum = 0.0;
  for (const auto& e : entries)
    if (e.kind != ledger_kind::zeno_loss) sum += e.value;
  return sum;
}

double delta_e_evol(const qubit_state& rho0, const qubit_state& rho_i, const hamiltonian& h) {
  return energy(rho_i, h) - energy(rho0, h);
}

double measurement_energy(const qubit_state& rho_pre, bool excited, const hamiltonian& h) {
  const double post = excited ? h.excited_energy() : h.ground_energy();
  return post - energy(rho_pre, h);
}

double landauer_cost(const outcome_distribution& p, double beta) {
  if (!(beta > 0.0)) throw config_error("Landauer cost requires beta > 0");
  return shannon_entropy(p) / beta;
}

double loss_integral(std::span<const qubit_state> segment, double h, const hamiltonian& ham,
                     const dephasing_generator& g) {
  if (segment.size() < 2) throw config_error("loss integral needs at least 2 samples");
  double sum = 0.0;
  double f_prev = energy_current(segment[0], ham, g);
  for (std::size_t k = 1; k < segment.size(); ++k) {
    const double f = energy_current(segment[k], ham, g);
    sum += 0.5 * h * (f_prev + f);
    f_prev = f;
  }
  return sum;
}

double repetition_factor(double p_g, double nbar) {
  if (p_g <= 0.0 || nbar <= 0.0) return 1.0;
  if (p_g >= 1.0) throw config_error("repetition factor requires P_g < 1");
  return 1.0 + p_g * (1.0 - std::pow(p_g, nbar)) / (1.0 - p_g);
}

double total_work_estimate(double de_evol, double p_g, double nbar, double mbar, double beta,
                           const qubit_state& rho_alpha, const hamiltonian& h) {
  const auto p_alpha = outcome_distribution::of_state(rho_alpha, h);
  return repetition_factor(p_g, nbar) * de_evol + mbar * landauer_cost(p_alpha, beta);
}

double total_loss_estimate(double dl_evol, double p_g, double nbar, double mbar,
                           double per_period_loss) {
  return repetition_factor(p_g, nbar) * dl_evol + mbar * per_period_loss;
}

relative_costs_result relative_costs(double work_at_t, double baseline_loss_at_t,
                                     double capacity) {
  return {work_at_t / capacity, std::abs(work_at_t - baseline_loss_at_t) / capacity};
}

rate_fit stabilization_rate(std::span<const double> times, std::span<const double> varsigma,
                            double tau) {
  if (times.size() != varsigma.size() || times.size() < 3)
    throw config_error("rate fit needs matching time/varsigma grids");
  const double span = times.back() - times.front();
  if (span < 10.0 * tau) throw config_error("record too short for a rate fit (< 10 Zeno periods)");
  const std::size_t start = times.size() - times.size() / 3;
  double st = 0, sy = 0, stt = 0, sty = 0;
  const std::size_t n = times.size() - start;
  for (std::size_t k = start; k < times.size(); ++k) {
    st += times[k];
    sy += varsigma[k];
    stt += times[k] * times[k];
    sty += times[k] * varsigma[k];
  }
  const double denom = n * stt - st * st;
  const double slope = (n * sty - st * sy) / denom;
  const double intercept = (sy - slope * st) / n;
  double rss = 0.0;
  for (std::size_t k = start; k < times.size(); ++k) {
    const double r = varsigma[k] - (intercept + slope * times[k]);
    rss += r * r;
  }
  return {slope, std::sqrt(rss / n)};
}

double avg_power_estimate(const qubit_state& rho0, const qubit_state& rho_i,
                          const hamiltonian& h, double mbar, double beta,
                          const qubit_state& rho_alpha, double tau) {
  if (!(tau > 0.0)) throw config_error("power estimate requires tau > 0");
  const auto p_alpha = outcome_distribution::of_state(rho_alpha, h);
  return (delta_e_evol(rho0, rho_i, h) + mbar * landauer_cost(p_alpha, beta)) / tau;
}

double sigma_nu(const qubit_state& rho, const liouvillian& l, const hamiltonian& h) {
  const double pe_raw = outcome_distribution::of_state(rho, h).p_excited;
  const double pe = std::clamp(pe_raw, k_log_floor, 1.0 - k_log_floor);
  const double pdot =
      (l.apply_generator(rho.matrix()) * h.excited_state().matrix()).trace().real();
  return -pdot * std::log(pe / (1.0 - pe));
}

double sigma_zeno(double tau, double t_zeno, const liouvillian& l, const hamiltonian& h) {
  if (!(tau > 0.0)) throw config_error("sigma_zeno requires tau > 0");
  if (tau > t_zeno) throw config_error("sigma_zeno requires tau <= t_zeno");
  const qubit_state rho_alpha = l.propagate(h.excited_state(), tau);
  // integrand is d/dt H(P), and H(P(rho_e)) = 0 exactly
  const double h_alpha = shannon_entropy(outcome_distribution::of_state(rho_alpha, h));
  return (t_zeno / tau) * h_alpha;
}

double unstored_energy_fraction(double tau, double t_zeno, const liouvillian& l,
                                const hamiltonian& h) {
  if (!(tau > 0.0)) throw config_error("requires tau > 0");
  const qubit_state rho_alpha = l.propagate(h.excited_state(), tau);
  return (t_zeno / tau) * outcome_distribution::of_state(rho_alpha, h).p_ground;
}

power_bound_report make_power_bound_report(std::span<const double> times,
                                           std::span<const qubit_state> states,
                                           std::span<const double> work_curve,
                                           const liouvillian& l, const steady_state_result& ss,
                                           std::optional<double> reference_temperature) {
  const std::size_t n = times.size();
  if (states.size() != n || work_curve.size() != n || n < 2)
    throw config_error("power bound report needs aligned grids with >= 2 points");

  power_bound_report rep;
  rep.times.assign(times.begin(), times.end());
  rep.s_dot_d.resize(n);
  rep.e_dot_d.resize(n);
  rep.sigma_d.resize(n);
  rep.rel_entropy.resize(n);
  rep.e_dot.resize(n);
  rep.reference_temperature = reference_temperature;

  const hamiltonian& h = l.h0();
  for (std::size_t k = 0; k < n; ++k) {
    rep.s_dot_d[k] = entropy_rate(states[k], l).value;
    rep.e_dot_d[k] = energy_current(states[k], h, l.noise());
    rep.sigma_d[k] = entropy_production_rate(states[k], l, ss);
    rep.rel_entropy[k] = relative_entropy(states[k], ss.state);
  }
  // Total energy rate from curve differences; a measurement jump inside a
  // step shows up here and in the matching work difference, never as a
  // derivative across the jump.
  std::vector<double> e_of_t(n);
  for (std::size_t k = 0; k < n; ++k) e_of_t[k] = energy(states[k], h);
  for (std::size_t k = 0; k + 1 < n; ++k)
    rep.e_dot[k] = (e_of_t[k + 1] - e_of_t[k]) / (times[k + 1] - times[k]);
  rep.e_dot[n - 1] = rep.e_dot[n - 2];

  rep.t_eff = effective_temperature(ss, h);
  std::optional<double> t_for_bound = reference_temperature;
  if (!t_for_bound && !rep.t_eff.unbounded) t_for_bound = rep.t_eff.value;

  if (t_for_bound) {
    rep.bound_slack.resize(n);
    for (std::size_t k = 0; k + 1 < n; ++k) {
      const double w_dot = (work_curve[k + 1] - work_curve[k]) / (times[k + 1] - times[k]);
      rep.bound_slack[k] = w_dot - (rep.e_dot[k] - *t_for_bound * rep.s_dot_d[k]);
    }
    rep.bound_slack[n - 1] = rep.bound_slack[n - 2];
  }
  rep.min_sigma_d = *std::min_element(rep.sigma_d.begin(), rep.sigma_d.end());
  return rep;
}

break_even_result break_even_time(std::span<const double> times, std::span<const double> work,
                                  double capacity) {
  if (times.size() != work.size() || times.empty())
    throw config_error("break-even needs aligned time/work curves");
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (work[k] >= capacity) {
      if (k == 0 || work[k] == work[k - 1]) return {true, times[k]};
      const double frac = (capacity - work[k - 1]) / (work[k] - work[k - 1]);
      return {true, times[k - 1] + frac * (times[k] - times[k - 1])};
    }
  }
  return {false, 0.0};
}

}  // namespace oqb
