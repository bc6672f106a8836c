#include "oqb/commands.hpp"

#include <cmath>
#include <cstdio>

#include "oqb/csv.hpp"
#include "oqb/meanfield.hpp"
#include "oqb/svg.hpp"
#include "oqb/thermo.hpp"

namespace oqb {

namespace {

namespace fs = std::filesystem;

fs::path ensure_out_dir(const run_config& cfg) {
  fs::path dir(cfg.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    throw io_error("output directory not writable: " + dir.string());
  return dir;
}

std::string fmt6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

void write_state_trace(const fs::path& path, const std::vector<double>& t,
                       const std::vector<qubit_state>& states) {
  csv_writer csv(path, {"t", "rho11", "re_rho12", "im_rho12"});
  for (std::size_t k = 0; k < t.size(); ++k) {
    const auto& m = states[k].matrix();
    csv.row(std::vector<double>{t[k], m(0, 0).real(), m(0, 1).real(), m(0, 1).imag()});
  }
}

std::string t_label(double t) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", t);
  std::string s = buf;
  for (auto& c : s)
    if (c == '.') c = 'p';
  return s;
}

}  // namespace

void cmd_fig1(const run_config& cfg, bool svg, std::ostream& log) {
  const fs::path dir = ensure_out_dir(cfg);
  const protocol_config pc = cfg.to_protocol();
  const ensemble_result ens = run_ensemble(pc);

  write_state_trace(dir / "fig1_avg.csv", ens.times, ens.mean_states);

  {
    csv_writer csv(dir / "fig1_fidelity.csv", {"t", "F", "F_mean_runs"});
    for (std::size_t k = 0; k < ens.times.size(); ++k)
      csv.row(std::vector<double>{ens.times[k], ens.fidelity_of_mean[k], ens.mean_fidelity[k]});
  }

  // two designated single-run traces; prefer one exhibiting a failure collapse
  const int scan_limit = std::min(cfg.realizations, 200);
  int failure_index = -1;
  for (int i = 0; i < scan_limit; ++i) {
    const trajectory_record rec = run_single(pc, i);
    if (rec.zeno_failures > 0) {
      failure_index = i;
      break;
    }
  }
  const int first_index = failure_index == 0 ? 1 : 0;
  const int second_index = failure_index >= 0 ? failure_index : 1;
  for (int idx : {first_index, second_index}) {
    const trajectory_record rec = run_single(pc, idx);
    write_state_trace(dir / ("fig1_single_" + std::to_string(idx) + ".csv"), rec.times,
                      rec.states);
  }

  if (svg) {
    std::vector<double> rho11(ens.times.size());
    for (std::size_t k = 0; k < ens.times.size(); ++k)
      rho11[k] = ens.mean_states[k].matrix()(0, 0).real();
    write_svg_chart(dir / "fig1_avg.svg", "ensemble-averaged state", ens.times, {rho11},
                    {"rho11"});
    write_svg_chart(dir / "fig1_fidelity.svg", "stabilization fidelity", ens.times,
                    {ens.fidelity_of_mean}, {"F"});
  }

  log << "fig1: " << cfg.realizations << " realizations, F(0)=" << fmt6(ens.fidelity_of_mean.front())
      << ", F(t_fin)=" << fmt6(ens.fidelity_of_mean.back())
      << ", zeno failure rate=" << fmt6(ens.zeno_failure_rate)
      << (failure_index >= 0 ? ", failure trace index " + std::to_string(second_index) : "")
      << "\n";
}

void cmd_fig2(const run_config& cfg, const fig2_options& opt, bool svg, std::ostream& log) {
  if (!(opt.tau_min > 0.0) || !(opt.tau_max > opt.tau_min) || opt.tau_points < 2)
    throw config_error("fig2 needs a positive ascending tau grid");
  const fs::path dir = ensure_out_dir(cfg);
  const protocol_config pc = cfg.to_protocol();
  liouvillian l(pc.h0, dephasing_generator::pure_dephasing(pc.gamma));

  std::vector<std::string> sig_header{"tau", "int_Hdot"};
  std::vector<std::string> inset_header{"tau", "P_g"};
  for (double t : opt.t_zeno) {
    sig_header.push_back("sigma_T" + t_label(t));
    inset_header.push_back("mPg_T" + t_label(t));
  }
  csv_writer sig(dir / "fig2_sigma.csv", sig_header);
  csv_writer inset(dir / "fig2_inset.csv", inset_header);

  std::vector<double> taus(opt.tau_points);
  std::vector<std::vector<double>> sigma_cols(opt.t_zeno.size());
  int skipped = 0;
  for (int i = 0; i < opt.tau_points; ++i) {
    const double tau = opt.tau_min + (opt.tau_max - opt.tau_min) * i / (opt.tau_points - 1);
    taus[i] = tau;
    const qubit_state rho_alpha = zeno_premeasurement_state(l, tau);
    const auto p = outcome_distribution::of_state(rho_alpha, pc.h0);
    const double h_p = shannon_entropy(p);

    std::vector<double> srow{tau, h_p};
    std::vector<double> irow{tau, p.p_ground};
    for (std::size_t j = 0; j < opt.t_zeno.size(); ++j) {
      const double t_zeno = opt.t_zeno[j];
      if (tau > t_zeno) {
        ++skipped;
        srow.push_back(std::nan(""));
        irow.push_back(std::nan(""));
        sigma_cols[j].push_back(std::nan(""));
        continue;
      }
      srow.push_back(sigma_zeno(tau, t_zeno, l, pc.h0));
      irow.push_back(unstored_energy_fraction(tau, t_zeno, l, pc.h0));
      sigma_cols[j].push_back(srow.back());
    }
    sig.row(srow);
    inset.row(irow);
  }
  if (skipped > 0)
    log << "fig2: warning: " << skipped << " (tau, T_zeno) entries with tau > T_zeno skipped\n";

  if (svg) {
    std::vector<std::string> labels;
    for (double t : opt.t_zeno) labels.push_back("T_zeno=" + t_label(t));
    write_svg_chart(dir / "fig2_sigma.svg", "Zeno entropic cost vs tau", taus, sigma_cols,
                    labels);
  }
  log << "fig2: wrote " << opt.tau_points << " tau points for " << opt.t_zeno.size()
      << " T_zeno values\n";
}

void cmd_uncontrolled(const run_config& cfg, bool svg, std::ostream& log) {
  const fs::path dir = ensure_out_dir(cfg);
  const protocol_config pc = cfg.to_protocol();
  const trajectory_record rec = uncontrolled_run(pc);
  const qubit_state rho_e = pc.h0.excited_state();

  {
    // basis convention |0> = [0,1]^T: the initial state |0><0| has rho22 = 1
    csv_writer csv(dir / "s1_elements.csv", {"t", "rho11", "rho22", "re_rho12", "im_rho12"});
    for (std::size_t k = 0; k < rec.times.size(); ++k) {
      const auto& m = rec.states[k].matrix();
      csv.row(std::vector<double>{rec.times[k], m(0, 0).real(), m(1, 1).real(),
                                  m(0, 1).real(), m(0, 1).imag()});
    }
  }
  double min_t = 1.0, max_pe = 0.0;
  {
    csv_writer csv(dir / "s2_metrics.csv", {"t", "trace_distance", "P_e"});
    for (std::size_t k = 0; k < rec.times.size(); ++k) {
      const double td = trace_distance(rec.states[k], rho_e);
      const double pe = outcome_distribution::of_state(rec.states[k], pc.h0).p_excited;
      min_t = std::min(min_t, td);
      max_pe = std::max(max_pe, pe);
      csv.row(std::vector<double>{rec.times[k], td, pe});
    }
  }
  if (svg) {
    std::vector<double> r11(rec.times.size()), r22(rec.times.size());
    for (std::size_t k = 0; k < rec.times.size(); ++k) {
      r11[k] = rec.states[k].matrix()(0, 0).real();
      r22[k] = rec.states[k].matrix()(1, 1).real();
    }
    write_svg_chart(dir / "s1_elements.svg", "uncontrolled populations", rec.times, {r11, r22},
                    {"rho11", "rho22"});
  }
  log << "uncontrolled: min T(rho_t, rho_e)=" << fmt6(min_t) << ", max P_e=" << fmt6(max_pe)
      << "\n";
}

void cmd_ledger(const run_config& cfg, bool svg, std::ostream& log) {
  const fs::path dir = ensure_out_dir(cfg);
  const protocol_config pc = cfg.to_protocol();
  liouvillian l(pc.h0, dephasing_generator::pure_dephasing(pc.gamma));
  const double emax = pc.h0.capacity();

  const ensemble_result ens = run_ensemble(pc);
  const trajectory_record baseline = uncontrolled_run(pc);
  const expected_curves model = expected_ensemble_curves(pc);

  std::vector<double> varsigma(ens.times.size()), xi(ens.times.size());
  {
    csv_writer csv(dir / "ledger.csv", {"t", "W_stab", "Delta_L", "varsigma", "xi"});
    for (std::size_t k = 0; k < ens.times.size(); ++k) {
      const auto rc = relative_costs(ens.mean_work[k], baseline.ledger.loss[k], emax);
      varsigma[k] = rc.varsigma;
      xi[k] = rc.xi;
      csv.row(std::vector<double>{ens.times[k], ens.mean_work[k], baseline.ledger.loss[k],
                                  varsigma[k], xi[k]});
    }
  }
  if (svg)
    write_svg_chart(dir / "ledger.svg", "stabilization cost", ens.times,
                    {ens.mean_work, ens.mean_loss}, {"W_stab", "Delta_L (controlled)"});

  // protocol scalars
  const init_segment init = initialize(pc.initial_state(), pc, l);
  const qubit_state rho_alpha = zeno_premeasurement_state(l, pc.tau);
  const auto p_i = outcome_distribution::of_state(init.rho_i, pc.h0);
  const auto p_alpha = outcome_distribution::of_state(rho_alpha, pc.h0);

  log << "== protocol ==\n";
  log << "P_e(rho_i) = " << fmt6(p_i.p_excited) << ", P_g(rho_alpha) = " << fmt6(p_alpha.p_ground)
      << "\n";
  log << "N_bar = " << fmt6(ens.nbar()) << ", m_bar = " << fmt6(ens.mean_zeno_measurements)
      << ", zeno failure rate = " << fmt6(ens.zeno_failure_rate) << "\n";

  log << "== ledger (t_fin) ==\n";
  log << "<W_stab> = " << fmt6(ens.mean_work.back())
      << ", <Delta_L> controlled = " << fmt6(ens.mean_loss.back())
      << ", uncontrolled baseline = " << fmt6(baseline.ledger.loss.back()) << "\n";
  log << "varsigma = " << fmt6(varsigma.back()) << ", xi = " << fmt6(xi.back()) << "\n";

  try {
    const rate_fit rate = stabilization_rate(ens.times, varsigma, pc.tau_snapped());
    log << "R_stab = " << fmt6(rate.rate) << " (fit residual " << fmt6(rate.residual) << ")\n";
  } catch (const config_error& e) {
    log << "R_stab unavailable: " << e.what() << "\n";
  }

  const break_even_result be = break_even_time(ens.times, ens.mean_work, emax);
  const break_even_result be_model = break_even_time(model.times, model.work, emax);
  log << "== break-even ==\n";
  if (be.crossed)
    log << "ledger route t_max = " << fmt6(be.time) << "\n";
  else
    log << "ledger route: beyond horizon\n";
  if (be_model.crossed) {
    log << "expectation-model route t_max = " << fmt6(be_model.time);
    if (be.crossed)
      log << "  (relative deviation " << fmt6(std::abs(be.time - be_model.time) / be.time)
          << ")";
    log << "\n";
  } else {
    log << "expectation-model route: beyond horizon\n";
  }

  log << "== closed-form estimates ==\n";
  const double power = avg_power_estimate(pc.initial_state(), init.rho_i, pc.h0,
                                          ens.mean_zeno_measurements, pc.beta, rho_alpha,
                                          pc.tau);
  log << "avg power estimate = " << fmt6(power) << "\n";
  // N_bar enters the truncated geometric sum as the number of repetitions the
  // horizon can hold: sum_{k<=N} P_g^k = E[min(attempts, N+1)] - 1.
  const double nbar_cap =
      std::max(0.0, std::floor(pc.t_fin / pc.t_star_snapped()) - 1.0);
  const double w_est = total_work_estimate(init.de_evol, p_i.p_ground, nbar_cap,
                                           ens.mean_zeno_measurements, pc.beta, rho_alpha,
                                           pc.h0);
  std::vector<qubit_state> zeno_seg;
  {
    qubit_state cur = pc.h0.excited_state();
    zeno_seg.push_back(cur);
    for (int j = 0; j < pc.steps_per_tau(); ++j) {
      cur = l.propagate(cur, pc.h);
      zeno_seg.push_back(cur);
    }
  }
  const double per_period_loss = loss_integral(zeno_seg, pc.h, pc.h0, l.noise());
  const double l_est = total_loss_estimate(init.dl_evol, p_i.p_ground, nbar_cap,
                                           ens.mean_zeno_measurements, per_period_loss);
  const double w_dev = std::abs(w_est - ens.mean_work.back()) /
                       std::max(std::abs(ens.mean_work.back()), 1e-12);
  const double l_dev = std::abs(l_est - ens.mean_loss.back()) /
                       std::max(std::abs(ens.mean_loss.back()), 1e-12);
  log << "total work estimate = " << fmt6(w_est) << " vs ledger " << fmt6(ens.mean_work.back())
      << " (relative deviation " << fmt6(w_dev) << ")\n";
  log << "total loss estimate = " << fmt6(l_est) << " vs ledger " << fmt6(ens.mean_loss.back())
      << " (relative deviation " << fmt6(l_dev) << ")\n";
}

void cmd_sweep_tstar(const run_config& cfg, const sweep_options& opt, std::ostream& log) {
  if (opt.points < 2 || !(opt.t_max > opt.t_min) || opt.t_min < 0)
    throw config_error("sweep needs an ascending nonnegative grid");
  const fs::path dir = ensure_out_dir(cfg);
  const protocol_config pc = cfg.to_protocol();
  liouvillian l(pc.h0, dephasing_generator::pure_dephasing(pc.gamma));
  const qubit_state rho_e = pc.h0.excited_state();
  const cplx coh_e = rho_e.matrix()(0, 1);
  const double pop_e = rho_e.matrix()(0, 0).real();

  csv_writer csv(dir / "tstar_sweep.csv",
                 {"t_star", "P_e", "coh_mismatch", "pop_mismatch", "dE_evol", "dL_evol"});
  for (int i = 0; i < opt.points; ++i) {
    const double t = opt.t_min + (opt.t_max - opt.t_min) * i / (opt.points - 1);
    protocol_config sweep_cfg = pc;
    sweep_cfg.t_star = t;
    const init_segment seg = initialize(pc.initial_state(), sweep_cfg, l);
    const auto p = outcome_distribution::of_state(seg.rho_i, pc.h0);
    const cplx coh_i = seg.rho_i.matrix()(0, 1);
    const double pop_i = seg.rho_i.matrix()(0, 0).real();
    csv.row(std::vector<double>{t, p.p_excited, std::norm(coh_i - coh_e),
                                (pop_i - pop_e) * (pop_i - pop_e), seg.de_evol, seg.dl_evol});
  }
  log << "sweep-tstar: " << opt.points << " points on [" << fmt6(opt.t_min) << ", "
      << fmt6(opt.t_max) << "]\n";
}

}  // namespace oqb
