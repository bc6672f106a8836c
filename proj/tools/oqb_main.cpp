#include <CLI11.hpp>

#include <iostream>
#include <sstream>

#include "oqb/commands.hpp"
#include "oqb/kernels.hpp"

namespace {

struct cli_state {
  std::string config_file;
  oqb::run_config cfg;
  bool svg = false;
  std::string kernel = "auto";
  // flags that were set explicitly, applied over the config file
  std::optional<std::uint64_t> seed;
  std::optional<int> realizations;
  std::optional<double> tau, t_star, gamma, beta, t_fin;
  std::optional<std::string> out_dir;
  std::optional<int> threads;
};

void finalize(cli_state& st) {
  if (!st.config_file.empty()) st.cfg = oqb::load_config_file(st.config_file);
  if (st.seed) st.cfg.seed = *st.seed;
  if (st.realizations) st.cfg.realizations = *st.realizations;
  if (st.tau) st.cfg.tau = *st.tau;
  if (st.t_star) st.cfg.t_star = *st.t_star;
  if (st.gamma) st.cfg.gamma = *st.gamma;
  if (st.beta) st.cfg.beta = *st.beta;
  if (st.t_fin) st.cfg.t_fin = *st.t_fin;
  if (st.out_dir) st.cfg.out_dir = *st.out_dir;
  if (st.threads) st.cfg.threads = *st.threads;
  if (!oqb::kernels::select(st.kernel))
    throw oqb::config_error("unknown or unsupported kernel '" + st.kernel + "'");
}

std::vector<double> parse_list(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::strtod(item.c_str(), nullptr));
  }
  if (out.empty()) throw oqb::config_error("empty list: " + csv);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "oqb - open quantum battery stabilization: Lindblad dynamics interrupted by\n"
      "projective energy measurements, with full thermodynamic accounting.\n"
      "Basis convention: |0> = [0,1]^T, |1> = [1,0]^T; rho11 is the top-left entry."};
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand

  cli_state st;
  app.add_option("--config", st.config_file, "key=value config file ('#' comments)");
  app.add_option_function<std::uint64_t>("--seed", [&](std::uint64_t v) { st.seed = v; },
                                         "master seed");
  app.add_option_function<int>("--realizations", [&](int v) { st.realizations = v; },
                               "number of protocol realizations");
  app.add_option_function<double>("--tau", [&](double v) { st.tau = v; }, "Zeno period");
  app.add_option_function<double>("--t-star", [&](double v) { st.t_star = v; },
                                  "free evolution time before the first measurement");
  app.add_option_function<double>("--gamma", [&](double v) { st.gamma = v; },
                                  "dephasing rate");
  app.add_option_function<double>("--beta", [&](double v) { st.beta = v; },
                                  "inverse temperature of the erasure reservoir");
  app.add_option_function<double>("--t-fin", [&](double v) { st.t_fin = v; },
                                  "total protocol duration");
  app.add_option_function<std::string>("--out", [&](const std::string& v) { st.out_dir = v; },
                                       "output directory");
  app.add_option_function<int>("--threads", [&](int v) { st.threads = v; },
                               "worker threads (0 = hardware)");
  app.add_option("--kernel", st.kernel, "arithmetic kernel: auto|scalar|avx2");
  app.add_flag("--svg", st.svg, "also render SVG charts");

  auto* fig1 = app.add_subcommand(
      "fig1",
      "ensemble-averaged state (fig1_avg.csv: t,rho11,re_rho12,im_rho12), fidelity curve\n"
      "(fig1_fidelity.csv: t,F,F_mean_runs) and two single-run traces");

  oqb::fig2_options f2;
  std::string t_zeno_list = "0.4,1,2,3,4,5,6";
  auto* fig2 = app.add_subcommand(
      "fig2",
      "Zeno entropic cost sweep (fig2_sigma.csv, fig2_inset.csv) over a tau grid");
  fig2->add_option("--tau-min", f2.tau_min, "smallest tau")->capture_default_str();
  fig2->add_option("--tau-max", f2.tau_max, "largest tau")->capture_default_str();
  fig2->add_option("--tau-points", f2.tau_points, "grid size")->capture_default_str();
  fig2->add_option("--t-zeno", t_zeno_list, "comma-separated Zeno stage durations")
      ->capture_default_str();

  auto* unc = app.add_subcommand(
      "uncontrolled",
      "free evolution from |0><0| (s1_elements.csv: t,rho11,rho22,re_rho12,im_rho12;\n"
      "s2_metrics.csv: t,trace_distance,P_e)");

  auto* led = app.add_subcommand(
      "ledger",
      "energy ledger (ledger.csv: t,W_stab,Delta_L,varsigma,xi) and closed-form cross-checks");

  oqb::sweep_options sw;
  auto* sweep = app.add_subcommand("sweep-tstar",
                                   "first-measurement time sweep (tstar_sweep.csv)");
  sweep->add_option("--tstar-min", sw.t_min, "grid start")->capture_default_str();
  sweep->add_option("--tstar-max", sw.t_max, "grid end")->capture_default_str();
  sweep->add_option("--tstar-points", sw.points, "grid size")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    finalize(st);
    if (fig1->parsed()) oqb::cmd_fig1(st.cfg, st.svg, std::cout);
    if (fig2->parsed()) {
      f2.t_zeno = parse_list(t_zeno_list);
      oqb::cmd_fig2(st.cfg, f2, st.svg, std::cout);
    }
    if (unc->parsed()) oqb::cmd_uncontrolled(st.cfg, st.svg, std::cout);
    if (led->parsed()) oqb::cmd_ledger(st.cfg, st.svg, std::cout);
    if (sweep->parsed()) oqb::cmd_sweep_tstar(st.cfg, sw, std::cout);
  } catch (const oqb::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const oqb::numerical_error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const oqb::state_error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const oqb::io_error& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 4;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
