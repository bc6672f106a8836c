#pragma once

#include <filesystem>
#include <ostream>
#include <vector>

#include "oqb/config.hpp"

namespace oqb {

struct fig2_options {
  double tau_min = 0.02;
  double tau_max = 0.3;
  int tau_points = 29;
  std::vector<double> t_zeno = {0.4, 1, 2, 3, 4, 5, 6};
};

struct sweep_options {
  double t_min = 0.0;
  double t_max = 0.99;
  int points = 34;
};

// Each command writes its CSV files under cfg.out_dir and a short summary to
// `log`. `svg` additionally renders charts from the same data.
void cmd_fig1(const run_config& cfg, bool svg, std::ostream& log);
void cmd_fig2(const run_config& cfg, const fig2_options& opt, bool svg, std::ostream& log);
void cmd_uncontrolled(const run_config& cfg, bool svg, std::ostream& log);
void cmd_ledger(const run_config& cfg, bool svg, std::ostream& log);
void cmd_sweep_tstar(const run_config& cfg, const sweep_options& opt, std::ostream& log);

}  // namespace oqb
