#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "oqb/protocol.hpp"

namespace oqb {

// Plain-text run configuration: key=value lines, '#' comments. Keys are
// case-sensitive; unknown keys are rejected. Missing keys keep the built-in
// defaults below.
struct run_config {
  double omega = 1.0;      // sigma_z coefficient
  double big_omega = 3.0;  // sigma_x coefficient (key "Omega")
  double gamma = 2.0 / 3.0;
  double t_star = 0.33;
  double tau = 0.0662;
  double t_fin = 10.0;
  double beta = 1.0;
  double h = 1e-3;
  int realizations = 1000;
  std::uint64_t seed = 42;
  std::string out_dir = ".";
  int threads = 0;

  protocol_config to_protocol() const;
};

// Apply one key=value pair; throws config_error on unknown keys or
// unparseable values.
void apply_config_key(run_config& cfg, const std::string& key, const std::string& value);

run_config load_config_file(const std::filesystem::path& path);

}  // namespace oqb
