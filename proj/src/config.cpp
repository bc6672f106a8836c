#include "oqb/config.hpp"

#include <fstream>

namespace oqb {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw config_error("invalid numeric value for '" + key + "': " + value);
  }
}

long long parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw config_error("invalid integer value for '" + key + "': " + value);
  }
}

}  // namespace

protocol_config run_config::to_protocol() const {
  protocol_config p = protocol_config::defaults();
  p.h0 = hamiltonian::xz(big_omega, omega);
  p.gamma = gamma;
  p.t_star = t_star;
  p.tau = tau;
  p.t_fin = t_fin;
  p.beta = beta;
  p.h = h;
  p.realizations = realizations;
  p.master_seed = seed;
  p.threads = threads;
  return p;
}

void apply_config_key(run_config& cfg, const std::string& key, const std::string& value) {
  if (key == "omega")
    cfg.omega = parse_double(key, value);
  else if (key == "Omega")
    cfg.big_omega = parse_double(key, value);
  else if (key == "gamma")
    cfg.gamma = parse_double(key, value);
  else if (key == "t_star")
    cfg.t_star = parse_double(key, value);
  else if (key == "tau")
    cfg.tau = parse_double(key, value);
  else if (key == "t_fin")
    cfg.t_fin = parse_double(key, value);
  else if (key == "beta")
    cfg.beta = parse_double(key, value);
  else if (key == "h")
    cfg.h = parse_double(key, value);
  else if (key == "realizations")
    cfg.realizations = static_cast<int>(parse_int(key, value));
  else if (key == "seed")
    cfg.seed = static_cast<std::uint64_t>(parse_int(key, value));
  else if (key == "out_dir")
    cfg.out_dir = value;
  else
    throw config_error("unknown configuration key '" + key + "'");
}

run_config load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file " + path.string());
  run_config cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw config_error(path.string() + ":" + std::to_string(lineno) +
                         ": expected key=value");
    apply_config_key(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

}  // namespace oqb
