#include "frontlab/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace frontlab {

const std::map<std::string, std::string>& RunConfig::defaults() {
  static const std::map<std::string, std::string> d = {
      // scenario selection
      {"scenario", "modulated_front"},  // modulated_front | case_iii | modulated_pulse |
                                        // linearized_decay
      {"model", "front"},               // front | pulse
      // front model
      {"coupling_case", "I"},
      {"c0", "0.5"},
      {"gamma", "0.5"},
      {"alpha", "0.1"},
      // pulse model
      {"alpha0", "0.6"},
      {"alpha1", "0.8"},
      {"nu0", "1"},
      {"c1r", "0.1"},
      {"c1i", "10"},
      {"pulse_c0", "1"},
      {"mu1", "1"},
      {"mu2", "-1"},
      {"alpha2", "0.0025"},
      // grid and stepper
      {"half_length_pi", "60"},  // domain (-L, L) with L = half_length_pi * pi
      {"points", "4096"},
      {"dt", "0.01"},
      {"scheme", "euler"},  // euler | bdf2
      {"dealias", "false"},
      {"t_end", "100"},
      {"subtract_front", "true"},
      // initial data
      {"seed", "0"},
      {"init_w_amp", "1"},
      {"init_v_amp", "0.01"},
      {"init_v_phase", "sin"},   // sin | cos
      {"init_v_pattern", "false"},  // seed v at the pattern amplitude eps*a
      // perturbation (applied at perturb_time when perturb_delta > 0)
      {"perturb_delta", "0"},
      {"perturb_time", "-1"},
      {"perturb_offset", "10"},
      // diagnostics
      {"snapshot_interval", "5"},
      {"diag_interval", "0.5"},
      {"residual_interval", "5"},
      {"residual_start", "10"},
      {"interior_frac", "0.8"},
      {"periodicity_threshold", "0.001"},
      {"speed_window_frac", "0.5"},  // trailing fraction of the run used for the speed fit
      {"decay_margin", "10"},
      {"vsnap_interval", "10"},  // perturbation snapshot cadence after perturb_time
      // spectral / turing / bloch commands
      {"sign", "minus"},  // minus | plus
      {"epsilon", "0.05"},
      {"eps_list", "0.025,0.05,0.1"},
      {"k_max", "4"},
      {"k_points", "201"},
      {"beta", "0"},
      {"beta_list", "0,0.05,0.1"},
      {"c1_slope", "0.25"},
      {"m_range", "10"},
      {"spatial_c", "0.5"},
      {"bloch_K", "16"},
      {"cell_points", "256"},
      {"cos_modes", "32"},
      {"ell_step", "0.02"},
      {"second_order", "true"},
      // output
      {"out", "out"},
      {"binary_snapshots", "false"},
      {"jobs", "1"},
  };
  return d;
}

RunConfig::RunConfig() : values_(defaults()) {}

void RunConfig::set(const std::string& key, const std::string& value) {
  if (!defaults().count(key)) throw std::invalid_argument("unknown config key: " + key);
  values_[key] = value;
}

void RunConfig::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    // trim
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    const auto e = line.find_last_not_of(" \t\r");
    line = line.substr(b, e - b + 1);
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected key=value");
    std::string key = line.substr(0, eq);
    std::string val = line.substr(eq + 1);
    const auto ke = key.find_last_not_of(" \t");
    key = key.substr(0, ke + 1);
    const auto vb = val.find_first_not_of(" \t");
    val = (vb == std::string::npos) ? "" : val.substr(vb);
    set(key, val);
  }
}

void RunConfig::merge_overrides(const std::vector<std::string>& kvs) {
  for (const auto& kv : kvs) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("--set expects key=value, got: " + kv);
    set(kv.substr(0, eq), kv.substr(eq + 1));
  }
}

const std::string& RunConfig::raw(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw std::invalid_argument("unknown config key: " + key);
  return it->second;
}

double RunConfig::get_double(const std::string& key) const {
  const std::string& s = raw(key);
  size_t pos = 0;
  double v = std::stod(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("config key " + key + ": bad number '" + s + "'");
  return v;
}

int RunConfig::get_int(const std::string& key) const {
  const std::string& s = raw(key);
  size_t pos = 0;
  int v = std::stoi(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("config key " + key + ": bad integer '" + s + "'");
  return v;
}

bool RunConfig::get_bool(const std::string& key) const {
  const std::string& s = raw(key);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw std::invalid_argument("config key " + key + ": bad boolean '" + s + "'");
}

std::string RunConfig::get_string(const std::string& key) const { return raw(key); }

std::vector<double> RunConfig::get_double_list(const std::string& key) const {
  std::vector<double> out;
  std::stringstream ss(raw(key));
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stod(item));
  }
  return out;
}

std::string RunConfig::serialize() const {
  std::ostringstream os;
  for (const auto& [k, v] : values_) os << k << "=" << v << "\n";
  return os.str();
}

RunConfig RunConfig::from_string(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::runtime_error("config echo: expected key=value");
    cfg.set(line.substr(b, eq - b), line.substr(eq + 1));
  }
  return cfg;
}

}  // namespace frontlab
