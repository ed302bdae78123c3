#pragma once

#include <charconv>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

#include "acns/field.hpp"
#include "acns/params.hpp"
#include "acns/stepper.hpp"

namespace acns {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, const std::string& msg)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

enum class IcKind { equilibrium, perturbed_equilibrium, bubble, mms };

inline const char* ic_kind_name(IcKind k) {
  switch (k) {
    case IcKind::equilibrium: return "equilibrium";
    case IcKind::perturbed_equilibrium: return "perturbed_equilibrium";
    case IcKind::bubble: return "bubble";
    case IcKind::mms: return "mms";
  }
  return "?";
}

struct IcSpec {
  IcKind kind = IcKind::bubble;
  double amplitude = 0.05;        // perturbed_equilibrium bump height
  int mode = 1;                   // perturbed_equilibrium wavenumber
  double radius = 0.25;           // bubble radius as a fraction of lx
  double width = 0.15;            // bubble interface width as a fraction of lx
  std::string mms_case = "swirl";

  bool operator==(const IcSpec&) const = default;
};

struct RunConfig {
  Params params;
  int nx = 64, ny = 64;
  double lx = 1.0, ly = 1.0;
  StepperConfig stepper;
  double t_end = 0.6;
  int output_every = 4;
  std::string output_dir = "out";
  long seed = 0;
  IcSpec ic;

  bool operator==(const RunConfig&) const = default;

  Grid grid() const { return Grid{nx, ny, lx, ly}; }

  void validate() const {
    params.validate();
    stepper.validate();
    grid().validate();
    if (!(t_end > 0.0)) throw std::invalid_argument("t_end must be > 0");
    if (output_every < 1) throw std::invalid_argument("output_every must be >= 1");
    switch (ic.kind) {
      case IcKind::perturbed_equilibrium:
        if (!(ic.amplitude >= 0.0 && ic.amplitude <= 2.0))
          throw std::invalid_argument("ic_amplitude must lie in [0, 2]");
        if (ic.mode < 1) throw std::invalid_argument("ic_mode must be >= 1");
        break;
      case IcKind::bubble:
        if (!(ic.radius > 0.0)) throw std::invalid_argument("ic_radius must be > 0");
        if (!(ic.width > 0.0)) throw std::invalid_argument("ic_width must be > 0");
        break;
      case IcKind::mms:
        if (ic.mms_case != "phase_diffusion" && ic.mms_case != "stokes" &&
            ic.mms_case != "swirl")
          throw std::invalid_argument(
              "ic_case must be one of phase_diffusion, stokes, swirl");
        break;
      case IcKind::equilibrium:
        break;
    }
  }
};

namespace detail_config {

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

inline double parse_double(const std::string& v, const std::string& key, int line) {
  std::string t = v;
  if (!t.empty() && t.front() == '+') t.erase(0, 1);
  double out{};
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  if (ec != std::errc{} || p != t.data() + t.size())
    throw ConfigError(line, "malformed value for '" + key + "'");
  return out;
}

template <typename Int>
inline Int parse_int(const std::string& v, const std::string& key, int line) {
  std::string t = v;
  if (!t.empty() && t.front() == '+') t.erase(0, 1);
  Int out{};
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  if (ec != std::errc{} || p != t.data() + t.size())
    throw ConfigError(line, "malformed value for '" + key + "'");
  return out;
}

inline void assign(RunConfig& cfg, const std::string& key, const std::string& val,
                   int line) {
  auto d = [&] { return parse_double(val, key, line); };
  auto i = [&] { return parse_int<int>(val, key, line); };

  if (key == "rho1") cfg.params.rho1 = d();
  else if (key == "rho2") cfg.params.rho2 = d();
  else if (key == "mu") cfg.params.mu = d();
  else if (key == "lambda") cfg.params.lambda = d();
  else if (key == "gamma") cfg.params.gamma = d();
  else if (key == "epsilon") cfg.params.epsilon = d();
  else if (key == "kappa") cfg.params.kappa = d();
  else if (key == "branch") {
    if (val == "plus") cfg.params.branch = Branch::plus;
    else if (val == "minus") cfg.params.branch = Branch::minus;
    else throw ConfigError(line, "branch must be 'plus' or 'minus'");
  } else if (key == "nx") cfg.nx = i();
  else if (key == "ny") cfg.ny = i();
  else if (key == "lx") cfg.lx = d();
  else if (key == "ly") cfg.ly = d();
  else if (key == "dt") cfg.stepper.dt = d();
  else if (key == "picard_max") cfg.stepper.picard_max = i();
  else if (key == "picard_tol") cfg.stepper.picard_tol = d();
  else if (key == "poisson_tol") cfg.stepper.poisson_tol = d();
  else if (key == "poisson_max_iter") cfg.stepper.poisson_max_iter = i();
  else if (key == "t_end") cfg.t_end = d();
  else if (key == "output_every") cfg.output_every = i();
  else if (key == "output_dir") cfg.output_dir = val;
  else if (key == "seed") cfg.seed = parse_int<long>(val, key, line);
  else if (key == "ic") {
    if (val == "equilibrium") cfg.ic.kind = IcKind::equilibrium;
    else if (val == "perturbed_equilibrium") cfg.ic.kind = IcKind::perturbed_equilibrium;
    else if (val == "bubble") cfg.ic.kind = IcKind::bubble;
    else if (val == "mms") cfg.ic.kind = IcKind::mms;
    else throw ConfigError(line, "unknown ic preset '" + val + "'");
  } else if (key == "ic_amplitude") cfg.ic.amplitude = d();
  else if (key == "ic_mode") cfg.ic.mode = i();
  else if (key == "ic_radius") cfg.ic.radius = d();
  else if (key == "ic_width") cfg.ic.width = d();
  else if (key == "ic_case") cfg.ic.mms_case = val;
  else throw ConfigError(line, "unknown key '" + key + "'");
}

}  // namespace detail_config

// Flat `key = value` text with '#' comments; unknown and duplicate keys are
// errors, and invariant violations are attributed to the offending line.
inline RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::map<std::string, int> seen;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail_config::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(lineno, "expected key = value");
    const std::string key = detail_config::trim(line.substr(0, eq));
    const std::string val = detail_config::trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(lineno, "empty key");
    if (seen.count(key)) throw ConfigError(lineno, "duplicate key '" + key + "'");
    seen[key] = lineno;
    detail_config::assign(cfg, key, val, lineno);
  }
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    // Attribute the violation to the line that set the named quantity.
    std::string msg = e.what();
    std::string head = msg.substr(0, msg.find_first_of(" \t"));
    while (!head.empty() && (head.back() == ',' || head.back() == ':')) head.pop_back();
    const auto it = seen.find(head);
    throw ConfigError(it != seen.end() ? it->second : 0, msg);
  }
  return cfg;
}

inline std::string serialize_config(const RunConfig& cfg) {
  std::ostringstream os;
  os.precision(17);
  os << "rho1 = " << cfg.params.rho1 << '\n'
     << "rho2 = " << cfg.params.rho2 << '\n'
     << "mu = " << cfg.params.mu << '\n'
     << "lambda = " << cfg.params.lambda << '\n'
     << "gamma = " << cfg.params.gamma << '\n'
     << "epsilon = " << cfg.params.epsilon << '\n'
     << "kappa = " << cfg.params.kappa << '\n'
     << "branch = " << (cfg.params.branch == Branch::plus ? "plus" : "minus") << '\n'
     << "nx = " << cfg.nx << '\n'
     << "ny = " << cfg.ny << '\n'
     << "lx = " << cfg.lx << '\n'
     << "ly = " << cfg.ly << '\n'
     << "dt = " << cfg.stepper.dt << '\n'
     << "picard_max = " << cfg.stepper.picard_max << '\n'
     << "picard_tol = " << cfg.stepper.picard_tol << '\n'
     << "poisson_tol = " << cfg.stepper.poisson_tol << '\n'
     << "poisson_max_iter = " << cfg.stepper.poisson_max_iter << '\n'
     << "t_end = " << cfg.t_end << '\n'
     << "output_every = " << cfg.output_every << '\n'
     << "output_dir = " << cfg.output_dir << '\n'
     << "seed = " << cfg.seed << '\n'
     << "ic = " << ic_kind_name(cfg.ic.kind) << '\n'
     << "ic_amplitude = " << cfg.ic.amplitude << '\n'
     << "ic_mode = " << cfg.ic.mode << '\n'
     << "ic_radius = " << cfg.ic.radius << '\n'
     << "ic_width = " << cfg.ic.width << '\n'
     << "ic_case = " << cfg.ic.mms_case << '\n';
  return os.str();
}

}  // namespace acns
