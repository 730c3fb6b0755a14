#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "decoq/constants.hpp"

namespace decoq {

using Complex = std::complex<double>;

// All frequencies are angular frequencies in rad/s. Rates (gamma_*) are 1/s.
// Temperatures in K, lengths in m, masses in kg, charges in C.
struct PhysicalParams {
  double omega0 = 3e15;        // optical transition, cavity resonant (omega_b ~ omega0)
  double omega10 = 6e9;        // lower-doublet (hyperfine) splitting
  double detuning_ci = 3e10;   // one-photon Raman detuning
  double nu_max = 8e7;         // top of the vibrational band
  double omega_rabi_i = 3e6;   // gating Rabi magnitude, weak-field case
  double omega_rabi_ii = 3e8;  // gating Rabi magnitude, strong-field case
  std::array<double, 2> g_cavity = {3e8, 3e8};   // one-photon cavity Rabi per transition a=0,1
  std::array<double, 2> gamma_se = {3e4, 3e4};   // spontaneous emission rate per transition
  double eta = 6e-2;           // Lamb-Dicke parameter
  double gamma_cav = 3e8;      // cavity decay rate
  double q_factor = 1e7;
  double temperature = 300.0;
  long n_qubits = 10000;
  double dipole_angle = 0.0;   // angle between the two optical dipole moments

  // Pinned budget values for relaxation families whose closed-form evaluation
  // and published magnitude disagree; see relaxation.hpp. Config-overridable.
  double ld_cavity_minus_budget = 3e-9;   // lower-sideband LD-cavity family
  double ng_ld_photon_budget = 1e6;       // non-gated LD-cavity family with a photon present
};

struct LatticeSpec {
  std::array<int, 3> dims = {4, 4, 4};  // ions per axis
  double spacing = 3e-6;                // lattice constant
  double ion_mass = 40.0 * constants::atomic_mass_unit;  // Ca+
  double ion_charge = constants::elementary_charge;
  double trap_freq = 0.0;  // per-site harmonic confinement; 0 = calibrate to nu_max
};

enum class ScenarioKind { NoGating, OneQubitI, OneQubitII, TwoQubit };
enum class StateKind { Hadamard, Ghz, Gated, Custom };

struct SweepSpec {
  std::string param;
  double from = 0;
  double to = 0;
  int points = 0;
};

struct ScenarioSpec {
  ScenarioKind kind = ScenarioKind::NoGating;
  StateKind state = StateKind::Hadamard;
  std::optional<SweepSpec> sweep;
  std::string output;          // empty = stdout
  std::string format = "json"; // json | csv
  std::string moments_path;    // custom moment table for two-qubit runs
  bool theta_averaged = false; // average the gated-qubit snapshot over the pulse
};

struct Config {
  PhysicalParams params;
  LatticeSpec lattice;
  ScenarioSpec scenario;
  std::vector<std::string> warnings;
};

inline const char* to_string(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::NoGating: return "no_gating";
    case ScenarioKind::OneQubitI: return "one_qubit_i";
    case ScenarioKind::OneQubitII: return "one_qubit_ii";
    case ScenarioKind::TwoQubit: return "two_qubit";
  }
  return "?";
}

inline const char* to_string(StateKind s) {
  switch (s) {
    case StateKind::Hadamard: return "hadamard";
    case StateKind::Ghz: return "ghz";
    case StateKind::Gated: return "gated";
    case StateKind::Custom: return "custom";
  }
  return "?";
}

inline ScenarioKind scenario_from_string(const std::string& s) {
  if (s == "no_gating") return ScenarioKind::NoGating;
  if (s == "one_qubit_i") return ScenarioKind::OneQubitI;
  if (s == "one_qubit_ii") return ScenarioKind::OneQubitII;
  if (s == "two_qubit") return ScenarioKind::TwoQubit;
  throw std::invalid_argument("params: unknown scenario name '" + s + "'");
}

inline StateKind state_from_string(const std::string& s) {
  if (s == "hadamard") return StateKind::Hadamard;
  if (s == "ghz") return StateKind::Ghz;
  if (s == "gated") return StateKind::Gated;
  if (s == "custom") return StateKind::Custom;
  throw std::invalid_argument("params: unknown state name '" + s + "'");
}

// Gating Rabi magnitude selected by scenario. Two-qubit gating uses the weak field.
inline double omega_rabi(const PhysicalParams& p, ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::OneQubitII: return p.omega_rabi_ii;
    default: return p.omega_rabi_i;
  }
}

inline double boltzmann_factor(const PhysicalParams& p) {
  if (p.temperature < 0) throw std::invalid_argument("params: temperature < 0");
  if (p.temperature == 0.0) return 0.0;
  return std::exp(-constants::hbar * p.omega0 /
                  (constants::k_boltzmann * p.temperature));
}

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

using Section = std::map<std::string, std::string>;

inline std::map<std::string, Section> parse_sections(const std::string& text) {
  std::map<std::string, Section> out;
  std::istringstream in(text);
  std::string line, section;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') {
      section = trim(line.substr(1, line.size() - 2));
      out[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("params: malformed line '" + line + "'");
    if (section.empty())
      throw std::invalid_argument("params: key outside any section: '" + line + "'");
    out[section][trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

inline double parse_double(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw std::invalid_argument("params: bad numeric value for '" + key + "': '" + v + "'");
  }
}

inline void take(const Section& s, const char* key, double& dst, bool positive = true) {
  const auto it = s.find(key);
  if (it == s.end()) return;
  const double v = parse_double(key, it->second);
  if (positive && !(v > 0))
    throw std::invalid_argument(std::string("params: '") + key + "' must be > 0");
  dst = v;
}

inline void take_nonneg(const Section& s, const char* key, double& dst) {
  const auto it = s.find(key);
  if (it == s.end()) return;
  const double v = parse_double(key, it->second);
  if (v < 0) throw std::invalid_argument(std::string("params: '") + key + "' must be >= 0");
  dst = v;
}

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

inline Config parse_config(const std::string& text) {
  using detail::Section;
  Config cfg;
  auto sections = detail::parse_sections(text);

  if (const auto it = sections.find("params"); it != sections.end()) {
    const Section& s = it->second;
    detail::take(s, "omega0", cfg.params.omega0);
    detail::take(s, "omega10", cfg.params.omega10);
    detail::take(s, "detuning_ci", cfg.params.detuning_ci);
    detail::take(s, "nu_max", cfg.params.nu_max);
    detail::take(s, "omega_rabi_i", cfg.params.omega_rabi_i);
    detail::take(s, "omega_rabi_ii", cfg.params.omega_rabi_ii);
    detail::take_nonneg(s, "g_cavity_0", cfg.params.g_cavity[0]);
    detail::take_nonneg(s, "g_cavity_1", cfg.params.g_cavity[1]);
    detail::take(s, "gamma_se_0", cfg.params.gamma_se[0]);
    detail::take(s, "gamma_se_1", cfg.params.gamma_se[1]);
    detail::take(s, "eta", cfg.params.eta);
    detail::take(s, "gamma_cav", cfg.params.gamma_cav);
    detail::take(s, "q_factor", cfg.params.q_factor);
    detail::take_nonneg(s, "temperature", cfg.params.temperature);
    detail::take_nonneg(s, "dipole_angle", cfg.params.dipole_angle);
    detail::take_nonneg(s, "ld_cavity_minus_budget", cfg.params.ld_cavity_minus_budget);
    detail::take_nonneg(s, "ng_ld_photon_budget", cfg.params.ng_ld_photon_budget);
    if (const auto n = s.find("n_qubits"); n != s.end()) {
      const double v = detail::parse_double("n_qubits", n->second);
      if (!(v >= 1) || v != std::floor(v))
        throw std::invalid_argument("params: 'n_qubits' must be a positive integer");
      cfg.params.n_qubits = static_cast<long>(v);
    }
  }

  if (const auto it = sections.find("lattice"); it != sections.end()) {
    const Section& s = it->second;
    if (const auto d = s.find("dims"); d != s.end()) {
      std::istringstream ds(d->second);
      std::array<int, 3> dims{};
      if (!(ds >> dims[0] >> dims[1] >> dims[2]))
        throw std::invalid_argument("params: 'dims' needs three integers");
      for (int v : dims)
        if (v < 1) throw std::invalid_argument("params: 'dims' entries must be >= 1");
      cfg.lattice.dims = dims;
    }
    detail::take(s, "spacing", cfg.lattice.spacing);
    detail::take(s, "ion_mass", cfg.lattice.ion_mass);
    detail::take(s, "ion_charge", cfg.lattice.ion_charge);
    detail::take_nonneg(s, "trap_freq", cfg.lattice.trap_freq);
  }

  const auto sc = sections.find("scenario");
  if (sc == sections.end() || sc->second.find("kind") == sc->second.end())
    throw std::invalid_argument("params: scenario required");
  {
    const Section& s = sc->second;
    cfg.scenario.kind = scenario_from_string(s.at("kind"));
    switch (cfg.scenario.kind) {
      case ScenarioKind::NoGating: cfg.scenario.state = StateKind::Hadamard; break;
      case ScenarioKind::OneQubitI:
      case ScenarioKind::OneQubitII: cfg.scenario.state = StateKind::Gated; break;
      case ScenarioKind::TwoQubit: cfg.scenario.state = StateKind::Custom; break;
    }
    if (const auto v = s.find("state"); v != s.end())
      cfg.scenario.state = state_from_string(v->second);
    if (const auto v = s.find("output"); v != s.end()) cfg.scenario.output = v->second;
    if (const auto v = s.find("format"); v != s.end()) {
      if (v->second != "json" && v->second != "csv")
        throw std::invalid_argument("params: format must be json or csv");
      cfg.scenario.format = v->second;
    }
    if (const auto v = s.find("moments"); v != s.end()) cfg.scenario.moments_path = v->second;
    if (const auto v = s.find("theta_averaged"); v != s.end())
      cfg.scenario.theta_averaged = (v->second == "true" || v->second == "1");
    if (const auto v = s.find("sweep"); v != s.end()) {
      SweepSpec sw;
      std::istringstream ss(v->second);
      if (!(ss >> sw.param >> sw.from >> sw.to >> sw.points) || sw.points < 2)
        throw std::invalid_argument("params: sweep needs '<param> <from> <to> <points>=2..'");
      cfg.scenario.sweep = sw;
    }
  }

  // In the two-qubit gating configuration the cavity mode is uncoupled from the
  // 0-2 transition. Applied as a scenario default; explicit g_cavity_0 wins.
  if (cfg.scenario.kind == ScenarioKind::TwoQubit) {
    const auto ps = sections.find("params");
    const bool explicit_g0 =
        ps != sections.end() && ps->second.find("g_cavity_0") != ps->second.end();
    if (!explicit_g0) cfg.params.g_cavity[0] = 0.0;
  }

  const double q_est = cfg.params.omega0 / cfg.params.gamma_cav;
  const double ratio = cfg.params.q_factor / q_est;
  if (ratio > 10.0 || ratio < 0.1)
    cfg.warnings.push_back("params: q_factor differs from omega0/gamma_cav by more than 10x");

  return cfg;
}

inline Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("params: cannot open config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

inline std::string serialize_config(const Config& cfg) {
  std::ostringstream o;
  const PhysicalParams& p = cfg.params;
  o << "[params]\n";
  o << "omega0 = " << detail::fmt(p.omega0) << "\n";
  o << "omega10 = " << detail::fmt(p.omega10) << "\n";
  o << "detuning_ci = " << detail::fmt(p.detuning_ci) << "\n";
  o << "nu_max = " << detail::fmt(p.nu_max) << "\n";
  o << "omega_rabi_i = " << detail::fmt(p.omega_rabi_i) << "\n";
  o << "omega_rabi_ii = " << detail::fmt(p.omega_rabi_ii) << "\n";
  o << "g_cavity_0 = " << detail::fmt(p.g_cavity[0]) << "\n";
  o << "g_cavity_1 = " << detail::fmt(p.g_cavity[1]) << "\n";
  o << "gamma_se_0 = " << detail::fmt(p.gamma_se[0]) << "\n";
  o << "gamma_se_1 = " << detail::fmt(p.gamma_se[1]) << "\n";
  o << "eta = " << detail::fmt(p.eta) << "\n";
  o << "gamma_cav = " << detail::fmt(p.gamma_cav) << "\n";
  o << "q_factor = " << detail::fmt(p.q_factor) << "\n";
  o << "temperature = " << detail::fmt(p.temperature) << "\n";
  o << "n_qubits = " << p.n_qubits << "\n";
  o << "dipole_angle = " << detail::fmt(p.dipole_angle) << "\n";
  o << "ld_cavity_minus_budget = " << detail::fmt(p.ld_cavity_minus_budget) << "\n";
  o << "ng_ld_photon_budget = " << detail::fmt(p.ng_ld_photon_budget) << "\n";
  o << "[lattice]\n";
  o << "dims = " << cfg.lattice.dims[0] << " " << cfg.lattice.dims[1] << " "
    << cfg.lattice.dims[2] << "\n";
  o << "spacing = " << detail::fmt(cfg.lattice.spacing) << "\n";
  o << "ion_mass = " << detail::fmt(cfg.lattice.ion_mass) << "\n";
  o << "ion_charge = " << detail::fmt(cfg.lattice.ion_charge) << "\n";
  if (cfg.lattice.trap_freq > 0)
    o << "trap_freq = " << detail::fmt(cfg.lattice.trap_freq) << "\n";
  o << "[scenario]\n";
  o << "kind = " << to_string(cfg.scenario.kind) << "\n";
  o << "state = " << to_string(cfg.scenario.state) << "\n";
  if (!cfg.scenario.output.empty()) o << "output = " << cfg.scenario.output << "\n";
  o << "format = " << cfg.scenario.format << "\n";
  if (!cfg.scenario.moments_path.empty()) o << "moments = " << cfg.scenario.moments_path << "\n";
  if (cfg.scenario.theta_averaged) o << "theta_averaged = true\n";
  if (cfg.scenario.sweep) {
    const SweepSpec& sw = *cfg.scenario.sweep;
    o << "sweep = " << sw.param << " " << detail::fmt(sw.from) << " " << detail::fmt(sw.to)
      << " " << sw.points << "\n";
  }
  return o.str();
}

}  // namespace decoq
