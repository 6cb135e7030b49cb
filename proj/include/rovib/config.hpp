#pragma once

// Run configuration: INI text with key = value lines in named sections.
// Unknown keys are rejected. Relative paths resolve against the directory of
// the config file. The [results] section written into run_meta is ignored
// on load, so run_meta can be fed back as a config.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "rovib/molecule.hpp"
#include "rovib/radial.hpp"

namespace rovib {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PropertySpec {
  std::string name;
  std::string units;
  std::string file;
};

struct RunConfig {
  // [molecule]
  LigandGeometry geometry;
  AtomicMasses masses;
  double r_eq = 5.25;          // bohr
  double reduced_mass = 0.0;   // electron masses, 0: from masses

  // [radial]
  double omega_cm = 349.2547;
  int n_basis = 8;
  CentrifugalMode centrifugal = CentrifugalMode::linearized;

  // [angular]
  std::string model = "harmonic_bend";  // harmonic_bend | legendre | tabulated
  double bend_kb = 0.0;                 // hartree / rad^2, 0: harmonic estimate from the target frequency
  std::vector<double> legendre;         // hartree, coefficients of P_l(cos theta)
  std::string surface_file;
  int lambda_max = -1;                  // -1: 2 max(j_max, l_max)
  std::set<int> mu_set{0};
  double reconstruction_tolerance = std::numeric_limits<double>::infinity();

  // [truncation]
  std::vector<int> J{0};
  int j_max = 30;
  int l_max = 30;
  int k_max = 28;
  int n_states = 6;       // per block
  int report_states = 10;  // per J

  // [solver]
  std::size_t dense_limit = 4000;
  std::size_t max_dimension = 4'000'000;
  double residual_tol = 1e-9;
  double band_tol = 1e-5;  // hartree
  int lanczos_block = 4;
  int max_restarts = 500;
  int threads = 1;

  // [property.<name>]
  std::vector<PropertySpec> properties;
  int property_lambda_max = -1;  // [properties] lambda_max

  // [output]
  int density_points = 181;
  bool densities = true;
  bool dump_matrix = false;

  // [converge]
  std::vector<int> sweep_j, sweep_lambda, sweep_n_basis;
  double converge_threshold = 1e-8;  // hartree

  // [calibrate]
  double target_omega_perp_cm = 173.7664;
  double calibrate_tol_cm = 1e-4;
  int calibrate_max_iter = 30;

  int resolved_lambda_max() const { return lambda_max >= 0 ? lambda_max : 2 * std::max(j_max, l_max); }
  int resolved_property_lambda_max() const {
    return property_lambda_max >= 0 ? property_lambda_max : 2 * std::max(j_max, l_max);
  }
};

namespace detail {

inline std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',' || c == ' ' || c == '\t') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

inline double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("'" + key + "': expected a number, got '" + v + "'");
  }
}

inline long long to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long long i = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return i;
  } catch (const std::exception&) {
    throw ConfigError("'" + key + "': expected an integer, got '" + v + "'");
  }
}

inline bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("'" + key + "': expected true/false, got '" + v + "'");
}

inline std::vector<int> to_ints(const std::string& key, const std::string& v) {
  std::vector<int> out;
  for (const auto& t : split_list(v)) out.push_back(int(to_int(key, t)));
  return out;
}

inline std::string num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

template <class T>
std::string join(const std::vector<T>& v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) os << ' ';
    if constexpr (std::is_floating_point_v<T>) os << num(v[i]);
    else os << v[i];
  }
  return os.str();
}

}  // namespace detail

inline void validate(const RunConfig& c) {
  auto need = [](bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
  };
  need(c.r_eq > 0, "molecule.r_eq must be positive");
  need(c.reduced_mass >= 0, "molecule.reduced_mass must be nonnegative");
  need(c.omega_cm > 0, "radial.omega_cm must be positive");
  need(c.n_basis >= 1, "radial.n_basis must be >= 1");
  need(c.model == "harmonic_bend" || c.model == "legendre" || c.model == "tabulated",
       "angular.model must be harmonic_bend, legendre or tabulated");
  need(c.bend_kb >= 0, "angular.bend_kb must be nonnegative");
  need(c.model != "legendre" || !c.legendre.empty(), "angular.legendre coefficients required for model = legendre");
  need(c.model != "tabulated" || !c.surface_file.empty(), "angular.surface_file required for model = tabulated");
  for (int m : c.mu_set) need(m == 0 || m == 3 || m == -3 || m == 6 || m == -6, "angular.mu_set must be a subset of {0, +-3, +-6}");
  need(c.mu_set.count(0) == 1, "angular.mu_set must contain 0");
  need(!c.J.empty(), "truncation.J must list at least one J");
  for (int j : c.J) need(j >= 0, "truncation.J values must be nonnegative");
  need(c.j_max >= 0 && c.l_max >= 0 && c.k_max >= 0, "truncation limits must be nonnegative");
  need(c.n_states >= 1 && c.report_states >= 1, "truncation.n_states and report_states must be >= 1");
  need(c.residual_tol > 0, "solver.residual_tol must be positive");
  need(c.band_tol >= 0, "solver.band_tol must be nonnegative");
  need(c.lanczos_block >= 1 && c.max_restarts >= 1, "solver.lanczos_block and max_restarts must be >= 1");
  need(c.threads >= 1, "solver.threads must be >= 1");
  need(c.density_points >= 2, "output.density_points must be >= 2");
  need(c.target_omega_perp_cm > 0, "calibrate.target_omega_perp_cm must be positive");
  need(c.calibrate_tol_cm > 0 && c.calibrate_max_iter >= 1, "calibrate tolerance and iterations must be positive");
  for (const auto& p : c.properties) {
    need(!p.file.empty(), "property." + p.name + ": file is required");
    need(std::filesystem::exists(p.file), "property." + p.name + ": file not found: " + p.file);
  }
  if (c.model == "tabulated") need(std::filesystem::exists(c.surface_file), "surface file not found: " + c.surface_file);
}

/// Parses INI text; `base_dir` resolves relative file paths.
inline RunConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {}) {
  boost::property_tree::ptree pt;
  try {
    boost::property_tree::ini_parser::read_ini(in, pt);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  auto path = [&](const std::string& v) {
    std::filesystem::path p(v);
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    return p.lexically_normal().string();
  };
  RunConfig c;
  for (const auto& [section, body] : pt) {
    if (section == "results") continue;
    if (!body.data().empty()) throw ConfigError("key '" + section + "' outside of a section");
    const bool is_prop = section.rfind("property.", 0) == 0;
    PropertySpec prop{is_prop ? section.substr(9) : ""};
    for (const auto& [key, node] : body) {
      const std::string v = detail::trim(node.data());
      const std::string k = section + "." + key;
      using namespace detail;
      if (section == "molecule") {
        if (key == "r_eq") c.r_eq = to_double(k, v);
        else if (key == "reduced_mass") c.reduced_mass = to_double(k, v);
        else if (key == "r_oc") c.geometry.r_oc = to_double(k, v);
        else if (key == "r_ch") c.geometry.r_ch = to_double(k, v);
        else if (key == "angle_och_deg") c.geometry.angle_och_deg = to_double(k, v);
        else if (key == "h_rotation_deg") c.geometry.h_rotation_deg = to_double(k, v);
        else if (key == "mass_heavy") c.masses.heavy = to_double(k, v);
        else if (key == "mass_oxygen") c.masses.oxygen = to_double(k, v);
        else if (key == "mass_carbon") c.masses.carbon = to_double(k, v);
        else if (key == "mass_hydrogen") c.masses.hydrogen = to_double(k, v);
        else throw ConfigError("unknown key '" + k + "'");
      } else if (section == "radial") {
        if (key == "omega_cm") c.omega_cm = to_double(k, v);
        else if (key == "n_basis") c.n_basis = int(to_int(k, v));
        else if (key == "centrifugal") {
          try {
            c.centrifugal = parse_centrifugal_mode(v);
          } catch (const std::exception& e) {
            throw ConfigError("'" + k + "': " + e.what());
          }
        } else throw ConfigError("unknown key '" + k + "'");
      } else if (section == "angular") {
        if (key == "model") c.model = v;
        else if (key == "bend_kb") c.bend_kb = to_double(k, v);
        else if (key == "legendre") {
          c.legendre.clear();
          for (const auto& t : split_list(v)) c.legendre.push_back(to_double(k, t));
        } else if (key == "surface_file") c.surface_file = path(v);
        else if (key == "lambda_max") c.lambda_max = int(to_int(k, v));
        else if (key == "mu_set") {
          const auto m = to_ints(k, v);
          c.mu_set = std::set<int>(m.begin(), m.end());
        } else if (key == "reconstruction_tolerance") c.reconstruction_tolerance = to_double(k, v);
        else throw ConfigError("unknown key '" + k + "'");
      } else if (section == "truncation") {
        if (key == "J") c.J = to_ints(k, v);
        else if (key == "j_max") c.j_max = int(to_int(k, v));
        else if (key == "l_max") c.l_max = int(to_int(k, v));
        else if (key == "k_max") c.k_max = int(to_int(k, v));
        else if (key == "n_states") c.n_states = int(to_int(k, v));
        else if (key == "report_states") c.report_states = int(to_int(k, v));
        else throw ConfigError("unknown key '" + k + "'");
      } else if (section == "solver") {
        if (key == "dense_limit") c.dense_limit = std::size_t(to_int(k, v));
        else if (key == "max_dimension") c.max_dimension = std::size_t(to_int(k, v));
        else if (key == "residual_tol") c.residual_tol = to_double(k, v);
        else if (key == "band_tol") c.band_tol = to_double(k, v);
        else if (key == "lanczos_block") c.lanczos_block = int(to_int(k, v));
        else if (key == "max_restarts") c.max_restarts = int(to_int(k, v));
        else if (key == "threads") c.threads = int(to_int(k, v));
        else throw ConfigError("unknown key '" + k + "'");
      } else if (section == "properties") {
        if (key == "lambda_max") c.property_lambda_max = int(to_int(k, v));
        else throw ConfigError("unknown key '" + k + "'");
      } else if (is_prop) {
        if (key == "file") prop.file = path(v);
        else if (key == "units") prop.units = v;
        else throw ConfigError("unknown key '" + k + "'");
      } else if (section == "output") {
        if (key == "density_points") c.density_points = int(to_int(k, v));
        else if (key == "densities") c.densities = to_bool(k, v);
        else if (key == "dump_matrix") c.dump_matrix = to_bool(k, v);
        else throw ConfigError("unknown key '" + k + "'");
      } else if (section == "converge") {
        if (key == "j_values") c.sweep_j = to_ints(k, v);
        else if (key == "lambda_values") c.sweep_lambda = to_ints(k, v);
        else if (key == "n_basis_values") c.sweep_n_basis = to_ints(k, v);
        else if (key == "threshold") c.converge_threshold = to_double(k, v);
        else throw ConfigError("unknown key '" + k + "'");
      } else if (section == "calibrate") {
        if (key == "target_omega_perp_cm") c.target_omega_perp_cm = to_double(k, v);
        else if (key == "tolerance_cm") c.calibrate_tol_cm = to_double(k, v);
        else if (key == "max_iterations") c.calibrate_max_iter = int(to_int(k, v));
        else throw ConfigError("unknown key '" + k + "'");
      } else {
        throw ConfigError("unknown section [" + section + "]");
      }
    }
    if (is_prop) {
      if (prop.name.empty()) throw ConfigError("property section needs a name: [property.<name>]");
      c.properties.push_back(prop);
    }
  }
  validate(c);
  return c;
}

inline RunConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open config file: " + file.string());
  return parse_config(in, std::filesystem::absolute(file).parent_path());
}

/// Every parameter, fully resolved. Paths are written absolute.
inline void write_config(std::ostream& os, const RunConfig& c) {
  using detail::join;
  using detail::num;
  auto abs = [](const std::string& p) { return p.empty() ? p : std::filesystem::absolute(p).lexically_normal().string(); };
  os << "[molecule]\n"
     << "r_eq = " << num(c.r_eq) << "\n"
     << "reduced_mass = " << num(c.reduced_mass) << "\n"
     << "r_oc = " << num(c.geometry.r_oc) << "\n"
     << "r_ch = " << num(c.geometry.r_ch) << "\n"
     << "angle_och_deg = " << num(c.geometry.angle_och_deg) << "\n"
     << "h_rotation_deg = " << num(c.geometry.h_rotation_deg) << "\n"
     << "mass_heavy = " << num(c.masses.heavy) << "\n"
     << "mass_oxygen = " << num(c.masses.oxygen) << "\n"
     << "mass_carbon = " << num(c.masses.carbon) << "\n"
     << "mass_hydrogen = " << num(c.masses.hydrogen) << "\n\n";
  os << "[radial]\n"
     << "omega_cm = " << num(c.omega_cm) << "\n"
     << "n_basis = " << c.n_basis << "\n"
     << "centrifugal = " << to_string(c.centrifugal) << "\n\n";
  os << "[angular]\n"
     << "model = " << c.model << "\n"
     << "bend_kb = " << num(c.bend_kb) << "\n";
  if (!c.legendre.empty()) os << "legendre = " << join(c.legendre) << "\n";
  if (!c.surface_file.empty()) os << "surface_file = " << abs(c.surface_file) << "\n";
  os << "lambda_max = " << c.lambda_max << "\n"
     << "mu_set = " << join(std::vector<int>(c.mu_set.begin(), c.mu_set.end())) << "\n"
     << "reconstruction_tolerance = " << num(c.reconstruction_tolerance) << "\n\n";
  os << "[truncation]\n"
     << "J = " << join(c.J) << "\n"
     << "j_max = " << c.j_max << "\n"
     << "l_max = " << c.l_max << "\n"
     << "k_max = " << c.k_max << "\n"
     << "n_states = " << c.n_states << "\n"
     << "report_states = " << c.report_states << "\n\n";
  os << "[solver]\n"
     << "dense_limit = " << c.dense_limit << "\n"
     << "max_dimension = " << c.max_dimension << "\n"
     << "residual_tol = " << num(c.residual_tol) << "\n"
     << "band_tol = " << num(c.band_tol) << "\n"
     << "lanczos_block = " << c.lanczos_block << "\n"
     << "max_restarts = " << c.max_restarts << "\n"
     << "threads = " << c.threads << "\n\n";
  os << "[properties]\n"
     << "lambda_max = " << c.property_lambda_max << "\n\n";
  for (const auto& p : c.properties) {
    os << "[property." << p.name << "]\n"
       << "file = " << abs(p.file) << "\n"
       << "units = " << p.units << "\n\n";
  }
  os << "[output]\n"
     << "density_points = " << c.density_points << "\n"
     << "densities = " << (c.densities ? "true" : "false") << "\n"
     << "dump_matrix = " << (c.dump_matrix ? "true" : "false") << "\n\n";
  os << "[converge]\n";
  if (!c.sweep_j.empty()) os << "j_values = " << join(c.sweep_j) << "\n";
  if (!c.sweep_lambda.empty()) os << "lambda_values = " << join(c.sweep_lambda) << "\n";
  if (!c.sweep_n_basis.empty()) os << "n_basis_values = " << join(c.sweep_n_basis) << "\n";
  os << "threshold = " << num(c.converge_threshold) << "\n\n";
  os << "[calibrate]\n"
     << "target_omega_perp_cm = " << num(c.target_omega_perp_cm) << "\n"
     << "tolerance_cm = " << num(c.calibrate_tol_cm) << "\n"
     << "max_iterations = " << c.calibrate_max_iter << "\n";
}

}  // namespace rovib
