#pragma once

// Command implementations behind the CLI: solve, converge, calibrate,
// expand. Each writes its files into an output directory plus a run_meta
// that loads back as a config.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rovib/config.hpp"
#include "rovib/eigensolver.hpp"
#include "rovib/hamiltonian.hpp"
#include "rovib/molecule.hpp"
#include "rovib/potential.hpp"
#include "rovib/properties.hpp"
#include "rovib/radial.hpp"
#include "rovib/units.hpp"

namespace rovib {

inline MoleculeSpec make_molecule(const RunConfig& c) {
  MoleculeSpec m = build_ligand(c.geometry, c.masses, c.r_eq);
  if (c.reduced_mass > 0.0) m.reduced_mass = c.reduced_mass;
  return m;
}

/// B + 1 / (2 mu R_eq^2): rotational constant of the bending motion.
inline double effective_bend_constant(const MoleculeSpec& m) {
  return m.B + 1.0 / (2.0 * m.reduced_mass * m.r_eq * m.r_eq);
}

/// k_b with sqrt(2 B_eff k_b) = omega.
inline double harmonic_force_constant(double omega, const MoleculeSpec& m) {
  return omega * omega / (2.0 * effective_bend_constant(m));
}

inline double resolved_kb(const RunConfig& c, const MoleculeSpec& m) {
  if (c.bend_kb > 0.0) return c.bend_kb;
  return harmonic_force_constant(units::wavenumber_to_hartree(c.target_omega_perp_cm), m);
}

inline PotentialExpansion make_potential(const RunConfig& c, const MoleculeSpec& m, int lambda_max) {
  if (c.model == "harmonic_bend") {
    return expand_angular(AngularSurface::harmonic_bend(resolved_kb(c, m)), lambda_max, c.mu_set,
                          c.reconstruction_tolerance);
  }
  if (c.model == "legendre") {
    return expand_angular(AngularSurface::from_legendre(LegendreSeries{c.legendre}), lambda_max, c.mu_set,
                          c.reconstruction_tolerance);
  }
  return expand_angular(AngularSurface::tabulated(TabulatedSurface::read(c.surface_file)), lambda_max, c.mu_set,
                        c.reconstruction_tolerance);
}

inline std::vector<PropertySurface> make_properties(const RunConfig& c) {
  std::vector<PropertySurface> out;
  for (const auto& p : c.properties)
    out.push_back(read_property_file(p.file, p.name, p.units, c.resolved_property_lambda_max()));
  return out;
}

struct Truncation {
  int j_max, l_max, k_max, n_basis, lambda_max;
};

inline Truncation truncation_of(const RunConfig& c) {
  return {c.j_max, c.l_max, c.k_max, c.n_basis, c.resolved_lambda_max()};
}

struct Spectrum {
  CoupledHamiltonian h;
  std::vector<RovibState> states;
  double seconds = 0.0;
};

inline HamiltonianOptions hamiltonian_options(const RunConfig& c) {
  HamiltonianOptions o;
  o.centrifugal = c.centrifugal;
  o.dense_limit = c.dense_limit;
  o.max_dimension = c.max_dimension;
  o.threads = c.threads;
  return o;
}

inline SolverOptions solver_options(const RunConfig& c) {
  SolverOptions o;
  o.threads = c.threads;
  o.residual_tol = c.residual_tol;
  o.band_tol = c.band_tol;
  o.lanczos.block = c.lanczos_block;
  o.lanczos.max_restarts = c.max_restarts;
  return o;
}

inline Spectrum solve_spectrum(const RunConfig& c, const MoleculeSpec& m, const PotentialExpansion& v, int J,
                               const Truncation& t) {
  const auto t0 = std::chrono::steady_clock::now();
  RadialBasis basis(m.reduced_mass, units::wavenumber_to_hartree(c.omega_cm), m.r_eq, t.n_basis);
  auto h = assemble(enumerate_channels(J, t.j_max, t.l_max, t.k_max), basis, {m.A, m.B}, v, hamiltonian_options(c));
  auto states = solve_lowest(h, c.n_states, solver_options(c));
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {std::move(h), std::move(states), s};
}

/// omega_perp from the J=0 spectrum: lowest |k| = 1 level minus the rotor
/// term, relative to the ground state.
inline double measure_omega_perp(const RunConfig& c, const MoleculeSpec& m, const PotentialExpansion& v,
                                 Truncation t, double* e0 = nullptr) {
  // with mu = 0 only, the k = 0, +-1 blocks do not see the others
  if (c.mu_set == std::set<int>{0}) t.k_max = std::min(t.k_max, 1);
  const auto sp = solve_spectrum(c, m, v, 0, t);
  if (e0) *e0 = sp.states.front().energy;
  return bending_frequency(sp.states, sp.states.front().energy, m.A - m.B);
}

// ---- outputs --------------------------------------------------------

inline std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream f(p);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  return f;
}

class RunMeta {
 public:
  void add(const std::string& key, const std::string& value) { entries_.emplace_back(key, value); }
  void add(const std::string& key, double value) { add(key, detail::num(value)); }

  void write(const std::filesystem::path& file, const RunConfig& c) const {
    auto f = open_out(file);
    write_config(f, c);
    f << "\n[results]\n";
    for (const auto& [k, v] : entries_) f << k << " = " << v << "\n";
  }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

inline void note_expansion(RunMeta& meta, const std::string& prefix, const PotentialExpansion& v) {
  meta.add(prefix + "_reconstruction_error", v.reconstruction_error);
  meta.add(prefix + "_discarded", v.discarded);
}

struct SolveSummary {
  std::vector<ReportRow> rows;
  double e0 = 0.0;
  double omega_perp = 0.0;  // hartree
  double bend_kb = 0.0;
};

inline SolveSummary cmd_solve(RunConfig c, const std::filesystem::path& out) {
  const auto wall = std::chrono::steady_clock::now();
  std::filesystem::create_directories(out);
  const MoleculeSpec m = make_molecule(c);
  if (c.model == "harmonic_bend") c.bend_kb = resolved_kb(c, m);
  const auto t = truncation_of(c);
  const auto v = make_potential(c, m, t.lambda_max);
  const auto props = make_properties(c);
  RunMeta meta;
  note_expansion(meta, "potential", v);
  for (const auto& p : props) {
    meta.add("property_" + p.name + "_tail", p.tail());
    if (p.tail() > 1e-6 * std::max(1.0, std::abs(p.c0.c[0])))
      std::cerr << "warning: property " << p.name << " Legendre tail " << p.tail() << " at lambda_max "
                << p.lambda_max << "\n";
  }

  std::vector<int> js = c.J;
  std::map<int, Spectrum> spectra;
  for (int J : js) spectra.emplace(J, solve_spectrum(c, m, v, J, t));
  if (!spectra.count(0)) spectra.emplace(0, solve_spectrum(c, m, v, 0, t));

  SolveSummary sum;
  sum.bend_kb = c.bend_kb;
  const auto& ground = spectra.at(0).states;
  sum.e0 = ground.front().energy;
  sum.omega_perp = bending_frequency(ground, sum.e0, m.A - m.B);
  const ReportContext ctx{sum.e0, sum.omega_perp, m.A - m.B};
  meta.add("E0_hartree", sum.e0);
  meta.add("omega_perp_cm", units::hartree_to_wavenumber(sum.omega_perp));
  meta.add("A_cm", units::hartree_to_wavenumber(m.A));
  meta.add("B_cm", units::hartree_to_wavenumber(m.B));
  meta.add("reduced_mass_me", m.reduced_mass);

  const auto grid = uniform_theta_grid(c.density_points);
  for (int J : js) {
    const auto& sp = spectra.at(J);
    std::vector<RovibState> shown(sp.states.begin(),
                                  sp.states.begin() + std::min<std::size_t>(c.report_states, sp.states.size()));
    auto rows = table_report(shown, sp.h.space, props, ctx);
    sum.rows.insert(sum.rows.end(), rows.begin(), rows.end());
    double worst = 0.0;
    for (const auto& s : sp.states) worst = std::max(worst, s.residual);
    const std::string p = "J" + std::to_string(J) + "_";
    meta.add(p + "dimension", std::to_string(sp.h.dim()));
    meta.add(p + "blocks", std::to_string(sp.h.blocks.size()));
    meta.add(p + "max_residual", worst);
    meta.add(p + "seconds", sp.seconds);
    if (c.densities) {
      for (const auto& s : shown) {
        const auto d = theta_density(s, sp.h.space, grid);
        if (d.negative) {
          std::cerr << "warning: density of " << s.id() << " dips to " << d.min_rho
                    << "; raise j_max/l_max for a smoother profile\n";
          meta.add("density_" + s.id() + "_min", d.min_rho);
        }
        auto f = open_out(out / ("density_" + s.id() + ".csv"));
        write_density_csv(f, d);
      }
    }
    if (c.dump_matrix) {
      auto f = open_out(out / ("matrix_J" + std::to_string(J) + ".txt"));
      sp.h.dump_triplets(f);
    }
  }
  {
    auto f = open_out(out / "states.csv");
    write_report_csv(f, sum.rows, props);
  }
  meta.add("wall_seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - wall).count());
  meta.write(out / "run_meta", c);
  return sum;
}

// ---- converge -------------------------------------------------------

struct ConvergeRow {
  std::string axis;
  Truncation t;
  std::vector<double> levels;
  double change = 0.0;  // max |dE| against the previous row on the same axis
  bool flagged = false;
};

inline std::vector<double> lowest_levels(const std::vector<RovibState>& s, std::size_t n) {
  std::vector<double> e;
  for (std::size_t i = 0; i < std::min(n, s.size()); ++i) e.push_back(s[i].energy);
  return e;
}

inline std::vector<ConvergeRow> cmd_converge(RunConfig c, const std::filesystem::path& out) {
  std::filesystem::create_directories(out);
  const MoleculeSpec m = make_molecule(c);
  if (c.model == "harmonic_bend") c.bend_kb = resolved_kb(c, m);
  const Truncation base = truncation_of(c);
  const int J = c.J.front();
  std::vector<int> sj = c.sweep_j;
  if (sj.empty() && c.sweep_lambda.empty() && c.sweep_n_basis.empty()) sj = {std::max(0, c.j_max - 2), c.j_max};

  std::vector<ConvergeRow> rows;
  RunMeta meta;
  auto run_axis = [&](const std::string& axis, const std::vector<int>& values) {
    std::vector<double> prev;
    for (std::size_t i = 0; i < values.size(); ++i) {
      Truncation t = base;
      if (axis == "j_max=l_max") {
        t.j_max = t.l_max = values[i];
        if (c.lambda_max < 0) t.lambda_max = 2 * values[i];
      } else if (axis == "lambda_max") {
        t.lambda_max = values[i];
      } else {
        t.n_basis = values[i];
      }
      const auto v = make_potential(c, m, t.lambda_max);
      const auto sp = solve_spectrum(c, m, v, J, t);
      ConvergeRow r{axis, t, lowest_levels(sp.states, 10)};
      if (!prev.empty()) {
        for (std::size_t k = 0; k < std::min(prev.size(), r.levels.size()); ++k)
          r.change = std::max(r.change, std::abs(r.levels[k] - prev[k]));
        if (i + 1 == values.size() && r.change > c.converge_threshold) {
          r.flagged = true;
          std::cerr << "warning: " << axis << " final step changes levels by " << r.change << " hartree (threshold "
                    << c.converge_threshold << ")\n";
        }
      }
      prev = r.levels;
      rows.push_back(std::move(r));
    }
  };
  if (!sj.empty()) run_axis("j_max=l_max", sj);
  if (!c.sweep_lambda.empty()) run_axis("lambda_max", c.sweep_lambda);
  if (!c.sweep_n_basis.empty()) run_axis("n_basis", c.sweep_n_basis);

  auto f = open_out(out / "converge.csv");
  f << "axis,J,j_max,l_max,k_max,lambda_max,n_basis";
  for (int i = 0; i < 10; ++i) f << ",E" << i << "_hartree";
  f << ",max_change_hartree,flagged\n";
  for (const auto& r : rows) {
    f << r.axis << ',' << J << ',' << r.t.j_max << ',' << r.t.l_max << ',' << r.t.k_max << ',' << r.t.lambda_max << ','
      << r.t.n_basis;
    for (int i = 0; i < 10; ++i) f << ',' << (i < int(r.levels.size()) ? fmt12(r.levels[i]) : "");
    f << ',' << fmt12(r.change) << ',' << (r.flagged ? "flagged" : "") << '\n';
  }
  meta.write(out / "run_meta", c);
  return rows;
}

// ---- calibrate ------------------------------------------------------

struct CalibrationStep {
  double kb;
  double omega;  // hartree
};

struct Calibration {
  double kb = 0.0;
  std::vector<CalibrationStep> steps;
  int iterations = 0;  // evaluations beyond the starting point
};

/// Secant iteration on k_b until the computed bending frequency matches
/// the target within the tolerance.
inline Calibration calibrate_bend(const RunConfig& c) {
  if (c.model != "harmonic_bend") throw ConfigError("calibrate requires angular.model = harmonic_bend");
  const MoleculeSpec m = make_molecule(c);
  const Truncation t = truncation_of(c);
  const double target = units::wavenumber_to_hartree(c.target_omega_perp_cm);
  const double tol = units::wavenumber_to_hartree(c.calibrate_tol_cm);
  auto omega_at = [&](double kb) {
    RunConfig cc = c;
    cc.bend_kb = kb;
    return measure_omega_perp(cc, m, make_potential(cc, m, t.lambda_max), t);
  };
  Calibration cal;
  double k0 = resolved_kb(c, m);
  double w0 = omega_at(k0);
  cal.steps.push_back({k0, w0});
  if (std::abs(w0 - target) <= tol) {
    cal.kb = k0;
    return cal;
  }
  // harmonic scaling omega ~ sqrt(k_b) for the second point
  double k1 = k0 * (target / w0) * (target / w0);
  for (int it = 0; it < c.calibrate_max_iter; ++it) {
    if (!(k1 > 0.0) || !std::isfinite(k1)) {
      throw NumericalError("calibration left the physical range (k_b = " + std::to_string(k1) +
                           "); set angular.bend_kb closer to the expected force constant");
    }
    const double w1 = omega_at(k1);
    cal.steps.push_back({k1, w1});
    ++cal.iterations;
    if (std::abs(w1 - target) <= tol) {
      cal.kb = k1;
      return cal;
    }
    if (w1 == w0) throw NumericalError("calibration stalled: bending frequency does not respond to k_b");
    const double k2 = k1 - (w1 - target) * (k1 - k0) / (w1 - w0);
    k0 = k1;
    w0 = w1;
    k1 = k2;
  }
  throw NumericalError("calibration did not reach " + std::to_string(c.calibrate_tol_cm) + " cm-1 in " +
                       std::to_string(c.calibrate_max_iter) + " iterations; last omega_perp " +
                       std::to_string(units::hartree_to_wavenumber(w0)) + " cm-1");
}

inline Calibration cmd_calibrate(RunConfig c, const std::filesystem::path& out) {
  std::filesystem::create_directories(out);
  const Calibration cal = calibrate_bend(c);
  {
    auto f = open_out(out / "calibration.csv");
    f << "step,bend_kb_hartree_per_rad2,omega_perp_cm-1\n";
    for (std::size_t i = 0; i < cal.steps.size(); ++i)
      f << i << ',' << fmt12(cal.steps[i].kb) << ',' << fmt12(units::hartree_to_wavenumber(cal.steps[i].omega))
        << '\n';
  }
  c.bend_kb = cal.kb;
  {
    auto f = open_out(out / "calibrated.ini");
    write_config(f, c);
  }
  RunMeta meta;
  meta.add("calibrated_bend_kb", cal.kb);
  meta.add("omega_perp_cm", units::hartree_to_wavenumber(cal.steps.back().omega));
  meta.add("iterations", std::to_string(cal.iterations));
  meta.write(out / "run_meta", c);
  return cal;
}

// ---- expand ---------------------------------------------------------

inline PotentialExpansion cmd_expand(RunConfig c, const std::filesystem::path& out) {
  std::filesystem::create_directories(out);
  const MoleculeSpec m = make_molecule(c);
  if (c.model == "harmonic_bend") c.bend_kb = resolved_kb(c, m);
  const auto v = make_potential(c, m, c.resolved_lambda_max());
  {
    auto f = open_out(out / "expansion.csv");
    f << "lambda,mu,value_hartree\n";
    for (const auto& [key, val] : v.terms) f << key.first << ',' << key.second << ',' << fmt12(val) << '\n';
  }
  RunMeta meta;
  note_expansion(meta, "potential", v);
  for (const auto& p : make_properties(c)) {
    auto f = open_out(out / ("expansion_" + p.name + ".csv"));
    f << "lambda,mu,value_" << (p.units.empty() ? "au" : p.units) << '\n';
    for (const auto& [key, val] : p.expansion().terms) f << key.first << ',' << key.second << ',' << fmt12(val) << '\n';
    meta.add("property_" + p.name + "_tail", p.tail());
  }
  meta.write(out / "run_meta", c);
  return v;
}

}  // namespace rovib
