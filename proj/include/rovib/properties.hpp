#pragma once

// Expectation values of property surfaces over rovibrational states and
// the theta marginal density.

#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "rovib/eigensolver.hpp"
#include "rovib/hamiltonian.hpp"
#include "rovib/potential.hpp"
#include "rovib/units.hpp"

namespace rovib {

struct PropertyExpectation {
  std::string state_id;
  std::string name;
  std::string units;
  double value = 0.0;
  double e0 = 0.0, e1 = 0.0, e2 = 0.0;  // cos(0), cos(3 phi), cos(6 phi) parts
  double tail = 0.0;
};

/// D(i, i') = sum_a F(i,a) F(i',a)
inline Eigen::MatrixXd channel_density(const RovibState& s) {
  const auto nc = Eigen::Index(s.channels.size());
  const Eigen::Map<const Eigen::MatrixXd> f(s.F.data(), s.n_basis, nc);
  return f.transpose() * f;
}

/// Expectation value of an angular operator given by its (lambda, mu)
/// expansion, restricted to the state's block.
inline double operator_average(const RovibState& s, const ChannelSpace& space, const PotentialExpansion& op) {
  if (op.terms.empty()) return 0.0;
  const Eigen::MatrixXd w = angular_matrix(space, s.channels, op);
  return (w.array() * channel_density(s).array()).sum();
}

inline PropertyExpectation average(const RovibState& s, const ChannelSpace& space, const PropertySurface& surface) {
  const PotentialExpansion full = surface.expansion();
  PotentialExpansion parts[3];
  for (auto& p : parts) {
    p.lambda_max = full.lambda_max;
    p.mu_set = full.mu_set;
  }
  for (const auto& [key, v] : full.terms) parts[std::abs(key.second) / 3].terms[key] = v;
  PropertyExpectation r{s.id(), surface.name, surface.units};
  r.e0 = operator_average(s, space, parts[0]);
  r.e1 = operator_average(s, space, parts[1]);
  r.e2 = operator_average(s, space, parts[2]);
  r.value = r.e0 + r.e1 + r.e2;
  r.tail = surface.tail();
  return r;
}

/// <P_lambda(cos theta)> for lambda = 0..lambda_max.
inline std::vector<double> legendre_moments(const RovibState& s, const ChannelSpace& space, int lambda_max) {
  const Eigen::MatrixXd d = channel_density(s);
  std::vector<double> m(lambda_max + 1, 0.0);
  for (int lam = 0; lam <= lambda_max; ++lam) {
    PotentialExpansion p;
    p.lambda_max = lam;
    p.terms[{lam, 0}] = std::sqrt(4.0 * kPi / (2.0 * lam + 1.0));
    m[lam] = (angular_matrix(space, s.channels, p).array() * d.array()).sum();
  }
  return m;
}

struct ThetaDensity {
  std::vector<double> moments;  // <P_lambda>
  std::vector<double> theta_deg;
  std::vector<double> rho;
  double min_rho = 0.0;
  bool negative = false;

  /// rho(theta), normalized so that int rho sin(theta) dtheta = 1.
  double operator()(double theta) const {
    const auto p = angular::legendre_all(int(moments.size()) - 1, std::cos(theta));
    double r = 0.0;
    for (std::size_t l = 0; l < moments.size(); ++l) r += 0.5 * (2.0 * l + 1.0) * moments[l] * p[l];
    return r;
  }
};

/// Default expansion order of the density: moments above 2 min(j_max, l_max)
/// vanish identically.
inline int density_lambda_max(const ChannelSpace& space) { return 2 * std::min(space.j_max, space.l_max); }

inline ThetaDensity theta_density(const RovibState& s, const ChannelSpace& space, const std::vector<double>& theta_deg,
                                  int lambda_max = -1) {
  if (lambda_max < 0) lambda_max = density_lambda_max(space);
  ThetaDensity d;
  d.moments = legendre_moments(s, space, lambda_max);
  d.theta_deg = theta_deg;
  d.min_rho = std::numeric_limits<double>::infinity();
  for (double t : theta_deg) {
    if (t < 0.0 || t > 180.0) throw std::invalid_argument("theta_density: grid must lie in [0, 180] degrees");
    d.rho.push_back(d(deg2rad(t)));
    d.min_rho = std::min(d.min_rho, d.rho.back());
  }
  d.negative = d.min_rho < -1e-6;
  return d;
}

inline std::vector<double> uniform_theta_grid(int points) {
  std::vector<double> g(points);
  for (int i = 0; i < points; ++i) g[i] = 180.0 * i / (points - 1);
  return g;
}

/// int rho(theta) f(theta) sin(theta) dtheta on the given theta rule.
inline double integrate_density(const ThetaDensity& d, const std::function<double(double)>& f, const quad::Rule& rule) {
  double s = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double th = rule.nodes[i];
    s += rule.weights[i] * std::sin(th) * d(th) * f(th);
  }
  return s;
}

/// Gauss-Legendre in theta; pass the surface's theta_quadrature() instead
/// for sampled surfaces.
inline double integrate_density(const ThetaDensity& d, const std::function<double(double)>& f, int nodes = 0) {
  return integrate_density(d, f, theta_rule(std::max(nodes, default_theta_nodes(int(d.moments.size()) - 1))));
}

// ---- report -----------------------------------------------------------

struct ReportRow {
  int J = 0;
  int v_par = 0, v_perp = 0;
  std::string l, K;  // may carry +- / -+ for merged partners
  double energy = 0.0;        // hartree
  double ratio = 0.0;         // (E - E0) / omega_perp
  double vib_ratio = 0.0;     // (E - E0 - (A-B) k^2) / omega_perp
  std::vector<double> values;  // one per surface
  double weight = 0.0;         // smallest dominant weight
  bool mixed = false;
  std::vector<std::string> ids;
};

struct ReportContext {
  double e0 = 0.0;          // reference energy
  double omega_perp = 0.0;  // hartree
  double a_minus_b = 0.0;   // hartree
};

/// Rotor-free excitation used for calibration: E - E0 - (A-B) k^2.
inline double vibrational_excitation(const RovibState& s, double e0, double a_minus_b) {
  return s.energy - e0 - a_minus_b * s.labels.k * s.labels.k;
}

/// E(lowest J=0 state with |k| = 1) minus the rotor term, relative to E0.
inline double bending_frequency(const std::vector<RovibState>& j0, double e0, double a_minus_b) {
  for (const auto& s : j0)
    if (std::abs(s.labels.k) == 1) return vibrational_excitation(s, e0, a_minus_b);
  throw NumericalError("no |k| = 1 state among the computed J = 0 levels; raise n_states");
}

/// Rows in energy order. States that are degenerate within `tol` and share
/// (J, v_par, v_perp, |l|, |K|, sign(l K)) are merged into one +-/-+ row.
inline std::vector<ReportRow> table_report(const std::vector<RovibState>& states, const ChannelSpace& space,
                                           const std::vector<PropertySurface>& surfaces, const ReportContext& ctx,
                                           double tol = 1e-8) {
  std::vector<ReportRow> rows;
  std::vector<bool> used(states.size(), false);
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (used[i]) continue;
    const auto& s = states[i];
    const auto& L = s.labels;
    const auto key = [](const StateLabels& x) {
      const int sg = (x.l_vib == 0 || x.K == 0) ? 0 : ((x.l_vib > 0) == (x.K > 0) ? 1 : -1);
      return std::make_tuple(x.v_par, x.v_perp, std::abs(x.l_vib), std::abs(x.K), sg);
    };
    std::vector<std::size_t> group{i};
    for (std::size_t k = i + 1; k < states.size(); ++k) {
      if (used[k] || states[k].J != s.J) continue;
      if (std::abs(states[k].energy - s.energy) > tol) continue;
      if (key(states[k].labels) != key(L)) continue;
      if (states[k].labels.l_vib == L.l_vib && states[k].labels.K == L.K) continue;
      group.push_back(k);
      break;
    }
    for (auto g : group) used[g] = true;
    ReportRow r;
    r.J = s.J;
    r.v_par = L.v_par;
    r.v_perp = L.v_perp;
    const bool pm = group.size() > 1 || L.K_pm;
    const int sg = std::get<4>(key(L));
    if (pm) {
      r.l = L.l_vib == 0 ? "0" : "+-" + std::to_string(std::abs(L.l_vib));
      if (L.K == 0) r.K = "0";
      else if (L.l_vib == 0 || sg > 0 || L.K_pm) r.K = "+-" + std::to_string(std::abs(L.K));
      else r.K = "-+" + std::to_string(std::abs(L.K));
    } else {
      r.l = std::to_string(L.l_vib);
      r.K = std::to_string(L.K);
    }
    r.energy = s.energy;
    r.ratio = (s.energy - ctx.e0) / ctx.omega_perp;
    r.vib_ratio = vibrational_excitation(s, ctx.e0, ctx.a_minus_b) / ctx.omega_perp;
    for (const auto& surf : surfaces) r.values.push_back(average(s, space, surf).value);
    r.weight = std::min({L.weight_k, L.weight_K, L.weight_a});
    r.mixed = L.mixed;
    for (auto g : group) {
      r.mixed = r.mixed || states[g].labels.mixed;
      r.ids.push_back(states[g].id());
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

/// Fixed-format number with 12 significant digits.
inline std::string fmt12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline void write_report_csv(std::ostream& os, const std::vector<ReportRow>& rows,
                             const std::vector<PropertySurface>& surfaces) {
  os << "J,v_par,v_perp,l,K,energy_hartree,energy_cm-1,ratio_E-E0_over_omega_perp,vib_ratio";
  for (const auto& s : surfaces) os << ',' << s.name << '_' << (s.units.empty() ? "au" : s.units);
  os << ",dominant_weight,mixed,states\n";
  for (const auto& r : rows) {
    os << r.J << ',' << r.v_par << ',' << r.v_perp << ',' << r.l << ',' << r.K << ',' << fmt12(r.energy) << ','
       << fmt12(units::hartree_to_wavenumber(r.energy)) << ',' << fmt12(r.ratio) << ',' << fmt12(r.vib_ratio);
    for (double v : r.values) os << ',' << fmt12(v);
    os << ',' << fmt12(r.weight) << ',' << (r.mixed ? "mixed" : "") << ',';
    for (std::size_t i = 0; i < r.ids.size(); ++i) os << (i ? ";" : "") << r.ids[i];
    os << '\n';
  }
}

inline void write_density_csv(std::ostream& os, const ThetaDensity& d) {
  os << "theta_deg,rho\n";
  for (std::size_t i = 0; i < d.rho.size(); ++i) os << fmt12(d.theta_deg[i]) << ',' << fmt12(d.rho[i]) << '\n';
}

}  // namespace rovib
