#pragma once

// Angular potential models, their Y_lm expansion V_lm, and property
// surfaces E(theta, phi) = E0(theta) + E1(theta) cos 3phi + E2(theta) cos 6phi.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <numbers>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/interpolators/makima.hpp>

#include "rovib/angular.hpp"
#include "rovib/quadrature.hpp"
#include "rovib/table_io.hpp"

namespace rovib {

struct ExpansionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr double kPi = std::numbers::pi;
inline double deg2rad(double d) { return d * kPi / 180.0; }

/// Gauss-Legendre nodes in theta on [0, pi]. Integrands are smooth in theta
/// even when they are not smooth in cos(theta) (theta^2 at theta = pi).
inline int default_theta_nodes(int lambda_max) { return 2 * lambda_max + 64; }

inline quad::Rule theta_rule(int nodes) { return quad::gauss_legendre(nodes, 0.0, kPi); }

/// f(theta) = sum_l c_l P_l(cos theta)
struct LegendreSeries {
  std::vector<double> c;

  int lambda_max() const { return int(c.size()) - 1; }

  double operator()(double theta) const {
    const auto p = angular::legendre_all(lambda_max(), std::cos(theta));
    double s = 0.0;
    for (std::size_t l = 0; l < c.size(); ++l) s += c[l] * p[l];
    return s;
  }

  /// Largest |c_l| among the last `count` coefficients.
  double tail(int count = 3) const {
    double t = 0.0;
    for (int l = std::max(0, lambda_max() - count + 1); l <= lambda_max(); ++l) t = std::max(t, std::abs(c[l]));
    return t;
  }
};

/// c_l = (2l+1)/2 int f(theta) P_l(cos theta) sin theta dtheta
inline LegendreSeries legendre_project(const std::function<double(double)>& f, int lambda_max, const quad::Rule& rule) {
  if (lambda_max < 0) throw std::invalid_argument("legendre_project: lambda_max < 0");
  LegendreSeries s{std::vector<double>(lambda_max + 1, 0.0)};
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double th = rule.nodes[i];
    const double w = rule.weights[i] * std::sin(th) * f(th);
    const auto p = angular::legendre_all(lambda_max, std::cos(th));
    for (int l = 0; l <= lambda_max; ++l) s.c[l] += w * p[l];
  }
  for (int l = 0; l <= lambda_max; ++l) s.c[l] *= 0.5 * (2 * l + 1);
  return s;
}

inline LegendreSeries legendre_project(const std::function<double(double)>& f, int lambda_max, int nodes = 0) {
  return legendre_project(f, lambda_max, theta_rule(std::max(nodes, default_theta_nodes(lambda_max))));
}

/// a_l = int f(theta) Pbar_l^m(cos theta) sin theta dtheta, l = m..lambda_max
/// (entries below m are zero).
inline std::vector<double> assoc_legendre_project(const std::function<double(double)>& f, int m, int lambda_max,
                                                  const quad::Rule& rule) {
  std::vector<double> a(lambda_max + 1, 0.0);
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double th = rule.nodes[i];
    const double w = rule.weights[i] * std::sin(th) * f(th);
    const auto p = angular::assoc_legendre_normalized_all(lambda_max, m, std::cos(th));
    for (int l = m; l <= lambda_max; ++l) a[l] += w * p[l];
  }
  return a;
}

inline std::vector<double> assoc_legendre_project(const std::function<double(double)>& f, int m, int lambda_max,
                                                  int nodes = 0) {
  return assoc_legendre_project(f, m, lambda_max, theta_rule(std::max(nodes, default_theta_nodes(lambda_max))));
}

/// Monotone-ish cubic interpolation in theta (radians) with zero slope at
/// the poles when the grid reaches them.
class ThetaInterpolant {
 public:
  ThetaInterpolant() = default;
  ThetaInterpolant(std::vector<double> theta_rad, std::vector<double> values) {
    if (theta_rad.size() != values.size()) throw InputError("theta grid and values differ in length");
    if (theta_rad.size() < 4) throw InputError("need at least four theta samples");
    for (std::size_t i = 1; i < theta_rad.size(); ++i)
      if (!(theta_rad[i] > theta_rad[i - 1])) throw InputError("theta grid must be strictly increasing");
    lo_ = theta_rad.front();
    hi_ = theta_rad.back();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double left = std::abs(lo_) < 1e-12 ? 0.0 : nan;
    const double right = std::abs(hi_ - kPi) < 1e-12 ? 0.0 : nan;
    impl_ = std::make_shared<boost::math::interpolators::makima<std::vector<double>>>(
        std::move(theta_rad), std::move(values), left, right);
  }

  double operator()(double theta) const {
    if (theta < lo_ - 1e-12 || theta > hi_ + 1e-12) {
      throw std::domain_error("theta " + std::to_string(theta * 180.0 / kPi) + " deg outside tabulated range");
    }
    return (*impl_)(std::clamp(theta, lo_, hi_));
  }

  double lo() const { return lo_; }
  double hi() const { return hi_; }

 private:
  std::shared_ptr<boost::math::interpolators::makima<std::vector<double>>> impl_;
  double lo_ = 0.0, hi_ = 0.0;
};

/// V(theta, phi) on a (theta, phi) grid: trigonometric interpolation in phi
/// (uniform samples over 120 or 360 degrees starting at 0), makima in theta
/// for each Fourier coefficient.
class TabulatedSurface {
 public:
  TabulatedSurface(const std::vector<double>& theta_deg, const std::vector<double>& phi_deg,
                   const std::vector<double>& value) {
    if (theta_deg.size() != phi_deg.size() || theta_deg.size() != value.size()) {
      throw InputError("tabulated surface columns differ in length");
    }
    std::map<double, std::map<double, double>> grid;
    for (std::size_t i = 0; i < value.size(); ++i) {
      if (!grid[theta_deg[i]].emplace(phi_deg[i], value[i]).second) {
        throw InputError("duplicate sample at theta " + std::to_string(theta_deg[i]) + ", phi " +
                         std::to_string(phi_deg[i]));
      }
    }
    const auto& first = grid.begin()->second;
    std::vector<double> phis;
    for (const auto& [p, v] : first) phis.push_back(p);
    for (const auto& [t, row] : grid) {
      if (row.size() != phis.size()) throw InputError("every theta needs the same phi samples");
      std::size_t i = 0;
      for (const auto& [p, v] : row)
        if (std::abs(p - phis[i++]) > 1e-9) throw InputError("every theta needs the same phi samples");
    }
    if (std::abs(phis.front()) > 1e-9) throw InputError("phi samples must start at 0");
    const std::size_t np = phis.size();
    const double step = np > 1 ? phis[1] - phis[0] : 360.0;
    for (std::size_t i = 1; i < np; ++i)
      if (std::abs(phis[i] - phis[i - 1] - step) > 1e-6) throw InputError("phi samples must be uniform");
    // a closing sample at the period end duplicates phi = 0
    std::size_t n = np;
    double span = step * np;
    if (np > 1 && (std::abs(phis.back() - 120.0) < 1e-6 || std::abs(phis.back() - 360.0) < 1e-6)) {
      n = np - 1;
      span = phis.back();
    }
    if (std::abs(span - 120.0) < 1e-6) {
      period_mult_ = 3;
    } else if (std::abs(span - 360.0) < 1e-6) {
      period_mult_ = 1;
    } else {
      throw InputError("phi samples must cover 120 or 360 degrees");
    }
    n_phi_ = int(n);
    harmonics_ = (n_phi_ - 1) / 2;
    nyquist_ = (n_phi_ % 2 == 0);

    std::vector<double> th;
    for (const auto& [t, row] : grid) th.push_back(deg2rad(t));
    const int ncoef = 1 + 2 * harmonics_ + (nyquist_ ? 1 : 0);
    std::vector<std::vector<double>> coef(ncoef);
    for (const auto& [t, row] : grid) {
      std::vector<double> f;
      for (const auto& [p, v] : row) f.push_back(v);
      f.resize(n);
      const auto c = dft(f);
      for (int q = 0; q < ncoef; ++q) coef[q].push_back(c[q]);
    }
    for (int q = 0; q < ncoef; ++q) interp_.emplace_back(th, coef[q]);
  }

  static TabulatedSurface read(const std::string& path) {
    const auto rows = read_columns(path, 3);
    std::vector<double> t, p, v;
    for (const auto& r : rows) {
      t.push_back(r[0]);
      p.push_back(r[1]);
      v.push_back(r[2]);
    }
    return TabulatedSurface(t, p, v);
  }

  double operator()(double theta, double phi) const {
    const double ang = period_mult_ * phi;
    double s = interp_[0](theta);
    for (int m = 1; m <= harmonics_; ++m) {
      s += interp_[2 * m - 1](theta) * std::cos(m * ang) + interp_[2 * m](theta) * std::sin(m * ang);
    }
    if (nyquist_) s += interp_.back()(theta) * std::cos(0.5 * n_phi_ * ang);
    return s;
  }

  /// Multiplicity of the phi periodicity (3 for a C3 sector, 1 otherwise).
  int period_multiplier() const { return period_mult_; }
  int phi_samples() const { return n_phi_; }

 private:
  // [a0, a1, b1, a2, b2, ..., (nyquist)]
  std::vector<double> dft(const std::vector<double>& f) const {
    const int n = n_phi_;
    std::vector<double> c(1 + 2 * harmonics_ + (nyquist_ ? 1 : 0), 0.0);
    for (int j = 0; j < n; ++j) c[0] += f[j] / n;
    for (int m = 1; m <= harmonics_; ++m)
      for (int j = 0; j < n; ++j) {
        const double x = 2.0 * kPi * m * j / n;
        c[2 * m - 1] += 2.0 * f[j] * std::cos(x) / n;
        c[2 * m] += 2.0 * f[j] * std::sin(x) / n;
      }
    if (nyquist_)
      for (int j = 0; j < n; ++j) c.back() += f[j] * ((j % 2) ? -1.0 : 1.0) / n;
    return c;
  }

  int period_mult_ = 1;
  int n_phi_ = 1;
  int harmonics_ = 0;
  bool nyquist_ = false;
  std::vector<ThetaInterpolant> interp_;
};

/// Angular part of the potential, V(theta, phi) with theta, phi the polar
/// angles of the heavy atom direction in the ligand frame.
struct AngularSurface {
  std::function<double(double, double)> value;
  bool phi_independent = false;
  std::string description;

  static AngularSurface harmonic_bend(double kb) {
    return {[kb](double th, double) { return 0.5 * kb * th * th; }, true, "harmonic_bend"};
  }
  static AngularSurface from_legendre(LegendreSeries s) {
    return {[s = std::move(s)](double th, double) { return s(th); }, true, "legendre"};
  }
  static AngularSurface tabulated(TabulatedSurface t) {
    return {[t = std::move(t)](double th, double ph) { return t(th, ph); }, false, "tabulated"};
  }
};

/// V(theta, phi) = sum V_lm Y_lm(theta, phi). Only real V_lm are kept
/// (cos(m phi) content); V_{l,-m} = (-1)^m V_lm.
struct PotentialExpansion {
  int lambda_max = 0;
  std::set<int> mu_set{0};
  std::map<std::pair<int, int>, double> terms;
  double reconstruction_error = 0.0;  // max |V - sum| on the quadrature grid
  double discarded = 0.0;             // largest dropped |V_lm| (mu outside set, sin content)

  double coefficient(int lambda, int mu) const {
    auto it = terms.find({lambda, mu});
    return it == terms.end() ? 0.0 : it->second;
  }

  double value(double theta, double phi) const {
    std::map<int, std::vector<double>> pbar;
    double s = 0.0;
    for (const auto& [key, v] : terms) {
      const auto [lam, mu] = key;
      const int am = std::abs(mu);
      auto it = pbar.find(am);
      if (it == pbar.end()) it = pbar.emplace(am, angular::assoc_legendre_normalized_all(lambda_max, am, std::cos(theta))).first;
      double p = it->second[lam];
      if (mu < 0 && am % 2) p = -p;
      s += v * p * std::cos(mu * phi) / std::sqrt(2.0 * kPi);
    }
    return s;
  }

  /// a * this + b * other on the union of terms.
  static PotentialExpansion combine(double a, const PotentialExpansion& x, double b, const PotentialExpansion& y) {
    PotentialExpansion r;
    r.lambda_max = std::max(x.lambda_max, y.lambda_max);
    r.mu_set = x.mu_set;
    r.mu_set.insert(y.mu_set.begin(), y.mu_set.end());
    for (const auto& [k, v] : x.terms) r.terms[k] += a * v;
    for (const auto& [k, v] : y.terms) r.terms[k] += b * v;
    return r;
  }
};

/// V_l0 = c_l sqrt(4 pi / (2l+1))
inline PotentialExpansion expand_legendre(const LegendreSeries& s) {
  PotentialExpansion e;
  e.lambda_max = s.lambda_max();
  for (int l = 0; l <= s.lambda_max(); ++l) e.terms[{l, 0}] = s.c[l] * std::sqrt(4.0 * kPi / (2 * l + 1));
  return e;
}

/// V_lm = int V Y*_lm dOmega: Gauss-Legendre in theta, uniform trapezoid in
/// phi. Content with mu outside mu_set, or sin(m phi) content, is measured
/// and reported in `discarded`. A finite tolerance turns reconstruction
/// error above it into an ExpansionError.
inline PotentialExpansion expand_angular(const AngularSurface& surface, int lambda_max, std::set<int> mu_set,
                                         double tolerance = std::numeric_limits<double>::infinity(),
                                         int theta_nodes = 0, int phi_nodes = 0) {
  if (lambda_max < 0) throw std::invalid_argument("expand_angular: lambda_max < 0");
  for (int mu : mu_set) {
    if (mu % 3 != 0 || std::abs(mu) > 6) throw std::invalid_argument("mu_set must be a subset of {0, +-3, +-6}");
    mu_set.insert(-mu);
  }
  mu_set.insert(0);
  const auto rule = theta_rule(std::max(theta_nodes, default_theta_nodes(lambda_max)));
  const int nt = int(rule.size());

  PotentialExpansion e;
  e.lambda_max = lambda_max;
  e.mu_set = mu_set;

  if (surface.phi_independent) {
    std::vector<double> f(nt);
    for (int i = 0; i < nt; ++i) f[i] = surface.value(rule.nodes[i], 0.0);
    LegendreSeries s{std::vector<double>(lambda_max + 1, 0.0)};
    std::vector<std::vector<double>> p(nt);
    for (int i = 0; i < nt; ++i) {
      p[i] = angular::legendre_all(lambda_max, std::cos(rule.nodes[i]));
      const double w = rule.weights[i] * std::sin(rule.nodes[i]) * f[i];
      for (int l = 0; l <= lambda_max; ++l) s.c[l] += w * p[i][l];
    }
    for (int l = 0; l <= lambda_max; ++l) s.c[l] *= 0.5 * (2 * l + 1);
    e = expand_legendre(s);
    e.mu_set = mu_set;
    for (int i = 0; i < nt; ++i) {
      double r = 0.0;
      for (int l = 0; l <= lambda_max; ++l) r += s.c[l] * p[i][l];
      e.reconstruction_error = std::max(e.reconstruction_error, std::abs(r - f[i]));
    }
  } else {
    const int np = std::max({phi_nodes, 37, 2 * lambda_max + 2});
    const int mmax = std::min(lambda_max, (np - 1) / 2);
    std::vector<std::vector<double>> samples(nt, std::vector<double>(np));
    // F[i][m] = sqrt(2 pi) <V e^{-i m phi}>_phi at theta_i
    std::vector<std::vector<std::complex<double>>> F(nt, std::vector<std::complex<double>>(mmax + 1));
    for (int i = 0; i < nt; ++i) {
      for (int j = 0; j < np; ++j) samples[i][j] = surface.value(rule.nodes[i], 2.0 * kPi * j / np);
      for (int m = 0; m <= mmax; ++m) {
        std::complex<double> s = 0.0;
        for (int j = 0; j < np; ++j) s += samples[i][j] * std::polar(1.0, -2.0 * kPi * m * j / np);
        F[i][m] = s * std::sqrt(2.0 * kPi) / double(np);
      }
    }
    std::vector<std::vector<std::complex<double>>> V(lambda_max + 1, std::vector<std::complex<double>>(mmax + 1));
    std::vector<std::vector<std::vector<double>>> pbar(mmax + 1, std::vector<std::vector<double>>(nt));
    for (int m = 0; m <= mmax; ++m)
      for (int i = 0; i < nt; ++i) {
        pbar[m][i] = angular::assoc_legendre_normalized_all(lambda_max, m, std::cos(rule.nodes[i]));
        const double w = rule.weights[i] * std::sin(rule.nodes[i]);
        for (int l = m; l <= lambda_max; ++l) V[l][m] += w * pbar[m][i][l] * F[i][m];
      }
    for (int l = 0; l <= lambda_max; ++l)
      for (int m = 0; m <= std::min(l, mmax); ++m) {
        const auto v = V[l][m];
        if (mu_set.count(m)) {
          e.discarded = std::max(e.discarded, std::abs(v.imag()));
          e.terms[{l, m}] = v.real();
          if (m > 0) e.terms[{l, -m}] = (m % 2 ? -1.0 : 1.0) * v.real();
        } else {
          e.discarded = std::max(e.discarded, std::abs(v));
        }
      }
    for (int i = 0; i < nt; ++i) {
      std::vector<double> radial(mmax + 1, 0.0);
      for (int m = 0; m <= mmax; ++m) {
        if (!mu_set.count(m)) continue;
        for (int l = m; l <= lambda_max; ++l) radial[m] += e.coefficient(l, m) * pbar[m][i][l];
      }
      for (int j = 0; j < np; ++j) {
        const double ph = 2.0 * kPi * j / np;
        double r = radial[0];
        for (int m = 1; m <= mmax; ++m) r += 2.0 * radial[m] * std::cos(m * ph);
        r /= std::sqrt(2.0 * kPi);
        e.reconstruction_error = std::max(e.reconstruction_error, std::abs(r - samples[i][j]));
      }
    }
  }
  if (e.reconstruction_error > tolerance) {
    throw ExpansionError("angular expansion at lambda_max " + std::to_string(lambda_max) +
                         " leaves reconstruction error " + std::to_string(e.reconstruction_error) +
                         " above tolerance " + std::to_string(tolerance) + " (discarded content " +
                         std::to_string(e.discarded) + "); raise lambda_max or check the surface");
  }
  return e;
}

struct PhiComponents {
  double e0 = 0.0, e1 = 0.0, e2 = 0.0;
  double operator()(double phi) const { return e0 + e1 * std::cos(3.0 * phi) + e2 * std::cos(6.0 * phi); }
};

/// Exact solve of E0 + E1 cos 3phi + E2 cos 6phi through phi = 0, 30, 60 deg.
inline PhiComponents fit_phi_components(double f0, double f30, double f60) {
  if (!std::isfinite(f0) || !std::isfinite(f30) || !std::isfinite(f60)) {
    throw std::invalid_argument("fit_phi_components: missing or non-finite sample");
  }
  return {(f0 + 2.0 * f30 + f60) / 4.0, (f0 - f60) / 2.0, (f0 - 2.0 * f30 + f60) / 4.0};
}

inline std::vector<PhiComponents> fit_phi_components(const std::vector<double>& f0, const std::vector<double>& f30,
                                                     const std::vector<double>& f60) {
  if (f0.size() != f30.size() || f0.size() != f60.size()) {
    throw std::invalid_argument("fit_phi_components: missing samples (column lengths differ)");
  }
  std::vector<PhiComponents> out;
  out.reserve(f0.size());
  for (std::size_t i = 0; i < f0.size(); ++i) out.push_back(fit_phi_components(f0[i], f30[i], f60[i]));
  return out;
}

/// Enhancement-parameter surface. Components are kept as theta functions;
/// projection gives e0_l (on P_l), e1_l (on Pbar_l^3), e2_l (on Pbar_l^6).
struct PropertySurface {
  std::string name;
  std::string units;
  std::function<double(double)> e0, e1, e2;
  int lambda_max = 0;
  LegendreSeries c0;
  std::vector<double> c1, c2;
  double tail0 = 0.0, tail1 = 0.0, tail2 = 0.0;  // largest of the last three coefficients

  double value(double theta, double phi) const {
    return e0(theta) + e1(theta) * std::cos(3.0 * phi) + e2(theta) * std::cos(6.0 * phi);
  }

  std::vector<double> knots;  // theta (radians) where the sampled components are only C1

  double tail() const { return std::max({tail0, tail1, tail2}); }

  /// Quadrature that integrates the components exactly enough for degree
  /// `degree` polynomials in cos theta: panel-wise between knots when the
  /// surface came from samples.
  quad::Rule theta_quadrature(int degree) const {
    if (knots.size() < 2) return theta_rule(default_theta_nodes(degree));
    const double width = (knots.back() - knots.front()) / double(knots.size() - 1);
    return quad::composite_gauss_legendre(knots, std::max(8, int(std::ceil(degree * width)) + 8));
  }

  void project(int lmax) {
    lambda_max = lmax;
    const auto rule = theta_quadrature(lmax);
    c0 = legendre_project(e0, lmax, rule);
    c1 = assoc_legendre_project(e1, 3, lmax, rule);
    c2 = assoc_legendre_project(e2, 6, lmax, rule);
    auto last = [lmax](const std::vector<double>& v) {
      double t = 0.0;
      for (int l = std::max(0, lmax - 2); l <= lmax; ++l) t = std::max(t, std::abs(v[l]));
      return t;
    };
    tail0 = c0.tail(3);
    tail1 = last(c1);
    tail2 = last(c2);
  }

  /// Operator form. A cos(m phi) component a_l Pbar_l^m contributes
  /// V_{l,+-m} = (+-1)^m a_l sqrt(2 pi) / 2.
  PotentialExpansion expansion() const {
    PotentialExpansion e = expand_legendre(c0);
    e.mu_set = {0, 3, -3, 6, -6};
    const double h = std::sqrt(2.0 * kPi) / 2.0;
    for (int l = 3; l <= lambda_max; ++l) {
      if (c1[l] != 0.0) {
        e.terms[{l, 3}] = c1[l] * h;
        e.terms[{l, -3}] = -c1[l] * h;
      }
      if (l >= 6 && c2[l] != 0.0) {
        e.terms[{l, 6}] = c2[l] * h;
        e.terms[{l, -6}] = c2[l] * h;
      }
    }
    return e;
  }

  bool phi_independent() const {
    return std::all_of(c1.begin(), c1.end(), [](double v) { return v == 0.0; }) &&
           std::all_of(c2.begin(), c2.end(), [](double v) { return v == 0.0; });
  }
};

inline PropertySurface make_property_surface(std::string name, std::string units, std::function<double(double)> e0,
                                             std::function<double(double)> e1, std::function<double(double)> e2,
                                             int lambda_max, std::vector<double> knots = {}) {
  PropertySurface s{std::move(name), std::move(units), std::move(e0), std::move(e1), std::move(e2)};
  s.knots = std::move(knots);
  s.project(lambda_max);
  return s;
}

inline PropertySurface constant_surface(double c, int lambda_max = 0) {
  return make_property_surface("constant", "", [c](double) { return c; }, [](double) { return 0.0; },
                               [](double) { return 0.0; }, lambda_max);
}

/// Samples at phi = 0, 30, 60 deg on a theta grid (degrees). The grid must
/// span [0, 180].
inline PropertySurface property_from_samples(std::string name, std::string units, const std::vector<double>& theta_deg,
                                             const std::vector<double>& f0, const std::vector<double>& f30,
                                             const std::vector<double>& f60, int lambda_max) {
  const auto comp = fit_phi_components(f0, f30, f60);
  if (theta_deg.empty() || std::abs(theta_deg.front()) > 1e-9 || std::abs(theta_deg.back() - 180.0) > 1e-9) {
    throw InputError("property surface '" + name + "': theta grid must span 0 to 180 degrees");
  }
  std::vector<double> th, a, b, c;
  for (std::size_t i = 0; i < comp.size(); ++i) {
    th.push_back(deg2rad(theta_deg[i]));
    a.push_back(comp[i].e0);
    b.push_back(comp[i].e1);
    c.push_back(comp[i].e2);
  }
  auto zero = [](const std::vector<double>& v) { return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; }); };
  std::function<double(double)> f1 = [](double) { return 0.0; };
  std::function<double(double)> f2 = f1;
  if (!zero(b)) f1 = ThetaInterpolant(th, b);
  if (!zero(c)) f2 = ThetaInterpolant(th, c);
  return make_property_surface(std::move(name), std::move(units), ThetaInterpolant(th, a), f1, f2, lambda_max, th);
}

/// Columns: theta_deg value_phi0 value_phi30 value_phi60
inline PropertySurface read_property_file(const std::string& path, std::string name, std::string units,
                                          int lambda_max) {
  const auto rows = read_columns(path, 4);
  std::vector<double> t, a, b, c;
  for (const auto& r : rows) {
    t.push_back(r[0]);
    a.push_back(r[1]);
    b.push_back(r[2]);
    c.push_back(r[3]);
  }
  return property_from_samples(std::move(name), std::move(units), t, a, b, c, lambda_max);
}

}  // namespace rovib
