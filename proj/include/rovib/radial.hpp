#pragma once

// Harmonic-oscillator eigenbasis for the stretch coordinate R and matrix
// elements of R-dependent operators in it.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "rovib/quadrature.hpp"

namespace rovib {

enum class CentrifugalMode { linearized, exact, frozen };

inline CentrifugalMode parse_centrifugal_mode(std::string_view s) {
  if (s == "linearized") return CentrifugalMode::linearized;
  if (s == "exact") return CentrifugalMode::exact;
  if (s == "frozen") return CentrifugalMode::frozen;
  throw std::invalid_argument("unknown centrifugal mode '" + std::string(s) + "'");
}

inline const char* to_string(CentrifugalMode m) {
  switch (m) {
    case CentrifugalMode::linearized: return "linearized";
    case CentrifugalMode::exact: return "exact";
    case CentrifugalMode::frozen: return "frozen";
  }
  return "?";
}

class RadialBasis {
 public:
  RadialBasis(double reduced_mass, double omega, double r_eq, int n_basis)
      : mu_(reduced_mass), omega_(omega), r_eq_(r_eq), n_(n_basis) {
    if (!(mu_ > 0.0) || !(omega_ > 0.0) || !(r_eq_ > 0.0) || n_ < 1) {
      throw std::invalid_argument("RadialBasis: need mu, omega, R_eq > 0 and n_basis >= 1");
    }
  }

  double reduced_mass() const { return mu_; }
  double omega() const { return omega_; }
  double r_eq() const { return r_eq_; }
  int size() const { return n_; }
  /// x = alpha (R - R_eq)
  double alpha() const { return std::sqrt(mu_ * omega_); }

  double ho_energy(int a) const {
    if (a < 0) throw std::domain_error("ho_energy: a < 0");
    return omega_ * (a + 0.5);
  }

  /// Normalized Hermite polynomials h_0..h_{n-1} at x, orthonormal under
  /// exp(-x^2). Phi_a(R) = sqrt(alpha) h_a(x) exp(-x^2/2).
  Eigen::VectorXd hermite(double x, int count = -1) const {
    const int m = count < 0 ? n_ : count;
    Eigen::VectorXd h(m);
    if (m == 0) return h;
    h(0) = std::pow(std::numbers::pi, -0.25);
    if (m > 1) h(1) = std::sqrt(2.0) * x * h(0);
    for (int a = 2; a < m; ++a) h(a) = std::sqrt(2.0 / a) * x * h(a - 1) - std::sqrt((a - 1.0) / a) * h(a - 2);
    return h;
  }

  double phi(int a, double r) const {
    const double x = alpha() * (r - r_eq_);
    return std::sqrt(alpha()) * hermite(x, a + 1)(a) * std::exp(-0.5 * x * x);
  }

  /// <a|R - R_eq|b> from ladder algebra.
  Eigen::MatrixXd position_matrix() const {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n_, n_);
    for (int a = 1; a < n_; ++a) m(a, a - 1) = m(a - 1, a) = std::sqrt(a / (2.0 * mu_ * omega_));
    return m;
  }

  /// <a|-(1/2mu) d^2/dR^2|b> from ladder algebra.
  Eigen::MatrixXd kinetic_matrix() const {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n_, n_);
    for (int a = 0; a < n_; ++a) m(a, a) = 0.25 * omega_ * (2.0 * a + 1.0);
    for (int a = 2; a < n_; ++a) m(a, a - 2) = m(a - 2, a) = -0.25 * omega_ * std::sqrt(a * (a - 1.0));
    return m;
  }

  int default_nodes() const { return 2 * n_ + 16; }

  /// <a|f(R)|b> by Gauss-Hermite quadrature.
  Eigen::MatrixXd operator_matrix(const std::function<double(double)>& f, int nodes = 0) const {
    const auto rule = quad::gauss_hermite(std::max(nodes, default_nodes()));
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n_, n_);
    for (std::size_t i = 0; i < rule.size(); ++i) {
      const double r = r_eq_ + rule.nodes[i] / alpha();
      const double v = f(r);
      if (!std::isfinite(v)) {
        throw std::domain_error("radial operator is not finite at R = " + std::to_string(r));
      }
      const Eigen::VectorXd h = hermite(rule.nodes[i]);
      m.noalias() += (rule.weights[i] * v) * h * h.transpose();
    }
    return 0.5 * (m + m.transpose());
  }

  /// l-independent part C of the centrifugal matrix: the full matrix is
  /// l(l+1) C.
  Eigen::MatrixXd centrifugal_base(CentrifugalMode mode) const {
    const double r2 = r_eq_ * r_eq_;
    switch (mode) {
      case CentrifugalMode::frozen:
        return Eigen::MatrixXd::Identity(n_, n_) / r2;
      case CentrifugalMode::linearized:
        return Eigen::MatrixXd::Identity(n_, n_) / r2 - (2.0 / (r2 * r_eq_)) * position_matrix();
      case CentrifugalMode::exact: {
        const double floor = 0.1 * r_eq_;
        return operator_matrix([floor](double r) {
          const double rc = std::max(r, floor);
          return 1.0 / (rc * rc);
        }, std::max(default_nodes(), 80));
      }
    }
    throw std::logic_error("centrifugal_base: bad mode");
  }

  Eigen::MatrixXd centrifugal_matrix(int l, CentrifugalMode mode) const {
    if (l < 0) throw std::domain_error("centrifugal_matrix: l < 0");
    return (l * (l + 1.0)) * centrifugal_base(mode);
  }

  /// Multiplicative radial factor f(R) matching centrifugal_base, so that
  /// l(l+1) f(R) is the centrifugal numerator in each mode.
  double centrifugal_function(double r, CentrifugalMode mode) const {
    const double r2 = r_eq_ * r_eq_;
    switch (mode) {
      case CentrifugalMode::frozen: return 1.0 / r2;
      case CentrifugalMode::linearized: return (1.0 - 2.0 * (r - r_eq_) / r_eq_) / r2;
      case CentrifugalMode::exact: {
        const double rc = std::max(r, 0.1 * r_eq_);
        return 1.0 / (rc * rc);
      }
    }
    return 0.0;
  }

 private:
  double mu_, omega_, r_eq_;
  int n_;
};

}  // namespace rovib
