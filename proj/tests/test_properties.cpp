#include <algorithm>
#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "rovib/properties.hpp"
#include "rovib/units.hpp"

using namespace rovib;

namespace {

struct Model {
  MoleculeSpec mol;
  CoupledHamiltonian h;
  std::vector<RovibState> states;
};

Model bend_model(int J, int jl, int nb = 3, double kb = 0.05, int n = 4) {
  const MoleculeSpec mol = build_ligand(LigandGeometry{}, AtomicMasses{});
  RadialBasis basis(mol.reduced_mass, units::wavenumber_to_hartree(349.2547), mol.r_eq, nb);
  const auto v = expand_angular(AngularSurface::harmonic_bend(kb), 2 * jl, {0});
  auto h = assemble(enumerate_channels(J, jl, jl, jl), basis, {mol.A, mol.B}, v);
  auto states = solve_lowest(h, n);
  return {mol, std::move(h), std::move(states)};
}

RovibState pure_channel(const ChannelSpace& space, std::size_t ch) {
  RovibState s;
  s.J = space.J;
  s.channels = {ch};
  s.n_basis = 1;
  s.F = Eigen::VectorXd::Ones(1);
  return s;
}

PropertySurface decreasing_surface(int lmax) {
  return make_property_surface(
      "E_eff", "GV/cm", [](double t) { return 24.943 - 3.0 * (1.0 - std::exp(-t * t / 0.5)); },
      [](double t) { return 0.2 * std::pow(std::sin(t), 3); }, [](double t) { return 0.05 * std::pow(std::sin(t), 6); },
      lmax);
}

}  // namespace

TEST(Properties, ConstantSurfaceReturnsConstant) {
  const auto m = bend_model(1, 6);
  const auto c = constant_surface(3.25, 12);
  for (const auto& s : m.states) {
    const auto r = average(s, m.h.space, c);
    EXPECT_NEAR(r.value, 3.25, 1e-12) << s.id();
    EXPECT_EQ(r.e1, 0.0);
    EXPECT_EQ(r.e2, 0.0);
  }
}

TEST(Properties, OddSurfaceOnIsotropicChannel) {
  const auto space = enumerate_channels(0, 0, 0, 0);
  const auto s = pure_channel(space, 0);
  const auto p1 = make_property_surface("p1", "", [](double t) { return std::cos(t); }, [](double) { return 0.0; },
                                        [](double) { return 0.0; }, 4);
  EXPECT_NEAR(average(s, space, p1).value, 0.0, 1e-15);
  const auto d = theta_density(s, space, {0.0, 45.0, 90.0, 180.0});
  for (double r : d.rho) EXPECT_NEAR(r, 0.5, 1e-15);
}

TEST(Properties, PureChannelMomentsMatchQuadrature) {
  // J=0 channel (j,0,j): the theta marginal is |P_j(cos theta)|^2 (2j+1)/2
  const auto space = enumerate_channels(0, 4, 4, 0);
  for (std::size_t c = 0; c < space.size(); ++c) {
    const int j = space[c].j;
    const auto d = theta_density(pure_channel(space, c), space, uniform_theta_grid(19));
    for (std::size_t i = 0; i < d.rho.size(); ++i) {
      const double p = angular::legendre(j, std::cos(deg2rad(d.theta_deg[i])));
      EXPECT_NEAR(d.rho[i], 0.5 * (2 * j + 1) * p * p, 1e-12) << "j=" << j;
    }
  }
}

TEST(Properties, Linearity) {
  const auto m = bend_model(0, 6);
  const auto a = decreasing_surface(12);
  const auto b = make_property_surface("b", "", [](double t) { return t * t; }, [](double t) { return std::sin(t); },
                                       [](double) { return 0.0; }, 12);
  const auto ab = make_property_surface(
      "ab", "", [&](double t) { return 2.0 * a.e0(t) - 0.5 * b.e0(t); },
      [&](double t) { return 2.0 * a.e1(t) - 0.5 * b.e1(t); }, [&](double t) { return 2.0 * a.e2(t); }, 12);
  for (const auto& s : m.states) {
    const double lhs = average(s, m.h.space, ab).value;
    const double rhs = 2.0 * average(s, m.h.space, a).value - 0.5 * average(s, m.h.space, b).value;
    EXPECT_NEAR(lhs, rhs, 1e-12);
  }
}

TEST(Properties, DensityReproducesOperatorAverage) {
  const auto m = bend_model(0, 10, 3, 0.05, 5);
  const auto e = decreasing_surface(20);
  for (const auto& s : m.states) {
    if (std::abs(s.labels.k) >= 3) continue;
    const auto r = average(s, m.h.space, e);
    EXPECT_EQ(r.e1, 0.0) << "k<3 states see only the phi-averaged part";
    EXPECT_EQ(r.e2, 0.0);
    const auto d = theta_density(s, m.h.space, uniform_theta_grid(181));
    EXPECT_NEAR(integrate_density(d, [](double) { return 1.0; }), 1.0, 1e-10);
    const double via_rho = integrate_density(d, e.e0);
    EXPECT_NEAR(via_rho, r.value, 1e-8 * std::abs(r.value)) << s.id();
  }
}

TEST(Properties, GroundStateBelowEquilibriumForDecreasingSurface) {
  const auto m = bend_model(0, 10, 3, 0.05, 5);
  const auto e = decreasing_surface(20);
  const double eq = e.e0(0.0);
  EXPECT_LT(average(m.states[0], m.h.space, e).value, eq);
  const auto d = theta_density(m.states[0], m.h.space, uniform_theta_grid(91));
  // single peak at theta = 0, monotone until the truncation ripple
  for (std::size_t i = 1; i < d.rho.size() && d.rho[i - 1] > 1e-2 * d.rho[0]; ++i) EXPECT_LT(d.rho[i], d.rho[i - 1]);
  EXPECT_EQ(std::max_element(d.rho.begin(), d.rho.end()) - d.rho.begin(), 0);
}

TEST(Properties, DegeneratePartnersShareAverages) {
  const auto m = bend_model(1, 6, 3, 0.05, 4);
  const auto e = decreasing_surface(12);
  for (std::size_t i = 0; i + 1 < m.states.size(); ++i) {
    const auto& a = m.states[i];
    const auto& b = m.states[i + 1];
    if (std::abs(a.energy - b.energy) > 1e-10 || a.labels.k != -b.labels.k) continue;
    EXPECT_NEAR(average(a, m.h.space, e).value, average(b, m.h.space, e).value, 1e-10);
  }
}

TEST(Properties, CosThreePhiComponentCouplesKBlocks) {
  // a state spread over k=0 and k=3 picks up the E1 part; pure k=0 does not
  const auto space = enumerate_channels(0, 4, 4, 4);
  std::size_t c0 = 0, c3 = 0;
  for (std::size_t i = 0; i < space.size(); ++i) {
    if (space[i] == Channel{3, 0, 3}) c0 = i;
    if (space[i] == Channel{3, 3, 3}) c3 = i;
  }
  const auto e = make_property_surface("x", "", [](double) { return 0.0; },
                                       [](double t) { return std::pow(std::sin(t), 3); }, [](double) { return 0.0; }, 8);
  RovibState s;
  s.channels = {c0, c3};
  s.F = Eigen::Vector2d(std::sqrt(0.5), std::sqrt(0.5));
  const auto r = average(s, space, e);
  EXPECT_NE(r.e1, 0.0);
  EXPECT_EQ(r.e0, 0.0);
  EXPECT_EQ(average(pure_channel(space, c0), space, e).value, 0.0);
}

TEST(Properties, ReportMergesPartnersAndStartsAtZero) {
  const auto m = bend_model(0, 8, 3, 0.05, 4);
  const double amb = m.mol.A - m.mol.B;
  ReportContext ctx{m.states[0].energy, 0.0, amb};
  ctx.omega_perp = bending_frequency(m.states, ctx.e0, amb);
  const std::vector<PropertySurface> surf{decreasing_surface(16)};
  const auto rows = table_report(m.states, m.h.space, surf, ctx);
  ASSERT_GE(rows.size(), 3u);
  EXPECT_EQ(rows[0].ratio, 0.0);
  const auto bend = std::find_if(rows.begin(), rows.end(), [](const ReportRow& r) { return r.l == "+-1"; });
  ASSERT_NE(bend, rows.end());
  EXPECT_EQ(bend->K, "0");
  EXPECT_EQ(bend->v_perp, 1);
  EXPECT_EQ(bend->ids.size(), 2u);
  EXPECT_DOUBLE_EQ(bend->vib_ratio, 1.0);
  std::ostringstream os;
  write_report_csv(os, rows, surf);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')),
            "J,v_par,v_perp,l,K,energy_hartree,energy_cm-1,ratio_E-E0_over_omega_perp,vib_ratio,E_eff_GV/cm,"
            "dominant_weight,mixed,states");
}

TEST(Properties, SampledSurfaceDensityIntegralUsesKnots) {
  // piecewise-cubic interpolant: plain Gauss-Legendre misses the kinks
  std::vector<double> th, f0, f30, f60;
  for (int i = 0; i <= 90; ++i) {
    const double t = deg2rad(2.0 * i);
    th.push_back(2.0 * i);
    const double v = 5.0 - std::exp(-t * t / 0.02) + 0.1 * std::pow(std::sin(t), 3);
    f0.push_back(v);
    f30.push_back(v);
    f60.push_back(v);
  }
  const auto e = property_from_samples("E", "", th, f0, f30, f60, 20);
  ASSERT_EQ(e.knots.size(), th.size());
  const auto m = bend_model(0, 10, 3, 0.05, 5);
  for (const auto& s : m.states) {
    if (std::abs(s.labels.k) >= 3) continue;
    const auto d = theta_density(s, m.h.space, {});
    const double a = average(s, m.h.space, e).value;
    EXPECT_NEAR(integrate_density(d, e.e0, e.theta_quadrature(40)), a, 1e-12 * std::abs(a)) << s.id();
  }
}
