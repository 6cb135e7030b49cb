#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "rovib/hamiltonian.hpp"
#include "rovib/units.hpp"

using namespace rovib;
using cplx = std::complex<double>;

namespace {

constexpr double kPi_ = std::numbers::pi;

// ---- independent angular oracle --------------------------------------
// Symmetric-top functions sqrt((2j+1)/8pi^2) D^{j*}_{mk}(a,b,g) with
// D^j_{mk} = e^{-ima} d^j_{mk}(b) e^{-ikg}, Wigner d from the explicit sum,
// CG from the explicit Racah form, Y_lm from Cartesian components, and the
// body-frame direction R^T r for R = Rz(a) Ry(b) Rz(g).

long double fact(int n) {
  long double f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// d^j_{mk} at cos(beta) = cb
double wigner_d(int j, int m, int k, double cb) {
  long double s = 0;
  const long double c = std::sqrt((1.0L + cb) / 2), sn = std::sqrt((1.0L - cb) / 2);
  for (int t = 0; t <= 2 * j; ++t) {
    const int d1 = j + k - t, d2 = t, d3 = m - k + t, d4 = j - m - t;
    if (d1 < 0 || d3 < 0 || d4 < 0) continue;
    const long double term = ((t + m - k) % 2 ? -1.0L : 1.0L) / (fact(d1) * fact(d2) * fact(d3) * fact(d4)) *
                             std::pow(c, 2 * j + k - m - 2 * t) * std::pow(sn, m - k + 2 * t);
    s += term;
  }
  return double(std::sqrt(fact(j + m) * fact(j - m) * fact(j + k) * fact(j - k)) * s);
}

double cg(int j1, int m1, int j2, int m2, int J, int M) {
  if (m1 + m2 != M || J < std::abs(j1 - j2) || J > j1 + j2 || std::abs(M) > J) return 0.0;
  long double pre = (2 * J + 1) * fact(J + j1 - j2) * fact(J - j1 + j2) * fact(j1 + j2 - J) / fact(j1 + j2 + J + 1);
  pre *= fact(J + M) * fact(J - M) * fact(j1 - m1) * fact(j1 + m1) * fact(j2 - m2) * fact(j2 + m2);
  long double s = 0;
  for (int k = 0; k <= j1 + j2 + J; ++k) {
    const int a = j1 + j2 - J - k, b = j1 - m1 - k, c = j2 + m2 - k, d = J - j2 + m1 + k, e = J - j1 - m2 + k;
    if (a < 0 || b < 0 || c < 0 || d < 0 || e < 0) continue;
    s += (k % 2 ? -1.0L : 1.0L) / (fact(k) * fact(a) * fact(b) * fact(c) * fact(d) * fact(e));
  }
  return double(std::sqrt(pre) * s);
}

// Y_lm at the unit vector (x, y, z): P_l^m(z) / (1-z^2)^{m/2} times (x+iy)^m
cplx ylm(int l, int m, double x, double y, double z) {
  const int am = std::abs(m);
  long double q0 = (am % 2 ? -1.0L : 1.0L);
  for (int i = 1; i <= am; ++i) q0 *= (2 * i - 1);
  long double q = q0, qm1 = 0;
  for (int n = am + 1; n <= l; ++n) {
    const long double qn = ((2 * n - 1) * z * q - (n + am - 1) * qm1) / (n - am);
    qm1 = q;
    q = qn;
  }
  const long double norm = std::sqrt((2 * l + 1) / (4 * std::numbers::pi_v<long double>) * fact(l - am) / fact(l + am));
  const cplx v = double(norm * q) * std::pow(cplx(x, y), am);
  if (m >= 0) return v;
  return (am % 2 ? -1.0 : 1.0) * std::conj(v);
}

struct AngularOracle {
  int J, M;
  std::vector<Channel> chans;
  std::vector<std::vector<cplx>> psi;
  std::vector<std::array<double, 5>> pts;  // a, cos beta, g, cos theta, phi
  std::vector<double> w;

  AngularOracle(int J_, std::vector<Channel> ch, int n_uniform, int n_gl) : J(J_), M(0), chans(std::move(ch)) {
    const auto gl = quad::gauss_legendre(n_gl);
    std::vector<double> u;
    for (int i = 0; i < n_uniform; ++i) u.push_back(2 * kPi_ * i / n_uniform);
    const double wu = 2 * kPi_ / n_uniform;
    for (double ia : u)
      for (std::size_t ib = 0; ib < gl.size(); ++ib)
        for (double ig : u)
          for (std::size_t it = 0; it < gl.size(); ++it)
            for (double ip : u) {
              pts.push_back({ia, gl.nodes[ib], ig, gl.nodes[it], ip});
              w.push_back(wu * wu * wu * gl.weights[ib] * gl.weights[it]);
            }
    for (const auto& c : chans) {
      std::vector<cplx> v(pts.size());
      for (std::size_t p = 0; p < pts.size(); ++p) {
        const auto [al, be, ga, ct, ph] = pts[p];
        const double st = std::sqrt(1 - ct * ct);
        cplx s = 0;
        for (int m = -c.j; m <= c.j; ++m) {
          const int ml = M - m;
          if (std::abs(ml) > c.l) continue;
          const double coef = cg(c.j, m, c.l, ml, J, M);
          if (coef == 0.0) continue;
          const cplx dcal = std::sqrt((2 * c.j + 1) / (8 * kPi_ * kPi_)) *
                            std::conj(std::polar(1.0, -m * al) * wigner_d(c.j, m, c.k, be) * std::polar(1.0, -c.k * ga));
          s += coef * dcal * ylm(c.l, ml, st * std::cos(ph), st * std::sin(ph), ct);
        }
        v[p] = s;
      }
      psi.push_back(std::move(v));
    }
  }

  std::vector<cplx> body_ylm(int lam, int mu) const {
    std::vector<cplx> y(pts.size());
    for (std::size_t p = 0; p < pts.size(); ++p) {
      const auto [al, cb, ga, ct, ph] = pts[p];
      const double st = std::sqrt(1 - ct * ct);
      Eigen::Matrix3d R = (Eigen::AngleAxisd(al, Eigen::Vector3d::UnitZ()) * Eigen::AngleAxisd(std::acos(cb), Eigen::Vector3d::UnitY()) *
                           Eigen::AngleAxisd(ga, Eigen::Vector3d::UnitZ()))
                              .toRotationMatrix();
      const Eigen::Vector3d r(st * std::cos(ph), st * std::sin(ph), ct);
      const Eigen::Vector3d b = R.transpose() * r;
      y[p] = ylm(lam, mu, b.x(), b.y(), b.z());
    }
    return y;
  }

  cplx element(std::size_t i, const std::vector<cplx>& op, std::size_t k) const {
    cplx s = 0;
    for (std::size_t p = 0; p < pts.size(); ++p) s += w[p] * std::conj(psi[i][p]) * op[p] * psi[k][p];
    return s;
  }
};

const double kMu = 47985.79;
const double kOmega = units::wavenumber_to_hartree(349.2547);

}  // namespace

TEST(AngularCoupling, ScalarCollapse) {
  for (int J = 0; J <= 3; ++J) {
    const auto s = enumerate_channels(J, 6, 6, 6);
    for (const auto& c : s.channels) EXPECT_NEAR(angular_coupling(0, 0, c, c, J), 1.0 / std::sqrt(4 * kPi_), 1e-14);
    for (const auto& a : s.channels)
      for (const auto& b : s.channels)
        if (!(a == b)) EXPECT_EQ(angular_coupling(0, 0, a, b, J), 0.0);
  }
}

TEST(AngularCoupling, SelectionRules) {
  const Channel a{2, 1, 2}, b{2, 0, 2};
  EXPECT_EQ(angular_coupling(2, 0, a, b, 0), 0.0);  // mu != k~ - k
  EXPECT_EQ(angular_coupling(2, 1, a, b, 0), 0.0);
  EXPECT_NE(angular_coupling(2, -1, a, b, 0), 0.0);
}

TEST(AngularCoupling, QuadratureOracle) {
  // all channels with j, l <= 2 at J = 0, 1, 2; lambda <= 4 and every mu
  for (int J = 0; J <= 2; ++J) {
    const auto space = enumerate_channels(J, 2, 2, 2);
    AngularOracle oracle(J, space.channels, 10, 8);
    double worst = 0.0;
    for (int lam = 0; lam <= 4; ++lam)
      for (int mu = -lam; mu <= lam; ++mu) {
        const auto op = oracle.body_ylm(lam, mu);
        for (std::size_t i = 0; i < space.size(); ++i)
          for (std::size_t k = 0; k < space.size(); ++k) {
            const cplx ref = oracle.element(i, op, k);
            const double v = angular_coupling(lam, mu, space[i], space[k], J);
            EXPECT_LT(std::abs(ref.imag()), 1e-12);
            EXPECT_NEAR(v, ref.real(), 1e-12) << "J=" << J << " lam=" << lam << " mu=" << mu << " (" << space[i].j
                                               << "," << space[i].k << "," << space[i].l << ") (" << space[k].j << ","
                                               << space[k].k << "," << space[k].l << ")";
            worst = std::max(worst, std::abs(v - ref.real()));
          }
      }
    std::printf("J=%d: max |coupling - quadrature| = %.2e\n", J, worst);
  }
}

TEST(AngularCoupling, HermitianPartner) {
  // <a|Y_lm|b> = (-1)^mu <b|Y_{l,-mu}|a>, so real V with V_{l,-m} = (-1)^m V_lm
  // gives a symmetric matrix
  std::mt19937 rng(3);
  const auto s = enumerate_channels(2, 7, 7, 7);
  std::uniform_int_distribution<std::size_t> pick(0, s.size() - 1);
  for (int t = 0; t < 3000; ++t) {
    const auto& a = s[pick(rng)];
    const auto& b = s[pick(rng)];
    for (int lam = 0; lam <= 8; ++lam) {
      const int mu = b.k - a.k;
      const double lhs = angular_coupling(lam, mu, a, b, 2);
      const double rhs = (mu % 2 ? -1.0 : 1.0) * angular_coupling(lam, -mu, b, a, 2);
      EXPECT_NEAR(lhs, rhs, 1e-12);
    }
  }
}

namespace {

PotentialExpansion bend_expansion(double kb, int lmax) {
  return expand_angular(AngularSurface::harmonic_bend(kb), lmax, {0});
}

PotentialExpansion c3_expansion() {
  PotentialExpansion e = bend_expansion(0.05, 12);
  e.mu_set = {0, 3, -3, 6, -6};
  for (int l = 3; l <= 8; ++l) {
    e.terms[{l, 3}] = 1e-3 / l;
    e.terms[{l, -3}] = -1e-3 / l;
  }
  e.terms[{6, 6}] = 4e-4;
  e.terms[{6, -6}] = 4e-4;
  return e;
}

}  // namespace

TEST(Hamiltonian, SymmetricAndMIndependentStructure) {
  const RadialBasis basis(kMu, kOmega, 5.25, 3);
  const RotorConstants rotor{2.46e-5, 4.2e-6};
  const auto space = enumerate_channels(1, 5, 5, 5);
  const auto h = assemble(space, basis, rotor, c3_expansion());
  const auto full = h.full_dense();
  EXPECT_LT((full - full.transpose()).cwiseAbs().maxCoeff(), 1e-12 * full.cwiseAbs().maxCoeff());
  EXPECT_EQ(h.blocks.size(), 3u);

  // nonzeros never connect different k-blocks; connectivity equals the block partition
  std::vector<int> block_of(space.size());
  for (std::size_t b = 0; b < h.blocks.size(); ++b)
    for (auto c : h.blocks[b].channels) block_of[c] = int(b);
  std::vector<int> comp(space.size());
  std::iota(comp.begin(), comp.end(), 0);
  std::function<int(int)> find = [&](int x) { return comp[x] == x ? x : comp[x] = find(comp[x]); };
  const int nb = basis.size();
  for (std::size_t i = 0; i < space.size(); ++i)
    for (std::size_t k = 0; k < space.size(); ++k) {
      if (full.block(i * nb, k * nb, nb, nb).cwiseAbs().maxCoeff() == 0.0) continue;
      EXPECT_EQ(block_of[i], block_of[k]);
      comp[find(int(i))] = find(int(k));
    }
  for (std::size_t i = 0; i < space.size(); ++i)
    for (std::size_t k = 0; k < space.size(); ++k)
      EXPECT_EQ(find(int(i)) == find(int(k)), block_of[i] == block_of[k]);
}

TEST(Hamiltonian, BlockwiseEqualsFull) {
  const RadialBasis basis(kMu, kOmega, 5.25, 3);
  const RotorConstants rotor{2.46e-5, 4.2e-6};
  const auto space = enumerate_channels(1, 4, 4, 4);
  const auto h = assemble(space, basis, rotor, c3_expansion());
  std::vector<double> blockwise;
  for (const auto& b : h.blocks) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b.to_dense());
    for (int i = 0; i < es.eigenvalues().size(); ++i) blockwise.push_back(es.eigenvalues()(i));
  }
  std::sort(blockwise.begin(), blockwise.end());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> full(h.full_dense());
  ASSERT_EQ(blockwise.size(), std::size_t(full.eigenvalues().size()));
  for (std::size_t i = 0; i < blockwise.size(); ++i) EXPECT_NEAR(blockwise[i], full.eigenvalues()(i), 1e-10 * 0.05);
}

TEST(Hamiltonian, SeparableLimit) {
  const RadialBasis basis(kMu, kOmega, 5.25, 4);
  const RotorConstants rotor{2.46e-5, 4.2e-6};
  PotentialExpansion none;
  for (int J = 0; J <= 2; ++J) {
    const auto space = enumerate_channels(J, 3, 3, 3);
    const auto h = assemble(space, basis, rotor, none, {CentrifugalMode::linearized});
    std::vector<double> got, want;
    for (const auto& b : h.blocks) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b.to_dense());
      for (int i = 0; i < es.eigenvalues().size(); ++i) got.push_back(es.eigenvalues()(i));
    }
    for (const auto& c : space.channels) {
      Eigen::MatrixXd d = basis.centrifugal_matrix(c.l, CentrifugalMode::linearized) / (2 * kMu);
      for (int a = 0; a < basis.size(); ++a) d(a, a) += basis.ho_energy(a) + ligand_energy(c.j, c.k, rotor.A, rotor.B);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(d);
      for (int i = 0; i < basis.size(); ++i) want.push_back(es.eigenvalues()(i));
    }
    std::sort(got.begin(), got.end());
    std::sort(want.begin(), want.end());
    ASSERT_EQ(got.size(), want.size());
    for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-12 * want[i]);
  }
}

TEST(Hamiltonian, ConstantPotentialShift) {
  const RadialBasis basis(kMu, kOmega, 5.25, 3);
  const RotorConstants rotor{2.46e-5, 4.2e-6};
  const auto space = enumerate_channels(1, 4, 4, 4);
  const auto base = c3_expansion();
  PotentialExpansion shifted = base;
  const double c = 0.0123;
  shifted.terms[{0, 0}] += c * std::sqrt(4 * kPi_);
  const auto e0 = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(assemble(space, basis, rotor, base).full_dense()).eigenvalues();
  const auto e1 = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(assemble(space, basis, rotor, shifted).full_dense()).eigenvalues();
  for (int i = 0; i < e0.size(); ++i) EXPECT_NEAR(e1(i) - e0(i), c, 1e-13);
}

TEST(Hamiltonian, PhiIndependentDegeneracy) {
  const RadialBasis basis(kMu, kOmega, 5.25, 3);
  const RotorConstants rotor{2.46e-5, 4.2e-6};
  const auto space = enumerate_channels(1, 5, 5, 5);
  const auto h = assemble(space, basis, rotor, bend_expansion(0.06, 10));
  std::map<int, Eigen::VectorXd> ev;
  for (const auto& b : h.blocks) ev[space[b.channels[0]].k] = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(b.dense).eigenvalues();
  for (int k = 1; k <= 5; ++k) EXPECT_LT((ev[k] - ev[-k]).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Hamiltonian, VariationalInTruncation) {
  const RotorConstants rotor{2.46e-5, 4.2e-6};
  const auto pot = bend_expansion(0.06, 24);
  auto lowest = [&](int jmax, int nb) {
    const RadialBasis basis(kMu, kOmega, 5.25, nb);
    const auto h = assemble(enumerate_channels(0, jmax, jmax, jmax), basis, rotor, pot);
    std::vector<double> e;
    for (const auto& b : h.blocks) {
      const auto v = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(b.dense).eigenvalues();
      for (int i = 0; i < v.size(); ++i) e.push_back(v(i));
    }
    std::sort(e.begin(), e.end());
    e.resize(6);
    return e;
  };
  auto prev = lowest(6, 3);
  for (int jm = 7; jm <= 12; ++jm) {
    const auto cur = lowest(jm, 3);
    for (int i = 0; i < 6; ++i) EXPECT_LE(cur[i], prev[i] + 1e-14);
    prev = cur;
  }
  prev = lowest(10, 2);
  for (int nb = 3; nb <= 6; ++nb) {
    const auto cur = lowest(10, nb);
    for (int i = 0; i < 6; ++i) EXPECT_LE(cur[i], prev[i] + 1e-14);
    prev = cur;
  }
}

TEST(Hamiltonian, SparseMatchesDenseAndDeterministic) {
  const RadialBasis basis(kMu, kOmega, 5.25, 3);
  const RotorConstants rotor{2.46e-5, 4.2e-6};
  const auto space = enumerate_channels(1, 4, 4, 4);
  const auto d = assemble(space, basis, rotor, c3_expansion());
  HamiltonianOptions o;
  o.dense_limit = 10;
  o.threads = 4;
  const auto s = assemble(space, basis, rotor, c3_expansion(), o);
  EXPECT_TRUE(s.blocks[0].is_sparse);
  EXPECT_EQ((d.full_dense() - s.full_dense()).cwiseAbs().maxCoeff(), 0.0);

  HamiltonianOptions t8;
  t8.threads = 8;
  std::ostringstream a, b;
  d.dump_triplets(a);
  assemble(space, basis, rotor, c3_expansion(), t8).dump_triplets(b);
  EXPECT_EQ(a.str(), b.str());

  HamiltonianOptions small;
  small.max_dimension = 10;
  EXPECT_THROW(assemble(space, basis, rotor, c3_expansion(), small), DimensionError);
}

TEST(Hamiltonian, GalerkinExactForBendSeries) {
  // terms with lambda > 2 l_max have no matrix elements, so raising
  // lambda_max past 2 l_max leaves the Hamiltonian unchanged
  const RadialBasis basis(kMu, kOmega, 5.25, 2);
  const RotorConstants rotor{2.46e-5, 4.2e-6};
  const auto space = enumerate_channels(0, 8, 8, 8);
  const auto a = assemble(space, basis, rotor, bend_expansion(0.06, 16)).full_dense();
  const auto b = assemble(space, basis, rotor, bend_expansion(0.06, 40)).full_dense();
  EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-15);
}
