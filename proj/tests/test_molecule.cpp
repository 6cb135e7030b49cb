#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "rovib/molecule.hpp"

using namespace rovib;

namespace {

// Closed-form moments for the C3v ligand, written independently of the
// atom-placement code: I_zeta from the H ring, I_xi from axial positions
// about the c.m. plus half the ring contribution.
struct Moments {
  double i_xi, i_zeta;
};

Moments closed_form(const LigandGeometry& g, const AtomicMasses& m) {
  const double amu = 1822.888486209;
  const double mo = m.oxygen * amu, mc = m.carbon * amu, mh = m.hydrogen * amu;
  const double a = g.angle_och_deg * std::numbers::pi / 180.0;
  const double rho = g.r_ch * std::sin(a);
  const double zh = g.r_ch * std::cos(a);
  const double total = mo + mc + 3 * mh;
  const double zcm = (mo * g.r_oc + 3 * mh * zh) / total;
  const double axial = mc * zcm * zcm + mo * (g.r_oc - zcm) * (g.r_oc - zcm) + 3 * mh * (zh - zcm) * (zh - zcm);
  return {axial + 1.5 * mh * rho * rho, 3 * mh * rho * rho};
}

}  // namespace

TEST(Molecule, TableGeometryGivesValidSymmetricTop) {
  const LigandGeometry g;  // 2.600, 2.053, 110.73
  const AtomicMasses m;
  const auto spec = build_ligand(g, m);
  EXPECT_GT(spec.i_xi, spec.i_zeta);
  EXPECT_GT(spec.i_zeta, 0.0);
  EXPECT_GT(spec.A, spec.B);
  EXPECT_GT(spec.B, 0.0);
  EXPECT_NEAR(spec.i_xi / spec.i_eta - 1.0, 0.0, 1e-12);

  // off-diagonal inertia vanishes, principal moments agree with the diagonal
  const double scale = spec.inertia.cwiseAbs().maxCoeff();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (i != j) EXPECT_LT(std::abs(spec.inertia(i, j)), 1e-12 * scale);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(spec.inertia);
  EXPECT_NEAR(es.eigenvalues()(0), spec.i_zeta, 1e-10 * scale);
  EXPECT_NEAR(es.eigenvalues()(2), spec.i_xi, 1e-10 * scale);

  const auto ref = closed_form(g, m);
  EXPECT_NEAR(spec.i_xi / ref.i_xi - 1.0, 0.0, 1e-13);
  EXPECT_NEAR(spec.i_zeta / ref.i_zeta - 1.0, 0.0, 1e-13);
  EXPECT_NEAR(spec.A * 2.0 * ref.i_zeta, 1.0, 1e-13);
  EXPECT_NEAR(spec.B * 2.0 * ref.i_xi, 1.0, 1e-13);
}

TEST(Molecule, CenterOfMassAtOrigin) {
  const auto spec = build_ligand({}, {});
  Eigen::Vector3d com = Eigen::Vector3d::Zero();
  for (const auto& a : spec.ligand) com += a.mass * a.position;
  EXPECT_LT(com.norm() / spec.ligand_mass, 1e-14);
}

TEST(Molecule, ReducedMass) {
  const AtomicMasses m;
  const auto spec = build_ligand({}, m);
  const double amu = 1822.888486209;
  const double lig = (m.oxygen + m.carbon + 3 * m.hydrogen) * amu;
  const double mu = m.heavy * amu * lig / (m.heavy * amu + lig);
  EXPECT_NEAR(spec.reduced_mass / mu - 1.0, 0.0, 1e-14);
  EXPECT_NEAR(spec.ligand_mass / lig - 1.0, 0.0, 1e-14);
}

TEST(Molecule, ThreefoldRotationLeavesConstantsUnchanged) {
  LigandGeometry g;
  const auto a = build_ligand(g, {});
  g.h_rotation_deg = 120.0;
  const auto b = build_ligand(g, {});
  EXPECT_NEAR(a.A / b.A - 1.0, 0.0, 1e-14);
  EXPECT_NEAR(a.B / b.B - 1.0, 0.0, 1e-14);
  EXPECT_NEAR(a.reduced_mass / b.reduced_mass - 1.0, 0.0, 1e-14);
}

TEST(Molecule, MasslessHydrogensIsDegenerateTop) {
  AtomicMasses m;
  m.hydrogen = 0.0;
  EXPECT_THROW(build_ligand({}, m), GeometryError);
}

TEST(Molecule, InvalidGeometryRejected) {
  LigandGeometry g;
  g.r_oc = -1.0;
  EXPECT_THROW(build_ligand(g, {}), GeometryError);
  g = {};
  g.angle_och_deg = 180.0;
  EXPECT_THROW(build_ligand(g, {}), GeometryError);
}

TEST(Molecule, LigandEnergy) {
  const auto spec = build_ligand({}, {});
  EXPECT_EQ(spec.ligand_energy(0, 0), 0.0);
  EXPECT_NEAR(spec.ligand_energy(1, 1), 2 * spec.B + (spec.A - spec.B), 1e-18);
  EXPECT_NEAR(spec.ligand_energy(1, -1), spec.ligand_energy(1, 1), 0.0);
  const auto ref = closed_form({}, {});
  const double a = 1.0 / (2 * ref.i_zeta), b = 1.0 / (2 * ref.i_xi);
  EXPECT_NEAR(spec.ligand_energy(2, 1), 6 * b + (a - b), 1e-13 * a);
  EXPECT_THROW(spec.ligand_energy(1, 2), std::domain_error);
}
