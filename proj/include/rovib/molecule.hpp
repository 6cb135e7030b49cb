#pragma once

// Rigid symmetric-top ligand (O-C-H3) plus a heavy atom. Builds the ligand in
// its own frame, derives moments of inertia, rotational constants and the
// heavy-atom/ligand reduced mass. Atomic units throughout.

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rovib/units.hpp"

namespace rovib {

struct GeometryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct LigandGeometry {
  double r_oc = 2.600;           // bohr
  double r_ch = 2.053;           // bohr
  double angle_och_deg = 110.73;
  double h_rotation_deg = 0.0;   // azimuth of the first H about zeta
};

/// Isotope masses in amu. Defaults: 174Yb, 16O, 12C, 1H.
struct AtomicMasses {
  double heavy = 173.938866437;
  double oxygen = 15.994914619;
  double carbon = 12.0;
  double hydrogen = 1.00782503223;
};

struct Atom {
  std::string symbol;
  double mass;              // electron masses
  Eigen::Vector3d position; // bohr, ligand frame, origin at ligand c.m.
};

struct MoleculeSpec {
  std::vector<Atom> ligand;
  double mass_heavy = 0.0;    // electron masses
  double ligand_mass = 0.0;   // electron masses
  Eigen::Matrix3d inertia = Eigen::Matrix3d::Zero();
  double i_xi = 0.0, i_eta = 0.0, i_zeta = 0.0;
  double A = 0.0, B = 0.0;    // hartree
  double reduced_mass = 0.0;  // electron masses
  double r_eq = 5.25;         // bohr, heavy atom to ligand c.m.

  double ligand_energy(int j, int k) const;
};

/// E_lig = B j(j+1) + (A-B) k^2
inline double ligand_energy(int j, int k, double A, double B) {
  if (j < 0 || std::abs(k) > j) throw std::domain_error("ligand_energy: |k| > j");
  return B * j * (j + 1.0) + (A - B) * double(k) * k;
}

inline double MoleculeSpec::ligand_energy(int j, int k) const {
  return rovib::ligand_energy(j, k, A, B);
}

inline Eigen::Matrix3d inertia_tensor(const std::vector<Atom>& atoms) {
  Eigen::Matrix3d t = Eigen::Matrix3d::Zero();
  for (const auto& a : atoms) {
    const Eigen::Vector3d& r = a.position;
    t += a.mass * (r.squaredNorm() * Eigen::Matrix3d::Identity() - r * r.transpose());
  }
  return t;
}

/// Place O and C on the zeta axis (O on the +zeta side, facing the heavy
/// atom), three H atoms threefold about zeta, shift to the ligand c.m.
inline MoleculeSpec build_ligand(const LigandGeometry& geom, const AtomicMasses& masses,
                                 double r_eq = 5.25) {
  if (!(geom.r_oc > 0.0) || !(geom.r_ch > 0.0)) {
    throw GeometryError("bond lengths must be positive");
  }
  if (!(geom.angle_och_deg > 0.0 && geom.angle_och_deg < 180.0)) {
    throw GeometryError("O-C-H angle must lie in (0, 180) degrees");
  }
  if (!(r_eq > 0.0)) throw GeometryError("R_eq must be positive");
  if (masses.heavy <= 0.0 || masses.oxygen <= 0.0 || masses.carbon <= 0.0 || masses.hydrogen < 0.0) {
    throw GeometryError("atomic masses must be positive");
  }

  const double deg = std::numbers::pi / 180.0;
  const double alpha = geom.angle_och_deg * deg;  // angle between C->O (+zeta) and C->H
  MoleculeSpec spec;
  spec.r_eq = r_eq;
  spec.mass_heavy = units::amu_to_me(masses.heavy);

  spec.ligand.push_back({"C", units::amu_to_me(masses.carbon), {0.0, 0.0, 0.0}});
  spec.ligand.push_back({"O", units::amu_to_me(masses.oxygen), {0.0, 0.0, geom.r_oc}});
  for (int i = 0; i < 3; ++i) {
    const double phi = geom.h_rotation_deg * deg + 2.0 * std::numbers::pi * i / 3.0;
    const double rho = geom.r_ch * std::sin(alpha);
    spec.ligand.push_back({"H", units::amu_to_me(masses.hydrogen),
                           {rho * std::cos(phi), rho * std::sin(phi), geom.r_ch * std::cos(alpha)}});
  }

  Eigen::Vector3d com = Eigen::Vector3d::Zero();
  double total = 0.0;
  for (const auto& a : spec.ligand) {
    com += a.mass * a.position;
    total += a.mass;
  }
  com /= total;
  for (auto& a : spec.ligand) a.position -= com;
  spec.ligand_mass = total;

  spec.inertia = inertia_tensor(spec.ligand);
  spec.i_xi = spec.inertia(0, 0);
  spec.i_eta = spec.inertia(1, 1);
  spec.i_zeta = spec.inertia(2, 2);

  if (!(spec.i_zeta > 0.0) || !(spec.i_zeta < spec.i_xi)) {
    throw GeometryError("ligand is not a prolate symmetric top (need I_xi = I_eta > I_zeta > 0)");
  }
  spec.A = 1.0 / (2.0 * spec.i_zeta);
  spec.B = 1.0 / (2.0 * spec.i_xi);
  spec.reduced_mass = spec.mass_heavy * total / (spec.mass_heavy + total);
  return spec;
}

}  // namespace rovib
