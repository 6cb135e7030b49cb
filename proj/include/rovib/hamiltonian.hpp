#pragma once

// Coupled-channel Hamiltonian over (channel x radial function) indices,
// stored per k-block.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "rovib/angular.hpp"
#include "rovib/channels.hpp"
#include "rovib/molecule.hpp"
#include "rovib/parallel.hpp"
#include "rovib/potential.hpp"
#include "rovib/radial.hpp"

namespace rovib {

struct DimensionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// <j k l; J| Y_lm(body) |j~ k~ l~; J>, the geometric factor multiplying
/// V_lm(R):
///   (-1)^(j+j~+k~-J) sqrt((2j+1)(2j~+1)(2l+1)(2l~+1)(2lam+1)/4pi)
///   {j l J; l~ j~ lam} (l lam l~; 0 0 0) (j lam j~; -k -mu k~)
/// Symmetric-top functions are sqrt((2j+1)/8pi^2) D^{j*}_{mk}, so the
/// selection rule is mu = k~ - k.
inline double angular_coupling(int lambda, int mu, const Channel& a, const Channel& b, int J) {
  if (mu != b.k - a.k) return 0.0;
  if (lambda < std::abs(mu)) return 0.0;
  if ((a.l + lambda + b.l) % 2) return 0.0;
  if (lambda < std::abs(a.l - b.l) || lambda > a.l + b.l) return 0.0;
  if (lambda < std::abs(a.j - b.j) || lambda > a.j + b.j) return 0.0;
  const double s6 = angular::wigner6j(a.j, a.l, J, b.l, b.j, lambda);
  if (s6 == 0.0) return 0.0;
  const double s3l = angular::wigner3j(a.l, lambda, b.l, 0, 0, 0);
  const double s3j = angular::wigner3j(a.j, lambda, b.j, -a.k, -mu, b.k);
  const int ph = a.j + b.j + b.k - J;
  const double sign = (ph % 2 == 0) ? 1.0 : -1.0;
  const double pre = (2.0 * a.j + 1) * (2.0 * b.j + 1) * (2.0 * a.l + 1) * (2.0 * b.l + 1) * (2.0 * lambda + 1) /
                     (4.0 * std::numbers::pi);
  return sign * std::sqrt(pre) * s6 * s3l * s3j;
}

/// W(i, i') = sum_lm angular_coupling(lam, mu, ch_i, ch_i') V_lm over the
/// channels `idx` of `space`.
inline Eigen::MatrixXd angular_matrix(const ChannelSpace& space, const std::vector<std::size_t>& idx,
                                      const PotentialExpansion& v, int threads = 1) {
  std::map<int, std::vector<std::pair<int, double>>> by_mu;
  for (const auto& [key, val] : v.terms)
    if (val != 0.0) by_mu[key.second].push_back({key.first, val});
  const std::size_t n = idx.size();
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  parallel_for(n, threads, [&](std::size_t r) {
    const Channel& a = space[idx[r]];
    for (std::size_t c = r; c < n; ++c) {
      const Channel& b = space[idx[c]];
      auto it = by_mu.find(b.k - a.k);
      if (it == by_mu.end()) continue;
      const int lo = std::max(std::abs(a.l - b.l), std::abs(a.j - b.j));
      const int hi = std::min(a.l + b.l, a.j + b.j);
      double s = 0.0;
      for (const auto& [lam, val] : it->second) {
        if (lam < lo || lam > hi) continue;
        s += angular_coupling(lam, it->first, a, b, space.J) * val;
      }
      w(r, c) = s;
      w(c, r) = s;
    }
  });
  return w;
}

struct RotorConstants {
  double A = 0.0;
  double B = 0.0;
};

struct HamiltonianOptions {
  CentrifugalMode centrifugal = CentrifugalMode::linearized;
  std::size_t dense_limit = 4000;
  std::size_t max_dimension = 4'000'000;
  int threads = 1;
};

struct HamiltonianBlock {
  std::vector<std::size_t> channels;  // indices into the channel space
  int n_basis = 1;
  bool is_sparse = false;
  Eigen::MatrixXd dense;
  Eigen::SparseMatrix<double> sparse;

  std::size_t dim() const { return channels.size() * std::size_t(n_basis); }

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const {
    if (is_sparse) return sparse * x;
    return dense * x;
  }

  Eigen::MatrixXd to_dense() const { return is_sparse ? Eigen::MatrixXd(sparse) : dense; }
};

struct CoupledHamiltonian {
  int J = 0;
  ChannelSpace space;
  RadialBasis basis;
  RotorConstants rotor;
  std::set<int> mu_set;
  std::vector<HamiltonianBlock> blocks;

  std::size_t dim() const { return space.size() * std::size_t(basis.size()); }

  /// Global row index of (channel, radial function).
  std::size_t index(std::size_t channel, int a) const { return channel * basis.size() + a; }

  /// Full matrix in the global ordering. Small instances only.
  Eigen::MatrixXd full_dense() const {
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim(), dim());
    const int nb = basis.size();
    for (const auto& b : blocks) {
      const Eigen::MatrixXd d = b.to_dense();
      for (std::size_t i = 0; i < b.channels.size(); ++i)
        for (std::size_t k = 0; k < b.channels.size(); ++k)
          h.block(index(b.channels[i], 0), index(b.channels[k], 0), nb, nb) = d.block(i * nb, k * nb, nb, nb);
    }
    return h;
  }

  /// (row, col, value) triplets of all nonzeros in global indices.
  void dump_triplets(std::ostream& os) const {
    const int nb = basis.size();
    const auto old = os.precision(17);
    os << "# row col value_hartree\n";
    for (const auto& b : blocks) {
      const Eigen::MatrixXd d = b.to_dense();
      for (Eigen::Index r = 0; r < d.rows(); ++r)
        for (Eigen::Index c = 0; c < d.cols(); ++c) {
          if (d(r, c) == 0.0) continue;
          os << index(b.channels[r / nb], int(r % nb)) << ' ' << index(b.channels[c / nb], int(c % nb)) << ' '
             << d(r, c) << '\n';
        }
    }
    os.precision(old);
  }
};

/// H[(ch,a),(ch~,b)] = d_ch,ch~ [ w(a+1/2) d_ab + E_lig(j,k) d_ab + l(l+1) C_ab / 2mu ]
///                   + W(ch, ch~) d_ab
/// with W the angular potential matrix (V_lm independent of R) and C the
/// centrifugal base matrix for the chosen mode.
inline CoupledHamiltonian assemble(const ChannelSpace& space, const RadialBasis& basis, const RotorConstants& rotor,
                                   const PotentialExpansion& potential, const HamiltonianOptions& opt = {}) {
  const std::size_t total = space.size() * std::size_t(basis.size());
  if (total > opt.max_dimension) {
    throw DimensionError("Hamiltonian dimension " + std::to_string(total) + " exceeds max_dimension " +
                         std::to_string(opt.max_dimension));
  }
  CoupledHamiltonian h{space.J, space, basis, rotor, potential.mu_set, {}};
  const int nb = basis.size();
  const Eigen::MatrixXd cbase = basis.centrifugal_base(opt.centrifugal) / (2.0 * basis.reduced_mass());

  for (auto& idx : k_blocks(space, potential.mu_set)) {
    HamiltonianBlock blk;
    blk.channels = std::move(idx);
    blk.n_basis = nb;
    const std::size_t nc = blk.channels.size();
    const Eigen::MatrixXd w = angular_matrix(space, blk.channels, potential, opt.threads);

    auto diag_block = [&](std::size_t i) {
      const Channel& ch = space[blk.channels[i]];
      Eigen::MatrixXd d = (ch.l * (ch.l + 1.0)) * cbase;
      const double elig = ligand_energy(ch.j, ch.k, rotor.A, rotor.B);
      for (int a = 0; a < nb; ++a) d(a, a) += basis.ho_energy(a) + elig + w(i, i);
      return d;
    };

    blk.is_sparse = blk.dim() > opt.dense_limit;
    if (!blk.is_sparse) {
      blk.dense = Eigen::MatrixXd::Zero(blk.dim(), blk.dim());
      parallel_for(nc, opt.threads, [&](std::size_t i) {
        blk.dense.block(i * nb, i * nb, nb, nb) = diag_block(i);
        for (std::size_t k = 0; k < nc; ++k) {
          if (k == i || w(i, k) == 0.0) continue;
          for (int a = 0; a < nb; ++a) blk.dense(i * nb + a, k * nb + a) = w(i, k);
        }
      });
    } else {
      std::vector<std::vector<Eigen::Triplet<double>>> rows(nc);
      parallel_for(nc, opt.threads, [&](std::size_t i) {
        const Eigen::MatrixXd d = diag_block(i);
        for (int a = 0; a < nb; ++a)
          for (int b = 0; b < nb; ++b)
            if (d(a, b) != 0.0) rows[i].emplace_back(int(i * nb + a), int(i * nb + b), d(a, b));
        for (std::size_t k = 0; k < nc; ++k) {
          if (k == i || w(i, k) == 0.0) continue;
          for (int a = 0; a < nb; ++a) rows[i].emplace_back(int(i * nb + a), int(k * nb + a), w(i, k));
        }
      });
      std::vector<Eigen::Triplet<double>> all;
      for (auto& r : rows) all.insert(all.end(), r.begin(), r.end());
      blk.sparse.resize(Eigen::Index(blk.dim()), Eigen::Index(blk.dim()));
      blk.sparse.setFromTriplets(all.begin(), all.end());
      blk.sparse.makeCompressed();
    }
    h.blocks.push_back(std::move(blk));
  }
  return h;
}

}  // namespace rovib
