#pragma once

// Lowest eigenpairs of each k-block, canonical eigenvector gauge, and
// spectroscopic labels (v_par, v_perp, l, K).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "rovib/angular.hpp"
#include "rovib/hamiltonian.hpp"
#include "rovib/parallel.hpp"

namespace rovib {

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EigenResult {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;  // columns
  std::vector<double> residuals;
  double scale = 0.0;  // spectral-norm estimate used for the residual test
  int iterations = 0;
};

struct LanczosOptions {
  int block = 4;
  int max_basis = 0;  // 0: automatic
  int max_restarts = 500;
  double tol = 1e-9;  // relative to the spectral scale
  std::uint64_t seed = 20240611;
};

inline void fill_residuals(const std::function<Eigen::MatrixXd(const Eigen::MatrixXd&)>& apply, EigenResult& r) {
  const Eigen::MatrixXd hx = apply(r.vectors);
  r.residuals.resize(r.values.size());
  for (Eigen::Index i = 0; i < r.values.size(); ++i)
    r.residuals[i] = (hx.col(i) - r.values(i) * r.vectors.col(i)).norm();
}

inline EigenResult dense_lowest(const Eigen::MatrixXd& h, int n) {
  if (h.rows() != h.cols()) throw std::invalid_argument("dense_lowest: matrix not square");
  if (n < 1 || n > h.rows()) throw std::invalid_argument("dense_lowest: n_states must lie in [1, dim]");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  if (es.info() != Eigen::Success) throw NumericalError("dense eigensolver failed");
  EigenResult r;
  r.values = es.eigenvalues().head(n);
  r.vectors = es.eigenvectors().leftCols(n);
  r.scale = std::max(std::abs(es.eigenvalues()(0)), std::abs(es.eigenvalues()(h.rows() - 1)));
  fill_residuals([&](const Eigen::MatrixXd& x) { return Eigen::MatrixXd(h * x); }, r);
  return r;
}

namespace detail {

// Orthonormalize the columns of x against basis[:, :s] (two passes) and
// among themselves. Columns that vanish are replaced by random directions.
inline Eigen::MatrixXd orthonormal_block(const Eigen::MatrixXd& basis, Eigen::Index s, Eigen::MatrixXd x,
                                         std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    for (int attempt = 0; attempt < 8; ++attempt) {
      const double before = x.col(c).norm();
      for (int pass = 0; pass < 2; ++pass) {
        if (s > 0) x.col(c) -= basis.leftCols(s) * (basis.leftCols(s).transpose() * x.col(c));
        for (Eigen::Index p = 0; p < c; ++p) x.col(c) -= x.col(p) * x.col(p).dot(x.col(c));
      }
      const double after = x.col(c).norm();
      if (after > 1e-8 * std::max(before, 1e-300) && after > 1e-300) {
        x.col(c) /= after;
        break;
      }
      for (Eigen::Index i = 0; i < x.rows(); ++i) x(i, c) = g(rng);
    }
  }
  return x;
}

}  // namespace detail

/// Lowest n eigenpairs of a symmetric operator by block Lanczos with full
/// reorthogonalization and thick restart. The projected matrix is formed
/// explicitly as V^T (H V).
inline EigenResult lanczos_lowest(const std::function<Eigen::MatrixXd(const Eigen::MatrixXd&)>& apply,
                                  Eigen::Index dim, int n, double scale, const LanczosOptions& opt = {}) {
  if (n < 1 || n > dim) throw std::invalid_argument("lanczos_lowest: n_states must lie in [1, dim]");
  const int p = std::max(1, std::min<int>(opt.block, int(dim)));
  Eigen::Index m = opt.max_basis > 0 ? opt.max_basis : std::max<Eigen::Index>(3 * n + 4 * p, 60);
  m = std::min(m, dim);
  if (m < n + p) m = std::min<Eigen::Index>(dim, n + p);
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> g;

  Eigen::MatrixXd V(dim, m), W(dim, m);
  Eigen::Index s = 0;
  Eigen::MatrixXd next(dim, p);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (int c = 0; c < p; ++c) next(i, c) = g(rng);

  EigenResult r;
  r.scale = scale;
  for (int it = 0; it <= opt.max_restarts; ++it) {
    while (s < m) {
      const Eigen::Index add = std::min<Eigen::Index>(p, m - s);
      Eigen::MatrixXd q = detail::orthonormal_block(V, s, next.leftCols(add), rng);
      V.middleCols(s, add) = q;
      W.middleCols(s, add) = apply(q);
      next = W.middleCols(s, add);
      if (next.cols() < p) next.conservativeResize(Eigen::NoChange, p);
      s += add;
    }
    Eigen::MatrixXd T = V.leftCols(s).transpose() * W.leftCols(s);
    T = 0.5 * (T + T.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    const Eigen::MatrixXd& S = es.eigenvectors();
    const Eigen::MatrixXd X = V.leftCols(s) * S.leftCols(n);
    const Eigen::MatrixXd HX = W.leftCols(s) * S.leftCols(n);
    std::vector<double> res(n);
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
      res[i] = (HX.col(i) - es.eigenvalues()(i) * X.col(i)).norm();
      worst = std::max(worst, res[i]);
    }
    r.iterations = it + 1;
    if (worst <= opt.tol * scale || s == dim) {
      r.values = es.eigenvalues().head(n);
      r.vectors = X;
      r.residuals = res;
      return r;
    }
    if (it == opt.max_restarts) break;
    // thick restart: keep the leading Ritz vectors, continue from residuals
    const Eigen::Index keep = std::min<Eigen::Index>(s - p, std::max<Eigen::Index>(n + p, s / 2));
    const Eigen::MatrixXd Vk = V.leftCols(s) * S.leftCols(keep);
    const Eigen::MatrixXd Wk = W.leftCols(s) * S.leftCols(keep);
    V.leftCols(keep) = Vk;
    W.leftCols(keep) = Wk;
    s = keep;
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return res[a] > res[b]; });
    for (int c = 0; c < p; ++c) {
      const int i = order[c % n];
      next.col(c) = HX.col(i) - es.eigenvalues()(i) * X.col(i);
    }
  }
  throw NumericalError("Lanczos did not converge: residual above " + std::to_string(opt.tol * scale) + " after " +
                       std::to_string(opt.max_restarts) + " restarts");
}

/// Largest absolute row sum, an upper bound on the spectral norm.
inline double row_sum_bound(const HamiltonianBlock& b) {
  if (!b.is_sparse) return b.dense.cwiseAbs().rowwise().sum().maxCoeff();
  Eigen::VectorXd s = Eigen::VectorXd::Zero(b.sparse.rows());
  for (int k = 0; k < b.sparse.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(b.sparse, k); it; ++it) s(it.row()) += std::abs(it.value());
  return s.maxCoeff();
}

/// Deterministic gauge. Within each cluster of (numerically) degenerate
/// eigenvalues the subspace is re-spanned by pivoted projections of unit
/// vectors, which depends only on the subspace; every vector then has its
/// largest component made positive.
inline void canonicalize(EigenResult& r, double degeneracy_tol) {
  const Eigen::Index n = r.values.size();
  Eigen::Index start = 0;
  while (start < n) {
    Eigen::Index end = start + 1;
    while (end < n && r.values(end) - r.values(end - 1) <= degeneracy_tol) ++end;
    const Eigen::Index d = end - start;
    if (d > 1) {
      Eigen::MatrixXd Q = r.vectors.middleCols(start, d);
      Eigen::MatrixXd out(Q.rows(), d);
      for (Eigen::Index c = 0; c < d; ++c) {
        // diagonal of the projector Q Q^T
        const Eigen::VectorXd diag = Q.rowwise().squaredNorm();
        Eigen::Index piv = 0;
        for (Eigen::Index i = 1; i < diag.size(); ++i)
          if (diag(i) > diag(piv) * (1.0 + 1e-10)) piv = i;
        Eigen::VectorXd x = Q * Q.row(piv).transpose();
        x /= x.norm();
        out.col(c) = x;
        // remove x from the subspace
        const Eigen::VectorXd coef = Q.transpose() * x;
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(Eigen::MatrixXd::Identity(d - c, d - c) - coef * coef.transpose(),
                                              Eigen::ComputeFullU);
        Q = Q * svd.matrixU().leftCols(d - c - 1);
      }
      r.vectors.middleCols(start, d) = out;
    }
    start = end;
  }
  for (Eigen::Index c = 0; c < n; ++c) {
    Eigen::Index piv = 0;
    for (Eigen::Index i = 1; i < r.vectors.rows(); ++i)
      if (std::abs(r.vectors(i, c)) > std::abs(r.vectors(piv, c)) * (1.0 + 1e-10)) piv = i;
    if (r.vectors(piv, c) < 0) r.vectors.col(c) *= -1.0;
  }
}

struct StateLabels {
  int k = 0;          // dominant ligand projection on zeta
  int K = 0;          // dominant projection of J on the heavy-atom axis
  bool K_pm = false;  // equal weight on +K and -K (parity-mixed pair)
  int l_vib = 0;      // K - k
  int v_par = 0;
  int v_perp = 0;
  double weight_k = 0.0, weight_K = 0.0, weight_a = 0.0;
  bool mixed = false;
};

struct RovibState {
  int J = 0;
  int block = 0;
  int index = 0;  // position in the energy-sorted list for this J
  double energy = 0.0;
  double residual = 0.0;
  std::vector<std::size_t> channels;  // channel indices of the block
  int n_basis = 1;
  Eigen::VectorXd F;  // (block channel, radial) coefficients
  StateLabels labels;

  std::string id() const { return "J" + std::to_string(J) + "_n" + std::to_string(index); }
};

struct SolverOptions {
  int threads = 1;
  double residual_tol = 1e-9;
  double degeneracy_tol = 1e-12;
  double band_tol = 1e-5;  // hartree; same-label states closer than this share v_perp
  LanczosOptions lanczos;
};

/// Dominant k, K, radial index and their weights for one state.
inline StateLabels dominant_labels(const RovibState& s, const ChannelSpace& space) {
  StateLabels L;
  const int nb = s.n_basis;
  const int J = space.J;
  std::map<int, double> wk, wK;
  std::vector<double> wa(nb, 0.0);
  // group amplitudes by (j, k, a) for the l -> Omega transform
  std::map<std::tuple<int, int>, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < s.channels.size(); ++i) {
    const Channel& c = space[s.channels[i]];
    groups[{c.j, c.k}].push_back(i);
    for (int a = 0; a < nb; ++a) {
      const double w = s.F(i * nb + a) * s.F(i * nb + a);
      wk[c.k] += w;
      wa[a] += w;
    }
  }
  for (const auto& [key, idx] : groups) {
    const int j = std::get<0>(key);
    for (int om = -std::min(j, J); om <= std::min(j, J); ++om)
      for (int a = 0; a < nb; ++a) {
        double amp = 0.0;
        for (auto i : idx) {
          const int l = space[s.channels[i]].l;
          amp += s.F(i * nb + a) * std::sqrt((2.0 * l + 1) / (2.0 * J + 1)) * angular::clebsch_gordan(j, om, l, 0, J, om);
        }
        wK[om] += amp * amp;
      }
  }
  auto argmax = [](const std::map<int, double>& m) {
    auto best = m.begin();
    for (auto it = m.begin(); it != m.end(); ++it)
      if (it->second > best->second * (1.0 + 1e-9)) best = it;
    return *best;
  };
  const auto [k, pk] = argmax(wk);
  L.k = k;
  L.weight_k = pk;
  auto [K0, pK0] = argmax(wK);
  int K = K0;
  double pK = pK0;
  const double partner = (K != 0 && wK.count(-K)) ? wK.at(-K) : 0.0;
  if (K != 0 && std::abs(partner - pK) <= 1e-6 * std::max(pK, 1e-300)) {
    L.K_pm = true;
    K = std::abs(K);
    pK += partner;
  }
  L.K = K;
  L.weight_K = pK;
  L.l_vib = L.K - L.k;
  L.v_par = int(std::max_element(wa.begin(), wa.end()) - wa.begin());
  L.weight_a = wa[L.v_par];
  L.mixed = std::min({L.weight_k, L.weight_K, L.weight_a}) < 0.5;
  return L;
}

/// Labels for an energy-sorted list of states of one J: dominant quantum
/// numbers, then v_perp = |l| + 2 * (ordinal within the series of equal
/// (k, K, v_par)).
/// States must be energy-sorted. Within one (k, K, K_pm, v_par) group the
/// n-th band gets v_perp = |l| + 2n; split doublets stay in one band.
inline void assign_labels(std::vector<RovibState>& states, const ChannelSpace& space, double band_tol = 1e-5) {
  std::map<std::tuple<int, int, bool, int>, std::pair<int, double>> seen;  // band count, last energy
  for (auto& s : states) {
    s.labels = dominant_labels(s, space);
    const auto key = std::make_tuple(s.labels.k, s.labels.K, s.labels.K_pm, s.labels.v_par);
    auto it = seen.find(key);
    int ord = 0;
    if (it == seen.end()) {
      seen.emplace(key, std::make_pair(1, s.energy));
    } else {
      if (s.energy - it->second.second > band_tol) ++it->second.first;
      it->second.second = s.energy;
      ord = it->second.first - 1;
    }
    s.labels.v_perp = std::abs(s.labels.l_vib) + 2 * ord;
  }
}

/// Lowest n_states eigenpairs of every block, merged and energy-sorted,
/// labeled.
inline std::vector<RovibState> solve_lowest(const CoupledHamiltonian& h, int n_states, const SolverOptions& opt = {}) {
  if (n_states < 1) throw std::invalid_argument("solve_lowest: n_states must be >= 1");
  std::vector<std::vector<RovibState>> per_block(h.blocks.size());
  parallel_for(h.blocks.size(), opt.threads, [&](std::size_t b) {
    const auto& blk = h.blocks[b];
    const int n = int(std::min<std::size_t>(std::size_t(n_states), blk.dim()));
    EigenResult r;
    if (!blk.is_sparse) {
      r = dense_lowest(blk.dense, n);
    } else {
      LanczosOptions lo = opt.lanczos;
      lo.tol = opt.residual_tol;
      r = lanczos_lowest([&](const Eigen::MatrixXd& x) { return Eigen::MatrixXd(blk.sparse * x); },
                         Eigen::Index(blk.dim()), n, row_sum_bound(blk), lo);
    }
    canonicalize(r, opt.degeneracy_tol * std::max(1.0, r.scale));
    fill_residuals([&](const Eigen::MatrixXd& x) {
      Eigen::MatrixXd y(x.rows(), x.cols());
      for (Eigen::Index c = 0; c < x.cols(); ++c) y.col(c) = blk.apply(x.col(c));
      return y;
    }, r);
    for (int i = 0; i < n; ++i) {
      if (r.residuals[i] > opt.residual_tol * r.scale) {
        throw NumericalError("eigenpair residual " + std::to_string(r.residuals[i]) + " exceeds " +
                             std::to_string(opt.residual_tol * r.scale) + " in block " + std::to_string(b));
      }
      RovibState s;
      s.J = h.J;
      s.block = int(b);
      s.energy = r.values(i);
      s.residual = r.residuals[i];
      s.channels = blk.channels;
      s.n_basis = blk.n_basis;
      s.F = r.vectors.col(i);
      per_block[b].push_back(std::move(s));
    }
  });
  std::vector<RovibState> all;
  for (auto& v : per_block)
    for (auto& s : v) all.push_back(std::move(s));
  std::stable_sort(all.begin(), all.end(), [](const RovibState& a, const RovibState& b) {
    if (a.energy != b.energy) return a.energy < b.energy;
    return a.block < b.block;
  });
  for (std::size_t i = 0; i < all.size(); ++i) all[i].index = int(i);
  assign_labels(all, h.space, opt.band_tol);
  return all;
}

}  // namespace rovib
