#pragma once

// Wigner 3j / 6j symbols, Clebsch-Gordan coefficients, Legendre functions and
// spherical harmonics. Only integer angular momenta are supported.
//
// The Racah sums are evaluated exactly: every term is scaled to an integer
// with a common denominator and accumulated in arbitrary precision, so the
// alternating sum suffers no cancellation. The single rounding happens when
// the exact squared value is converted to double. Factorial arguments above
// kExactFactorialLimit fall back to a log-factorial float evaluation.
//
// Phase conventions: Condon-Shortley everywhere.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <mutex>
#include <numbers>
#include <shared_mutex>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace rovib::angular {

inline constexpr int kExactFactorialLimit = 1000;

namespace detail {

using BigInt = boost::multiprecision::cpp_int;

inline const std::vector<BigInt>& factorial_table() {
  static const std::vector<BigInt> table = [] {
    std::vector<BigInt> t(kExactFactorialLimit + 1);
    t[0] = 1;
    for (int i = 1; i <= kExactFactorialLimit; ++i) t[i] = t[i - 1] * i;
    return t;
  }();
  return table;
}

inline const BigInt& factorial(int n) { return factorial_table()[n]; }

inline double log_factorial(int n) { return std::lgamma(n + 1.0); }

// a / b for positive integers, correctly scaled into double range.
inline double ratio_to_double(const BigInt& a, const BigInt& b) {
  if (a.is_zero()) return 0.0;
  const long na = static_cast<long>(boost::multiprecision::msb(a));
  const long nb = static_cast<long>(boost::multiprecision::msb(b));
  const long shift = 64 - (na - nb);
  BigInt q;
  if (shift >= 0) {
    q = (a << shift) / b;
  } else {
    q = a / (b << -shift);
  }
  return std::ldexp(q.convert_to<double>(), static_cast<int>(-shift));
}

// Product lo * (lo+1) * ... * hi; empty product when hi < lo.
inline BigInt rising(long lo, long hi) {
  BigInt p = 1;
  for (long v = lo; v <= hi; ++v) p *= v;
  return p;
}

inline bool triangle(int a, int b, int c) {
  return c >= std::abs(a - b) && c <= a + b;
}

inline int parity_sign(long n) { return (n % 2 == 0) ? 1 : -1; }

// Exact Racah sum for the 3j symbol. Selection rules already verified.
inline double racah_3j(int j1, int j2, int j3, int m1, int m2, int m3) {
  const std::array<long, 3> c{0, long(j3) - j2 + m1, long(j3) - j1 - m2};
  const std::array<long, 3> d{long(j1) + j2 - j3, long(j1) - m1, long(j2) + m2};
  const long tmin = std::max({0L, -c[1], -c[2]});
  const long tmax = std::min({d[0], d[1], d[2]});
  if (tmin > tmax) return 0.0;

  const int big = j1 + j2 + j3 + 1;
  if (big > kExactFactorialLimit) {
    double sum = 0.0;
    const double lpre =
        0.5 * (log_factorial(j1 + j2 - j3) + log_factorial(j1 - j2 + j3) +
               log_factorial(-j1 + j2 + j3) - log_factorial(big) +
               log_factorial(j1 + m1) + log_factorial(j1 - m1) + log_factorial(j2 + m2) +
               log_factorial(j2 - m2) + log_factorial(j3 + m3) + log_factorial(j3 - m3));
    for (long t = tmin; t <= tmax; ++t) {
      double lt = lpre;
      for (int i = 0; i < 3; ++i) lt -= log_factorial(int(t + c[i])) + log_factorial(int(d[i] - t));
      sum += parity_sign(t) * std::exp(lt);
    }
    return parity_sign(long(j1) - j2 - m3) * sum;
  }

  // T_t = M / (prod (t+c_i)! prod (d_i-t)!) is an integer for tmin <= t <= tmax
  // with M = prod (tmax+c_i)! prod (d_i-tmin)!.
  BigInt term = 1;
  for (int i = 0; i < 3; ++i) term *= rising(tmin + c[i] + 1, tmax + c[i]);
  BigInt sum = 0;
  int sign = parity_sign(tmin);
  for (long t = tmin; t <= tmax; ++t) {
    if (sign > 0) sum += term; else sum -= term;
    if (t < tmax) {
      const std::int64_t num = (d[0] - t) * (d[1] - t) * (d[2] - t);
      const std::int64_t den = (t + 1 + c[0]) * (t + 1 + c[1]) * (t + 1 + c[2]);
      term *= num;
      term /= den;
    }
    sign = -sign;
  }
  if (sum.is_zero()) return 0.0;

  BigInt m = 1;
  for (int i = 0; i < 3; ++i) m *= factorial(int(tmax + c[i])) * factorial(int(d[i] - tmin));
  BigInt pnum = factorial(j1 + j2 - j3) * factorial(j1 - j2 + j3) * factorial(-j1 + j2 + j3);
  pnum *= factorial(j1 + m1) * factorial(j1 - m1);
  pnum *= factorial(j2 + m2) * factorial(j2 - m2);
  pnum *= factorial(j3 + m3) * factorial(j3 - m3);
  const int sum_sign = sum.sign();
  BigInt s2 = sum * sum;
  const double mag = std::sqrt(ratio_to_double(pnum * s2, factorial(big) * m * m));
  return parity_sign(long(j1) - j2 - m3) * sum_sign * mag;
}

// Exact Racah formula for {a b c; d e f}. Triangle rules already verified.
inline double racah_6j(int a, int b, int c, int d, int e, int f) {
  const std::array<long, 4> alpha{long(a) + b + c, long(a) + e + f, long(d) + b + f, long(d) + e + c};
  const std::array<long, 3> beta{long(a) + b + d + e, long(a) + c + d + f, long(b) + c + e + f};
  const long tmin = *std::max_element(alpha.begin(), alpha.end());
  const long tmax = *std::min_element(beta.begin(), beta.end());
  if (tmin > tmax) return 0.0;

  const auto delta_num = [](int x, int y, int z) {
    return factorial(x + y - z) * factorial(x - y + z) * factorial(-x + y + z);
  };

  if (tmax + 1 > kExactFactorialLimit) {
    const auto ldelta = [](int x, int y, int z) {
      return 0.5 * (log_factorial(x + y - z) + log_factorial(x - y + z) +
                    log_factorial(-x + y + z) - log_factorial(x + y + z + 1));
    };
    const double lpre = ldelta(a, b, c) + ldelta(a, e, f) + ldelta(d, b, f) + ldelta(d, e, c);
    double sum = 0.0;
    for (long t = tmin; t <= tmax; ++t) {
      double lt = lpre + log_factorial(int(t + 1));
      for (long al : alpha) lt -= log_factorial(int(t - al));
      for (long be : beta) lt -= log_factorial(int(be - t));
      sum += parity_sign(t) * std::exp(lt);
    }
    return sum;
  }

  // T_t = (t+1)! prod (tmax-alpha_i)!/(t-alpha_i)! prod (beta_j-tmin)!/(beta_j-t)!
  BigInt term = factorial(int(tmin + 1));
  for (long al : alpha) term *= rising(tmin - al + 1, tmax - al);
  BigInt sum = 0;
  int sign = parity_sign(tmin);
  for (long t = tmin; t <= tmax; ++t) {
    if (sign > 0) sum += term; else sum -= term;
    if (t < tmax) {
      BigInt num = BigInt(t + 2) * ((beta[0] - t) * (beta[1] - t)) * (beta[2] - t);
      std::int64_t den = 1;
      for (long al : alpha) den *= (t + 1 - al);
      term *= num;
      term /= den;
    }
    sign = -sign;
  }
  if (sum.is_zero()) return 0.0;

  BigInt m = 1;
  for (long al : alpha) m *= factorial(int(tmax - al));
  for (long be : beta) m *= factorial(int(be - tmin));
  BigInt dnum = delta_num(a, b, c) * delta_num(a, e, f) * delta_num(d, b, f) * delta_num(d, e, c);
  BigInt dden = factorial(a + b + c + 1) * factorial(a + e + f + 1) *
                factorial(d + b + f + 1) * factorial(d + e + c + 1);
  const int sum_sign = sum.sign();
  BigInt s2 = sum * sum;
  return sum_sign * std::sqrt(ratio_to_double(dnum * s2, dden * m * m));
}

template <std::size_t N>
struct ArrayHash {
  std::size_t operator()(const std::array<int, N>& a) const noexcept {
    std::uint64_t h = 1469598103934665603ULL;
    for (int v : a) {
      h ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(v));
      h *= 1099511628211ULL;
    }
    return static_cast<std::size_t>(h ^ (h >> 29));
  }
};

// Thread-safe memo table, sharded to keep writer contention low.
template <std::size_t N>
class SymbolCache {
 public:
  template <class Compute>
  double get(const std::array<int, N>& key, Compute&& compute) {
    auto& shard = shards_[ArrayHash<N>{}(key) % kShards];
    {
      std::shared_lock lock(shard.mutex);
      auto it = shard.map.find(key);
      if (it != shard.map.end()) return it->second;
    }
    const double value = compute();
    std::unique_lock lock(shard.mutex);
    shard.map.emplace(key, value);
    return value;
  }

  std::size_t size() const {
    std::size_t n = 0;
    for (const auto& s : shards_) {
      std::shared_lock lock(s.mutex);
      n += s.map.size();
    }
    return n;
  }

 private:
  static constexpr std::size_t kShards = 64;
  struct Shard {
    mutable std::shared_mutex mutex;
    std::unordered_map<std::array<int, N>, double, ArrayHash<N>> map;
  };
  std::array<Shard, kShards> shards_;
};

inline SymbolCache<9>& cache_3j() {
  static SymbolCache<9> c;
  return c;
}
inline SymbolCache<6>& cache_6j() {
  static SymbolCache<6> c;
  return c;
}

// Canonical Regge square of a 3j symbol: the lexicographically smallest of
// its 72 symmetric images, with the accumulated sign.
struct Regge3j {
  std::array<int, 9> square;
  int sign;
};

inline Regge3j regge_canonical(int j1, int j2, int j3, int m1, int m2, int m3) {
  const int r[3][3] = {{-j1 + j2 + j3, j1 - j2 + j3, j1 + j2 - j3},
                       {j1 - m1, j2 - m2, j3 - m3},
                       {j1 + m1, j2 + m2, j3 + m3}};
  static constexpr int perms[6][3] = {{0, 1, 2}, {1, 2, 0}, {2, 0, 1},
                                      {1, 0, 2}, {0, 2, 1}, {2, 1, 0}};
  const int odd_sign = parity_sign(long(j1) + j2 + j3);
  Regge3j best{{}, 1};
  bool first = true;
  for (int rp = 0; rp < 6; ++rp) {
    for (int cp = 0; cp < 6; ++cp) {
      const int s = ((rp >= 3) ? odd_sign : 1) * ((cp >= 3) ? odd_sign : 1);
      for (int tr = 0; tr < 2; ++tr) {
        std::array<int, 9> cand{};
        for (int i = 0; i < 3; ++i) {
          for (int j = 0; j < 3; ++j) {
            const int ri = perms[rp][i], cj = perms[cp][j];
            cand[3 * i + j] = tr ? r[cj][ri] : r[ri][cj];
          }
        }
        if (first || cand < best.square) {
          best = {cand, s};
          first = false;
        }
      }
    }
  }
  return best;
}

}  // namespace detail

inline void check_jm(int j, int m) {
  if (j < 0) throw std::domain_error("negative angular momentum");
  if (std::abs(m) > j) throw std::domain_error("|m| exceeds j");
}

/// Wigner 3j symbol, evaluated without the memo table.
inline double wigner3j_direct(int j1, int j2, int j3, int m1, int m2, int m3) {
  check_jm(j1, m1);
  check_jm(j2, m2);
  check_jm(j3, m3);
  if (m1 + m2 + m3 != 0) return 0.0;
  if (!detail::triangle(j1, j2, j3)) return 0.0;
  if (m1 == 0 && m2 == 0 && m3 == 0 && (j1 + j2 + j3) % 2 != 0) return 0.0;
  return detail::racah_3j(j1, j2, j3, m1, m2, m3);
}

/// Wigner 3j symbol (j1 j2 j3; m1 m2 m3), memoized on its Regge-canonical form.
inline double wigner3j(int j1, int j2, int j3, int m1, int m2, int m3) {
  check_jm(j1, m1);
  check_jm(j2, m2);
  check_jm(j3, m3);
  if (m1 + m2 + m3 != 0) return 0.0;
  if (!detail::triangle(j1, j2, j3)) return 0.0;
  if (m1 == 0 && m2 == 0 && m3 == 0 && (j1 + j2 + j3) % 2 != 0) return 0.0;
  const auto canon = detail::regge_canonical(j1, j2, j3, m1, m2, m3);
  // Regge images of integer symbols may carry half-integer entries, so the
  // canonical value is evaluated from the original arguments.
  const double v = detail::cache_3j().get(canon.square, [&] {
    return canon.sign * detail::racah_3j(j1, j2, j3, m1, m2, m3);
  });
  return canon.sign * v;
}

/// Wigner 6j symbol {j1 j2 j3; j4 j5 j6}, evaluated without the memo table.
inline double wigner6j_direct(int j1, int j2, int j3, int j4, int j5, int j6) {
  if (j1 < 0 || j2 < 0 || j3 < 0 || j4 < 0 || j5 < 0 || j6 < 0) {
    throw std::domain_error("negative argument to 6j symbol");
  }
  using detail::triangle;
  if (!triangle(j1, j2, j3) || !triangle(j1, j5, j6) || !triangle(j4, j2, j6) ||
      !triangle(j4, j5, j3)) {
    return 0.0;
  }
  return detail::racah_6j(j1, j2, j3, j4, j5, j6);
}

/// Wigner 6j symbol, memoized on its tetrahedral-canonical form.
inline double wigner6j(int j1, int j2, int j3, int j4, int j5, int j6) {
  if (j1 < 0 || j2 < 0 || j3 < 0 || j4 < 0 || j5 < 0 || j6 < 0) {
    throw std::domain_error("negative argument to 6j symbol");
  }
  using detail::triangle;
  if (!triangle(j1, j2, j3) || !triangle(j1, j5, j6) || !triangle(j4, j2, j6) ||
      !triangle(j4, j5, j3)) {
    return 0.0;
  }
  // columns may be permuted; upper and lower entries swapped in two columns
  const std::array<std::array<int, 2>, 3> cols{{{j1, j4}, {j2, j5}, {j3, j6}}};
  static constexpr int perms[6][3] = {{0, 1, 2}, {1, 2, 0}, {2, 0, 1},
                                      {1, 0, 2}, {0, 2, 1}, {2, 1, 0}};
  static constexpr int flips[4][3] = {{0, 0, 0}, {1, 1, 0}, {1, 0, 1}, {0, 1, 1}};
  std::array<int, 6> best{};
  bool first = true;
  for (const auto& p : perms) {
    for (const auto& fl : flips) {
      std::array<int, 6> cand{};
      for (int c = 0; c < 3; ++c) {
        cand[c] = cols[p[c]][fl[c]];
        cand[3 + c] = cols[p[c]][1 - fl[c]];
      }
      if (first || cand < best) {
        best = cand;
        first = false;
      }
    }
  }
  return detail::cache_6j().get(best, [&] {
    return detail::racah_6j(best[0], best[1], best[2], best[3], best[4], best[5]);
  });
}

/// <j1 m1 j2 m2 | J M> with the Condon-Shortley phase.
inline double clebsch_gordan(int j1, int m1, int j2, int m2, int J, int M) {
  check_jm(j1, m1);
  check_jm(j2, m2);
  check_jm(J, M);
  if (m1 + m2 != M) return 0.0;
  const double w = wigner3j(j1, j2, J, m1, m2, -M);
  return detail::parity_sign(long(j1) - j2 + M) * std::sqrt(2.0 * J + 1.0) * w;
}

/// Legendre polynomial P_l(x).
inline double legendre(int l, double x) {
  if (l < 0) throw std::domain_error("negative Legendre degree");
  if (l == 0) return 1.0;
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= l; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

/// All P_0..P_lmax at x.
inline std::vector<double> legendre_all(int lmax, double x) {
  std::vector<double> p(lmax + 1);
  p[0] = 1.0;
  if (lmax >= 1) p[1] = x;
  for (int k = 2; k <= lmax; ++k) {
    p[k] = ((2.0 * k - 1.0) * x * p[k - 1] - (k - 1.0) * p[k - 2]) / k;
  }
  return p;
}

/// Normalized associated Legendre functions Pbar_l^m(x) for l = m..lmax,
/// returned indexed by l (entries below m are zero). Normalized so that
/// int_{-1}^{1} Pbar^2 dx = 1, Condon-Shortley phase included, m >= 0.
inline std::vector<double> assoc_legendre_normalized_all(int lmax, int m, double x) {
  if (m < 0) throw std::domain_error("assoc_legendre_normalized_all: m < 0");
  std::vector<double> p(std::max(lmax, 0) + 1, 0.0);
  if (m > lmax) return p;
  const double s = std::sqrt(std::max(0.0, (1.0 - x) * (1.0 + x)));
  double pmm = std::sqrt(0.5);
  for (int i = 1; i <= m; ++i) pmm *= -std::sqrt((2.0 * i + 1.0) / (2.0 * i)) * s;
  p[m] = pmm;
  if (lmax == m) return p;
  p[m + 1] = x * std::sqrt(2.0 * m + 3.0) * pmm;
  for (int l = m + 2; l <= lmax; ++l) {
    const double a = std::sqrt((4.0 * l * l - 1.0) / (double(l) * l - double(m) * m));
    const double b = std::sqrt(((l - 1.0) * (l - 1.0) - double(m) * m) /
                               (4.0 * (l - 1.0) * (l - 1.0) - 1.0));
    p[l] = a * (x * p[l - 1] - b * p[l - 2]);
  }
  return p;
}

inline double assoc_legendre_normalized(int l, int m, double x) {
  if (l < 0 || std::abs(m) > l) throw std::domain_error("assoc_legendre_normalized: |m| > l");
  const int am = std::abs(m);
  double v = assoc_legendre_normalized_all(l, am, x)[l];
  if (m < 0 && am % 2 == 1) v = -v;
  return v;
}

/// Y_lm(theta, phi), Condon-Shortley phase.
inline std::complex<double> spherical_harmonic(int l, int m, double theta, double phi) {
  if (l < 0 || std::abs(m) > l) throw std::domain_error("spherical_harmonic: |m| > l");
  const double p = assoc_legendre_normalized(l, m, std::cos(theta));
  return p / std::sqrt(2.0 * std::numbers::pi) * std::polar(1.0, m * phi);
}

}  // namespace rovib::angular
