#pragma once

// Truncated coupled angular basis Y^{JM}_{jkl} at fixed J and its
// partition into blocks that the potential cannot connect.

#include <algorithm>
#include <cstdlib>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>
#include <vector>

namespace rovib {

struct Channel {
  int j = 0;
  int k = 0;
  int l = 0;
  friend bool operator==(const Channel&, const Channel&) = default;
};

struct ChannelSpace {
  int J = 0;
  int j_max = 0;
  int l_max = 0;
  int k_max = 0;
  std::vector<Channel> channels;

  std::size_t size() const { return channels.size(); }
  const Channel& operator[](std::size_t i) const { return channels[i]; }
};

/// All (j,k,l) with j <= j_max, l <= l_max, |k| <= min(j, k_max) and
/// |j-l| <= J <= j+l, ordered lexicographically in (k, j, l).
inline ChannelSpace enumerate_channels(int J, int j_max, int l_max, int k_max) {
  if (J < 0 || j_max < 0 || l_max < 0 || k_max < 0) {
    throw std::invalid_argument("enumerate_channels: limits must be nonnegative");
  }
  ChannelSpace s{J, j_max, l_max, k_max, {}};
  const int kk = std::min(j_max, k_max);
  for (int k = -kk; k <= kk; ++k)
    for (int j = std::abs(k); j <= j_max; ++j)
      for (int l = std::abs(j - J); l <= std::min(l_max, j + J); ++l) s.channels.push_back({j, k, l});
  return s;
}

/// Channel indices grouped by connected components of k under k -> k + mu.
/// Blocks are ordered by their smallest k; indices inside a block keep the
/// space ordering.
inline std::vector<std::vector<std::size_t>> k_blocks(const ChannelSpace& space, const std::set<int>& mu_set) {
  std::set<int> ks;
  for (const auto& c : space.channels) ks.insert(c.k);
  std::map<int, int> parent;
  for (int k : ks) parent[k] = k;
  auto find = [&](int k) {
    while (parent[k] != k) k = parent[k] = parent[parent[k]];
    return k;
  };
  for (int k : ks)
    for (int mu : mu_set)
      if (mu != 0 && ks.count(k + mu)) {
        const int a = find(k), b = find(k + mu);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
      }

  std::map<int, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < space.size(); ++i) groups[find(space[i].k)].push_back(i);
  std::vector<std::vector<std::size_t>> out;
  for (auto& [root, idx] : groups) out.push_back(std::move(idx));
  return out;
}

}  // namespace rovib
