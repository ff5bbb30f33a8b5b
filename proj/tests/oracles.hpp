// Test-only oracles, independent of the library code paths they check.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "snowembed/metric_space.hpp"

namespace oracles {

// Exhaustive minimal covering number: tries every center subset of the space
// in increasing size. Only usable for small instances.
inline int brute_force_cover(const snowembed::FiniteMetricSpace& space,
                             const std::vector<int>& subset, double r) {
  const int n = space.size();
  const int m = static_cast<int>(subset.size());
  auto covers = [&](unsigned long long centers) {
    for (int t = 0; t < m; ++t) {
      bool covered = false;
      for (int c = 0; c < n && !covered; ++c) {
        if ((centers >> c) & 1ull) covered = space.distance(c, subset[t]) <= r;
      }
      if (!covered) return false;
    }
    return true;
  };
  for (int size = 1; size <= m; ++size) {
    // enumerate center subsets of exactly `size` points
    std::vector<int> idx(static_cast<std::size_t>(size));
    for (int i = 0; i < size; ++i) idx[static_cast<std::size_t>(i)] = i;
    for (;;) {
      unsigned long long mask = 0;
      for (int i : idx) mask |= 1ull << i;
      if (covers(mask)) return size;
      int pos = size - 1;
      while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == n - size + pos) --pos;
      if (pos < 0) break;
      ++idx[static_cast<std::size_t>(pos)];
      for (int i = pos + 1; i < size; ++i) idx[static_cast<std::size_t>(i)] = idx[static_cast<std::size_t>(i - 1)] + 1;
    }
  }
  return m;
}

// Exhaustive triangle-inequality witness search; returns true iff some triple
// violates d(i,j) <= d(i,k) + d(k,j) beyond the tolerance.
inline bool any_triangle_violation(const Eigen::MatrixXd& d, double tol = 0.0) {
  const auto n = d.rows();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index k = 0; k < n; ++k)
        if (d(i, j) > d(i, k) + d(k, j) + tol) return true;
  return false;
}

inline double ulp_distance(double a, double b) {
  if (a == b) return 0.0;
  const double dir = std::nextafter(a, b);
  double steps = 0.0;
  double cur = a;
  while (cur != b && steps < 64.0) {
    cur = std::nextafter(cur, b);
    steps += 1.0;
  }
  (void)dir;
  return cur == b ? steps : std::numeric_limits<double>::infinity();
}

}  // namespace oracles
