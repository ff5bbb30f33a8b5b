#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "snowembed/embedding.hpp"
#include "snowembed/metric_space.hpp"

namespace snowembed {

struct PairLevel {
  int k = 0;
  bool clamped = false;  // the defining inequality would push k past n
};

/// Largest k in [n0, n] with d <= 4 r_{k-1}, clamped to n.
PairLevel pair_level(double d, double tau, int n0, int n);

struct PairRow {
  int i = 0;
  int j = 0;
  double d = 0.0;
  double embedded = 0.0;
  double ratio = 0.0;  // embedded / d^epsilon
  int level = 0;
  bool clamped = false;
  bool in_scope = false;  // d >= 4 tau^(2n)
};

struct DistortionReport {
  double epsilon = 0.0;
  double tau = 0.0;
  int n0 = 0;
  int n = 0;
  double threshold = 0.0;       // 4 tau^(2n)
  double upper_constant = 0.0;  // 5 sqrt(N) tau^(-2(1-eps))
  double lower_constant = 0.0;  // tau^5 / 8
  double slack = 1e-9;          // relative slack on both bound comparisons
  std::string mode;
  std::uint64_t space_hash = 0;
  std::vector<PairRow> pairs;   // all N(N-1)/2 pairs, (i, j) lexicographic
  std::size_t in_scope_pairs = 0;
  double worst_upper = 0.0;     // max ratio over all pairs
  double worst_lower = 0.0;     // min ratio over in-scope pairs (0 when none)
  bool pass = true;
};

/// Exhaustive pair-by-pair check of both theorem bounds. The embedding must
/// have been built on this exact space (content hash check).
DistortionReport distortion_report(const FiniteMetricSpace& space, const Embedding& embedding,
                                   int threads = 1);

/// max over pairs of |f(x) - f(y)| / d(x,y)^exponent.
double lipschitz_norm(const std::function<Eigen::VectorXd(int)>& point_function,
                      const FiniteMetricSpace& space, double exponent);

}  // namespace snowembed
