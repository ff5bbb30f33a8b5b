#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace snowembed {

struct ValidateOptions {
  // Additive slack when checking d(i,j) <= d(i,k) + d(k,j); absorbs input rounding.
  double triangle_tol = 1e-12;
  // Merge points at distance zero instead of rejecting them.
  bool merge_duplicates = false;
};

/// A finite metric space: labeled points with an exact symmetric distance
/// matrix. Immutable after construction, safe for unrestricted concurrent reads.
class FiniteMetricSpace {
 public:
  /// Checks the metric axioms and returns a validated space with cached
  /// diameter. Throws AsymmetryError, NegativeDistanceError, NonzeroDiagonal,
  /// TriangleViolation (with the offending triple) or DuplicatePoints.
  static FiniteMetricSpace validate(Eigen::MatrixXd dist, std::vector<std::string> labels,
                                    const ValidateOptions& opts = {});

  int size() const { return static_cast<int>(dist_.rows()); }
  double distance(int i, int j) const { return dist_(i, j); }
  const Eigen::MatrixXd& distances() const { return dist_; }
  const std::vector<std::string>& labels() const { return labels_; }
  double diameter() const { return diameter_; }
  /// Smallest nonzero distance; 0 for a single point.
  double min_positive_distance() const { return min_positive_; }
  /// Content hash over labels and distance entries; used to tie embeddings to
  /// the exact space they were built on.
  std::uint64_t content_hash() const;

 private:
  FiniteMetricSpace(Eigen::MatrixXd dist, std::vector<std::string> labels);

  Eigen::MatrixXd dist_;
  std::vector<std::string> labels_;
  double diameter_ = 0.0;
  double min_positive_ = 0.0;
};

struct NormalizedSpace {
  FiniteMetricSpace space;  // diameter is exactly 1/2
  double scale;             // factor the distances were multiplied by
  double original_diameter;
};

/// Rescales so the diameter becomes exactly 1/2. Throws DegenerateSpace when
/// all points coincide.
NormalizedSpace normalize_diameter(const FiniteMetricSpace& space);

/// Indices of the closed ball B(center, radius), in ascending order.
std::vector<int> ball_members(const FiniteMetricSpace& space, int center, double radius);

/// min over s in members of d(x, s). Throws EmptySet for an empty member list.
double set_distance(const FiniteMetricSpace& space, int x, const std::vector<int>& members);

}  // namespace snowembed
