#include "snowembed/metric_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "snowembed/errors.hpp"

namespace snowembed {

namespace {

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace

FiniteMetricSpace::FiniteMetricSpace(Eigen::MatrixXd dist, std::vector<std::string> labels)
    : dist_(std::move(dist)), labels_(std::move(labels)) {
  const int n = size();
  diameter_ = 0.0;
  min_positive_ = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double d = dist_(i, j);
      diameter_ = std::max(diameter_, d);
      if (d > 0.0 && (min_positive_ == 0.0 || d < min_positive_)) min_positive_ = d;
    }
  }
}

FiniteMetricSpace FiniteMetricSpace::validate(Eigen::MatrixXd dist, std::vector<std::string> labels,
                                              const ValidateOptions& opts) {
  const auto n = dist.rows();
  if (n != dist.cols()) {
    throw BadParameters("distance matrix must be square",
                        {{"rows", dist.rows()}, {"cols", dist.cols()}});
  }
  if (n == 0) throw BadParameters("distance matrix must be nonempty");
  if (static_cast<Eigen::Index>(labels.size()) != n) {
    throw BadParameters("label count must match matrix size",
                        {{"labels", labels.size()}, {"points", n}});
  }

  for (Eigen::Index i = 0; i < n; ++i) {
    if (dist(i, i) != 0.0) {
      throw NonzeroDiagonal("nonzero diagonal entry", {{"index", i}, {"value", dist(i, i)}});
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      const double d = dist(i, j);
      if (!std::isfinite(d)) {
        throw BadParameters("non-finite distance entry", {{"i", i}, {"j", j}});
      }
      if (d < 0.0) {
        throw NegativeDistanceError("negative distance", {{"i", i}, {"j", j}, {"value", d}});
      }
      if (j > i && dist(i, j) != dist(j, i)) {
        throw AsymmetryError("asymmetric distance entries",
                             {{"i", i}, {"j", j}, {"d_ij", dist(i, j)}, {"d_ji", dist(j, i)}});
      }
    }
  }

  // Zero distance between distinct labels: reject, or merge keeping the first
  // occurrence of each coincidence class.
  std::vector<Eigen::Index> keep;
  bool merged = false;
  for (Eigen::Index i = 0; i < n; ++i) {
    bool duplicate = false;
    for (Eigen::Index k : keep) {
      if (dist(i, k) == 0.0) {
        duplicate = true;
        if (!opts.merge_duplicates) {
          throw DuplicatePoints("distinct labels at distance zero",
                                {{"i", k}, {"j", i}, {"label_i", labels[k]}, {"label_j", labels[i]}});
        }
        break;
      }
    }
    if (!duplicate) keep.push_back(i);
    merged = merged || duplicate;
  }
  if (merged) {
    const auto m = static_cast<Eigen::Index>(keep.size());
    Eigen::MatrixXd sub(m, m);
    std::vector<std::string> sublabels(m);
    for (Eigen::Index a = 0; a < m; ++a) {
      sublabels[a] = labels[keep[a]];
      for (Eigen::Index b = 0; b < m; ++b) sub(a, b) = dist(keep[a], keep[b]);
    }
    dist = std::move(sub);
    labels = std::move(sublabels);
  }

  const auto nn = dist.rows();
  for (Eigen::Index i = 0; i < nn; ++i) {
    for (Eigen::Index j = i + 1; j < nn; ++j) {
      const double dij = dist(i, j);
      for (Eigen::Index k = 0; k < nn; ++k) {
        if (k == i || k == j) continue;
        if (dij > dist(i, k) + dist(k, j) + opts.triangle_tol) {
          throw TriangleViolation("triangle inequality violated",
                                  {{"i", i},
                                   {"j", j},
                                   {"via", k},
                                   {"d_ij", dij},
                                   {"d_ik", dist(i, k)},
                                   {"d_kj", dist(k, j)}});
        }
      }
    }
  }

  return FiniteMetricSpace(std::move(dist), std::move(labels));
}

std::uint64_t FiniteMetricSpace::content_hash() const {
  std::uint64_t h = 0xcbf29ce484222325ull;
  const char tag[] = "snowembed.space.v1";
  h = fnv1a(h, tag, sizeof(tag));
  for (const auto& label : labels_) {
    const std::uint64_t len = label.size();
    h = fnv1a(h, &len, sizeof(len));
    h = fnv1a(h, label.data(), label.size());
  }
  const int n = size();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double d = dist_(i, j);
      h = fnv1a(h, &d, sizeof(d));
    }
  }
  return h;
}

NormalizedSpace normalize_diameter(const FiniteMetricSpace& space) {
  const double diam = space.diameter();
  if (diam <= 0.0) {
    throw DegenerateSpace("cannot normalize a space of diameter zero",
                          {{"points", space.size()}});
  }
  // Dividing every entry by 2*diam makes the largest entry exactly 1/2.
  const double denom = 2.0 * diam;
  Eigen::MatrixXd scaled = space.distances() / denom;
  ValidateOptions opts;
  auto normalized = FiniteMetricSpace::validate(std::move(scaled), space.labels(), opts);
  return NormalizedSpace{std::move(normalized), 1.0 / denom, diam};
}

std::vector<int> ball_members(const FiniteMetricSpace& space, int center, double radius) {
  if (center < 0 || center >= space.size()) {
    throw BadParameters("ball center out of range", {{"center", center}});
  }
  if (radius < 0.0) throw BadParameters("ball radius must be nonnegative", {{"radius", radius}});
  std::vector<int> out;
  for (int i = 0; i < space.size(); ++i) {
    if (space.distance(center, i) <= radius) out.push_back(i);
  }
  return out;
}

double set_distance(const FiniteMetricSpace& space, int x, const std::vector<int>& members) {
  if (members.empty()) throw EmptySet("set_distance over an empty set", {{"x", x}});
  double best = std::numeric_limits<double>::infinity();
  for (int s : members) best = std::min(best, space.distance(x, s));
  return best;
}

}  // namespace snowembed
