#include "snowembed/generators.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <queue>
#include <vector>

#include "snowembed/errors.hpp"

namespace snowembed {

int SplitMix64::geometric_half() {
  int base = 0;
  for (;;) {
    const std::uint64_t w = next();
    if (w != 0) return base + std::countr_zero(w);
    base += 64;  // astronomically unlikely; keep the distribution exact
  }
}

const char* family_name(Family f) {
  switch (f) {
    case Family::interval: return "interval";
    case Family::cantor: return "cantor";
    case Family::star: return "star";
    case Family::gw_tree: return "gw_tree";
    case Family::snowflake_of: return "snowflake_of";
  }
  return "?";
}

Family family_from_name(const std::string& name) {
  if (name == "interval") return Family::interval;
  if (name == "cantor") return Family::cantor;
  if (name == "star") return Family::star;
  if (name == "gw_tree") return Family::gw_tree;
  if (name == "snowflake_of") return Family::snowflake_of;
  throw BadParameters("unknown generator family: " + name);
}

namespace {

std::vector<std::string> index_labels(int n) {
  std::vector<std::string> labels(n);
  for (int i = 0; i < n; ++i) labels[i] = "p" + std::to_string(i);
  return labels;
}

FiniteMetricSpace from_line_points(const std::vector<double>& pts) {
  const int n = static_cast<int>(pts.size());
  Eigen::MatrixXd d(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) d(i, j) = std::abs(pts[i] - pts[j]);
  return FiniteMetricSpace::validate(std::move(d), index_labels(n));
}

FiniteMetricSpace gen_interval(int m) {
  if (m < 1) throw BadParameters("interval needs at least one point", {{"size", m}});
  std::vector<double> pts(m);
  if (m == 1) {
    pts[0] = 0.0;
  } else {
    for (int i = 0; i < m; ++i) pts[i] = static_cast<double>(i) / (m - 1);
  }
  return from_line_points(pts);
}

FiniteMetricSpace gen_cantor(int depth) {
  if (depth < 1 || depth > 10) {
    throw BadParameters("cantor depth must be in [1, 10]", {{"depth", depth}});
  }
  // Left endpoints of the 2^depth middle-thirds intervals.
  std::vector<double> pts{0.0};
  double pow3 = 1.0;
  for (int i = 1; i <= depth; ++i) {
    pow3 *= 3.0;
    const double step = 2.0 / pow3;
    const std::size_t count = pts.size();
    for (std::size_t p = 0; p < count; ++p) pts.push_back(pts[p] + step);
  }
  std::sort(pts.begin(), pts.end());
  return from_line_points(pts);
}

FiniteMetricSpace gen_star(int arms) {
  if (arms < 1 || arms > 62) throw BadParameters("star arms must be in [1, 62]", {{"arms", arms}});
  const int n = arms + 1;
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    const double li = std::ldexp(1.0, -i);  // arm i sits at distance 2^-i
    d(0, i) = d(i, 0) = li;
    for (int j = i + 1; j < n; ++j) {
      const double v = li + std::ldexp(1.0, -j);
      d(i, j) = d(j, i) = v;
    }
  }
  std::vector<std::string> labels(n);
  labels[0] = "center";
  for (int i = 1; i < n; ++i) labels[i] = "arm" + std::to_string(i);
  return FiniteMetricSpace::validate(std::move(d), std::move(labels));
}

// Critical Galton-Watson tree (geometric(1/2) offspring) conditioned on total
// progeny v, sampled by rejection with a fresh substream per attempt.
FiniteMetricSpace gen_gw_tree(int v, std::uint64_t seed) {
  if (v < 1 || v > 4096) throw BadParameters("gw_tree size must be in [1, 4096]", {{"size", v}});
  constexpr int kMaxAttempts = 10000;
  SplitMix64 base(seed);
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    SplitMix64 rng = base.split();
    std::vector<int> parent(1, -1);
    int born = 1;
    std::size_t next_to_breed = 0;
    bool overflow = false;
    while (next_to_breed < parent.size()) {
      const int children = rng.geometric_half();
      if (born + children > v) {
        overflow = true;
        break;
      }
      for (int c = 0; c < children; ++c) parent.push_back(static_cast<int>(next_to_breed));
      born += children;
      ++next_to_breed;
    }
    if (overflow || born != v) continue;

    std::vector<std::vector<int>> adj(v);
    for (int i = 1; i < v; ++i) {
      adj[i].push_back(parent[i]);
      adj[parent[i]].push_back(i);
    }
    Eigen::MatrixXd d(v, v);
    std::vector<int> hops(v);
    for (int s = 0; s < v; ++s) {
      std::fill(hops.begin(), hops.end(), -1);
      hops[s] = 0;
      std::queue<int> q;
      q.push(s);
      while (!q.empty()) {
        const int u = q.front();
        q.pop();
        for (int w : adj[u]) {
          if (hops[w] < 0) {
            hops[w] = hops[u] + 1;
            q.push(w);
          }
        }
      }
      for (int t = 0; t < v; ++t) d(s, t) = static_cast<double>(hops[t]);
    }
    return FiniteMetricSpace::validate(std::move(d), index_labels(v));
  }
  throw GenerationFailed("gw_tree rejection sampling failed",
                         {{"size", v}, {"seed", seed}, {"attempts", kMaxAttempts}});
}

}  // namespace

FiniteMetricSpace gen_space(const GeneratorSpec& spec) {
  switch (spec.family) {
    case Family::interval: return gen_interval(spec.size);
    case Family::cantor: return gen_cantor(spec.depth);
    case Family::star: return gen_star(spec.arms);
    case Family::gw_tree: return gen_gw_tree(spec.size, spec.seed);
    case Family::snowflake_of:
      throw BadParameters("snowflake_of needs an input space; use snowflake_of()");
  }
  throw BadParameters("unknown family");
}

FiniteMetricSpace snowflake_of(const FiniteMetricSpace& space, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw BadParameters("snowflake exponent must lie in (0, 1]", {{"alpha", alpha}});
  }
  if (alpha == 1.0) return space;
  const int n = space.size();
  Eigen::MatrixXd d(n, n);
  for (int i = 0; i < n; ++i) {
    d(i, i) = 0.0;
    for (int j = i + 1; j < n; ++j) {
      const double v = std::pow(space.distance(i, j), alpha);
      d(i, j) = d(j, i) = v;
    }
  }
  // d^alpha is a metric transform for alpha <= 1; validation re-checks anyway.
  return FiniteMetricSpace::validate(std::move(d), space.labels());
}

}  // namespace snowembed
