#include "snowembed/verification.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "snowembed/errors.hpp"
#include "snowembed/params.hpp"

namespace snowembed {

PairLevel pair_level(double d, double tau, int n0, int n) {
  if (!(d > 0.0)) throw BadParameters("pair distance must be positive", {{"d", d}});
  PairLevel out;
  out.k = n0;
  // Largest k with d <= 4 r_{k-1}; the scan is short since n is desk-scale.
  for (int k = n0; k <= n; ++k) {
    if (d <= 4.0 * scale_radius(tau, k - 1).value) out.k = k;
  }
  out.clamped = d <= 4.0 * scale_radius(tau, n).value;
  return out;
}

DistortionReport distortion_report(const FiniteMetricSpace& space, const Embedding& embedding,
                                   int threads) {
  if (space.content_hash() != embedding.metadata.space_hash) {
    throw SpaceMismatch("embedding was built on a different space",
                        {{"space_hash", space.content_hash()},
                         {"embedding_space_hash", embedding.metadata.space_hash}});
  }
  const auto& p = embedding.params;
  DistortionReport report;
  report.epsilon = p.epsilon;
  report.tau = p.tau;
  report.n0 = p.n0;
  report.n = p.n;
  report.threshold = 4.0 * scale_radius(p.tau, p.n).value;
  report.upper_constant = 5.0 * std::sqrt(static_cast<double>(p.N_colors)) *
                          std::pow(p.tau, -2.0 * (1.0 - p.epsilon));
  report.lower_constant = std::pow(p.tau, 5.0) / 8.0;
  report.mode = mode_name(p.mode);
  report.space_hash = embedding.metadata.space_hash;

  const int npts = space.size();
  const std::size_t pair_count = static_cast<std::size_t>(npts) * (npts - 1) / 2;
  report.pairs.resize(pair_count);

  auto fill = [&](std::size_t idx) {
    // Unrank idx -> (i, j) in lexicographic order.
    std::size_t i = 0;
    std::size_t offset = idx;
    std::size_t row = static_cast<std::size_t>(npts) - 1;
    while (offset >= row) {
      offset -= row;
      ++i;
      --row;
    }
    const std::size_t j = i + 1 + offset;
    PairRow r;
    r.i = static_cast<int>(i);
    r.j = static_cast<int>(j);
    r.d = space.distance(r.i, r.j);
    r.embedded = (embedding.coords.row(r.i) - embedding.coords.row(r.j)).norm();
    r.ratio = r.embedded / std::pow(r.d, p.epsilon);
    const auto lvl = pair_level(r.d, p.tau, p.n0, p.n);
    r.level = lvl.k;
    r.clamped = lvl.clamped;
    r.in_scope = r.d >= report.threshold;
    report.pairs[idx] = r;
  };

  if (threads <= 1 || pair_count < 2) {
    for (std::size_t idx = 0; idx < pair_count; ++idx) fill(idx);
  } else {
    const int workers = static_cast<int>(
        std::min<std::size_t>(pair_count, static_cast<std::size_t>(threads)));
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t idx = static_cast<std::size_t>(w); idx < pair_count;
             idx += static_cast<std::size_t>(workers)) {
          fill(idx);
        }
      });
    }
    for (auto& t : pool) t.join();
  }

  // Serial reduction over the materialized rows keeps the report independent
  // of the thread count.
  report.worst_upper = 0.0;
  report.worst_lower = 0.0;
  bool first_in_scope = true;
  for (const auto& r : report.pairs) {
    report.worst_upper = std::max(report.worst_upper, r.ratio);
    if (r.in_scope) {
      ++report.in_scope_pairs;
      if (first_in_scope || r.ratio < report.worst_lower) report.worst_lower = r.ratio;
      first_in_scope = false;
      if (r.ratio < report.lower_constant * (1.0 - report.slack)) report.pass = false;
    }
    if (r.ratio > report.upper_constant * (1.0 + report.slack)) report.pass = false;
  }
  return report;
}

double lipschitz_norm(const std::function<Eigen::VectorXd(int)>& point_function,
                      const FiniteMetricSpace& space, double exponent) {
  if (space.size() < 2) {
    throw DegenerateSpace("lipschitz_norm needs at least two points", {{"points", space.size()}});
  }
  std::vector<Eigen::VectorXd> values;
  values.reserve(static_cast<std::size_t>(space.size()));
  for (int i = 0; i < space.size(); ++i) values.push_back(point_function(i));
  double best = 0.0;
  for (int i = 0; i < space.size(); ++i) {
    for (int j = i + 1; j < space.size(); ++j) {
      const double d = space.distance(i, j);
      best = std::max(best, (values[static_cast<std::size_t>(i)] - values[static_cast<std::size_t>(j)]).norm() /
                                std::pow(d, exponent));
    }
  }
  return best;
}

}  // namespace snowembed
