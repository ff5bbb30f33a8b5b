#include "snowembed/dimension.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>

#include "snowembed/errors.hpp"

namespace snowembed {

namespace {

// Greedy cover count with early stop: walks the farthest-point traversal only
// until the covering radius drops to r.
int greedy_cover_count(const FiniteMetricSpace& space, const std::vector<int>& subset, double r) {
  const int n = static_cast<int>(subset.size());
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  int count = 0;
  int next = 0;  // first element of the subset seeds the traversal
  double next_radius = std::numeric_limits<double>::infinity();
  while (next_radius > r) {
    ++count;
    const int c = subset[next];
    next_radius = -1.0;
    next = -1;
    for (int t = 0; t < n; ++t) {
      dist[t] = std::min(dist[t], space.distance(c, subset[t]));
      if (dist[t] > next_radius) {
        next_radius = dist[t];
        next = t;
      }
    }
  }
  return count;
}

int greedy_packing_count(const FiniteMetricSpace& space, const std::vector<int>& subset, double r) {
  // Scan in order, keeping points strictly more than 2r from everything kept.
  std::vector<int> kept;
  for (int p : subset) {
    bool far = true;
    for (int q : kept) {
      if (space.distance(p, q) <= 2.0 * r) {
        far = false;
        break;
      }
    }
    if (far) kept.push_back(p);
  }
  return static_cast<int>(kept.size());
}

struct ExactCoverSolver {
  std::vector<std::uint32_t> masks;  // deduplicated coverage patterns
  std::uint32_t full;
  int best;

  void search(std::uint32_t covered, int used) {
    if (used >= best) return;
    if (covered == full) {
      best = used;
      return;
    }
    int lowest = std::countr_one(covered);  // first uncovered subset point
    const std::uint32_t need = 1u << lowest;
    for (const std::uint32_t m : masks) {
      if (m & need) search(covered | m, used + 1);
    }
  }
};

int exact_cover_count(const FiniteMetricSpace& space, const std::vector<int>& subset, double r,
                      int greedy_upper) {
  const int n = static_cast<int>(subset.size());
  std::vector<std::uint32_t> masks;
  for (int c = 0; c < space.size(); ++c) {
    std::uint32_t m = 0;
    for (int t = 0; t < n; ++t) {
      if (space.distance(c, subset[t]) <= r) m |= (1u << t);
    }
    if (m != 0) masks.push_back(m);
  }
  // Drop dominated patterns, keep the rest ordered by coverage size.
  std::sort(masks.begin(), masks.end(),
            [](std::uint32_t a, std::uint32_t b) { return std::popcount(a) > std::popcount(b); });
  std::vector<std::uint32_t> pruned;
  for (const std::uint32_t m : masks) {
    bool dominated = false;
    for (const std::uint32_t p : pruned) {
      if ((m & p) == m) {
        dominated = true;
        break;
      }
    }
    if (!dominated) pruned.push_back(m);
  }
  ExactCoverSolver solver{std::move(pruned), (n == 32) ? ~0u : ((1u << n) - 1), greedy_upper};
  solver.search(0, 0);
  return solver.best;
}

struct LineFit {
  double slope = 0.0;
  double max_residual = 0.0;
};

LineFit ols(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  LineFit fit;
  fit.slope = (sxx > 0.0) ? sxy / sxx : 0.0;
  const double intercept = my - fit.slope * mx;
  for (std::size_t i = 0; i < x.size(); ++i) {
    fit.max_residual = std::max(fit.max_residual, std::abs(y[i] - (intercept + fit.slope * x[i])));
  }
  return fit;
}

std::vector<double> clean_grid(std::vector<double> grid) {
  std::sort(grid.begin(), grid.end(), std::greater<double>());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  for (double r : grid) {
    if (!(r > 0.0)) throw BadParameters("scale grid entries must be positive", {{"r", r}});
  }
  if (grid.size() < 4) {
    throw InsufficientScales("need at least 4 scales", {{"scales", grid.size()}});
  }
  return grid;
}

}  // namespace

GreedyPermutation greedy_permutation(const FiniteMetricSpace& space,
                                     const std::vector<int>& subset) {
  if (subset.empty()) throw EmptySet("greedy permutation of an empty subset");
  const int n = static_cast<int>(subset.size());
  GreedyPermutation gp;
  gp.order.reserve(n);
  gp.radii.reserve(n);
  gp.order.push_back(subset[0]);
  gp.radii.push_back(std::numeric_limits<double>::infinity());
  std::vector<double> dist(n);
  for (int t = 0; t < n; ++t) dist[t] = space.distance(subset[0], subset[t]);
  for (int step = 1; step < n; ++step) {
    int best = -1;
    double bd = -1.0;
    for (int t = 0; t < n; ++t) {
      if (dist[t] > bd) {
        bd = dist[t];
        best = t;
      }
    }
    gp.order.push_back(subset[best]);
    gp.radii.push_back(bd);
    for (int t = 0; t < n; ++t) dist[t] = std::min(dist[t], space.distance(subset[best], subset[t]));
  }
  return gp;
}

CoveringCount covering_number(const FiniteMetricSpace& space, const std::vector<int>& subset,
                              double r, CoverMethod method) {
  if (subset.empty()) throw EmptySet("covering_number of an empty subset");
  if (!(r > 0.0)) throw BadParameters("covering radius must be positive", {{"r", r}});
  CoveringCount out;
  out.packing_lower = greedy_packing_count(space, subset, r);
  out.count = greedy_cover_count(space, subset, r);
  out.method = method;
  if (method == CoverMethod::exact) {
    if (subset.size() > 16) {
      throw ExactTooLarge("exact cover capped at 16 points", {{"subset", subset.size()}});
    }
    out.count = exact_cover_count(space, subset, r, out.count);
  }
  return out;
}

std::vector<double> default_scale_grid(const FiniteMetricSpace& space) {
  std::vector<double> grid;
  const double lo = space.min_positive_distance();
  const double hi = space.diameter();
  for (int j = 2; j <= 10; ++j) {
    const double r = std::ldexp(1.0, -j);
    if (r >= lo && r <= hi) grid.push_back(r);
  }
  return grid;
}

DimensionEstimate estimate_minkowski(const FiniteMetricSpace& space,
                                     const std::vector<double>& scale_grid) {
  DimensionEstimate est;
  est.method = CoverMethod::greedy;
  if (space.size() <= 1 || space.diameter() == 0.0) return est;  // N_r is identically 1

  const auto grid = clean_grid(scale_grid);
  std::vector<int> all(space.size());
  for (int i = 0; i < space.size(); ++i) all[i] = i;
  const auto gp = greedy_permutation(space, all);

  std::vector<double> xs, ys;
  for (double r : grid) {
    int count = 0;
    for (double rad : gp.radii) {
      if (rad > r) ++count;
    }
    est.scales_used.emplace_back(r, count);
    xs.push_back(std::log(1.0 / r));
    ys.push_back(std::log(static_cast<double>(count)));
  }
  const auto fit = ols(xs, ys);
  est.value = std::max(0.0, fit.slope);
  est.fit_residual = fit.max_residual;
  return est;
}

std::vector<double> default_spectrum_grid(const FiniteMetricSpace& space, double theta) {
  std::vector<double> grid;
  const double lo = std::pow(space.min_positive_distance(), theta);
  const double hi = space.diameter();
  for (int j = 2; j <= 10; ++j) {
    const double R = std::ldexp(1.0, -j);
    if (R >= lo && R <= hi) grid.push_back(R);
  }
  return grid;
}

DimensionEstimate estimate_assouad_spectrum(const FiniteMetricSpace& space, double theta,
                                            const std::vector<double>& R_grid) {
  if (!(theta > 0.0 && theta < 1.0)) {
    throw ThetaOutOfRange("theta must lie in (0, 1)", {{"theta", theta}});
  }
  DimensionEstimate est;
  est.method = CoverMethod::greedy;
  if (space.size() <= 1 || space.diameter() == 0.0) return est;

  const auto grid = clean_grid(R_grid);
  for (double R : grid) {
    if (!(R < 1.0)) throw BadParameters("spectrum scales must satisfy R < 1", {{"R", R}});
  }

  std::vector<double> xs, ys;
  for (double R : grid) {
    const double r = std::pow(R, 1.0 / theta);
    int sup = 0;
    for (int x = 0; x < space.size(); ++x) {
      const auto ball = ball_members(space, x, R);
      sup = std::max(sup, greedy_cover_count(space, ball, r));
    }
    est.scales_used.emplace_back(R, sup);
    xs.push_back(std::log(R / r));
    ys.push_back(std::log(static_cast<double>(sup)));
  }
  const auto fit = ols(xs, ys);
  est.value = std::max(0.0, fit.slope);
  est.fit_residual = fit.max_residual;
  return est;
}

double quasidoubling_ratio(int cover, double lambda, double R, double theta, double delta) {
  return static_cast<double>(cover) /
         (std::pow(lambda, delta) * std::pow(R, (1.0 - 1.0 / theta) * delta));
}

QuasidoublingEstimate estimate_quasidoubling_constant(const FiniteMetricSpace& space, double theta,
                                                      double delta,
                                                      const QuasidoublingOptions& opts) {
  if (!(theta > 0.0 && theta < 1.0)) {
    throw ThetaOutOfRange("theta must lie in (0, 1)", {{"theta", theta}});
  }
  if (!(delta > 0.0)) throw BadParameters("delta must be positive", {{"delta", delta}});

  QuasidoublingEstimate est;
  est.theta = theta;
  est.delta = delta;
  est.C = 1.0;
  if (space.size() <= 1) return est;

  std::vector<std::pair<double, double>> samples;
  const auto grid = opts.R_grid.empty() ? default_scale_grid(space) : opts.R_grid;
  for (double R : grid) {
    for (double lambda : opts.lambdas) {
      if (lambda * R < 1.0) samples.emplace_back(R, lambda);
    }
  }
  for (const auto& [R, lambda] : opts.extra) {
    if (lambda * R < 1.0) samples.emplace_back(R, lambda);
  }

  for (const auto& [R, lambda] : samples) {
    const double r = std::pow(R, 1.0 / theta);
    int worst = 0;
    int worst_x = 0;
    for (int x = 0; x < space.size(); ++x) {
      const auto ball = ball_members(space, x, lambda * R);
      const int c = greedy_cover_count(space, ball, r);
      if (c > worst) {
        worst = c;
        worst_x = x;
      }
    }
    est.witnesses.push_back({worst_x, R, lambda, worst});
    est.C = std::max(est.C, quasidoubling_ratio(worst, lambda, R, theta, delta));
  }
  return est;
}

}  // namespace snowembed
