#pragma once

#include <utility>
#include <vector>

#include "snowembed/metric_space.hpp"

namespace snowembed {

enum class CoverMethod { greedy, exact };

struct CoveringCount {
  int count = 0;          // greedy: upper bound; exact: true minimum
  int packing_lower = 0;  // size of a 2r-separated packing, a lower bound
  CoverMethod method = CoverMethod::greedy;
};

/// Minimal (exact) or farthest-point-greedy number of closed balls of radius r,
/// centered at points of the space, needed to cover the subset. The exact
/// branch-and-bound is capped at |subset| <= 16 (ExactTooLarge beyond).
CoveringCount covering_number(const FiniteMetricSpace& space, const std::vector<int>& subset,
                              double r, CoverMethod method);

/// Farthest-point traversal of the subset starting from its first element.
/// radii[i] is the distance of order[i] to the previously chosen points
/// (radii[0] = +inf); covering counts at any radius are threshold counts on it.
struct GreedyPermutation {
  std::vector<int> order;
  std::vector<double> radii;
};
GreedyPermutation greedy_permutation(const FiniteMetricSpace& space, const std::vector<int>& subset);

struct DimensionEstimate {
  double value = 0.0;                               // fitted exponent
  std::vector<std::pair<double, int>> scales_used;  // (r, count), r strictly decreasing
  double fit_residual = 0.0;                        // max |log residual| of the OLS fit
  CoverMethod method = CoverMethod::greedy;
};

/// Geometric default grid 2^-2 .. 2^-10 clipped to [min positive distance, diameter].
std::vector<double> default_scale_grid(const FiniteMetricSpace& space);

/// Least-squares slope of log N_r(X) against log(1/r). Needs >= 4 scales.
DimensionEstimate estimate_minkowski(const FiniteMetricSpace& space,
                                     const std::vector<double>& scale_grid);

/// Default R grid for the spectrum estimator: the geometric grid clipped so
/// that r = R^(1/theta) stays above the minimum positive distance.
std::vector<double> default_spectrum_grid(const FiniteMetricSpace& space, double theta);

/// Slope fit of log sup_x N_{R^(1/theta)}(B(x,R)) against log(R / R^(1/theta)).
DimensionEstimate estimate_assouad_spectrum(const FiniteMetricSpace& space, double theta,
                                            const std::vector<double>& R_grid);

struct QuasidoublingWitness {
  int x = 0;          // worst center for this (R, lambda) sample
  double R = 0.0;
  double lambda = 1.0;
  int cover = 0;      // greedy cover size of B(x, lambda R) by radius R^(1/theta) balls
};

struct QuasidoublingEstimate {
  double theta = 0.0;
  double delta = 0.0;
  double C = 1.0;  // max over samples of cover / (lambda^delta R^((1-1/theta) delta)), floored at 1
  std::vector<QuasidoublingWitness> witnesses;
};

struct QuasidoublingOptions {
  std::vector<double> R_grid;                       // default: default_scale_grid
  std::vector<double> lambdas{1.0, 2.0, 4.0};       // filtered to lambda*R < 1
  std::vector<std::pair<double, double>> extra;     // additional (R, lambda) samples
};

QuasidoublingEstimate estimate_quasidoubling_constant(const FiniteMetricSpace& space, double theta,
                                                      double delta,
                                                      const QuasidoublingOptions& opts = {});

/// cover / (lambda^delta R^((1-1/theta) delta)) exactly as the estimator
/// computes it; exposed so stored witnesses can be re-validated bit-exactly.
double quasidoubling_ratio(int cover, double lambda, double R, double theta, double delta);

}  // namespace snowembed
