#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "snowembed/dimension.hpp"
#include "snowembed/errors.hpp"
#include "snowembed/generators.hpp"

using namespace snowembed;

namespace {

std::vector<int> all_points(const FiniteMetricSpace& space) {
  std::vector<int> out(static_cast<std::size_t>(space.size()));
  for (int i = 0; i < space.size(); ++i) out[static_cast<std::size_t>(i)] = i;
  return out;
}

FiniteMetricSpace single_point() {
  Eigen::MatrixXd d(1, 1);
  d << 0;
  return FiniteMetricSpace::validate(d, {"only"});
}

}  // namespace

TEST_CASE("covering_number exact matches hand-checked instances") {
  // points {0, 0.25, 0.5}: one ball of radius 0.3 at the midpoint covers all
  Eigen::MatrixXd d(3, 3);
  d << 0, 0.25, 0.5, 0.25, 0, 0.25, 0.5, 0.25, 0;
  auto space = FiniteMetricSpace::validate(d, {"a", "b", "c"});
  CHECK(covering_number(space, all_points(space), 0.3, CoverMethod::exact).count == 1);

  Eigen::MatrixXd two(2, 2);
  two << 0, 1, 1, 0;
  auto pair = FiniteMetricSpace::validate(two, {"a", "b"});
  CHECK(covering_number(pair, all_points(pair), 0.4, CoverMethod::exact).count == 2);
  CHECK(covering_number(pair, all_points(pair), 1.0, CoverMethod::exact).count == 1);
  CHECK(covering_number(pair, all_points(pair), 1.0, CoverMethod::greedy).count == 1);
}

TEST_CASE("exact covering is capped at 16 points") {
  auto space = gen_space({Family::interval, 17});
  CHECK_THROWS_AS(covering_number(space, all_points(space), 0.1, CoverMethod::exact),
                  ExactTooLarge);
}

TEST_CASE("greedy covers dominate the exact ones; exact equals brute force") {
  std::vector<FiniteMetricSpace> instances;
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    instances.push_back(gen_space({Family::gw_tree, 10, 0, 0, 1.0, seed}));
  }
  instances.push_back(gen_space({Family::interval, 9}));
  GeneratorSpec cantor;
  cantor.family = Family::cantor;
  cantor.depth = 3;
  instances.push_back(gen_space(cantor));
  for (const auto& space : instances) {
    const auto subset = all_points(space);
    for (double frac : {0.15, 0.3, 0.6}) {
      const double r = frac * space.diameter();
      const auto exact = covering_number(space, subset, r, CoverMethod::exact);
      const auto greedy = covering_number(space, subset, r, CoverMethod::greedy);
      const int oracle = oracles::brute_force_cover(space, subset, r);
      CHECK(exact.count == oracle);
      CHECK(greedy.count >= exact.count);
      CHECK(greedy.packing_lower <= exact.count);
      // when the packing bound meets the greedy cover the sandwich is tight
      if (greedy.packing_lower == greedy.count) CHECK(exact.count == greedy.count);
    }
  }
}

TEST_CASE("greedy covering counts are nonincreasing in the radius") {
  auto space = gen_space({Family::gw_tree, 40, 0, 0, 1.0, 17});
  const auto subset = all_points(space);
  int last = 1;
  for (double r = space.diameter(); r >= space.min_positive_distance() / 2; r /= 2) {
    const int c = covering_number(space, subset, r, CoverMethod::greedy).count;
    CHECK(c >= last);
    last = c;
  }
}

TEST_CASE("minkowski estimate: 1024-point interval is one-dimensional") {
  auto space = gen_space({Family::interval, 1024});
  std::vector<double> grid;
  for (int j = 2; j <= 7; ++j) grid.push_back(std::ldexp(1.0, -j));
  const auto est = estimate_minkowski(space, grid);
  CHECK(est.value == doctest::Approx(1.0).epsilon(0.05));
  // counts nondecreasing as r decreases
  for (std::size_t i = 1; i < est.scales_used.size(); ++i) {
    CHECK(est.scales_used[i].first < est.scales_used[i - 1].first);
    CHECK(est.scales_used[i].second >= est.scales_used[i - 1].second);
  }
}

TEST_CASE("minkowski estimate: depth-7 Cantor endpoints on a triadic grid") {
  GeneratorSpec spec;
  spec.family = Family::cantor;
  spec.depth = 7;
  auto space = gen_space(spec);
  CHECK(space.size() == 128);
  std::vector<double> grid;
  for (int m = 1; m <= 6; ++m) grid.push_back(std::pow(3.0, -m));
  const auto est = estimate_minkowski(space, grid);
  CHECK(est.value == doctest::Approx(std::log(2.0) / std::log(3.0)).epsilon(0.07 / 0.631));
}

TEST_CASE("minkowski estimate of a single point is zero") {
  const auto est = estimate_minkowski(single_point(), {});
  CHECK(est.value == 0.0);
  CHECK(est.fit_residual == 0.0);
}

TEST_CASE("minkowski estimate requires at least four scales") {
  auto space = gen_space({Family::interval, 16});
  CHECK_THROWS_AS(estimate_minkowski(space, {0.25, 0.125, 0.0625}), InsufficientScales);
}

TEST_CASE("minkowski slope is invariant under bi-Lipschitz rescaling") {
  auto space = gen_space({Family::interval, 256});
  Eigen::MatrixXd scaled = space.distances() * 3.0;
  auto rescaled = FiniteMetricSpace::validate(scaled, space.labels());
  std::vector<double> grid, grid3;
  for (int j = 2; j <= 7; ++j) {
    grid.push_back(std::ldexp(1.0, -j));
    grid3.push_back(3.0 * std::ldexp(1.0, -j));
  }
  const auto base = estimate_minkowski(space, grid);
  const auto moved = estimate_minkowski(rescaled, grid3);
  CHECK(moved.value == doctest::Approx(base.value).epsilon(1e-9));
}

TEST_CASE("assouad spectrum of an interval sample is about one") {
  auto space = gen_space({Family::interval, 1024});
  std::vector<double> grid;
  for (int h = 4; h <= 9; ++h) grid.push_back(std::pow(2.0, -h / 2.0));
  const auto est = estimate_assouad_spectrum(space, 0.5, grid);
  CHECK(est.value == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("assouad spectrum of a single point is zero; theta is range-checked") {
  CHECK(estimate_assouad_spectrum(single_point(), 0.5, {}).value == 0.0);
  auto space = gen_space({Family::interval, 8});
  CHECK_THROWS_AS(estimate_assouad_spectrum(space, 1.0, {0.25, 0.2, 0.15, 0.1}), ThetaOutOfRange);
}

TEST_CASE("star family: spectrum estimate sits strictly above the minkowski estimate") {
  GeneratorSpec spec;
  spec.family = Family::star;
  spec.arms = 12;
  auto space = gen_space(spec);
  const auto mink = estimate_minkowski(space, default_scale_grid(space));
  const auto spectrum =
      estimate_assouad_spectrum(space, 0.5, default_spectrum_grid(space, 0.5));
  CHECK(spectrum.value > mink.value);
  // regression fixtures for the generated instance
  CHECK(mink.value == doctest::Approx(0.27546711181471945).epsilon(1e-9));
  CHECK(spectrum.value == doctest::Approx(0.3029747343394051).epsilon(1e-9));
}

TEST_CASE("quasidoubling constant of a single point is one") {
  const auto est = estimate_quasidoubling_constant(single_point(), 0.5, 1.0);
  CHECK(est.C == 1.0);
  CHECK(est.witnesses.empty());
}

TEST_CASE("quasidoubling constant is at least one and reproducible") {
  Eigen::MatrixXd d(2, 2);
  d << 0, 0.5, 0.5, 0;
  auto pair = FiniteMetricSpace::validate(d, {"a", "b"});
  const auto est = estimate_quasidoubling_constant(pair, 0.5, 1.0);
  CHECK(est.C >= 1.0);
  const auto again = estimate_quasidoubling_constant(pair, 0.5, 1.0);
  CHECK(est.C == again.C);
  CHECK(est.witnesses.size() == again.witnesses.size());
}

TEST_CASE("quasidoubling witnesses validate against the returned constant") {
  auto space = gen_space({Family::interval, 64});
  const auto norm = normalize_diameter(space);
  const auto est = estimate_quasidoubling_constant(norm.space, 0.5, 1.2);
  CHECK(est.C >= 1.0);
  for (const auto& w : est.witnesses) {
    CHECK(quasidoubling_ratio(w.cover, w.lambda, w.R, est.theta, est.delta) <= est.C);
  }
  // deterministic grid evaluation: repeated runs agree bit-exactly
  const auto rerun = estimate_quasidoubling_constant(norm.space, 0.5, 1.2);
  CHECK(rerun.C == est.C);
}
