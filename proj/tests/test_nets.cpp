#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "snowembed/errors.hpp"
#include "snowembed/generators.hpp"
#include "snowembed/nets.hpp"

using namespace snowembed;

namespace {

FiniteMetricSpace line_space(const std::vector<double>& pts) {
  const int n = static_cast<int>(pts.size());
  Eigen::MatrixXd d(n, n);
  std::vector<std::string> labels;
  for (int i = 0; i < n; ++i) {
    labels.push_back("p" + std::to_string(i));
    for (int j = 0; j < n; ++j) d(i, j) = std::abs(pts[i] - pts[j]);
  }
  return FiniteMetricSpace::validate(std::move(d), std::move(labels));
}

std::vector<int> ascending(const FiniteMetricSpace& s) {
  std::vector<int> out(static_cast<std::size_t>(s.size()));
  for (int i = 0; i < s.size(); ++i) out[static_cast<std::size_t>(i)] = i;
  return out;
}

}  // namespace

TEST_CASE("build_net greedy trace on a three-point line") {
  auto space = line_space({0.0, 0.4, 1.0});
  auto net = build_net(space, 0.5, ascending(space));
  CHECK(net.members == std::vector<int>{0, 2});
}

TEST_CASE("build_net degenerate radii") {
  auto space = line_space({0.0, 0.4, 1.0});
  CHECK(build_net(space, 1.5, ascending(space)).members == std::vector<int>{0});
  CHECK(build_net(space, 0.1, ascending(space)).members == std::vector<int>{0, 1, 2});
}

TEST_CASE("nets are separated and maximal on random trees") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto space = normalize_diameter(gen_space({Family::gw_tree, 30, 0, 0, 1.0, seed})).space;
    for (double r : {0.05, 0.15, 0.4}) {
      const auto net = build_net(space, r, ascending(space));
      for (std::size_t a = 0; a < net.members.size(); ++a) {
        for (std::size_t b = a + 1; b < net.members.size(); ++b) {
          CHECK(space.distance(net.members[a], net.members[b]) >= r);
        }
      }
      for (int x = 0; x < space.size(); ++x) {
        CHECK(set_distance(space, x, net.members) < r);
      }
    }
  }
}

TEST_CASE("color_net greedy traces") {
  auto tight = line_space({0.0, 0.01, 0.02});
  auto net = build_net(tight, 0.005, ascending(tight));
  REQUIRE(net.members.size() == 3);
  CHECK(color_net(tight, net, 0.5, 100, true).color == std::vector<int>{1, 2, 3});
  CHECK(color_net(tight, net, 0.001, 100, true).color == std::vector<int>{1, 1, 1});

  // chain: ends conflict with the middle but not with each other
  auto chain = line_space({0.0, 0.3, 0.6});
  auto cnet = build_net(chain, 0.05, ascending(chain));
  CHECK(color_net(chain, cnet, 0.4, 100, true).color == std::vector<int>{1, 2, 1});
}

TEST_CASE("color budget: strict aborts with a witness, practical grows") {
  auto tight = line_space({0.0, 0.01, 0.02});
  auto net = build_net(tight, 0.005, ascending(tight));
  try {
    color_net(tight, net, 0.5, 2, true);
    FAIL("expected BudgetExceeded");
  } catch (const BudgetExceeded& e) {
    CHECK(e.details().at("needed").get<int>() == 3);
    CHECK(e.details().at("member").get<int>() == 2);
  }
  const auto grown = color_net(tight, net, 0.5, 2, false);
  CHECK(grown.budget_grown);
  CHECK(grown.max_color == 3);
}

TEST_CASE("greedy color count obeys the pigeonhole bound") {
  for (std::uint64_t seed = 20; seed <= 26; ++seed) {
    auto space = normalize_diameter(gen_space({Family::gw_tree, 40, 0, 0, 1.0, seed})).space;
    const auto net = build_net(space, 0.02, ascending(space));
    const double sep = 0.2;
    const auto coloring = color_net(space, net, sep, 1000, true);
    int bound = 1;
    for (std::size_t j = 0; j < net.members.size(); ++j) {
      int earlier_close = 0;
      for (std::size_t i = 0; i < j; ++i) {
        if (space.distance(net.members[i], net.members[j]) <= sep) ++earlier_close;
      }
      bound = std::max(bound, earlier_close + 1);
    }
    CHECK(coloring.max_color <= bound);
  }
}

TEST_CASE("neighbor_count counts members in the closed ball") {
  auto space = line_space({0.0, 0.5, 1.0});
  auto net = build_net(space, 0.4, ascending(space));  // members {0, 1, 2}
  REQUIRE(net.members.size() == 3);
  CHECK(neighbor_count(space, net, 1, 0.6) == 3);
  auto two = build_net(space, 0.9, ascending(space));  // members {0, 2}
  REQUIRE(two.members == std::vector<int>{0, 2});
  CHECK(neighbor_count(space, two, 1, 0.6) == 2);
  CHECK(neighbor_count(space, two, 1, 0.2) == 0);
  CHECK(neighbor_count(space, two, 0, 0.1) == 1);
}

TEST_CASE("hierarchy levels bracket the diameter and check the separation scales") {
  auto space = normalize_diameter(gen_space({Family::interval, 16})).space;
  ParamOverrides ov;
  ov.tau = 0.2;
  const auto params =
      derive_params(0.75, 0.5, 1.2, 1.5, 0.5, 2, Mode::practical, 0.001, 1ll << 20,
                    LogBase::natural, ov);
  const auto h = build_hierarchy(space, params, NetOrder::input);
  CHECK(h.n0 == 0);
  CHECK(h.n == 2);
  CHECK(h.nets.front().members.size() == 1);  // r_{n0} = 1 covers everything
  for (const auto& net : h.nets) {
    const double sep = std::pow(net.radius, params.theta);
    if (net.radius < 1.0 && net.members.size() > 1) CHECK(sep > 2.0 * net.radius);
  }
}

TEST_CASE("farthest-point enumeration is stamped and changes the net") {
  auto space = normalize_diameter(gen_space({Family::interval, 9})).space;
  const auto input_order = enumeration_order(space, NetOrder::input);
  const auto fp_order = enumeration_order(space, NetOrder::farthest_point);
  CHECK(input_order.front() == 0);
  CHECK(fp_order.front() == 0);
  CHECK(fp_order != input_order);
  const auto a = build_net(space, 0.26, input_order);
  const auto b = build_net(space, 0.26, fp_order);
  CHECK(a.members != b.members);
}
