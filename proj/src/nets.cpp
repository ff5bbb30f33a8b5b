#include "snowembed/nets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "snowembed/dimension.hpp"
#include "snowembed/errors.hpp"

namespace snowembed {

const char* net_order_name(NetOrder o) {
  return o == NetOrder::input ? "input" : "farthest_point";
}

NetOrder net_order_from_name(const std::string& name) {
  if (name == "input") return NetOrder::input;
  if (name == "farthest_point") return NetOrder::farthest_point;
  throw BadParameters("unknown net order: " + name);
}

std::vector<int> enumeration_order(const FiniteMetricSpace& space, NetOrder order) {
  std::vector<int> out(space.size());
  for (int i = 0; i < space.size(); ++i) out[i] = i;
  if (order == NetOrder::farthest_point && space.size() > 1) {
    out = greedy_permutation(space, out).order;
  }
  return out;
}

Net build_net(const FiniteMetricSpace& space, double r, const std::vector<int>& order, int level) {
  if (!(r > 0.0)) throw BadParameters("net radius must be positive", {{"r", r}});
  Net net;
  net.level = level;
  net.radius = r;
  for (int p : order) {
    bool separated = true;
    for (int q : net.members) {
      if (space.distance(p, q) < r) {
        separated = false;
        break;
      }
    }
    if (separated) net.members.push_back(p);
  }
  return net;
}

Coloring color_net(const FiniteMetricSpace& space, const Net& net, double sep, long long budget,
                   bool strict) {
  if (budget < 1) throw BadParameters("color budget must be >= 1", {{"budget", budget}});
  Coloring out;
  out.separation = sep;
  const int m = static_cast<int>(net.members.size());
  out.color.reserve(m);
  std::vector<char> used;
  for (int idx = 0; idx < m; ++idx) {
    used.assign(static_cast<std::size_t>(out.max_color) + 2, 0);
    for (int prev = 0; prev < idx; ++prev) {
      if (space.distance(net.members[prev], net.members[idx]) <= sep) {
        used[static_cast<std::size_t>(out.color[prev])] = 1;
      }
    }
    int c = 1;
    while (used[static_cast<std::size_t>(c)]) ++c;
    if (c > budget) {
      if (strict) {
        throw BudgetExceeded("greedy coloring exceeded the color budget",
                             {{"level", net.level},
                              {"member", net.members[idx]},
                              {"needed", c},
                              {"budget", budget}});
      }
      out.budget_grown = true;
    }
    out.color.push_back(c);
    out.max_color = std::max(out.max_color, c);
  }
  return out;
}

int neighbor_count(const FiniteMetricSpace& space, const Net& net, int x, double radius) {
  if (!(radius > 0.0)) throw BadParameters("radius must be positive", {{"radius", radius}});
  int count = 0;
  for (int j : net.members) {
    if (space.distance(j, x) <= radius) ++count;
  }
  return count;
}

NetHierarchy build_hierarchy(const FiniteMetricSpace& space, const EmbeddingParams& params,
                             NetOrder order) {
  if (params.n <= params.n0) throw BadParameters("need n > n0", {{"n0", params.n0}, {"n", params.n}});
  NetHierarchy h;
  h.n0 = params.n0;
  h.n = params.n;
  h.order = order;
  const auto enumeration = enumeration_order(space, order);
  const bool strict = params.mode == Mode::strict;
  const long long budget =
      params.colors_deferred ? std::numeric_limits<long long>::max() : params.N_colors;

  for (int k = params.n0; k <= params.n; ++k) {
    const double r = scale_radius(params.tau, k).value;
    const double sep = std::pow(r, params.theta);
    Net net = build_net(space, r, enumeration, k);
    // Downstream disjointness of the bump supports needs sep > 2r; at r = 1
    // the two scales coincide exactly and the net is a single point.
    if (r == 1.0) {
      if (sep != 1.0 || net.members.size() != 1) {
        throw BadParameters("level with r = 1 must have sep = 1 and a single net point",
                            {{"level", k}});
      }
    } else if (net.members.size() > 1 && !(sep > 2.0 * r)) {
      throw BadParameters("separation radius r^theta must exceed 2r at populated levels",
                          {{"level", k}, {"r", r}, {"sep", sep}});
    }
    Coloring coloring = color_net(space, net, sep, budget, strict);
    h.max_color_used = std::max(h.max_color_used, coloring.max_color);
    h.nets.push_back(std::move(net));
    h.colorings.push_back(std::move(coloring));
  }
  return h;
}

}  // namespace snowembed
